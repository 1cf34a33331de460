/* C interface to the greybox modal-analysis library. */
#ifndef GREYBOX_GREYBOX_H
#define GREYBOX_GREYBOX_H

#if defined(GREYBOX_BUILDING_LIBRARY)
#define GB_API __attribute__((visibility("default")))
#else
#define GB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gb_status {
    GB_OK = 0,
    GB_ERR_PARSE = 2,
    GB_ERR_USAGE = 3,
    GB_ERR_NUMERICAL = 4,
    GB_ERR_INTERNAL = 5
} gb_status;

typedef struct gb_network gb_network;

GB_API const char* gb_version(void);

/* Message of the last failed call on this thread; empty after success. */
GB_API const char* gb_last_error(void);

/* Frees strings returned through char** out-parameters. */
GB_API void gb_free_string(char* s);

GB_API gb_status gb_network_load(const char* path, gb_network** out);
GB_API gb_status gb_network_parse(const char* text, gb_network** out);
GB_API void gb_network_free(gb_network* net);
GB_API gb_status gb_network_serialize(const gb_network* net, char** out);
GB_API gb_status gb_network_port_count(const gb_network* net, int* out);

/* Overrides such as "repeated=1e-5,significance=0.1"; NULL or "" resets to defaults. */
GB_API gb_status gb_network_set_tolerances(gb_network* net, const char* overrides);

/* JSON documents. Selectors follow the CLI grammar; NULL or "" picks the
 * least-damped oscillatory mode. Fractions are relative (0.05 = 5%). */
GB_API gb_status gb_modes_json(const gb_network* net, char** out);
GB_API gb_status gb_greybox_json(const gb_network* net, const char* mode, double fraction, char** out);
GB_API gb_status gb_tune_json(const gb_network* net, const char* mode, const char* component, const char* param,
                              double fraction, char** out);

/* Z_sys(row, col), 1-based ports, on a log grid between fmin and fmax given
 * in the network's frequency unit. Any of csv, peaks_json and plot may be NULL. */
GB_API gb_status gb_scan(const gb_network* net, double fmin, double fmax, int points, int row, int col, char** csv,
                         char** peaks_json, char** plot);

/* Writes Z_<k>_<i>.csv for every entry of Z_sys into an existing dir. */
GB_API gb_status gb_scan_all(const gb_network* net, double fmin, double fmax, int points, const char* dir);

/* Vector fit of the Z_<k>_<i>.csv spectra in dir. */
GB_API gb_status gb_fit_json(const char* dir, int order, int iterations, char** out);

#ifdef __cplusplus
}
#endif

#endif
