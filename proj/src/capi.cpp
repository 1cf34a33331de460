#include "greybox/greybox.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <new>
#include <numbers>
#include <string>

#include "greybox/analysis.hpp"
#include "greybox/errors.hpp"
#include "greybox/json_report.hpp"
#include "greybox/netfile.hpp"
#include "greybox/report.hpp"
#include "greybox/spectrum_io.hpp"
#include "greybox/vecfit.hpp"

struct gb_network {
    greybox::NetworkModel model;
    greybox::Tolerances tol;
};

namespace {

thread_local std::string last_error;

template <class F>
gb_status guarded(F&& body) {
    last_error.clear();
    try {
        body();
        return GB_OK;
    } catch (const greybox::ParseError& e) {
        last_error = e.what();
        return GB_ERR_PARSE;
    } catch (const greybox::UsageError& e) {
        last_error = e.what();
        return GB_ERR_USAGE;
    } catch (const greybox::NumericalError& e) {
        last_error = e.what();
        return GB_ERR_NUMERICAL;
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
    } catch (const std::exception& e) {
        last_error = e.what();
    } catch (...) {
        last_error = "unknown error";
    }
    return GB_ERR_INTERNAL;
}

char* copy_out(const std::string& s) {
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (!p) throw std::bad_alloc();
    std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

void require(const void* p, const char* what) {
    if (!p) throw greybox::UsageError(std::string(what) + " must not be null");
}

double unit_to_hz(const greybox::NetworkModel& net) {
    return net.frequency_unit == "rads" ? 0.5 / std::numbers::pi : 1.0;
}

struct Selected {
    greybox::Mode mode;
    std::size_t index;
};

Selected select(const gb_network* net, const char* selector) {
    const auto modes = greybox::listed_modes(greybox::find_modes(greybox::build_ynodal(net->model), net->tol));
    const std::size_t index = greybox::select_mode(modes, selector ? selector : "", unit_to_hz(net->model));
    if (modes[index].mode.near_repeated) throw greybox::NumericalError("near-repeated mode; sensitivity theory inapplicable");
    return {modes[index].mode, index};
}

std::string plot_data(const greybox::ScanResult& scan) {
    std::string out = "# freq_hz abs_z\n";
    char buf[64];
    for (std::size_t j = 0; j < scan.freq_hz.size(); ++j) {
        std::snprintf(buf, sizeof buf, "%.12g %.12g\n", scan.freq_hz[j], std::abs(scan.values[j]));
        out += buf;
    }
    return out;
}

}  // namespace

extern "C" {

const char* gb_version(void) { return "0.1.0"; }

const char* gb_last_error(void) { return last_error.c_str(); }

void gb_free_string(char* s) { std::free(s); }

gb_status gb_network_load(const char* path, gb_network** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = nullptr;
        auto* net = new gb_network{greybox::load_network(path), {}};
        *out = net;
    });
}

gb_status gb_network_parse(const char* text, gb_network** out) {
    return guarded([&] {
        require(text, "text");
        require(out, "out");
        *out = nullptr;
        auto* net = new gb_network{greybox::parse_network(text), {}};
        *out = net;
    });
}

void gb_network_free(gb_network* net) { delete net; }

gb_status gb_network_serialize(const gb_network* net, char** out) {
    return guarded([&] {
        require(net, "network");
        require(out, "out");
        *out = copy_out(greybox::serialize_network(net->model));
    });
}

gb_status gb_network_port_count(const gb_network* net, int* out) {
    return guarded([&] {
        require(net, "network");
        require(out, "out");
        *out = net->model.port_count();
    });
}

gb_status gb_network_set_tolerances(gb_network* net, const char* overrides) {
    return guarded([&] {
        require(net, "network");
        greybox::Tolerances tol;
        if (overrides) tol.apply(overrides);
        net->tol = tol;
    });
}

gb_status gb_modes_json(const gb_network* net, char** out) {
    return guarded([&] {
        require(net, "network");
        require(out, "out");
        const auto modes = greybox::find_modes(greybox::build_ynodal(net->model), net->tol);
        *out = copy_out(greybox::dump_json(greybox::modes_json(greybox::listed_modes(modes))));
    });
}

gb_status gb_greybox_json(const gb_network* net, const char* mode, double fraction, char** out) {
    return guarded([&] {
        require(net, "network");
        require(out, "out");
        const Selected sel = select(net, mode);
        const greybox::Mode full = greybox::mode_artifacts(greybox::build_ynodal(net->model), sel.mode.lambda, net->tol);
        const auto report = greybox::greybox_report(net->model, full, fraction, net->tol);
        *out = copy_out(greybox::dump_json(greybox::greybox_json(net->model, report, sel.index)));
    });
}

gb_status gb_tune_json(const gb_network* net, const char* mode, const char* component, const char* param,
                       double fraction, char** out) {
    return guarded([&] {
        require(net, "network");
        require(component, "component");
        require(param, "param");
        require(out, "out");
        const Selected sel = select(net, mode);
        const auto result = greybox::tune_parameter(net->model, sel.mode.lambda, component, param, fraction, net->tol);
        greybox::Json doc = greybox::tune_json(result);
        doc["mode_index"] = sel.index;
        *out = copy_out(greybox::dump_json(doc));
    });
}

gb_status gb_scan(const gb_network* net, double fmin, double fmax, int points, int row, int col, char** csv,
                  char** peaks_json, char** plot) {
    if (csv) *csv = nullptr;
    if (peaks_json) *peaks_json = nullptr;
    if (plot) *plot = nullptr;
    return guarded([&] {
        require(net, "network");
        const double scale = unit_to_hz(net->model);
        const auto scan = greybox::scan_zsys(net->model, fmin * scale, fmax * scale, points, row - 1, col - 1);
        std::string a = csv ? greybox::format_spectrum(scan.freq_hz, scan.values) : std::string();
        std::string b = peaks_json ? greybox::dump_json(greybox::scan_peaks_json(scan, row - 1, col - 1)) : std::string();
        std::string c = plot ? plot_data(scan) : std::string();
        char* pa = csv ? copy_out(a) : nullptr;
        char* pb = nullptr;
        char* pc = nullptr;
        try {
            pb = peaks_json ? copy_out(b) : nullptr;
            pc = plot ? copy_out(c) : nullptr;
        } catch (...) {
            std::free(pa);
            std::free(pb);
            throw;
        }
        if (csv) *csv = pa;
        if (peaks_json) *peaks_json = pb;
        if (plot) *plot = pc;
    });
}

gb_status gb_scan_all(const gb_network* net, double fmin, double fmax, int points, const char* dir) {
    return guarded([&] {
        require(net, "network");
        require(dir, "dir");
        if (!std::filesystem::is_directory(dir)) throw greybox::UsageError(std::string("not a directory: ") + dir);
        const double scale = unit_to_hz(net->model);
        const int dim = net->model.port_count();
        for (int r = 0; r < dim; ++r) {
            for (int c = 0; c < dim; ++c) {
                const auto scan = greybox::scan_zsys(net->model, fmin * scale, fmax * scale, points, r, c);
                const auto path = std::filesystem::path(dir) / greybox::spectrum_filename(r, c);
                std::ofstream os(path, std::ios::binary);
                os << greybox::format_spectrum(scan.freq_hz, scan.values);
                if (!os) throw greybox::UsageError("cannot write " + path.string());
            }
        }
    });
}

gb_status gb_fit_json(const char* dir, int order, int iterations, char** out) {
    return guarded([&] {
        require(dir, "dir");
        require(out, "out");
        const auto samples = greybox::load_spectrum_dir(dir);
        *out = copy_out(greybox::dump_json(greybox::fit_json(greybox::fit(samples, order, iterations))));
    });
}

}  // extern "C"
