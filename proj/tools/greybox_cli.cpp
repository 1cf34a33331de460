#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "greybox/greybox.h"

namespace {

struct Failure {
    int code;
};

void check(gb_status status) {
    if (status != GB_OK) {
        std::cerr << "error: " << gb_last_error() << "\n";
        throw Failure{static_cast<int>(status)};
    }
}

[[noreturn]] void usage(const std::string& msg) {
    std::cerr << "error: " << msg << "\n";
    throw Failure{GB_ERR_USAGE};
}

struct OwnedString {
    char* p = nullptr;
    ~OwnedString() { gb_free_string(p); }
    std::string str() const { return p ? p : ""; }
};

struct Network {
    gb_network* p = nullptr;
    explicit Network(const std::string& path) {
        check(gb_network_load(path.c_str(), &p));
        if (const char* tol = std::getenv("GREYBOX_TOL")) check(gb_network_set_tolerances(p, tol));
    }
    ~Network() { gb_network_free(p); }
};

void write_file(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    os << text;
    if (!os) usage("cannot write " + path);
}

struct Options {
    std::string file;
    std::string mode;
    double fraction_pct = 1.0;
    double fmin = 0.0;
    double fmax = 0.0;
    int points = 200;
    std::string entry = "1,1";
    std::string out;
    std::string out_dir;
    std::string peaks_json;
    std::string plot_data;
    int order = 0;
    int iters = 10;
    std::string param;
    double pct = 0.0;
};

std::pair<int, int> parse_entry(const std::string& s) {
    int k = 0, i = 0;
    char tail = 0;
    if (std::sscanf(s.c_str(), "%d,%d%c", &k, &i, &tail) != 2) usage("--entry expects k,i (1-based), got '" + s + "'");
    return {k, i};
}

void run_modes(const Options& o) {
    Network net(o.file);
    OwnedString out;
    check(gb_modes_json(net.p, &out.p));
    std::cout << out.str();
}

void run_greybox(const Options& o) {
    Network net(o.file);
    OwnedString out;
    check(gb_greybox_json(net.p, o.mode.c_str(), o.fraction_pct / 100.0, &out.p));
    std::cout << out.str();
}

void run_scan(const Options& o) {
    Network net(o.file);
    if (!o.out_dir.empty()) check(gb_scan_all(net.p, o.fmin, o.fmax, o.points, o.out_dir.c_str()));
    const auto [k, i] = parse_entry(o.entry);
    OwnedString csv, peaks, plot;
    check(gb_scan(net.p, o.fmin, o.fmax, o.points, k, i, &csv.p, &peaks.p, o.plot_data.empty() ? nullptr : &plot.p));
    if (!o.plot_data.empty()) write_file(o.plot_data, plot.str());
    if (!o.peaks_json.empty()) write_file(o.peaks_json, peaks.str());
    if (!o.out.empty()) {
        write_file(o.out, csv.str());
        if (o.peaks_json.empty()) std::cout << peaks.str();
    } else if (o.out_dir.empty()) {
        std::cout << csv.str();
    } else if (o.peaks_json.empty()) {
        std::cout << peaks.str();
    }
}

void run_fit(const Options& o) {
    OwnedString out;
    check(gb_fit_json(o.file.c_str(), o.order, o.iters, &out.p));
    std::cout << out.str();
}

void run_tune(const Options& o) {
    const auto dot = o.param.rfind('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == o.param.size())
        usage("--param expects component.param, got '" + o.param + "'");
    Network net(o.file);
    OwnedString out;
    check(gb_tune_json(net.p, o.mode.c_str(), o.param.substr(0, dot).c_str(), o.param.substr(dot + 1).c_str(),
                       o.pct / 100.0, &out.p));
    std::cout << out.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Impedance-based modal analysis and grey-box sensitivity reports"};
    app.require_subcommand(1);
    app.set_version_flag("--version", gb_version());
    Options o;

    auto* modes = app.add_subcommand("modes", "List the modes of a network (conjugate pairs collapsed)");
    modes->add_option("file", o.file, "Network file")->required();

    auto* grey = app.add_subcommand("greybox", "Grey-box layer 1-3 report for one mode");
    grey->add_option("file", o.file, "Network file")->required();
    grey->add_option("--mode", o.mode, "Mode index or frequency (suffix hz or rads); default: least damped");
    grey->add_option("--fraction", o.fraction_pct, "Parameter change in percent for predicted shifts")
        ->capture_default_str();

    auto* scan = app.add_subcommand("scan", "Frequency scan of a whole-system impedance entry");
    scan->add_option("file", o.file, "Network file")->required();
    scan->add_option("--fmin", o.fmin, "Lowest frequency (network unit)")->required();
    scan->add_option("--fmax", o.fmax, "Highest frequency (network unit)")->required();
    scan->add_option("--points", o.points, "Number of log-spaced points")->capture_default_str();
    scan->add_option("--entry", o.entry, "Matrix entry k,i, 1-based")->capture_default_str();
    scan->add_option("--out", o.out, "Spectrum CSV path (default: stdout)");
    scan->add_option("--out-dir", o.out_dir, "Write Z_<k>_<i>.csv for every entry into this directory");
    scan->add_option("--peaks-json", o.peaks_json, "Write detected peaks as JSON");
    scan->add_option("--plot-data", o.plot_data, "Write gnuplot columns freq_hz |Z|");

    auto* fitcmd = app.add_subcommand("fit", "Vector-fit the spectra in a directory");
    fitcmd->add_option("dir", o.file, "Directory with Z_<k>_<i>.csv files")->required();
    fitcmd->add_option("--order", o.order, "Number of poles")->required();
    fitcmd->add_option("--iters", o.iters, "Pole relocation iterations")->capture_default_str();

    auto* tune = app.add_subcommand("tune", "Predicted vs actual mode shift for one parameter change");
    tune->add_option("file", o.file, "Network file")->required();
    tune->add_option("--param", o.param, "component.param, e.g. y12.L")->required();
    tune->add_option("--pct", o.pct, "Change in percent")->required();
    tune->add_option("--mode", o.mode, "Mode index or frequency; default: least damped");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return GB_ERR_USAGE;
    }

    try {
        if (*modes) run_modes(o);
        else if (*grey) run_greybox(o);
        else if (*scan) run_scan(o);
        else if (*fitcmd) run_fit(o);
        else if (*tune) run_tune(o);
    } catch (const Failure& f) {
        return f.code;
    }
    std::cout.flush();
    return std::cout ? 0 : GB_ERR_INTERNAL;
}
