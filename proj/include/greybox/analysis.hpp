#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "greybox/modal.hpp"
#include "greybox/netmodel.hpp"
#include "greybox/sens.hpp"
#include "greybox/tolerances.hpp"

namespace greybox {

// One entry per conjugate pair (Im >= 0) plus every real mode, in
// find_modes order.
struct ListedMode {
    Mode mode;
    bool pair = false;
};
std::vector<ListedMode> listed_modes(const std::vector<Mode>& modes);

// Selector grammar: a plain integer indexes the listed modes; anything
// else is a frequency matched against |Im lambda| / 2pi. A "hz" or "rads"
// suffix fixes the unit; a bare number is multiplied by `unit_to_hz`. An
// empty selector picks the least-damped oscillatory mode. Throws
// UsageError for out-of-range, ambiguous or unmatched input.
std::size_t select_mode(const std::vector<ListedMode>& modes, std::string_view selector, double unit_to_hz = 1.0);

struct TuneResult {
    Complex lambda;
    Complex perturbed;
    ParamSensitivity sensitivity;
    double fraction = 0.0;
    Complex predicted;
    Complex actual;
    double error = 0.0;
};

// Predicts the shift of `lambda` for rho -> rho (1 + fraction), rebuilds the
// network and tracks the mode from lambda + predicted.
TuneResult tune_parameter(const NetworkModel& net, Complex lambda, const std::string& component,
                          const std::string& param, double fraction, const Tolerances& tol = {});

struct ScanResult {
    std::vector<double> freq_hz;
    std::vector<Complex> values;
    std::vector<std::size_t> peaks;  // indices of local maxima of |Z|
};

// Z_sys(row, col) on a log grid; row/col are 0-based ports.
ScanResult scan_zsys(const NetworkModel& net, double fmin_hz, double fmax_hz, int points, int row, int col);

// Interior samples strictly above the left neighbour and not below the right.
std::vector<std::size_t> find_peaks(const std::vector<Complex>& values);

}  // namespace greybox
