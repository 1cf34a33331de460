#include "greybox/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "greybox/errors.hpp"

namespace greybox {

namespace {

std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

bool parse_index(const std::string& s, std::size_t& out) {
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) return false;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
    return r.ec == std::errc{} && r.ptr == s.data() + s.size();
}

std::string describe(const std::vector<ListedMode>& modes, const std::vector<std::size_t>& which) {
    std::ostringstream os;
    os.precision(6);
    for (std::size_t k = 0; k < which.size(); ++k) {
        const Mode& m = modes[which[k]].mode;
        os << (k ? ", " : "") << "#" << which[k] << " (" << m.freq_hz() << " Hz, lambda " << m.lambda.real()
           << (m.lambda.imag() < 0 ? "" : "+") << m.lambda.imag() << "j)";
    }
    return os.str();
}

}  // namespace

std::vector<ListedMode> listed_modes(const std::vector<Mode>& modes) {
    std::vector<ListedMode> out;
    for (const auto& m : modes)
        if (m.lambda.imag() >= 0.0) out.push_back({m, m.lambda.imag() > 0.0});
    return out;
}

std::size_t select_mode(const std::vector<ListedMode>& modes, std::string_view selector, double unit_to_hz) {
    if (modes.empty()) throw UsageError("network has no modes");
    const std::string sel = trim(selector);
    if (sel.empty()) {
        std::size_t best = modes.size();
        for (std::size_t k = 0; k < modes.size(); ++k) {
            if (!modes[k].pair) continue;
            if (best == modes.size() || modes[k].mode.damping_ratio() < modes[best].mode.damping_ratio()) best = k;
        }
        if (best == modes.size()) throw UsageError("no oscillatory mode; pass --mode");
        return best;
    }
    std::size_t index = 0;
    if (parse_index(sel, index)) {
        if (index >= modes.size())
            throw UsageError("mode index " + sel + " out of range (" + std::to_string(modes.size()) + " modes)");
        return index;
    }
    std::string num = sel;
    double scale = unit_to_hz;
    std::string lower = sel;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    for (const auto& [suffix, factor] : {std::pair{std::string("hz"), 1.0}, std::pair{std::string("rads"), 0.5 / std::numbers::pi}}) {
        if (lower.size() > suffix.size() && lower.ends_with(suffix)) {
            num = trim(sel.substr(0, sel.size() - suffix.size()));
            scale = factor;
            break;
        }
    }
    double value = 0.0;
    const auto r = std::from_chars(num.data(), num.data() + num.size(), value);
    if (r.ec != std::errc{} || r.ptr != num.data() + num.size() || !std::isfinite(value) || value < 0.0)
        throw UsageError("mode selector '" + sel + "' is neither an index nor a frequency");
    const double target = value * scale;

    std::vector<std::size_t> order(modes.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    const auto dist = [&](std::size_t k) { return std::abs(modes[k].mode.freq_hz() - target); };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dist(a) < dist(b); });
    if (order.size() > 1 && dist(order[1]) - dist(order[0]) <= 0.01 * target) {
        std::vector<std::size_t> close;
        for (std::size_t k : order)
            if (dist(k) - dist(order[0]) <= 0.01 * target) close.push_back(k);
        throw UsageError("ambiguous mode selector '" + sel + "'; candidates: " + describe(modes, close));
    }
    return order[0];
}

TuneResult tune_parameter(const NetworkModel& net, Complex lambda, const std::string& component,
                          const std::string& param, double fraction, const Tolerances& tol) {
    const Component& c = net.component(component);
    const double rho = c.param(param);
    const Mode mode = mode_artifacts(build_ynodal(net), lambda, tol);

    TuneResult out;
    out.lambda = lambda;
    out.fraction = fraction;
    const PartialResidue residue{mode.residue, {}};
    const SensitivityFactor factor =
        admittance_sensitivity_factor(residue, net, incidence_pattern(net, component), component_admittance(c).evaluate(lambda));
    out.sensitivity = parameter_sensitivity_factor(factor, param_derivative(c, param, lambda), param, rho);
    out.predicted = predict_tuning(out.sensitivity, fraction);

    const NetworkModel bumped = net.with_parameter(component, param, rho * (1.0 + fraction));
    const std::vector<Mode> modes = find_modes(build_ynodal(bumped), tol);
    out.perturbed = modes[track_mode(modes, lambda + out.predicted, tol.tracking_ratio)].lambda;
    out.actual = out.perturbed - lambda;
    out.error = prediction_error(out.predicted, out.actual);
    return out;
}

ScanResult scan_zsys(const NetworkModel& net, double fmin_hz, double fmax_hz, int points, int row, int col) {
    if (!(fmin_hz > 0.0) || !std::isfinite(fmax_hz) || !(fmin_hz < fmax_hz))
        throw UsageError("scan needs 0 < fmin < fmax");
    if (points < 2) throw UsageError("scan needs at least 2 points");
    const int dim = net.port_count();
    if (row < 0 || row >= dim || col < 0 || col >= dim)
        throw UsageError("entry " + std::to_string(row + 1) + "," + std::to_string(col + 1) + " out of range (" +
                         std::to_string(dim) + " ports)");
    const ZsysEvaluator zsys(net);
    ScanResult out;
    for (int j = 0; j < points; ++j) {
        const double f = fmin_hz * std::pow(fmax_hz / fmin_hz, double(j) / (points - 1));
        out.freq_hz.push_back(f);
        out.values.push_back(zsys(Complex{0.0, 2.0 * std::numbers::pi * f})(row, col));
    }
    out.peaks = find_peaks(out.values);
    return out;
}

std::vector<std::size_t> find_peaks(const std::vector<Complex>& values) {
    std::vector<std::size_t> out;
    for (std::size_t j = 1; j + 1 < values.size(); ++j) {
        const double m = std::abs(values[j]);
        if (m > std::abs(values[j - 1]) && m >= std::abs(values[j + 1])) out.push_back(j);
    }
    return out;
}

}  // namespace greybox
