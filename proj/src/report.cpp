#include "greybox/report.hpp"

#include <algorithm>
#include <cmath>

#include "greybox/errors.hpp"

namespace greybox {

const char* direction_name(Direction d) {
    switch (d) {
        case Direction::Increase: return "increase";
        case Direction::Decrease: return "decrease";
        case Direction::None: return "none";
    }
    return "none";
}

std::vector<Layer1Entry> layer1_ranking(const std::vector<SensitivityFactor>& factors) {
    std::vector<Layer1Entry> out;
    for (const auto& f : factors) out.push_back({f.component, f.layer1});
    std::stable_sort(out.begin(), out.end(), [](const Layer1Entry& a, const Layer1Entry& b) {
        if (a.value != b.value) return a.value > b.value;
        return a.component < b.component;
    });
    return out;
}

std::vector<Layer2Entry> layer2_decomposition(const std::vector<SensitivityFactor>& factors) {
    double total = 0.0;
    for (const auto& f : factors) total += std::abs(f.layer2);
    std::vector<Layer2Entry> out;
    for (const auto& f : factors) out.push_back({f.component, f.layer2, total > 0.0 ? f.layer2 / total : Complex{}});
    return out;
}

std::vector<Layer3Entry> layer3_entries(std::vector<ParamSensitivity> params, double fraction, double significance) {
    std::stable_sort(params.begin(), params.end(), [](const ParamSensitivity& a, const ParamSensitivity& b) {
        const double ma = std::abs(a.normalized), mb = std::abs(b.normalized);
        if (ma != mb) return ma > mb;
        if (a.component != b.component) return a.component < b.component;
        return a.param < b.param;
    });
    const double top = params.empty() ? 0.0 : std::abs(params.front().normalized);
    std::vector<Layer3Entry> out;
    for (auto& p : params) {
        Layer3Entry e;
        e.predicted = predict_tuning(p, fraction);
        e.significant = top > 0.0 && std::abs(p.normalized) >= significance * top;
        e.sensitivity = std::move(p);
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<Guidance> layer3_guidance(const std::vector<Layer3Entry>& entries, double fraction) {
    std::vector<Guidance> out;
    for (const auto& e : entries) {
        if (!e.significant) continue;
        const ParamSensitivity& p = e.sensitivity;
        Guidance g;
        g.component = p.component;
        g.param = p.param;
        const double re = p.normalized.real();
        if (re > 0.0) {
            g.direction = Direction::Decrease;
            g.rationale = "Re(s*rho) > 0: decreasing moves the mode left";
            g.predicted = predict_tuning(p, -std::abs(fraction));
        } else if (re < 0.0) {
            g.direction = Direction::Increase;
            g.rationale = "Re(s*rho) < 0: increasing moves the mode left";
            g.predicted = predict_tuning(p, std::abs(fraction));
        } else {
            g.direction = Direction::None;
            g.rationale = "no first-order damping leverage";
        }
        out.push_back(std::move(g));
    }
    return out;
}

std::vector<SensitivityFactor> component_factors(const NetworkModel& net, const Mode& mode) {
    if (!mode.populated) throw UsageError("mode artifacts are not populated");
    const PartialResidue residue{mode.residue, {}};
    std::vector<SensitivityFactor> out;
    for (const auto& c : net.components()) {
        const ComplexMatrix y = component_admittance(c).evaluate(mode.lambda);
        out.push_back(admittance_sensitivity_factor(residue, net, incidence_pattern(net, c.id), y));
    }
    return out;
}

std::vector<ParamSensitivity> parameter_sensitivities(const NetworkModel& net, const Mode& mode,
                                                      const std::vector<SensitivityFactor>& factors) {
    std::vector<ParamSensitivity> out;
    for (std::size_t k = 0; k < net.components().size(); ++k) {
        const Component& c = net.components()[k];
        for (const auto& [name, value] : c.params)
            out.push_back(parameter_sensitivity_factor(factors[k], param_derivative(c, name, mode.lambda), name, value));
    }
    return out;
}

GreyboxReport greybox_report(const NetworkModel& net, const Mode& mode, double fraction, const Tolerances& tol) {
    if (mode.near_repeated) throw NumericalError("near-repeated mode; sensitivity theory inapplicable");
    GreyboxReport r;
    r.mode = mode;
    r.fraction = fraction;
    r.factors = component_factors(net, mode);
    r.layer1 = layer1_ranking(r.factors);
    r.layer2 = layer2_decomposition(r.factors);
    r.layer3 = layer3_entries(parameter_sensitivities(net, mode, r.factors), fraction, tol.significance);
    r.guidance = layer3_guidance(r.layer3, fraction);
    return r;
}

}  // namespace greybox
