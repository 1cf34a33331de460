#pragma once

#include <string>
#include <vector>

#include "greybox/modal.hpp"
#include "greybox/netmodel.hpp"
#include "greybox/sens.hpp"
#include "greybox/tolerances.hpp"

namespace greybox {

struct Layer1Entry {
    std::string component;
    double value = 0.0;
};

struct Layer2Entry {
    std::string component;
    Complex value;  // <s, y(lambda)>: Re = damping effect, Im = frequency effect
    Complex share;  // value / sum |value|
};

struct Layer3Entry {
    ParamSensitivity sensitivity;
    Complex predicted;  // delta lambda_pr for +fraction
    bool significant = false;
};

enum class Direction { Increase, Decrease, None };
const char* direction_name(Direction d);

struct Guidance {
    std::string component;
    std::string param;
    Direction direction = Direction::None;
    std::string rationale;
    Complex predicted;  // delta lambda_pr when following the direction by |fraction|
};

struct GreyboxReport {
    Mode mode;
    double fraction = 0.0;
    std::vector<SensitivityFactor> factors;
    std::vector<Layer1Entry> layer1;
    std::vector<Layer2Entry> layer2;
    std::vector<Layer3Entry> layer3;
    std::vector<Guidance> guidance;
};

// Descending by value; ties keep component id order.
std::vector<Layer1Entry> layer1_ranking(const std::vector<SensitivityFactor>& factors);

std::vector<Layer2Entry> layer2_decomposition(const std::vector<SensitivityFactor>& factors);

// Sorted by |s rho| descending; parameters below significance * max are
// listed but get no guidance.
std::vector<Layer3Entry> layer3_entries(std::vector<ParamSensitivity> params, double fraction, double significance);
std::vector<Guidance> layer3_guidance(const std::vector<Layer3Entry>& entries, double fraction);

// Admittance sensitivity factors of every rational component at a mode.
std::vector<SensitivityFactor> component_factors(const NetworkModel& net, const Mode& mode);

// Parameter sensitivities of every R, L, C at a mode.
std::vector<ParamSensitivity> parameter_sensitivities(const NetworkModel& net, const Mode& mode,
                                                      const std::vector<SensitivityFactor>& factors);

GreyboxReport greybox_report(const NetworkModel& net, const Mode& mode, double fraction, const Tolerances& tol = {});

}  // namespace greybox
