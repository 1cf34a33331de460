#pragma once

#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "greybox/netmodel.hpp"

namespace greybox::oracle {

struct StateSpace {
    Eigen::MatrixXd a;
    std::vector<std::string> labels;  // "v:<node>" or "i:<component>"
};

// KCL at every node (capacitor voltages) and KVL around every inductor.
// Needs a capacitance at every node.
StateSpace build_state_space(const NetworkModel& net);

std::vector<Complex> eigenvalues(const StateSpace& ss);

// Connected network with N in [2, 5], shunt RLC at every node and RL
// branches, parameters log-uniform in [0.1, 10].
NetworkModel random_network(std::mt19937& rng);

// Central difference of the state-space eigenvalue nearest `lambda` with
// respect to component.param, using relative step eps.
Complex finite_difference_dlambda(const NetworkModel& net, const std::string& component, const std::string& param,
                                  Complex lambda, double eps, double tracking_ratio = 10.0);

}  // namespace greybox::oracle
