#pragma once

#include <string>

#include "greybox/modal.hpp"
#include "greybox/netmodel.hpp"

namespace greybox {

struct SensitivityMatrices {
    ComplexMatrix s_lambda;  // -adj / Y'_det
    ComplexMatrix s_gamma;   // u w^T
    Complex xi;
};

SensitivityMatrices sensitivity_matrices(const Mode& mode);

// A residue matrix of which only some entries may be known, as on the
// measurement route. An empty mask means every entry is known.
struct PartialResidue {
    ComplexMatrix values;
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> known;

    bool is_known(int r, int c) const { return known.size() == 0 || known(r, c); }
};

struct SensitivityFactor {
    std::string component;
    ComplexMatrix s;  // s_{lambda,y}, m x m
    ComplexMatrix y;  // y(lambda)
    double layer1 = 0.0;
    Complex layer2;
};

// <A, B> = sum conj(A_pq) B_pq.
Complex frobenius_inner(const ComplexMatrix& a, const ComplexMatrix& b);

// s = (-sum_blocks sign * Res[col block, row block])^H. Throws UsageError
// naming the Z_<k>_<i> entries (1-based ports) that are required but unknown.
SensitivityFactor admittance_sensitivity_factor(const PartialResidue& residue, const NetworkModel& net,
                                                const IncidencePattern& pattern, const ComplexMatrix& y_at_lambda);

struct ParamSensitivity {
    std::string component;
    std::string param;
    double value = 0.0;  // rho
    Complex s_lambda_rho;
    Complex normalized;  // s_lambda_rho * rho
};

ParamSensitivity parameter_sensitivity_factor(const SensitivityFactor& factor, const ComplexMatrix& dy_drho,
                                              const std::string& param, double rho);

// s_lambda_rho * rho * fraction; |fraction| <= 0.5.
Complex predict_tuning(const ParamSensitivity& ps, double fraction);

// |predicted - actual| / |predicted|.
double prediction_error(Complex predicted, Complex actual);

}  // namespace greybox
