#include "greybox/sens.hpp"

#include <cmath>

#include "greybox/errors.hpp"

namespace greybox {

SensitivityMatrices sensitivity_matrices(const Mode& mode) {
    if (!mode.populated) throw UsageError("mode artifacts are not populated");
    if (mode.near_repeated) throw NumericalError("repeated or near-repeated mode; sensitivity theory inapplicable");
    return {-mode.adjugate / mode.ydet_prime, mode.u_gamma * mode.w_gamma.transpose(), mode.xi};
}

Complex frobenius_inner(const ComplexMatrix& a, const ComplexMatrix& b) { return (a.conjugate().cwiseProduct(b)).sum(); }

SensitivityFactor admittance_sensitivity_factor(const PartialResidue& residue, const NetworkModel& net,
                                                const IncidencePattern& pattern, const ComplexMatrix& y_at_lambda) {
    const int m = pattern.width;
    ComplexMatrix g = ComplexMatrix::Zero(m, m);
    std::string missing;
    for (const auto& b : pattern.blocks) {
        const int row = net.port_offset(b.col_node), col = net.port_offset(b.row_node);
        for (int p = 0; p < m; ++p)
            for (int q = 0; q < m; ++q) {
                if (!residue.is_known(row + p, col + q)) {
                    missing += (missing.empty() ? "" : ", ") + std::string("Z_") + std::to_string(row + p + 1) + "_" +
                               std::to_string(col + q + 1);
                    continue;
                }
                g(p, q) -= double(b.sign) * residue.values(row + p, col + q);
            }
    }
    if (!missing.empty())
        throw UsageError("component '" + pattern.component + "' needs spectra " + missing);

    SensitivityFactor f;
    f.component = pattern.component;
    f.s = g.adjoint();
    f.y = y_at_lambda;
    f.layer1 = f.s.norm() * f.y.norm();
    f.layer2 = frobenius_inner(f.s, f.y);
    return f;
}

ParamSensitivity parameter_sensitivity_factor(const SensitivityFactor& factor, const ComplexMatrix& dy_drho,
                                              const std::string& param, double rho) {
    ParamSensitivity ps;
    ps.component = factor.component;
    ps.param = param;
    ps.value = rho;
    ps.s_lambda_rho = frobenius_inner(factor.s, dy_drho);
    ps.normalized = ps.s_lambda_rho * rho;
    return ps;
}

Complex predict_tuning(const ParamSensitivity& ps, double fraction) {
    if (!(std::abs(fraction) <= 0.5)) throw UsageError("tuning fraction must lie in [-0.5, 0.5]");
    return ps.normalized * fraction;
}

double prediction_error(Complex predicted, Complex actual) {
    if (predicted == Complex{0.0, 0.0}) throw NumericalError("undefined relative error (predicted change is zero)");
    return std::abs(predicted - actual) / std::abs(predicted);
}

}  // namespace greybox
