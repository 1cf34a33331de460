#include "greybox/modal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "greybox/errors.hpp"
#include "ratfun_internal.hpp"

namespace greybox {

namespace {

bool has_real_coefficients(const Polynomial& p) {
    const double scale = p.max_abs_coeff();
    for (const auto& c : p.monic())
        if (std::abs(c.imag()) > 1e-12 * std::max(1.0, scale)) return false;
    return std::abs(p.gain().imag()) <= 1e-12 * std::abs(p.gain());
}

// Snap near-real roots onto the axis and make complex roots exact conjugate pairs.
void enforce_conjugate_closure(std::vector<Complex>& roots) {
    std::vector<bool> done(roots.size(), false);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (done[i]) continue;
        const Complex r = roots[i];
        if (std::abs(r.imag()) <= 1e-10 * (1.0 + std::abs(r))) {
            roots[i] = {r.real(), 0.0};
            done[i] = true;
            continue;
        }
        std::size_t best = roots.size();
        double dist = 1e300;
        for (std::size_t j = 0; j < roots.size(); ++j) {
            if (j == i || done[j]) continue;
            const double d = std::abs(roots[j] - std::conj(r));
            if (d < dist) {
                dist = d;
                best = j;
            }
        }
        done[i] = true;
        if (best == roots.size() || dist > 1e-6 * (1.0 + std::abs(r))) continue;
        const Complex mean = 0.5 * (r + std::conj(roots[best]));
        const Complex upper{mean.real(), std::abs(mean.imag())};
        roots[i] = r.imag() > 0 ? upper : std::conj(upper);
        roots[best] = std::conj(roots[i]);
        done[best] = true;
    }
}

Complex minor_det(const ComplexMatrix& a, int skip_row, int skip_col) {
    const int n = static_cast<int>(a.rows());
    ComplexMatrix m(n - 1, n - 1);
    for (int r = 0, rr = 0; r < n; ++r) {
        if (r == skip_row) continue;
        for (int c = 0, cc = 0; c < n; ++c) {
            if (c == skip_col) continue;
            m(rr, cc++) = a(r, c);
        }
        ++rr;
    }
    return m.determinant();
}

}  // namespace

double Mode::freq_hz() const { return std::abs(lambda.imag()) / (2.0 * std::numbers::pi); }

double Mode::damping_ratio() const {
    const double mag = std::abs(lambda);
    return mag == 0.0 ? 0.0 : -lambda.real() / mag;
}

ComplexMatrix adjugate(const ComplexMatrix& a) {
    const int n = static_cast<int>(a.rows());
    if (n == 1) return ComplexMatrix::Ones(1, 1);
    ComplexMatrix adj(n, n);
    if (n <= 5) {
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) adj(c, r) = ((r + c) % 2 ? -1.0 : 1.0) * minor_det(a, r, c);
        return adj;
    }
    // A = U S V^H gives adj(A) = det(U) conj(det V) V adj(S) U^H, with
    // adj(S) = diag(prod_{j != i} s_j); no division by a vanishing s_min.
    Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    Eigen::VectorXd others(n);
    for (int i = 0; i < n; ++i) {
        double p = 1.0;
        for (int j = 0; j < n; ++j)
            if (j != i) p *= s(j);
        others(i) = p;
    }
    const Complex phase = svd.matrixU().determinant() * std::conj(svd.matrixV().determinant());
    adj = phase * svd.matrixV() * others.cast<Complex>().asDiagonal() * svd.matrixU().adjoint();
    return adj;
}

std::vector<Mode> find_modes(const RationalMatrix& ynodal, const Tolerances& tol) {
    const RationalFunction det = rat_det(ynodal, tol.cancel);
    if (det.is_zero()) throw NumericalError("nodal admittance determinant is identically zero");
    std::vector<Complex> zeros = poly_roots(det.num());
    for (auto& z : zeros) z = detail::polish_det_zero(ynodal, z);
    if (has_real_coefficients(det.num()) && has_real_coefficients(det.den())) enforce_conjugate_closure(zeros);

    std::vector<Mode> modes(zeros.size());
    for (std::size_t k = 0; k < zeros.size(); ++k) modes[k].lambda = zeros[k];
    for (std::size_t i = 0; i < modes.size(); ++i)
        for (std::size_t j = i + 1; j < modes.size(); ++j) {
            const double scale = std::max({std::abs(modes[i].lambda), std::abs(modes[j].lambda), 1e-300});
            if (std::abs(modes[i].lambda - modes[j].lambda) < tol.repeated * scale)
                modes[i].near_repeated = modes[j].near_repeated = true;
        }
    std::stable_sort(modes.begin(), modes.end(), [](const Mode& a, const Mode& b) {
        const double ia = std::abs(a.lambda.imag()), ib = std::abs(b.lambda.imag());
        if (ia != ib) return ia > ib;
        if (a.lambda.imag() != b.lambda.imag()) return a.lambda.imag() > b.lambda.imag();
        return a.lambda.real() > b.lambda.real();
    });
    return modes;
}

Mode mode_artifacts(const RationalMatrix& ynodal, Complex lambda, const Tolerances& tol) {
    Mode mode;
    mode.lambda = lambda;
    const ComplexMatrix y = ynodal.evaluate(lambda);
    const int n = static_cast<int>(y.rows());

    Eigen::JacobiSVD<ComplexMatrix> svd(y, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const ComplexMatrix dy = detail::derivative_at(ynodal, lambda);
    // Scale from Y and s Y' so that a matrix vanishing as a whole at lambda
    // (decoupled identical nodes) still counts as a two-dimensional null space.
    const double scale = std::max(sv(0), dy.norm() * std::abs(lambda));
    if (n > 1 && sv(n - 2) < tol.repeated * scale)
        throw NumericalError("repeated or near-repeated mode at " + std::to_string(lambda.real()) + " " +
                             std::to_string(lambda.imag()) + "j");

    ComplexVector u = svd.matrixV().col(n - 1);
    // Y^T w = 0 is Y^H conj(w) = 0, so w is the conjugated left singular vector.
    ComplexVector w = svd.matrixU().col(n - 1).conjugate();
    Eigen::Index top = 0;
    u.cwiseAbs().maxCoeff(&top);
    u *= std::abs(u(top)) / u(top);
    const Complex wu = w.transpose() * u;
    if (std::abs(wu) < 1e-10) throw NumericalError("defective normalization (w^T u = 0)");
    w /= wu;

    mode.adjugate = adjugate(y);
    mode.ydet_prime = (mode.adjugate * dy).trace();
    if (mode.ydet_prime == Complex{0.0, 0.0}) throw NumericalError("repeated or near-repeated mode (Y'_det = 0)");
    mode.u_gamma = u;
    mode.w_gamma = w;
    mode.xi = -mode.adjugate.trace() / mode.ydet_prime;
    mode.residue = mode.adjugate / mode.ydet_prime;
    mode.populated = true;
    return mode;
}

ComplexMatrix residue_by_limit(const RationalMatrix& zsys, Complex lambda) {
    const int n = zsys.dim();
    const double near = 1e-6 * (1.0 + std::abs(lambda));
    double gap = 1e300;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            const Polynomial& den = zsys(r, c).den();
            if (den.degree() == 0) continue;
            for (const Complex& p : poly_roots(den)) {
                const double d = std::abs(p - lambda);
                if (d > near) gap = std::min(gap, d);
            }
        }
    const double radius = 0.25 * (gap < 1e300 ? gap : 1.0 + std::abs(lambda));
    return residue_by_limit([&](Complex s) { return zsys.evaluate(s); }, lambda, radius);
}

ComplexMatrix residue_by_limit(const std::function<ComplexMatrix(Complex)>& zsys, Complex lambda, double r0) {
    constexpr int kPoints = 32;
    constexpr int kDecades = 4;
    std::vector<ComplexMatrix> estimates;
    for (int d = 0; d <= kDecades; ++d) {
        const double radius = r0 * std::pow(10.0, -d);
        ComplexMatrix first, second;
        double scale = 0.0;
        for (int k = 0; k < kPoints; ++k) {
            const Complex h = std::polar(radius, 2.0 * std::numbers::pi * (k + 0.5) / kPoints);
            const ComplexMatrix hz = h * zsys(lambda + h);
            if (k == 0) {
                first = ComplexMatrix::Zero(hz.rows(), hz.cols());
                second = first;
            }
            scale = std::max(scale, hz.norm());
            first += hz;
            second += h * hz;
        }
        first /= double(kPoints);
        second /= double(kPoints);
        // first = a_{-1}; second = a_{-2}, which vanishes at a simple pole.
        if (!(first.norm() > 1e-10 * scale) || second.norm() > 1e-6 * first.norm() * (1.0 + std::abs(lambda)))
            throw NumericalError("pole order mismatch");
        estimates.push_back(first);
    }
    // The contour mean is exact at every radius below the gap; small radii
    // only lose digits to cancellation, so agreement is checked loosely.
    for (const auto& e : estimates) {
        if ((e - estimates[0]).norm() > 1e-6 * estimates[0].norm()) throw NumericalError("pole order mismatch");
    }
    return estimates[0];
}

std::size_t track_mode(const std::vector<Mode>& modes, Complex target, double ratio) {
    if (modes.empty()) throw NumericalError("tracking failure; no modes");
    std::size_t best = 0;
    double d1 = 1e300, d2 = 1e300;
    for (std::size_t k = 0; k < modes.size(); ++k) {
        const double d = std::abs(modes[k].lambda - target);
        if (d < d1) {
            d2 = d1;
            d1 = d;
            best = k;
        } else if (d < d2) {
            d2 = d;
        }
    }
    if (d2 <= ratio * d1) throw NumericalError("tracking failure; reduce the perturbation");
    return best;
}

Complex gamma_shift(const RationalMatrix& ynodal, Complex lambda0, const RationalMatrix& perturbed) {
    const auto nearest_zero = [&](const RationalMatrix& m) {
        const ComplexVector ev = Eigen::ComplexEigenSolver<ComplexMatrix>(m.evaluate(lambda0), false).eigenvalues();
        Eigen::Index k = 0;
        ev.cwiseAbs().minCoeff(&k);
        return ev(k);
    };
    return nearest_zero(perturbed) - nearest_zero(ynodal);
}

}  // namespace greybox
