#pragma once

#include <functional>
#include <vector>

#include "greybox/ratfun.hpp"
#include "greybox/tolerances.hpp"

namespace greybox {

struct Mode {
    Complex lambda;  // rad/s
    bool near_repeated = false;
    bool populated = false;

    Complex ydet_prime;
    ComplexMatrix adjugate;
    ComplexVector u_gamma;  // Y(lambda) u = 0
    ComplexVector w_gamma;  // w^T Y(lambda) = 0, w^T u = 1
    Complex xi;
    ComplexMatrix residue;  // Res_lambda Z_sys = adj / Y'_det

    bool is_oscillatory() const noexcept { return lambda.imag() != 0.0; }
    double freq_hz() const;
    double damping_ratio() const;
};

// Zeros of det Y(s), polished on the matrix, sorted by |Im| descending.
// Modes closer than `tol.repeated` (relative) are flagged near_repeated.
std::vector<Mode> find_modes(const RationalMatrix& ynodal, const Tolerances& tol = {});

// Adjugate, Y'_det, null vectors, xi and residue at a simple zero lambda.
// Throws NumericalError for repeated modes and defective normalization.
Mode mode_artifacts(const RationalMatrix& ynodal, Complex lambda, const Tolerances& tol = {});

// Adjugate of a dense matrix, valid at singular points.
ComplexMatrix adjugate(const ComplexMatrix& a);

// Residue from the contour mean of (s - lambda) Z(s) on circles of
// shrinking radius. Throws NumericalError "pole order mismatch" when the
// estimates disagree or lambda is not a simple pole.
ComplexMatrix residue_by_limit(const RationalMatrix& zsys, Complex lambda);
// Same, for a pointwise evaluator; `radius` must stay below the distance to
// the nearest other pole.
ComplexMatrix residue_by_limit(const std::function<ComplexMatrix(Complex)>& zsys, Complex lambda, double radius);

// Index of the mode nearest `target`. Throws NumericalError when the
// runner-up lies within `ratio` times the nearest distance.
std::size_t track_mode(const std::vector<Mode>& modes, Complex target, double ratio);

// Change of the eigenvalue of Y(lambda0) nearest zero caused by replacing
// Y with `perturbed`.
Complex gamma_shift(const RationalMatrix& ynodal, Complex lambda0, const RationalMatrix& perturbed);

}  // namespace greybox
