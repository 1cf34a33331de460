#pragma once

// Helpers shared between the ratfun, netmodel and modal translation units.

#include <span>
#include <vector>

#include "greybox/ratfun.hpp"

namespace greybox::detail {

// Roots with tight clusters replaced by their centroid.
std::vector<Complex> clustered_roots(const Polynomial& p);

// Greedy nearest matching of `want` against unused entries of `have`.
// Returns the members of `want` that found no partner.
std::vector<Complex> match_roots(std::span<const Complex> have, std::span<const Complex> want, double tol,
                                 std::vector<bool>& used);

// Deflates `num` by every root in `den_roots` that it shares, and returns the
// monic polynomial built from the roots that survive.
Polynomial cancel_roots(Polynomial& num, std::vector<Complex> den_roots, double tol,
                        std::vector<Complex>* remaining);

Complex derivative_at(const RationalFunction& f, Complex s);
ComplexMatrix derivative_at(const RationalMatrix& m, Complex s);

// Row r multiplied by the least common denominator D_r of its entries.
struct ClearedRows {
    std::vector<std::vector<Polynomial>> poly;
    std::vector<std::vector<Complex>> row_roots;
};
ClearedRows clear_rows(const RationalMatrix& m, double tol);

Polynomial poly_det(const std::vector<std::vector<Polynomial>>& p, std::vector<int> rows, std::vector<int> cols);

struct DetWithRoots {
    RationalFunction det;
    std::vector<Complex> den_roots;
    ClearedRows cleared;
};
DetWithRoots det_with_roots(const RationalMatrix& m, double tol);

// Newton iteration on det(M(s)) using d/ds log det M = tr(M^{-1} M').
Complex polish_det_zero(const RationalMatrix& m, Complex z, int max_iterations = 20);

}  // namespace greybox::detail
