#include "greybox/ratfun.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "greybox/errors.hpp"
#include "ratfun_internal.hpp"

namespace greybox {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Zero a sum that is indistinguishable from rounding noise of its operands.
Complex cancel_aware_sum(Complex a, Complex b) {
    const Complex c = a + b;
    if (std::abs(c) <= 8.0 * kEps * (std::abs(a) + std::abs(b))) return {0.0, 0.0};
    return c;
}

// Parlett-Reinsch balancing, radix 2.
void balance(ComplexMatrix& a) {
    const int n = static_cast<int>(a.rows());
    constexpr double radix = 2.0;
    bool converged = false;
    for (int sweep = 0; sweep < 100 && !converged; ++sweep) {
        converged = true;
        for (int i = 0; i < n; ++i) {
            double c = 0.0;
            double r = 0.0;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(a(j, i));
                r += std::abs(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix;
            double f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= radix;
                c *= radix * radix;
            }
            g = r * radix;
            while (c >= g) {
                f /= radix;
                c /= radix * radix;
            }
            if ((c + r) / f < 0.95 * s) {
                converged = false;
                a.row(i) /= f;
                a.col(i) *= f;
            }
        }
    }
}

// Evaluates p and p' together.
std::pair<Complex, Complex> horner_with_derivative(const Polynomial& p, Complex s) {
    const auto& m = p.monic();
    Complex v{0.0, 0.0};
    Complex d{0.0, 0.0};
    for (auto it = m.rbegin(); it != m.rend(); ++it) {
        d = d * s + v;
        v = v * s + *it;
    }
    return {p.gain() * v, p.gain() * d};
}

}  // namespace

// ---------------------------------------------------------------- Polynomial

Polynomial::Polynomial(std::span<const Complex> coeffs) {
    assign(std::vector<Complex>(coeffs.begin(), coeffs.end()));
}

Polynomial::Polynomial(std::initializer_list<Complex> coeffs) {
    assign(std::vector<Complex>(coeffs));
}

void Polynomial::assign(std::vector<Complex> coeffs) {
    while (!coeffs.empty() && coeffs.back() == Complex{0.0, 0.0}) coeffs.pop_back();
    if (coeffs.empty()) {
        gain_ = {0.0, 0.0};
        monic_.clear();
        return;
    }
    gain_ = coeffs.back();
    for (auto& c : coeffs) c /= gain_;
    coeffs.back() = 1.0;
    monic_ = std::move(coeffs);
}

Polynomial Polynomial::constant(Complex c) { return Polynomial{c}; }

Polynomial Polynomial::from_roots(std::span<const Complex> roots, Complex gain) {
    Polynomial p;
    if (gain == Complex{0.0, 0.0}) return p;
    p.gain_ = gain;
    p.monic_ = {Complex{1.0, 0.0}};
    for (const Complex& r : roots) {
        std::vector<Complex> next(p.monic_.size() + 1, Complex{0.0, 0.0});
        for (std::size_t k = 0; k < p.monic_.size(); ++k) {
            next[k + 1] += p.monic_[k];
            next[k] -= r * p.monic_[k];
        }
        p.monic_ = std::move(next);
    }
    return p;
}

Complex Polynomial::coeff(int k) const {
    if (k < 0 || k >= static_cast<int>(monic_.size())) return {0.0, 0.0};
    return gain_ * monic_[k];
}

std::vector<Complex> Polynomial::coeffs() const {
    std::vector<Complex> out(monic_.size());
    for (std::size_t k = 0; k < monic_.size(); ++k) out[k] = gain_ * monic_[k];
    return out;
}

double Polynomial::max_abs_coeff() const {
    double m = 0.0;
    for (const auto& c : monic_) m = std::max(m, std::abs(c));
    return m * std::abs(gain_);
}

Complex Polynomial::operator()(Complex s) const {
    Complex v{0.0, 0.0};
    for (auto it = monic_.rbegin(); it != monic_.rend(); ++it) v = v * s + *it;
    return gain_ * v;
}

double Polynomial::abs_scale(Complex s) const {
    const double r = std::abs(s);
    double v = 0.0;
    for (auto it = monic_.rbegin(); it != monic_.rend(); ++it) v = v * r + std::abs(*it);
    return std::abs(gain_) * v;
}

Polynomial Polynomial::derivative() const {
    if (monic_.size() <= 1) return {};
    std::vector<Complex> d(monic_.size() - 1);
    for (std::size_t k = 1; k < monic_.size(); ++k) d[k - 1] = gain_ * monic_[k] * static_cast<double>(k);
    return Polynomial(std::span<const Complex>(d));
}

Polynomial Polynomial::deflate(Complex a, Complex* remainder) const {
    if (remainder) *remainder = (*this)(a);
    const int n = degree();
    if (is_zero() || n == 0) return {};
    std::vector<Complex> q(n);
    // Forward division is stable for roots smaller than the typical root
    // magnitude, backward division for larger ones.
    const double root_scale = std::pow(std::abs(monic_[0]), 1.0 / n);
    if (std::abs(a) <= root_scale || monic_[0] == Complex{0.0, 0.0}) {
        q[n - 1] = monic_[n];
        for (int k = n - 1; k >= 1; --k) q[k - 1] = monic_[k] + a * q[k];
    } else {
        q[0] = -monic_[0] / a;
        for (int k = 1; k < n; ++k) q[k] = (q[k - 1] - monic_[k]) / a;
    }
    Polynomial out;
    out.assign(std::move(q));
    out.gain_ *= gain_;
    return out;
}

Polynomial Polynomial::scaled(Complex factor) const {
    Polynomial out = *this;
    if (factor == Complex{0.0, 0.0}) return {};
    out.gain_ *= factor;
    return out;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const std::size_t n = std::max(a.monic_.size(), b.monic_.size());
    std::vector<Complex> c(n);
    for (std::size_t k = 0; k < n; ++k) c[k] = cancel_aware_sum(a.coeff(static_cast<int>(k)), b.coeff(static_cast<int>(k)));
    return Polynomial(std::span<const Complex>(c));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    Polynomial out;
    out.monic_.assign(a.monic_.size() + b.monic_.size() - 1, Complex{0.0, 0.0});
    for (std::size_t i = 0; i < a.monic_.size(); ++i)
        for (std::size_t j = 0; j < b.monic_.size(); ++j) out.monic_[i + j] += a.monic_[i] * b.monic_[j];
    out.monic_.back() = 1.0;
    out.gain_ = a.gain_ * b.gain_;
    return out;
}

// ---------------------------------------------------------------- roots

Complex polish_root(const Polynomial& p, Complex root, int max_iterations) {
    auto [v, d] = horner_with_derivative(p, root);
    for (int it = 0; it < max_iterations; ++it) {
        if (v == Complex{0.0, 0.0} || d == Complex{0.0, 0.0}) break;
        const Complex step = v / d;
        const Complex candidate = root - step;
        auto [cv, cd] = horner_with_derivative(p, candidate);
        if (!(std::abs(cv) < std::abs(v))) break;
        root = candidate;
        v = cv;
        d = cd;
        if (std::abs(step) <= 4.0 * kEps * std::abs(root)) break;
    }
    return root;
}

std::vector<Complex> poly_roots(const Polynomial& p) {
    if (p.is_zero()) throw UsageError("undefined roots: zero polynomial");
    const auto& m = p.monic();
    const int n = p.degree();
    std::vector<Complex> roots;
    roots.reserve(n);
    int lead_zeros = 0;
    while (lead_zeros < n && m[lead_zeros] == Complex{0.0, 0.0}) ++lead_zeros;
    roots.assign(lead_zeros, Complex{0.0, 0.0});
    const int k = n - lead_zeros;
    if (k == 0) return roots;

    // Reduced monic polynomial m[lead_zeros..n] scaled to unit geometric mean
    // root magnitude.
    const double scale = std::pow(std::abs(m[lead_zeros]), 1.0 / k);
    ComplexMatrix companion = ComplexMatrix::Zero(k, k);
    for (int i = 1; i < k; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < k; ++i) companion(i, k - 1) = -m[lead_zeros + i] / std::pow(scale, k - i);
    balance(companion);
    Eigen::ComplexEigenSolver<ComplexMatrix> solver(companion, false);
    if (solver.info() != Eigen::Success) throw NumericalError("companion eigenvalue iteration failed");
    for (int i = 0; i < k; ++i) roots.push_back(polish_root(p, solver.eigenvalues()(i) * scale));
    return roots;
}

bool is_common_root(const Polynomial& p, Complex a, double tol) {
    if (p.is_zero()) return true;
    const int n = p.degree();
    if (n == 0) return false;
    // Taylor coefficients t_k = p^(k)(a)/k! by repeated synthetic division.
    const int order = std::min(n, 4);
    std::vector<Complex> work = p.monic();
    std::vector<double> t(order + 1);
    for (int k = 0; k <= order; ++k) {
        const std::size_t m = work.size() - 1;
        std::vector<Complex> quotient(m);
        Complex acc = work[m];
        for (std::size_t j = m; j-- > 0;) {
            quotient[j] = acc;
            acc = acc * a + work[j];
        }
        t[k] = std::abs(acc);
        work = std::move(quotient);
    }
    if (t[0] == 0.0) return true;
    // (t_0/t_k)^(1/k) estimates the distance to a cluster of k roots; a
    // k-fold root is only resolved to the k-th root of the tolerance.
    for (int k = 1; k <= order; ++k) {
        if (t[k] == 0.0) continue;
        if (std::pow(t[0] / t[k], 1.0 / k) < std::pow(tol, 1.0 / k) * (1.0 + std::abs(a))) return true;
    }
    return false;
}

namespace detail {

std::vector<Complex> clustered_roots(const Polynomial& p) {
    if (p.degree() == 0) return {};
    std::vector<Complex> roots = poly_roots(p);
    // A multiple root comes back as a tight cluster; its centroid is far
    // better conditioned than the members.
    const std::size_t n = roots.size();
    std::vector<int> group(n);
    std::iota(group.begin(), group.end(), 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(roots[i] - roots[j]) < 1e-6 * (1.0 + std::abs(roots[i]))) {
                const int gi = group[i];
                const int gj = group[j];
                for (auto& g : group)
                    if (g == gj) g = gi;
            }
    std::vector<Complex> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        Complex sum{0.0, 0.0};
        int count = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (group[j] == group[i]) {
                sum += roots[j];
                ++count;
            }
        out[i] = sum / static_cast<double>(count);
    }
    return out;
}

std::vector<Complex> match_roots(std::span<const Complex> have, std::span<const Complex> want, double tol,
                                 std::vector<bool>& used) {
    std::vector<Complex> unmatched;
    for (const Complex& w : want) {
        int best = -1;
        double best_dist = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < have.size(); ++i) {
            if (used[i]) continue;
            const double dist = std::abs(have[i] - w);
            if (dist < tol * (1.0 + std::abs(w)) && dist < best_dist) {
                best = static_cast<int>(i);
                best_dist = dist;
            }
        }
        if (best >= 0)
            used[best] = true;
        else
            unmatched.push_back(w);
    }
    return unmatched;
}

Polynomial cancel_roots(Polynomial& num, std::vector<Complex> den_roots, double tol,
                        std::vector<Complex>* remaining) {
    std::sort(den_roots.begin(), den_roots.end(),
              [](Complex a, Complex b) { return std::abs(a) < std::abs(b); });
    std::vector<Complex> keep;
    for (const Complex& a : den_roots) {
        if (!num.is_zero() && num.degree() > 0 && is_common_root(num, a, tol))
            num = num.deflate(a);
        else
            keep.push_back(a);
    }
    Polynomial den = Polynomial::from_roots(keep);
    if (remaining) *remaining = std::move(keep);
    return den;
}

Complex derivative_at(const RationalFunction& f, Complex s) {
    auto [n, dn] = horner_with_derivative(f.num(), s);
    auto [d, dd] = horner_with_derivative(f.den(), s);
    return (dn * d - n * dd) / (d * d);
}

ComplexMatrix derivative_at(const RationalMatrix& m, Complex s) {
    ComplexMatrix out(m.dim(), m.dim());
    for (int r = 0; r < m.dim(); ++r)
        for (int c = 0; c < m.dim(); ++c) out(r, c) = derivative_at(m(r, c), s);
    return out;
}

ClearedRows clear_rows(const RationalMatrix& m, double tol) {
    const int n = m.dim();
    ClearedRows out;
    out.poly.assign(n, std::vector<Polynomial>(n));
    out.row_roots.resize(n);
    std::vector<std::vector<Complex>> entry_roots(static_cast<std::size_t>(n) * n);
    for (int r = 0; r < n; ++r) {
        auto& row = out.row_roots[r];
        for (int c = 0; c < n; ++c) {
            const auto& f = m(r, c);
            if (f.is_zero()) continue;
            auto& roots = entry_roots[static_cast<std::size_t>(r) * n + c];
            roots = clustered_roots(f.den());
            std::vector<bool> used(row.size(), false);
            for (const Complex& x : match_roots(row, roots, tol, used)) row.push_back(x);
        }
        for (int c = 0; c < n; ++c) {
            const auto& f = m(r, c);
            if (f.is_zero()) continue;
            std::vector<bool> used(row.size(), false);
            match_roots(row, entry_roots[static_cast<std::size_t>(r) * n + c], tol, used);
            std::vector<Complex> rest;
            for (std::size_t i = 0; i < row.size(); ++i)
                if (!used[i]) rest.push_back(row[i]);
            out.poly[r][c] = f.num() * Polynomial::from_roots(rest, 1.0 / f.den().gain());
        }
    }
    return out;
}

namespace {

Polynomial cofactor_det(const std::vector<std::vector<Polynomial>>& p, std::vector<int>& rows,
                        std::vector<int>& cols) {
    const std::size_t n = rows.size();
    if (n == 1) return p[rows[0]][cols[0]];
    if (n == 2)
        return p[rows[0]][cols[0]] * p[rows[1]][cols[1]] - p[rows[0]][cols[1]] * p[rows[1]][cols[0]];
    Polynomial total;
    const int r0 = rows.front();
    std::vector<int> sub_rows(rows.begin() + 1, rows.end());
    for (std::size_t j = 0; j < n; ++j) {
        const Polynomial& a = p[r0][cols[j]];
        if (a.is_zero()) continue;
        std::vector<int> sub_cols;
        for (std::size_t k = 0; k < n; ++k)
            if (k != j) sub_cols.push_back(cols[k]);
        Polynomial term = a * cofactor_det(p, sub_rows, sub_cols);
        total = (j % 2 == 0) ? total + term : total - term;
    }
    return total;
}

// Laplace expansion memoized over column subsets: O(n 2^n) products and no
// polynomial division.
Polynomial subset_det(const std::vector<std::vector<Polynomial>>& p, const std::vector<int>& rows,
                      const std::vector<int>& cols) {
    const int n = static_cast<int>(rows.size());
    std::vector<Polynomial> minor(std::size_t{1} << n);
    minor[0] = Polynomial::constant(1.0);
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        const int k = std::popcount(mask);
        const int row = rows[k - 1];
        Polynomial total;
        for (int j = 0; j < n; ++j) {
            if (!(mask & (1u << j))) continue;
            const Polynomial& a = p[row][cols[j]];
            const Polynomial& sub = minor[mask ^ (1u << j)];
            if (a.is_zero() || sub.is_zero()) continue;
            const int pos = std::popcount(mask & ((1u << j) - 1u));
            Polynomial term = a * sub;
            total = ((k - 1 + pos) % 2 == 0) ? total + term : total - term;
        }
        minor[mask] = std::move(total);
    }
    return minor.back();
}

}  // namespace

Polynomial poly_det(const std::vector<std::vector<Polynomial>>& p, std::vector<int> rows, std::vector<int> cols) {
    if (rows.empty()) return Polynomial::constant(1.0);
    if (rows.size() <= 4) return cofactor_det(p, rows, cols);
    return subset_det(p, rows, cols);
}

DetWithRoots det_with_roots(const RationalMatrix& m, double tol) {
    const int n = m.dim();
    DetWithRoots out;
    if (n == 0) {
        out.det = RationalFunction::constant(1.0);
        return out;
    }
    ClearedRows cleared = clear_rows(m, tol);
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    Polynomial num = poly_det(cleared.poly, idx, idx);
    if (num.is_zero()) {
        out.det = RationalFunction();
        return out;
    }
    std::vector<Complex> den_roots;
    for (const auto& row : cleared.row_roots) den_roots.insert(den_roots.end(), row.begin(), row.end());
    Polynomial den = cancel_roots(num, den_roots, tol, &out.den_roots);
    out.det = RationalFunction(num, den);
    out.cleared = std::move(cleared);
    return out;
}

Complex polish_det_zero(const RationalMatrix& m, Complex z, int max_iterations) {
    for (int it = 0; it < max_iterations; ++it) {
        const ComplexMatrix value = m.evaluate(z);
        const ComplexMatrix slope = derivative_at(m, z);
        Eigen::PartialPivLU<ComplexMatrix> lu(value);
        const Complex trace = lu.solve(slope).trace();
        if (!std::isfinite(trace.real()) || !std::isfinite(trace.imag()) || trace == Complex{0.0, 0.0}) break;
        const Complex step = 1.0 / trace;
        if (std::abs(step) > 1e-3 * (1.0 + std::abs(z))) break;
        z -= step;
        if (std::abs(step) <= 4.0 * kEps * (1.0 + std::abs(z))) break;
    }
    return z;
}

}  // namespace detail

// ---------------------------------------------------------------- RationalFunction

RationalFunction::RationalFunction(Polynomial num, Polynomial den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw UsageError("rational function with zero denominator");
    if (num_.is_zero()) den_ = Polynomial::constant(1.0);
}

RationalFunction RationalFunction::normalized(double tol) const {
    if (num_.is_zero()) return {};
    Polynomial num = num_;
    Polynomial den = den_;
    if (den.degree() > 0 && num.degree() > 0) {
        for (const Complex& a : detail::clustered_roots(den)) {
            if (num.degree() == 0) break;
            if (is_common_root(num, a, tol)) {
                num = num.deflate(a);
                den = den.deflate(a);
            }
        }
    }
    const Complex g = den.gain();
    return {num.scaled(1.0 / g), den.scaled(1.0 / g)};
}

RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const Complex ga = a.den_.gain();
    const Complex gb = b.den_.gain();
    if (a.den_.monic() == b.den_.monic()) {
        Polynomial num = a.num_.scaled(1.0 / ga) + b.num_.scaled(1.0 / gb);
        if (num.is_zero()) return {};
        return {num, a.den_.scaled(1.0 / ga)};
    }
    const double tol = Tolerances{}.cancel;
    const auto ra = detail::clustered_roots(a.den_);
    const auto rb = detail::clustered_roots(b.den_);
    std::vector<bool> used(ra.size(), false);
    const auto b_only = detail::match_roots(ra, rb, tol, used);
    std::vector<Complex> a_only;
    for (std::size_t i = 0; i < ra.size(); ++i)
        if (!used[i]) a_only.push_back(ra[i]);
    // a.den = ga * common * a_only, b.den = gb * common * b_only.
    const Polynomial fa = Polynomial::from_roots(a_only);
    const Polynomial fb = Polynomial::from_roots(b_only);
    Polynomial num = a.num_.scaled(1.0 / ga) * fb + b.num_.scaled(1.0 / gb) * fa;
    if (num.is_zero()) return {};
    Polynomial den = a.den_.scaled(1.0 / ga) * fb;
    return {num, den};
}

RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) { return a + (-b); }

RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
    if (a.is_zero() || b.is_zero()) return {};
    return {a.num_ * b.num_, a.den_ * b.den_};
}

RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) {
    if (b.is_zero()) throw NumericalError("division by a zero rational function");
    if (a.is_zero()) return {};
    return {a.num_ * b.den_, a.den_ * b.num_};
}

RationalFunction rat_derivative(const RationalFunction& f, double tol) {
    const Polynomial& n = f.num();
    const Polynomial& d = f.den();
    Polynomial num = n.derivative() * d - n * d.derivative();
    if (num.is_zero()) return {};
    // Only roots of d can be shared with the new numerator.
    Polynomial den = d * d;
    for (const Complex& a : detail::clustered_roots(d)) {
        if (num.degree() == 0) break;
        if (is_common_root(num, a, tol)) {
            num = num.deflate(a);
            den = den.deflate(a);
        }
    }
    const Complex g = den.gain();
    return {num.scaled(1.0 / g), den.scaled(1.0 / g)};
}

// ---------------------------------------------------------------- RationalMatrix

RationalMatrix::RationalMatrix(int dim) : dim_(dim), entries_(static_cast<std::size_t>(dim) * dim) {
    if (dim < 0) throw UsageError("negative matrix dimension");
}

RationalMatrix RationalMatrix::identity(int dim) {
    RationalMatrix m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = RationalFunction::constant(1.0);
    return m;
}

ComplexMatrix RationalMatrix::evaluate(Complex s) const {
    ComplexMatrix out(dim_, dim_);
    for (int r = 0; r < dim_; ++r)
        for (int c = 0; c < dim_; ++c) out(r, c) = (*this)(r, c)(s);
    return out;
}

RationalMatrix RationalMatrix::derivative(double tol) const {
    RationalMatrix out(dim_);
    for (std::size_t i = 0; i < entries_.size(); ++i) out.entries_[i] = rat_derivative(entries_[i], tol);
    return out;
}

RationalMatrix RationalMatrix::normalized(double tol) const {
    RationalMatrix out(dim_);
    for (std::size_t i = 0; i < entries_.size(); ++i) out.entries_[i] = entries_[i].normalized(tol);
    return out;
}

RationalMatrix operator+(const RationalMatrix& a, const RationalMatrix& b) {
    if (a.dim_ != b.dim_) throw UsageError("matrix dimension mismatch");
    RationalMatrix out(a.dim_);
    for (std::size_t i = 0; i < a.entries_.size(); ++i) out.entries_[i] = a.entries_[i] + b.entries_[i];
    return out;
}

RationalMatrix operator-(const RationalMatrix& a, const RationalMatrix& b) {
    if (a.dim_ != b.dim_) throw UsageError("matrix dimension mismatch");
    RationalMatrix out(a.dim_);
    for (std::size_t i = 0; i < a.entries_.size(); ++i) out.entries_[i] = a.entries_[i] - b.entries_[i];
    return out;
}

RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b) {
    if (a.dim_ != b.dim_) throw UsageError("matrix dimension mismatch");
    const int n = a.dim_;
    RationalMatrix out(n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            RationalFunction sum;
            for (int k = 0; k < n; ++k) {
                if (a(r, k).is_zero() || b(k, c).is_zero()) continue;
                sum = sum + a(r, k) * b(k, c);
            }
            out(r, c) = sum;
        }
    return out;
}

RationalFunction rat_det(const RationalMatrix& m, double tol) { return detail::det_with_roots(m, tol).det; }

RationalMatrix rat_inverse(const RationalMatrix& m, double tol) {
    const int n = m.dim();
    detail::DetWithRoots d = detail::det_with_roots(m, tol);
    if (d.det.is_zero()) throw NumericalError("singular rational matrix: determinant is identically zero");

    // With rows cleared, M = diag(D_r)^{-1} P, hence
    //   M^{-1}_{ic} = adj(P)_{ic} D_c / det(P),   det(P) = det(M) prod_r D_r.
    std::vector<Complex> zeros = detail::clustered_roots(d.det.num());
    for (auto& z : zeros) z = detail::polish_det_zero(m, z);
    std::vector<Complex> den_roots = zeros;
    for (const auto& row : d.cleared.row_roots) den_roots.insert(den_roots.end(), row.begin(), row.end());
    const Complex gain = d.det.num().gain();

    RationalMatrix out(n);
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < n; ++c) {
            std::vector<int> rows;
            std::vector<int> cols;
            for (int k = 0; k < n; ++k) {
                if (k != c) rows.push_back(k);
                if (k != i) cols.push_back(k);
            }
            Polynomial cof = detail::poly_det(d.cleared.poly, rows, cols);
            if (cof.is_zero()) continue;
            if ((i + c) % 2 == 1) cof = -cof;
            // Known numerator factors D_c and the determinant's denominator
            // cancel against the known denominator roots by matching.
            std::vector<Complex> num_roots = d.cleared.row_roots[c];
            num_roots.insert(num_roots.end(), d.den_roots.begin(), d.den_roots.end());
            std::vector<bool> used(den_roots.size(), false);
            const auto extra = detail::match_roots(den_roots, num_roots, tol, used);
            std::vector<Complex> left;
            for (std::size_t k = 0; k < den_roots.size(); ++k)
                if (!used[k]) left.push_back(den_roots[k]);
            Polynomial num = cof * Polynomial::from_roots(extra, 1.0 / gain);
            Polynomial den = detail::cancel_roots(num, left, tol, nullptr);
            out(i, c) = RationalFunction(num, den);
        }
    }
    return out;
}

}  // namespace greybox
