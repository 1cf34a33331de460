#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "greybox/tolerances.hpp"

namespace greybox {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

// Complex-coefficient polynomial in s. Stored as a gain (the leading
// coefficient) times a monic coefficient list in ascending degree; the zero
// polynomial has gain 0 and no coefficients.
class Polynomial {
public:
    Polynomial() = default;
    // Ascending coefficients; trailing zeros are dropped.
    explicit Polynomial(std::span<const Complex> coeffs);
    Polynomial(std::initializer_list<Complex> coeffs);

    static Polynomial constant(Complex c);
    static Polynomial from_roots(std::span<const Complex> roots, Complex gain = 1.0);

    bool is_zero() const noexcept { return monic_.empty(); }
    // Zero for constants and for the zero polynomial.
    int degree() const noexcept { return monic_.empty() ? 0 : static_cast<int>(monic_.size()) - 1; }
    Complex gain() const noexcept { return gain_; }
    const std::vector<Complex>& monic() const noexcept { return monic_; }
    Complex coeff(int k) const;
    std::vector<Complex> coeffs() const;
    double max_abs_coeff() const;

    Complex operator()(Complex s) const;
    // sum |c_k| |s|^k, the magnitude scale of a Horner evaluation at s.
    double abs_scale(Complex s) const;
    Polynomial derivative() const;

    // Quotient of division by (s - a); the remainder is written when asked.
    Polynomial deflate(Complex a, Complex* remainder = nullptr) const;
    Polynomial scaled(Complex factor) const;

    Polynomial operator-() const { return scaled(-1.0); }
    friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    // Same monic part and gain, bit for bit.
    friend bool operator==(const Polynomial& a, const Polynomial& b) = default;

private:
    void assign(std::vector<Complex> coeffs);

    Complex gain_{0.0, 0.0};
    std::vector<Complex> monic_;
};

// All degree(p) roots (with multiplicity): companion-matrix eigenvalues
// followed by at most ten Newton steps per root. Throws UsageError for the
// zero polynomial.
std::vector<Complex> poly_roots(const Polynomial& p);

// Newton refinement; a step is only taken when it lowers |p|.
Complex polish_root(const Polynomial& p, Complex root, int max_iterations = 10);

// True when `a` is a root of `p` in the sense used for cancellation: the
// Newton distance to the nearest root is below tol * (1 + |a|), or p(a)
// vanishes to working precision.
bool is_common_root(const Polynomial& p, Complex a, double tol);

class RationalFunction {
public:
    RationalFunction() : num_(), den_(Polynomial::constant(1.0)) {}
    // Throws UsageError when den is identically zero.
    RationalFunction(Polynomial num, Polynomial den = Polynomial::constant(1.0));
    static RationalFunction constant(Complex c) { return RationalFunction(Polynomial::constant(c)); }

    const Polynomial& num() const noexcept { return num_; }
    const Polynomial& den() const noexcept { return den_; }
    bool is_zero() const noexcept { return num_.is_zero(); }

    Complex operator()(Complex s) const { return num_(s) / den_(s); }

    // Common roots cancelled, denominator monic.
    RationalFunction normalized(double tol = Tolerances{}.cancel) const;

    RationalFunction operator-() const { return {-num_, den_}; }
    // Addition uses the least common multiple of the denominators.
    friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b);
    friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b);
    friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b);
    friend RationalFunction operator/(const RationalFunction& a, const RationalFunction& b);

private:
    Polynomial num_;
    Polynomial den_;
};

// Quotient-rule derivative, with the factors it introduces cancelled.
RationalFunction rat_derivative(const RationalFunction& f, double tol = Tolerances{}.cancel);

class RationalMatrix {
public:
    RationalMatrix() = default;
    explicit RationalMatrix(int dim);
    static RationalMatrix identity(int dim);

    int dim() const noexcept { return dim_; }
    RationalFunction& operator()(int row, int col) { return entries_[index(row, col)]; }
    const RationalFunction& operator()(int row, int col) const { return entries_[index(row, col)]; }

    ComplexMatrix evaluate(Complex s) const;
    RationalMatrix derivative(double tol = Tolerances{}.cancel) const;
    RationalMatrix normalized(double tol = Tolerances{}.cancel) const;

    friend RationalMatrix operator+(const RationalMatrix& a, const RationalMatrix& b);
    friend RationalMatrix operator-(const RationalMatrix& a, const RationalMatrix& b);
    friend RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b);

private:
    std::size_t index(int row, int col) const { return static_cast<std::size_t>(row) * dim_ + col; }

    int dim_ = 0;
    std::vector<RationalFunction> entries_;
};

// det(M(s)) as a normalized rational function. Rows are cleared to a common
// denominator, the polynomial determinant is expanded (cofactors for N <= 4,
// a division-free subset expansion above that) and the known denominator
// roots are cancelled.
RationalFunction rat_det(const RationalMatrix& m, double tol = Tolerances{}.cancel);

// M(s)^{-1} with normalized entries. Throws NumericalError when det(M) == 0.
RationalMatrix rat_inverse(const RationalMatrix& m, double tol = Tolerances{}.cancel);

}  // namespace greybox
