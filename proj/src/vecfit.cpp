#include "greybox/vecfit.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "greybox/errors.hpp"

namespace greybox {

namespace {

using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

[[noreturn]] void insufficient() { throw UsageError("insufficient samples for order"); }

// Pairs (a, conj a) with Im a > 0 stay adjacent; real poles carry Im == 0.
std::vector<Complex> arrange(const Eigen::VectorXcd& ev) {
    std::vector<Complex> pairs, reals;
    for (Eigen::Index k = 0; k < ev.size(); ++k) {
        if (ev(k).imag() > 0.0)
            pairs.push_back(ev(k));
        else if (ev(k).imag() == 0.0)
            reals.push_back(ev(k));
    }
    const auto by_size = [](Complex a, Complex b) {
        if (std::abs(a) != std::abs(b)) return std::abs(a) < std::abs(b);
        return a.real() < b.real();
    };
    std::sort(pairs.begin(), pairs.end(), by_size);
    std::sort(reals.begin(), reals.end(), by_size);
    std::vector<Complex> out;
    for (const auto& p : pairs) {
        out.push_back(p);
        out.push_back(std::conj(p));
    }
    out.insert(out.end(), reals.begin(), reals.end());
    return out;
}

// Real basis: 1/(s-a) for real a; 1/(s-a) + 1/(s-a*) and j/(s-a) - j/(s-a*) for a pair.
Eigen::MatrixXcd basis(const std::vector<double>& omega, const std::vector<Complex>& poles) {
    const int rows = static_cast<int>(omega.size()), n = static_cast<int>(poles.size());
    Eigen::MatrixXcd phi(rows, n);
    for (int j = 0; j < rows; ++j) {
        const Complex s{0.0, omega[j]};
        for (int k = 0; k < n; ++k) {
            const Complex a = poles[k];
            if (a.imag() == 0.0) {
                phi(j, k) = 1.0 / (s - a);
            } else {
                const Complex p = 1.0 / (s - a), q = 1.0 / (s - std::conj(a));
                phi(j, k) = p + q;
                phi(j, k + 1) = Complex{0.0, 1.0} * (p - q);
                ++k;
            }
        }
    }
    return phi;
}

// Stacks real and imaginary parts of a complex block.
RealMatrix split(const Eigen::MatrixXcd& m) {
    RealMatrix out(2 * m.rows(), m.cols());
    out << m.real(), m.imag();
    return out;
}

RealVector split(const Eigen::VectorXcd& v) {
    RealVector out(2 * v.size());
    out << v.real(), v.imag();
    return out;
}

RealVector column_scales(const RealMatrix& m) {
    RealVector s(m.cols());
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        const double nrm = m.col(c).norm();
        s(c) = nrm > 0.0 ? 1.0 / nrm : 1.0;
    }
    return s;
}

Eigen::VectorXcd weights(const std::vector<Complex>& f) {
    Eigen::VectorXcd w(f.size());
    for (std::size_t j = 0; j < f.size(); ++j) {
        const double m = std::abs(f[j]);
        w(j) = m > 0.0 ? 1.0 / m : 1.0;
    }
    return w;
}

std::vector<Complex> starting_poles(const std::vector<double>& omega, int order) {
    const double lo = std::max(omega.front(), omega.back() * 1e-6);
    const double hi = omega.back();
    const int pairs = order / 2;
    std::vector<Complex> out;
    for (int k = 0; k < pairs; ++k) {
        const double t = pairs == 1 ? 0.5 : double(k) / (pairs - 1);
        const double beta = lo * std::pow(hi / lo, t);
        out.push_back({-beta / 100.0, beta});
        out.push_back({-beta / 100.0, -beta});
    }
    if (order % 2) out.push_back({-std::sqrt(lo * hi), 0.0});
    return out;
}

// Weighted least squares for residue coefficients and direct term of one entry.
void identify_residues(const Eigen::MatrixXcd& phi, const std::vector<Complex>& f, const std::vector<Complex>& poles,
                       std::vector<Complex>& residues, Complex& direct) {
    const int rows = static_cast<int>(phi.rows()), n = static_cast<int>(phi.cols());
    const Eigen::VectorXcd w = weights(f);
    Eigen::MatrixXcd a(rows, n + 1);
    a.leftCols(n) = w.asDiagonal() * phi;
    a.col(n) = w;
    Eigen::VectorXcd b(rows);
    for (int j = 0; j < rows; ++j) b(j) = w(j) * f[j];
    RealMatrix ar = split(a);
    const RealVector scale = column_scales(ar);
    ar = ar * scale.asDiagonal();
    Eigen::ColPivHouseholderQR<RealMatrix> qr(ar);
    if (ar.rows() < ar.cols() || qr.rank() < ar.cols()) insufficient();
    const RealVector x = scale.asDiagonal() * qr.solve(split(b));

    residues.assign(n, Complex{});
    for (int k = 0; k < n; ++k) {
        if (poles[k].imag() == 0.0) {
            residues[k] = x(k);
        } else {
            residues[k] = {x(k), x(k + 1)};
            residues[k + 1] = std::conj(residues[k]);
            ++k;
        }
    }
    direct = x(n);
}

}  // namespace

void SpectrumSamples::validate() const {
    if (entries.empty()) throw UsageError("no spectra supplied");
    if (omega.size() < 2) throw UsageError("a spectrum needs at least two frequencies");
    for (std::size_t j = 0; j < omega.size(); ++j) {
        if (!std::isfinite(omega[j]) || omega[j] <= 0.0) throw UsageError("frequencies must be positive and finite");
        if (j && omega[j] <= omega[j - 1]) throw UsageError("frequencies must be strictly ascending");
    }
    for (const auto& [key, values] : entries) {
        if (values.size() != omega.size()) throw UsageError("spectra do not share one frequency grid");
        for (const auto& v : values)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw UsageError("spectrum values must be finite");
    }
}

bool PoleResidueModel::any_unstable() const { return std::find(unstable.begin(), unstable.end(), true) != unstable.end(); }

Complex PoleResidueModel::evaluate(const EntryKey& entry, Complex s) const {
    const auto& r = residues.at(entry);
    Complex v = direct.at(entry);
    for (std::size_t k = 0; k < poles.size(); ++k) v += r[k] / (s - poles[k]);
    return v;
}

PoleResidueModel fit(const SpectrumSamples& samples, int order, int iterations) {
    if (order < 1) throw UsageError("order must be at least 1");
    if (iterations < 1) throw UsageError("iterations must be at least 1");
    samples.validate();
    const int rows = static_cast<int>(samples.omega.size());
    if (2 * rows < 2 * order + 1) insufficient();

    std::vector<Complex> poles = starting_poles(samples.omega, order);
    const int n = order;
    for (int it = 0; it < iterations; ++it) {
        const Eigen::MatrixXcd phi = basis(samples.omega, poles);
        const RealVector shared_scale = column_scales(split(phi));
        RealMatrix stacked(static_cast<Eigen::Index>(samples.entries.size()) * n, n);
        RealVector rhs(stacked.rows());
        Eigen::Index row = 0;
        for (const auto& [key, f] : samples.entries) {
            const Eigen::VectorXcd w = weights(f);
            Eigen::MatrixXcd a(rows, 2 * n + 1);
            a.leftCols(n) = w.asDiagonal() * phi;
            a.col(n) = w;
            Eigen::VectorXcd b(rows);
            for (int j = 0; j < rows; ++j) {
                const Complex wf = w(j) * f[j];
                a.row(j).tail(n) = -wf * phi.row(j);
                b(j) = wf;
            }
            RealMatrix ar = split(a);
            RealVector scale = column_scales(ar);
            scale.tail(n) = shared_scale;
            ar = ar * scale.asDiagonal();
            Eigen::HouseholderQR<RealMatrix> qr(ar);
            const RealMatrix r = qr.matrixQR().topRows(2 * n + 1).triangularView<Eigen::Upper>();
            const RealVector qb = (qr.householderQ().transpose() * split(b)).head(2 * n + 1);
            stacked.middleRows(row, n) = r.block(n + 1, n + 1, n, n);
            rhs.segment(row, n) = qb.tail(n);
            row += n;
        }
        Eigen::ColPivHouseholderQR<RealMatrix> qr(stacked);
        if (qr.rank() < n) insufficient();
        const RealVector c = shared_scale.asDiagonal() * qr.solve(rhs);

        // Zeros of sigma(s) = 1 + sum c_k phi_k(s) become the new poles.
        RealMatrix a = RealMatrix::Zero(n, n);
        RealVector bvec = RealVector::Zero(n);
        for (int k = 0; k < n; ++k) {
            if (poles[k].imag() == 0.0) {
                a(k, k) = poles[k].real();
                bvec(k) = 1.0;
            } else {
                const double re = poles[k].real(), im = poles[k].imag();
                a(k, k) = re;
                a(k, k + 1) = im;
                a(k + 1, k) = -im;
                a(k + 1, k + 1) = re;
                bvec(k) = 2.0;
                ++k;
            }
        }
        const RealMatrix h = a - bvec * c.transpose();
        if (!h.allFinite()) insufficient();
        poles = arrange(Eigen::EigenSolver<RealMatrix>(h, false).eigenvalues());
        if (static_cast<int>(poles.size()) != n) throw NumericalError("pole relocation lost a pole");
    }

    PoleResidueModel model;
    model.poles = poles;
    model.iterations = iterations;
    for (const auto& p : poles) model.unstable.push_back(p.real() > 0.0);
    const Eigen::MatrixXcd phi = basis(samples.omega, poles);
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& [key, f] : samples.entries) {
        identify_residues(phi, f, poles, model.residues[key], model.direct[key]);
        for (int j = 0; j < rows; ++j) {
            const Complex v = model.evaluate(key, {0.0, samples.omega[j]});
            const double m = std::abs(f[j]);
            sum += std::norm(v - f[j]) / (m > 0.0 ? m * m : 1.0);
            ++count;
        }
    }
    model.misfit = std::sqrt(sum / double(count));
    return model;
}

int count_peaks(const SpectrumSamples& samples) {
    int best = 0;
    for (const auto& [key, f] : samples.entries) {
        int peaks = 0;
        for (std::size_t j = 1; j + 1 < f.size(); ++j)
            if (std::abs(f[j]) > std::abs(f[j - 1]) && std::abs(f[j]) >= std::abs(f[j + 1])) ++peaks;
        best = std::max(best, peaks);
    }
    return best;
}

PartialResidue sensitivities_from_fit(const PoleResidueModel& model, std::size_t pole, int dim) {
    if (pole >= model.poles.size()) throw UsageError("pole index out of range");
    PartialResidue out;
    out.values = ComplexMatrix::Zero(dim, dim);
    out.known = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(dim, dim, false);
    for (const auto& [key, r] : model.residues) {
        if (key.first < 0 || key.first >= dim || key.second < 0 || key.second >= dim)
            throw UsageError("spectrum entry outside the network ports");
        out.values(key.first, key.second) = r[pole];
        out.known(key.first, key.second) = true;
    }
    return out;
}

}  // namespace greybox
