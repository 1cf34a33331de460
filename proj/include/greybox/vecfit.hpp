#pragma once

#include <map>
#include <utility>
#include <vector>

#include "greybox/ratfun.hpp"
#include "greybox/sens.hpp"

namespace greybox {

// Matrix entry (row, col), 0-based ports.
using EntryKey = std::pair<int, int>;

struct SpectrumSamples {
    std::vector<double> omega;  // rad/s, strictly ascending, shared by all entries
    std::map<EntryKey, std::vector<Complex>> entries;

    // Throws UsageError on an empty set, a bad grid or mismatched lengths.
    void validate() const;
};

struct PoleResidueModel {
    std::vector<Complex> poles;  // conjugate pairs adjacent, Im > 0 first
    std::map<EntryKey, std::vector<Complex>> residues;  // one per pole
    std::map<EntryKey, Complex> direct;
    std::vector<bool> unstable;  // Re(pole) > 0
    double misfit = 0.0;  // rms of |fit - data| / |data|
    int iterations = 0;

    bool any_unstable() const;
    Complex evaluate(const EntryKey& entry, Complex s) const;
};

// Vector fitting with a shared pole set, real arithmetic (the data must
// satisfy f(conj s) = conj f(s)) and inverse-magnitude weights. Throws
// UsageError "insufficient samples for order" when the least-squares
// problem is rank deficient.
PoleResidueModel fit(const SpectrumSamples& samples, int order, int iterations);

// Largest count of local maxima of |f| over the entries; 2x this is a
// lower bound for the order.
int count_peaks(const SpectrumSamples& samples);

// Residues at one pole, known only on the fitted entries (S_lambda = -values).
PartialResidue sensitivities_from_fit(const PoleResidueModel& model, std::size_t pole, int dim);

}  // namespace greybox
