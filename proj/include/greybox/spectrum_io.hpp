#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "greybox/ratfun.hpp"
#include "greybox/vecfit.hpp"

namespace greybox {

inline constexpr const char* kSpectrumHeader = "freq_hz,re,im";

struct SpectrumFile {
    std::vector<double> freq_hz;
    std::vector<Complex> values;
};

// CSV text with the exact header line and one "%.17g,%.17g,%.17g" row per sample.
std::string format_spectrum(const std::vector<double>& freq_hz, const std::vector<Complex>& values);

// Throws ParseError (with line/column) on a wrong header, malformed or
// non-finite numbers, or frequencies that are not strictly ascending.
SpectrumFile parse_spectrum(const std::string& text);
SpectrumFile load_spectrum(const std::filesystem::path& path);

// "Z_<k>_<i>.csv" with 1-based ports.
std::string spectrum_filename(int row, int col);

// Every Z_<k>_<i>.csv in a directory. Throws UsageError for a missing or
// empty directory and for grids that differ between files.
SpectrumSamples load_spectrum_dir(const std::filesystem::path& dir);

}  // namespace greybox
