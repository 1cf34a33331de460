#include "greybox/spectrum_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <algorithm>
#include <fstream>
#include <numbers>
#include <regex>
#include <sstream>

#include "greybox/errors.hpp"

namespace greybox {

namespace {

double parse_number(std::string_view field, int line, int col) {
    double v = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    if (first != last && *first == '+') ++first;
    const auto r = std::from_chars(first, last, v);
    if (first == last || r.ec != std::errc{} || r.ptr != last) throw ParseError("malformed number '" + std::string(field) + "'", line, col);
    if (!std::isfinite(v)) throw ParseError("non-finite number", line, col);
    return v;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

std::string format_spectrum(const std::vector<double>& freq_hz, const std::vector<Complex>& values) {
    if (freq_hz.size() != values.size()) throw UsageError("frequency and value counts differ");
    std::string out = kSpectrumHeader;
    out += '\n';
    char buf[128];
    for (std::size_t j = 0; j < freq_hz.size(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", freq_hz[j], values[j].real() + 0.0, values[j].imag() + 0.0);
        out += buf;
    }
    return out;
}

SpectrumFile parse_spectrum(const std::string& text) {
    SpectrumFile out;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        if (line == 1) {
            if (raw != kSpectrumHeader) throw ParseError(std::string("header must be exactly '") + kSpectrumHeader + "'", 1, 1);
            continue;
        }
        if (raw.empty()) {
            if (in.peek() == std::char_traits<char>::eof()) break;
            throw ParseError("empty row", line, 1);
        }
        double fields[3];
        std::size_t start = 0;
        for (int k = 0; k < 3; ++k) {
            const std::size_t comma = raw.find(',', start);
            if ((k < 2) != (comma != std::string::npos)) throw ParseError("expected 3 comma-separated fields", line, 1);
            const std::size_t end = k < 2 ? comma : raw.size();
            fields[k] = parse_number(std::string_view(raw).substr(start, end - start), line, int(start) + 1);
            start = end + 1;
        }
        if (!out.freq_hz.empty() && fields[0] <= out.freq_hz.back())
            throw ParseError("frequencies must be strictly ascending", line, 1);
        out.freq_hz.push_back(fields[0]);
        out.values.emplace_back(fields[1], fields[2]);
    }
    if (line == 0) throw ParseError("empty file", 1, 1);
    return out;
}

SpectrumFile load_spectrum(const std::filesystem::path& path) {
    try {
        return parse_spectrum(read_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path.filename().string() + ": " + e.what(), 0, 0);
    }
}

std::string spectrum_filename(int row, int col) {
    return "Z_" + std::to_string(row + 1) + "_" + std::to_string(col + 1) + ".csv";
}

SpectrumSamples load_spectrum_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw UsageError("not a directory: " + dir.string());
    static const std::regex pattern(R"(Z_([1-9][0-9]*)_([1-9][0-9]*)\.csv)");
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.is_regular_file() && std::regex_match(e.path().filename().string(), pattern)) files.push_back(e.path());
    if (files.empty()) throw UsageError("no Z_<k>_<i>.csv spectra in " + dir.string());
    std::sort(files.begin(), files.end());

    SpectrumSamples out;
    std::vector<double> grid;
    for (const auto& path : files) {
        const std::string name = path.filename().string();
        std::smatch m;
        std::regex_match(name, m, pattern);
        const EntryKey key{std::stoi(m[1]) - 1, std::stoi(m[2]) - 1};
        SpectrumFile f = load_spectrum(path);
        if (grid.empty())
            grid = f.freq_hz;
        else if (f.freq_hz != grid)
            throw UsageError("inconsistent frequency grid in " + name);
        out.entries[key] = std::move(f.values);
    }
    for (double f : grid) out.omega.push_back(2.0 * std::numbers::pi * f);
    out.validate();
    return out;
}

}  // namespace greybox
