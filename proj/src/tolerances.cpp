#include "greybox/tolerances.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <string>

#include "greybox/errors.hpp"

namespace greybox {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

}  // namespace

void Tolerances::apply(std::string_view overrides) {
    while (!overrides.empty()) {
        const auto comma = overrides.find(',');
        const std::string_view item = trim(overrides.substr(0, comma));
        overrides = comma == std::string_view::npos ? std::string_view{} : overrides.substr(comma + 1);
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) throw UsageError("tolerance override '" + std::string(item) + "' is not key=value");
        const std::string_view key = trim(item.substr(0, eq));
        const std::string_view text = trim(item.substr(eq + 1));
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value) || value <= 0.0)
            throw UsageError("tolerance '" + std::string(key) + "' needs a positive number");
        if (key == "cancel")
            cancel = value;
        else if (key == "repeated")
            repeated = value;
        else if (key == "repeated_zero")
            repeated_zero = value;
        else if (key == "significance")
            significance = value;
        else if (key == "tracking_ratio")
            tracking_ratio = value;
        else
            throw UsageError("unknown tolerance '" + std::string(key) + "'");
    }
}

Tolerances Tolerances::from_env() {
    Tolerances t;
    if (const char* env = std::getenv("GREYBOX_TOL")) t.apply(env);
    return t;
}

}  // namespace greybox
