#pragma once

#include <string_view>

namespace greybox {

// Numerical thresholds shared by the analysis modules. Defaults are the
// documented ones; `GREYBOX_TOL` (e.g. "cancel=1e-9,repeated=1e-6") overrides.
struct Tolerances {
    // Two roots are common when |a - b| < cancel * (1 + |a|).
    double cancel = 1e-9;
    // sigma2/sigma1 threshold for a near-repeated mode.
    double repeated = 1e-6;
    // Two determinant zeros closer than this (relative) are flagged as repeated.
    double repeated_zero = 1e-6;
    // Layer-3 listing cutoff as a fraction of the largest |s_rho * rho|.
    double significance = 0.05;
    // Mode tracking: the runner-up must be at least this many times farther.
    double tracking_ratio = 10.0;

    // Applies a comma separated list of key=value pairs. Unknown keys or
    // malformed values throw UsageError.
    void apply(std::string_view overrides);
    static Tolerances from_env();
};

}  // namespace greybox
