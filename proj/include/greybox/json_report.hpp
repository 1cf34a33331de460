#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "greybox/analysis.hpp"
#include "greybox/netmodel.hpp"
#include "greybox/report.hpp"
#include "greybox/vecfit.hpp"

namespace greybox {

using Json = nlohmann::ordered_json;

Json complex_json(Complex z);
Json mode_json(const Mode& mode, std::size_t index, bool pair);

Json modes_json(const std::vector<ListedMode>& modes);
Json greybox_json(const NetworkModel& net, const GreyboxReport& report, std::size_t index);
Json scan_peaks_json(const ScanResult& scan, int row, int col);
Json fit_json(const PoleResidueModel& model);
Json tune_json(const TuneResult& result);

// Two-space indentation, numbers rounded to 12 significant digits, -0
// printed as 0, trailing newline.
std::string dump_json(const Json& doc);

}  // namespace greybox
