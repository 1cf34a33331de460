#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "greybox/netmodel.hpp"

namespace greybox {

// Network description files use a strict subset of TOML:
//
//   [meta]      name = "...", unit = "hz" | "rads"
//   [[nodes]]   id, ports (1 or 2, default 1)
//   [[branch]]  id, from, to, kind = "rl" | "rational", R, L | num, den
//   [[shunt]]   id, node, kind = "rl" | "c" | "rlc" | "rational" | "spectrum",
//               R, L, C | num, den | file
//
// num/den hold ascending real coefficients; a 2-port block nests them as a
// 2 x 2 list of coefficient lists. Unknown sections and keys are rejected
// with a ParseError carrying line and column.
NetworkModel parse_network(std::string_view text);
NetworkModel load_network(const std::filesystem::path& path);

// Normalized form: meta, nodes, branches, shunts, numbers with 17
// significant digits. parse(serialize(m)) reproduces m.
std::string serialize_network(const NetworkModel& net);

}  // namespace greybox
