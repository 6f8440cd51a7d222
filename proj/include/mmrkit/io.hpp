#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "mmrkit/identified_set.hpp"
#include "mmrkit/mmr.hpp"
#include "mmrkit/regret.hpp"
#include "mmrkit/rules.hpp"

namespace mmrkit {

using Json = nlohmann::json;

/// Malformed or inconsistent configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json read_json_file(const std::filesystem::path& path);

/// {"x": [..] or [[..], ..], "x0": real or [..], "sigma": [..], "C": real}
StudySet study_from_json(const Json& j);

/// {"kind": "threshold" | "linear" | "rt_smooth" | "coin_flip" | "no_data" |
///  "mixture" | "plug_in", "params": {...}}. Plug-in rules bind to `study`.
DecisionRule rule_from_json(const Json& j, const StudySet& study);
Json rule_to_json(const DecisionRule& rule);

/// {"kind": "constant" | "linear" | "quadratic", "c": real}
CostFunction cost_from_json(const Json& j);

/// snake_case name used in JSON output, e.g. "large_id".
std::string regime_name(Regime regime);

Json solution_to_json(const MmrSolution& solution);

struct GridSpec {
  double lo;
  double hi;
  std::size_t n;

  std::vector<double> values() const;
};

/// Reads {"lo", "hi", "n"}, each optional over `fallback`; validates n >= 2, lo < hi.
GridSpec grid_from_json(const Json& j, const GridSpec& fallback);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// printf "%.9g".
std::string format_number(double x);

/// Header line, then one comma-separated line per row, '\n' line ends.
std::string to_csv(const CsvTable& table);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace mmrkit
