#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vesseltrace/bcosfire.hpp"
#include "vesseltrace/postprocess.hpp"
#include "vesseltrace/preprocess.hpp"

namespace vesseltrace {

struct EvaluationConfig {
  int gt_observer = 1;  ///< 1 or 2
  int auc_thresholds = 256;

  void validate() const;
  friend bool operator==(const EvaluationConfig&, const EvaluationConfig&) = default;
};

struct PipelineConfig {
  PreprocessConfig preprocess;
  BCosfireConfig filter;
  PostprocessConfig post;
  EvaluationConfig eval;

  void validate() const;
  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

// Config files hold `key = value` lines; `#` starts a comment, lists are
// comma-separated. Every key is listed by config_keys(); unknown keys are
// rejected so a typo in a sweep cannot silently fall back to a default.

/// Sets one key from its textual value. Throws UnknownKey or TypeMismatch;
/// does not check cross-field invariants.
void set_config_value(PipelineConfig& cfg, std::string_view key, std::string_view value);

std::string get_config_value(const PipelineConfig& cfg, std::string_view key);

const std::vector<std::string>& config_keys();

PipelineConfig parse_config_text(std::string_view text);
PipelineConfig parse_config(const std::filesystem::path& path);

/// Every key, in config_keys() order, with round-trip exact values.
std::string serialize_config(const PipelineConfig& cfg);

/// A sweep grid: each line `key = v1, v2, ...`. Lists of lists (rho_list)
/// separate alternatives with `|`, e.g. `filter.rho_list = 0,2,4 | 0,2,4,6`.
struct SweepAxis {
  std::string key;
  std::vector<std::string> values;
};
using SweepGrid = std::vector<SweepAxis>;

SweepGrid parse_grid_text(std::string_view text);
SweepGrid parse_grid(const std::filesystem::path& path);

/// Number of combinations in the cross product (1 for an empty grid),
/// saturating at SIZE_MAX.
std::size_t grid_size(const SweepGrid& grid);

/// Combination `index` in row-major order (last axis fastest) as key/value pairs.
std::vector<std::pair<std::string, std::string>> grid_combination(const SweepGrid& grid, std::size_t index);

}  // namespace vesseltrace
