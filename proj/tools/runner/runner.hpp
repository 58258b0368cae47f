#pragma once

#include "dil/errors.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace dil::runner {

/// Configuration problem; exit code 2.
class ConfigError : public MalformedInput {
 public:
  using MalformedInput::MalformedInput;
};

struct ExperimentConfig {
  std::string name;
  std::string op;
  std::map<std::string, std::string> params;  // includes "space" when given
  int line = 0;
};

struct SuiteConfig {
  std::uint64_t seed = 0;
  std::vector<ExperimentConfig> experiments;
};

/// Text grammar:
///   # comment
///   seed = 7
///   [experiment NAME]
///   op = curvdim
///   space = sphere
///   eps = 0.4, 0.2, 0.1, 0.05
/// A document starting with '{' is read as JSON: {"seed": 7, "experiments": [{"name", "op", ...}]}.
SuiteConfig parse_config(const std::string& text);
SuiteConfig load_config(const std::string& path);

const std::vector<std::string>& known_ops();
/// Canonical op name; aliases such as verify-axioms map to validate-axioms. Throws ConfigError with suggestions.
std::string canonical_op(const std::string& op);

struct ExperimentResult {
  std::string name;
  std::string op;
  std::uint64_t seed = 0;
  bool pass = false;
  std::string error;
  nlohmann::json summary;
  std::vector<std::pair<std::string, std::string>> tables;  // table name, CSV text
};

struct ReportBundle {
  std::uint64_t seed = 0;
  std::vector<ExperimentResult> results;
  bool pass() const;
};

/// Checks every experiment (op, keys, space) before anything runs; throws ConfigError.
void validate_suite(const SuiteConfig& cfg);
ReportBundle run_suite(const SuiteConfig& cfg, int jobs = 1);
ExperimentResult run_experiment(const ExperimentConfig& e, std::uint64_t suite_seed);

enum class Format { Json, Csv, Both };
Format parse_format(const std::string& s);
nlohmann::json bundle_json(const ReportBundle& b);
/// summary.json and NAME.TABLE.csv under dir.
std::vector<std::string> emit_report(const ReportBundle& b, const std::string& dir, Format f);

}  // namespace dil::runner
