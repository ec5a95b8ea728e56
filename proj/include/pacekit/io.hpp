#pragma once

#include <string>
#include <string_view>

#include "pacekit/distributions.hpp"
#include "pacekit/harness.hpp"
#include "pacekit/spendplan.hpp"

namespace pacekit {

// Versioned JSON documents. Parsing failures raise parse_error, file
// failures io_error.
std::string model_to_json(const EpisodicModel& model);
EpisodicModel model_from_json(std::string_view text);
std::string slow_model_to_json(const SlowMovingModel& model);
SlowMovingModel slow_model_from_json(std::string_view text);
std::string plan_to_json(const SpendPlan& plan);
SpendPlan plan_from_json(std::string_view text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

// INI file with top-level version, fixed_price and maxlog_k plus one
// section per range holding lo and hi.
Table1Ranges ranges_from_ini(std::string_view text);
std::string ranges_to_ini(const Table1Ranges& ranges);

// Sets one experiment key from its text form. "ranges_file" loads the file
// immediately. Throws invalid_config for unknown keys or bad values.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);

// Flat INI: every top-level key goes through apply_setting. schema_version
// must be 1 when present.
ExperimentConfig experiment_from_ini(std::string_view text);
std::string experiment_to_ini(const ExperimentConfig& config);

}  // namespace pacekit
