#pragma once

#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "lht/oracle.hpp"
#include "lht/simharness.hpp"

namespace lht::cli {

// One subcommand's outputs: the primary JSON document plus any CSV
// side-files, keyed by file name.
struct CommandOutput {
    nlohmann::json report;
    std::map<std::string, std::string> csv_files;
    bool ok = true; // oracle-check sets this to its overall verdict
};

// Emits ratios, the scalar constants, series constants, extra terms and the
// (center, mu, sigma) triples for each requested test.
CommandOutput run_calibrate(const nlohmann::json& config);

// Loads a data matrix, computes the four raw statistics and the null
// decisions at the configured level.
CommandOutput run_test(const nlohmann::json& config);

// Wraps sim::run_experiment; summary JSON plus QQ and histogram CSVs.
CommandOutput run_simulate(const nlohmann::json& config, Exec exec = Exec::Parallel);

// Power curves over a spike grid: one CSV row per alpha.
CommandOutput run_power(const nlohmann::json& config);

// Closed-form vs oracle comparison table over a grid of ratios.
CommandOutput run_oracle_check(const nlohmann::json& config, Exec exec = Exec::Parallel);

} // namespace lht::cli
