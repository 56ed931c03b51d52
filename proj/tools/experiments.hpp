#pragma once

#include <string>

#include "scenario.hpp"
#include "table.hpp"

namespace echolab::cli {

struct RunOptions {
  int jobs = 1;
  bool deterministic = false;  // forces jobs = 1
  std::string out_dir;         // prefix for output paths
};

/// Executes the scenario and writes the table + manifest. Returns the exit
/// status (0 ok, 2 validation, 3 numerical failure with partial output).
int run_scenario(const Scenario& s, const RunOptions& opts);

/// Property suites behind `echo-lab check`; appends one row per suite.
bool run_property_suites(Table& table, std::uint64_t seed, int samples);

}  // namespace echolab::cli
