#pragma once

#include <map>
#include <string>
#include <vector>

#include "regrest/config.hpp"
#include "regrest/report.hpp"

namespace regrest {

// One ablation axis -> list of values (as strings); cells are the cartesian
// product applied as config overrides.
using AblationGrid = std::map<std::string, std::vector<std::string>>;

AblationGrid parse_grid(const std::string& json_text);

HarnessConfig apply_overrides(HarnessConfig base,
                              const std::map<std::string, std::string>& cell);

// Executes one campaign end to end: resolve, extract, build both sides, loop,
// write report.json / report.md / ledger.jsonl under config.output_dir.
Report cmd_run(const HarnessConfig& config);

// Runs one campaign per grid cell; per-cell failures are isolated into rows
// with a failure label.
Report cmd_ablate(const HarnessConfig& config, const AblationGrid& grid);

// Reads a prior run's ledger and exports qualifying inputs as fuzzer seeds;
// returns the emitted handoff command.
std::string cmd_export_seeds(const HarnessConfig& config,
                             const std::string& run_dir, RiprLevel min_level,
                             const std::string& out_dir, long duration_sec);

} // namespace regrest
