#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "algcon/experiment.hpp"
#include "algcon/trace.hpp"

namespace algcon {

/// "algcon <version> (<git describe>)".
std::string version_string();

struct RunControls {
  std::size_t jobs = 1;
  bool write_files = true;
};

/// One (variant, seed) job. `stats` holds final estimates, oracle values,
/// errors and communication costs for that run.
struct SeedResult {
  std::size_t variant = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  std::string csv;  // file name relative to the output directory
  TraceRecord trace;
  nlohmann::json stats;
};

struct ScenarioResult {
  nlohmann::json summary;
  std::vector<SeedResult> runs;  // variant-major, seeds in config order
  std::size_t failures = 0;
};

/// Variant labels of a scenario (one per p_c for estimate / distributed /
/// uniform control, a single unnamed variant otherwise).
std::vector<std::string> variant_labels(const ExperimentConfig& cfg);

/// Runs every (variant, seed) job on up to `jobs` threads, writes one CSV per
/// job plus summary.json. Module errors are recorded per job and do not stop
/// the sweep.
ScenarioResult run_scenario(const ExperimentConfig& cfg, const RunControls& controls = {});

/// Runs an estimate, track or distributed scenario and reports, per job, the
/// dense oracle spectrum of the expected Laplacian, |z_final - lambda_2| and
/// the Fiedler alignment. Written to oracle.json when files are enabled.
nlohmann::json compare_oracle(const ExperimentConfig& cfg, const RunControls& controls = {});

}  // namespace algcon
