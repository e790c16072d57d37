#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "algcon/control.hpp"
#include "algcon/distributed.hpp"
#include "algcon/graph_model.hpp"
#include "algcon/power_iteration.hpp"
#include "algcon/spectral.hpp"

namespace algcon {

enum class Scenario { estimate, track, distributed, control, mac_sweep, kw };

std::string to_string(Scenario s);
std::optional<Scenario> parse_scenario(const std::string& name);

/// Where the graph comes from: a topology file, or uniform positions on a
/// width x height area joined within a radius. Without a fixed radius the
/// radius follows the transmit power through the radio parameters.
struct TopologySource {
  std::string file;
  std::size_t n = 20;
  double width = 1.0;
  double height = 1.0;
  std::optional<double> radius;
  std::optional<std::uint64_t> seed;  // deployment seed; the run seed when absent
};

struct SegmentParams {
  std::size_t length = 0;
  double p_c = 1.0;
  std::optional<double> radius;  // rebuilds the RGG on the same positions
};

struct MacSweepParams {
  std::vector<int> m_channels{5, 10, 15, 20};
  double p_from = 0.25;
  double p_to = 10.0;
  double p_step = 0.25;

  std::vector<double> grid() const;
};

struct ControlParams {
  ControlConfig cfg;
  double p0 = 1.0;
  bool use_mac = false;  // collision model instead of the failure.p_c list
  int m_channels = 15;
  bool distributed = false;
};

struct KwParams {
  KwConfig kw;
  double p0 = 1.0;
  int m_channels = 15;
};

struct ExperimentConfig {
  Scenario scenario = Scenario::estimate;
  TopologySource topology;
  std::vector<double> p_c{1.0};
  SymmetryMode symmetry = SymmetryMode::symmetric;
  StepSchedule schedule;
  EstimatorMode mode = EstimatorMode::diminishing;
  std::size_t iters = 20000;
  std::size_t record_every = 100;
  bool stop_on_convergence = false;
  double delta3 = 5e-4;
  std::size_t sustain = 50;
  bool timing = false;
  std::vector<SegmentParams> segments;
  ConsensusConfig consensus;
  RadioParams radio{1.0, 0.01, 2.0, 0.0};  // rho <= 0 means "density of the deployment"
  ControlParams control;
  MacSweepParams mac_sweep;
  KwParams kw;
  std::vector<std::uint64_t> seeds{0};
  std::string out_dir = "out";

  /// Node density used by the radio model.
  double density() const;
  RadioParams resolved_radio() const;
};

/// Parses and validates a config document. Unknown keys and out-of-range
/// values raise ConfigError naming the dotted field path.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

/// Checks every parameter against the preconditions of the modules the
/// scenario will call.
void validate_config(const ExperimentConfig& cfg);

/// Fully resolved document (every default spelled out).
nlohmann::json config_to_json(const ExperimentConfig& cfg);

/// FNV-1a 64 of the resolved document, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

/// Applies "a.b.c=value" to a document. The value is read as JSON when it
/// parses, otherwise as a string.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// "N..M" (inclusive) or a single "N".
std::vector<std::uint64_t> parse_seed_range(const std::string& text);

}  // namespace algcon
