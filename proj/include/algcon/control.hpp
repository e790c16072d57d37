#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "algcon/distributed.hpp"
#include "algcon/graph_model.hpp"
#include "algcon/power_iteration.hpp"
#include "algcon/spectral.hpp"
#include "algcon/trace.hpp"

namespace algcon {

/// Target-tracking transmit power control.
struct ControlConfig {
  double lambda_star = 0.15;
  double mu = 0.05;
  double p_min = 1e-4;  // mW
  double p_max = 1e3;   // mW

  void validate() const;
};

/// clamp(p + mu (lambda* - z), p_min, p_max).
double power_update(double p, double z_est, const ControlConfig& cfg);

/// Random channel selection among M channels; a packet survives when none of
/// the receiver's d neighbors picked the same channel.
struct MacModel {
  int m_channels = 15;
  RadioParams radio;  // p_th, xi and node density rho; p_tx is supplied per call

  double zeta() const;  // pi rho / p_th
  void validate() const;
};

/// (1 - 1/M)^(zeta p_tx).
double collision_success_prob(const MacModel& mac, double p_tx);

struct ConnectivityPoint {
  double p_tx = 0.0;
  double radius = 0.0;
  double p_c = 0.0;
  double lambda2_geom = 0.0;      // ideal RGG at this power
  double lambda2_expected = 0.0;  // expected graph under the collision model
  double factorization_error = 0.0;  // |lambda2_expected - p_c lambda2_geom|
};

/// lambda_2 of the ideal RGG at each grid power (shared across channel counts).
std::vector<double> geometric_connectivity(std::span<const Point> positions, const RadioParams& radio,
                                           std::span<const double> p_grid);

/// lambda_2 of the expected graph versus transmit power. `geom` may carry the
/// result of geometric_connectivity for the same grid to skip recomputation.
std::vector<ConnectivityPoint> connectivity_vs_power(std::span<const Point> positions, const MacModel& mac,
                                                     std::span<const double> p_grid,
                                                     std::span<const double> geom = {});

/// How link success depends on power during control: a fixed uniform p_c or
/// the collision model.
using LinkProbability = std::variant<double, MacModel>;

struct ControlOptions {
  std::size_t record_every = 1;
  bool distributed = false;
  ConsensusConfig consensus;
};

struct ControlRun {
  TraceRecord trace;  // k, z, p_tx, lambda2_true
  double final_power = 0.0;
};

/// Interleaves the stochastic power iteration with power_update. The RGG is
/// rebuilt from the common power before every step.
ControlRun run_connectivity_control(std::span<const Point> positions, const RadioParams& radio,
                                    const LinkProbability& link, const StepSchedule& schedule,
                                    const ControlConfig& cfg, double p0, std::size_t iters, RandomStream& rng,
                                    const ControlOptions& options = {});

/// Estimator settings for one noisy connectivity measurement: constant
/// eps = eps_bar = eps_scale / max degree of the expected graph, constant alpha.
struct MeasureConfig {
  double alpha = 0.05;
  double eps_scale = 1.0;
  std::size_t inner_iters = 500;

  void validate() const;
};

/// Fresh estimator run on the collision-model graph at p_tx; returns the final z.
double measure_connectivity(double p_tx, std::span<const Point> positions, const MacModel& mac,
                            const MeasureConfig& measure, RandomStream& rng);

/// Kiefer-Wolfowitz gains q[t] = q0 / (t+1), c[t] = c0 / (t+1)^(1/3).
struct KwConfig {
  double q0 = 1.0;
  double c0 = 1.0;
  std::size_t t_max = 50;
  double p_floor = 1e-3;  // powers are kept at or above this value
  MeasureConfig measure;

  double gain(std::size_t t) const;
  double perturbation(std::size_t t) const;
  void validate() const;
};

using Measurement = std::function<double(double p, RandomStream& rng)>;

struct KwRun {
  double p_final = 0.0;
  TraceRecord trace;  // t, p_tx, z_plus, z_minus, lambda2
};

/// Generic KW ascent on a noisy objective. `truth`, if given, fills the
/// lambda2 column.
KwRun kw_maximize(const Measurement& measure, const KwConfig& kw, double p0, RandomStream& rng,
                  const std::function<double(double)>& truth = {});

/// KW ascent on the collision-model connectivity, two fresh measurements per step.
KwRun kw_maximize(std::span<const Point> positions, const MacModel& mac, const KwConfig& kw, double p0,
                  RandomStream& rng);

/// lambda_2 of the expected collision-model graph at p_tx.
double expected_connectivity(std::span<const Point> positions, const MacModel& mac, double p_tx);

}  // namespace algcon
