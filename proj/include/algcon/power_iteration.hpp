#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "algcon/graph_model.hpp"
#include "algcon/spectral.hpp"
#include "algcon/trace.hpp"

namespace algcon {

/// Iterates of the centralized stochastic power iteration.
///   x  current eigenvector estimate (unit norm after every step)
///   y  estimate of the second largest eigenvalue of the expected I - eps_bar L
///   z  estimate of lambda_2 of the expected Laplacian, z = (1 - y) / eps_bar
///   y0 Rayleigh ratio of the last step (NaN before the first step)
struct EstimatorState {
  Vector x;
  double y = 0.0;
  double z = 0.0;
  double y0 = 0.0;
  std::size_t k = 0;
};

/// Random unit x with its mean removed, y and z uniform on [0, 1].
EstimatorState init_state(std::size_t n, RandomStream& rng);

/// An eigenpair that has already been estimated and is deflated away.
struct KnownPair {
  double value = 0.0;
  Vector vector;
};

/// Stage 2 targets the Fiedler pair (no extra deflation); stage 3 deflates
/// one known pair to reach lambda_3.
struct DeflationContext {
  int stage = 2;
  std::vector<KnownPair> known;

  void validate(std::size_t n) const;
};

/// C = B - (1 - eps_bar lambda) u u^T and C2 = B2 - (1 - eps_k lambda) u u^T
/// for every known pair.
std::pair<Matrix, Matrix> deflated_matrices(const DeflationContext& ctx, const Matrix& b, const Matrix& b2,
                                            double eps_bar, double eps_k);

/// x^T (M x) / x^T x given x and the product M x.
double rayleigh_ratio(const Vector& x, const Vector& mx);

struct StepOptions {
  /// Draw separate link samples for B[k] and B2[k] (default: one shared draw).
  bool independent_draws = false;
  /// Re-project x onto 1-perp every this many steps (0 disables).
  std::size_t mean_removal_period = 100;
};

/// One step of the estimator using explicit link samples for B[k] and B2[k].
EstimatorState step_with_samples(const EstimatorState& state, const Topology& topo, const LinkSample& sample_b,
                                 const LinkSample& sample_b2, const StepSchedule& schedule,
                                 const DeflationContext* deflation = nullptr, const StepOptions& options = {});

/// One step: draw L[k], Rayleigh ratio on B[k], y/z updates, normalized
/// power step on B2[k]. Throws DegenerateIterateError when ||B2 x|| < 1e-14.
EstimatorState step_centralized(const EstimatorState& state, const Topology& topo, const LinkFailureModel& fm,
                                const StepSchedule& schedule, RandomStream& rng,
                                const DeflationContext* deflation = nullptr, const StepOptions& options = {});

/// Ground truth attached to a run for error columns.
struct OracleInfo {
  double lambda2 = 0.0;
  double lambda3 = 0.0;
  Vector fiedler;  // unit norm

  static OracleInfo from_laplacian(const LaplacianMatrix& expected);
};

/// min(||x - u||, ||x + u||) after normalizing x.
double fiedler_error(const Vector& x, const Vector& u);
/// |<x, u>| / ||x||.
double fiedler_alignment(const Vector& x, const Vector& u);

enum class EstimatorMode { diminishing, adaptive };

struct RunOptions {
  EstimatorMode mode = EstimatorMode::diminishing;
  std::size_t record_every = 1;
  bool timing = false;  // adds a wallclock_ns column (breaks byte-identical output)
  bool stop_on_convergence = false;
  double delta3 = 5e-4;
  std::size_t sustain = 50;
  StepOptions step;
  std::optional<EstimatorState> initial;
  std::optional<DeflationContext> deflation;
};

struct EstimatorRun {
  EstimatorState state;
  TraceRecord trace;
  std::optional<std::size_t> converged_at;  // first k of a sustained delta3 window
};

/// Adaptive mode replaces the schedule by alpha[k] = alpha0, eps[k] = eps_bar.
StepSchedule effective_schedule(const StepSchedule& s, EstimatorMode mode);

/// Runs `iters` steps. Trace columns: k, y, z, fiedler_err, bound [, wallclock_ns].
EstimatorRun run_estimator(const Topology& topo, const LinkFailureModel& fm, const StepSchedule& schedule,
                           std::size_t iters, RandomStream& rng, const RunOptions& options = {},
                           const std::optional<OracleInfo>& oracle = std::nullopt);

/// A stretch of iterations on a fixed expected graph.
struct Segment {
  Topology topo;
  LinkFailureModel fm;
  std::size_t length = 0;
  std::optional<OracleInfo> oracle;
};

/// Estimator over scripted topology switches. Adds columns lambda2 (oracle of
/// the active segment, NaN if absent) and segment.
EstimatorRun run_tracking(std::span<const Segment> segments, const StepSchedule& schedule, RandomStream& rng,
                          const RunOptions& options = {});

struct SpectrumEstimate {
  double value = 0.0;
  Vector vector;
};

/// stages = 1: Fiedler pair only. stages = 2: also lambda_3 by deflating the
/// stage-1 estimate.
std::vector<SpectrumEstimate> estimate_spectrum(const Topology& topo, const LinkFailureModel& fm,
                                                const StepSchedule& schedule, std::size_t stages, std::size_t iters,
                                                RandomStream& rng, const RunOptions& options = {});

}  // namespace algcon
