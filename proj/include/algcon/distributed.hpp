#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "algcon/graph_model.hpp"
#include "algcon/power_iteration.hpp"
#include "algcon/spectral.hpp"
#include "algcon/trace.hpp"

namespace algcon {

/// Local variables of one node. x is the sqrt(N)-scaled eigenvector component;
/// m, b, b2 are the values from the last completed outer step.
struct NodeState {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double m = 0.0;
  double b = 0.0;
  double b2 = 0.0;
};

/// Inner consensus parameters. Rounds 1 and 2 stop on delta1 / delta2
/// convergence; delta3 is the stopping rule on z for the outer loop.
struct ConsensusConfig {
  double eps_c = 0.1;
  double delta1 = 0.1;
  double delta2 = 1e-3;
  double delta3 = 5e-4;
  std::size_t max_iters = 100000;
  double scalar_cost = 1.0;

  void validate() const;
};

/// Communication spent by one outer step and accumulated over the run.
struct CommCost {
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  double scalar_cost = 1.0;
  double step = 0.0;   // (n1 + 2 n2) C
  double total = 0.0;  // (sum n1 + 2 sum n2) C
};

/// delta-convergence with the zero guard: |next - prev| <= delta * max(|prev|, 1e-8).
bool delta_converged(double prev, double next, double delta);

struct ConsensusResult {
  std::vector<double> values;
  std::size_t iters = 0;
};

/// Average consensus v <- (I - eps_c L[t]) v over fresh symmetric link draws
/// until every node is delta-converged. Throws RoundTimeoutError after
/// max_iters ticks and std::invalid_argument for asymmetric failures.
ConsensusResult consensus_average(std::span<const double> values, const Topology& topo, const LinkFailureModel& fm,
                                  double eps_c, double delta, std::size_t max_iters, RandomStream& rng);

/// Two synchronized average-consensus recursions (same link draws); every
/// node outputs avg_numer_i / avg_denom_i. Convergence is judged on the ratio.
ConsensusResult consensus_ratio(std::span<const double> numer, std::span<const double> denom, const Topology& topo,
                                const LinkFailureModel& fm, double eps_c, double delta, std::size_t max_iters,
                                RandomStream& rng);

struct NeighborValue {
  double x = 0.0;
  double weight = 0.0;  // a_ij[k] for this outer step
};

struct LocalB {
  double b = 0.0;
  double b2 = 0.0;
};

/// b_i = x_i + eps_bar sum_j a_ij[k] (x_j - x_i) - m, b2_i likewise with eps_k.
LocalB local_b(double x_i, std::span<const NeighborValue> neighbors, double m, double eps_bar, double eps_k);

struct DistributedState {
  std::vector<NodeState> nodes;
  std::size_t k = 0;
  std::size_t sum_n1 = 0;
  std::size_t sum_n2 = 0;
};

/// Random mean-free x scaled to norm sqrt(N); y_i, z_i uniform on [0, 1],
/// independent per node unless `common_estimates`.
DistributedState init_nodes(std::size_t n, RandomStream& rng, bool common_estimates = false);

/// Distributed state matching a centralized one (x scaled by sqrt(N)).
DistributedState nodes_from_state(const EstimatorState& state);

struct DistributedStep {
  DistributedState state;
  CommCost cost;
};

/// One outer iteration: round 1 for the mean of x, local b / b2 from one
/// shared link draw, round 2 for the Rayleigh ratio and mean of b2^2, local
/// y / z updates and the sqrt(N)-scaled power step.
DistributedStep distributed_step(const DistributedState& state, const Topology& topo, const LinkFailureModel& fm,
                                 const StepSchedule& schedule, const ConsensusConfig& cfg, RandomStream& rng);

struct DistributedOptions {
  std::size_t record_every = 1;
  bool stop_on_convergence = false;
  std::size_t sustain = 50;
  std::optional<DistributedState> initial;
};

struct DistributedRun {
  DistributedState state;
  TraceRecord trace;  // outer_k, n1, n2, cost_total, z_node0, z_dispersion, m_k
  CommCost cost;
  std::optional<std::size_t> converged_at;
};

DistributedRun run_distributed(const Topology& topo, const LinkFailureModel& fm, const StepSchedule& schedule,
                               const ConsensusConfig& cfg, std::size_t outer_iters, RandomStream& rng,
                               const DistributedOptions& options = {});

/// max_i z_i - min_i z_i.
double z_dispersion(const DistributedState& state);

}  // namespace algcon
