#include "algcon/distributed.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "algcon/errors.hpp"

namespace algcon {

void ConsensusConfig::validate() const {
  if (!(eps_c > 0.0)) throw std::invalid_argument("consensus eps_c must be positive");
  if (!(delta1 > 0.0) || !(delta2 > 0.0) || !(delta3 > 0.0)) throw std::invalid_argument("deltas must be positive");
  if (max_iters == 0) throw std::invalid_argument("consensus max_iters must be positive");
  if (!(scalar_cost >= 0.0)) throw std::invalid_argument("scalar_cost must be nonnegative");
}

bool delta_converged(double prev, double next, double delta) {
  return std::abs(next - prev) <= delta * std::max(std::abs(prev), 1e-8);
}

namespace {

void require_symmetric_failures(const LinkFailureModel& fm) {
  if (fm.mode() != SymmetryMode::symmetric) {
    throw std::invalid_argument("distributed consensus needs symmetric link failures (balanced graph every tick)");
  }
}

// One synchronous tick of every channel over a shared link draw. Returns which
// nodes received at least one message.
std::vector<char> consensus_tick(std::vector<Vector>& channels, const Topology& topo, const LinkFailureModel& fm,
                                 double eps_c, RandomStream& rng) {
  const LinkSample sample = sample_links(topo, fm, rng);
  for (auto& v : channels) v -= eps_c * apply_laplacian(topo, sample, v);
  std::vector<char> heard(topo.size(), 0);
  const auto& edges = topo.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (sample.forward[e] > 0.0) heard[edges[e].i] = 1;
    if (sample.backward[e] > 0.0) heard[edges[e].j] = 1;
  }
  return heard;
}

// Per-node stopping verdicts. A node re-evaluates delta-convergence only on
// ticks in which it heard a neighbor; a tick with all of its links down says
// nothing about convergence. Nodes without any link in the topology have
// nothing to wait for.
class StopFlags {
 public:
  explicit StopFlags(const Topology& topo) : ok_(topo.size(), 0) {
    for (std::size_t i = 0; i < topo.size(); ++i) ok_[i] = topo.degree(i) > 0.0 ? 0 : 1;
  }

  void update(std::size_t i, const std::vector<char>& heard, bool converged) {
    if (heard[i]) ok_[i] = converged ? 1 : 0;
  }

  bool all() const {
    for (char c : ok_) {
      if (!c) return false;
    }
    return true;
  }

 private:
  std::vector<char> ok_;
};

Vector to_vector(std::span<const double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Vector ratios(const Vector& numer, const Vector& denom) { return numer.cwiseQuotient(denom); }

bool denominators_ok(const Vector& denom) { return (denom.array() > 1e-12).all(); }

// Round 2 of the outer step: numerator x b, denominator x^2, and b2^2, all on
// the same ticks. Stops once the ratio and the b2^2 average are delta-converged.
struct RoundTwo {
  Vector ratio;
  Vector sq;
  std::size_t iters = 0;
};

RoundTwo rayleigh_and_norm_round(const Vector& numer, const Vector& denom, const Vector& sq, const Topology& topo,
                                 const LinkFailureModel& fm, double eps_c, double delta, std::size_t max_iters,
                                 RandomStream& rng) {
  std::vector<Vector> ch{numer, denom, sq};
  StopFlags flags(topo);
  for (std::size_t t = 1; t <= max_iters; ++t) {
    const Vector prev_ratio = ratios(ch[0], ch[1]);
    const Vector prev_denom = ch[1];
    const Vector prev_sq = ch[2];
    const auto heard = consensus_tick(ch, topo, fm, eps_c, rng);
    const Vector r = ratios(ch[0], ch[1]);
    for (std::size_t i = 0; i < topo.size(); ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      const bool valid = prev_denom(ii) > 1e-12 && ch[1](ii) > 1e-12;
      flags.update(i, heard,
                   valid && delta_converged(prev_ratio(ii), r(ii), delta) && delta_converged(prev_sq(ii), ch[2](ii), delta));
    }
    if (flags.all() && denominators_ok(ch[1])) return {r, ch[2], t};
  }
  throw RoundTimeoutError("Rayleigh/norm consensus round did not converge in " + std::to_string(max_iters) + " ticks",
                          to_std(ratios(ch[0], ch[1])), max_iters);
}

}  // namespace

ConsensusResult consensus_average(std::span<const double> values, const Topology& topo, const LinkFailureModel& fm,
                                  double eps_c, double delta, std::size_t max_iters, RandomStream& rng) {
  require_symmetric_failures(fm);
  if (values.size() != topo.size()) throw std::invalid_argument("consensus_average: one value per node required");
  if (!(eps_c > 0.0) || !(delta > 0.0) || max_iters == 0) throw std::invalid_argument("consensus_average: bad parameters");
  std::vector<Vector> ch{to_vector(values)};
  StopFlags flags(topo);
  for (std::size_t t = 1; t <= max_iters; ++t) {
    const Vector prev = ch[0];
    const auto heard = consensus_tick(ch, topo, fm, eps_c, rng);
    for (std::size_t i = 0; i < topo.size(); ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      flags.update(i, heard, delta_converged(prev(ii), ch[0](ii), delta));
    }
    if (flags.all()) return {to_std(ch[0]), t};
  }
  throw RoundTimeoutError("average consensus did not converge in " + std::to_string(max_iters) + " ticks",
                          to_std(ch[0]), max_iters);
}

ConsensusResult consensus_ratio(std::span<const double> numer, std::span<const double> denom, const Topology& topo,
                                const LinkFailureModel& fm, double eps_c, double delta, std::size_t max_iters,
                                RandomStream& rng) {
  require_symmetric_failures(fm);
  if (numer.size() != topo.size() || denom.size() != topo.size()) {
    throw std::invalid_argument("consensus_ratio: one numerator and denominator per node required");
  }
  if (!(eps_c > 0.0) || !(delta > 0.0) || max_iters == 0) throw std::invalid_argument("consensus_ratio: bad parameters");
  double sum = 0.0;
  for (double d : denom) sum += d;
  if (sum == 0.0) throw std::invalid_argument("consensus_ratio: denominators sum to zero");

  std::vector<Vector> ch{to_vector(numer), to_vector(denom)};
  StopFlags flags(topo);
  for (std::size_t t = 1; t <= max_iters; ++t) {
    const Vector prev_ratio = ratios(ch[0], ch[1]);
    const Vector prev_denom = ch[1];
    const auto heard = consensus_tick(ch, topo, fm, eps_c, rng);
    const Vector r = ratios(ch[0], ch[1]);
    for (std::size_t i = 0; i < topo.size(); ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      const bool valid = std::abs(prev_denom(ii)) > 1e-12 && std::abs(ch[1](ii)) > 1e-12;
      flags.update(i, heard, valid && delta_converged(prev_ratio(ii), r(ii), delta));
    }
    if (flags.all() && denominators_ok(ch[1].cwiseAbs())) return {to_std(r), t};
  }
  if (!denominators_ok(ch[1].cwiseAbs())) {
    throw Error("consensus_ratio: a local denominator vanished at read-out");
  }
  throw RoundTimeoutError("ratio consensus did not converge in " + std::to_string(max_iters) + " ticks",
                          to_std(ratios(ch[0], ch[1])), max_iters);
}

LocalB local_b(double x_i, std::span<const NeighborValue> neighbors, double m, double eps_bar, double eps_k) {
  double flow = 0.0;
  for (const auto& nb : neighbors) flow += nb.weight * (nb.x - x_i);
  return {x_i + eps_bar * flow - m, x_i + eps_k * flow - m};
}

DistributedState init_nodes(std::size_t n, RandomStream& rng, bool common_estimates) {
  const EstimatorState base = init_state(n, rng);
  DistributedState s = nodes_from_state(base);
  const double y = rng.uniform();
  const double z = rng.uniform();
  for (auto& node : s.nodes) {
    node.y = common_estimates ? y : rng.uniform();
    node.z = common_estimates ? z : rng.uniform();
  }
  return s;
}

DistributedState nodes_from_state(const EstimatorState& state) {
  DistributedState s;
  const double scale = std::sqrt(static_cast<double>(state.x.size()));
  s.nodes.resize(static_cast<std::size_t>(state.x.size()));
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    s.nodes[i].x = scale * state.x(static_cast<Eigen::Index>(i));
    s.nodes[i].y = state.y;
    s.nodes[i].z = state.z;
  }
  s.k = state.k;
  return s;
}

DistributedStep distributed_step(const DistributedState& state, const Topology& topo, const LinkFailureModel& fm,
                                 const StepSchedule& schedule, const ConsensusConfig& cfg, RandomStream& rng) {
  require_symmetric_failures(fm);
  cfg.validate();
  const std::size_t n = topo.size();
  if (state.nodes.size() != n) throw std::invalid_argument("distributed_step: node count mismatch");
  const auto [eps_k, alpha_k] = schedule_value(schedule, state.k);

  DistributedStep out{state, {}};
  auto& nodes = out.state.nodes;

  // 1. mean of x
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = nodes[i].x;
  const auto round1 = consensus_average(xs, topo, fm, cfg.eps_c, cfg.delta1, cfg.max_iters, rng);

  // 2. local b, b2 from one link draw; node i only reads its surviving neighbors
  const LinkSample sample = sample_links(topo, fm, rng);
  std::vector<std::vector<NeighborValue>> inbox(n);
  const auto& edges = topo.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    inbox[edges[e].i].push_back({xs[edges[e].j], sample.forward[e]});
    inbox[edges[e].j].push_back({xs[edges[e].i], sample.backward[e]});
  }
  Vector numer(static_cast<Eigen::Index>(n)), denom(static_cast<Eigen::Index>(n)), sq(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    nodes[i].m = round1.values[i];
    const auto lb = local_b(nodes[i].x, inbox[i], nodes[i].m, schedule.eps_bar, eps_k);
    nodes[i].b = lb.b;
    nodes[i].b2 = lb.b2;
    const auto ii = static_cast<Eigen::Index>(i);
    numer(ii) = nodes[i].x * lb.b;
    denom(ii) = nodes[i].x * nodes[i].x;
    sq(ii) = lb.b2 * lb.b2;
  }

  // 3. Rayleigh ratio and mean of b2^2
  const auto round2 = rayleigh_and_norm_round(numer, denom, sq, topo, fm, cfg.eps_c, cfg.delta2, cfg.max_iters, rng);

  // 4-6. local updates
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    auto& node = nodes[i];
    node.y += alpha_k * (round2.ratio(ii) - node.y);
    node.z = (1.0 - node.y) / schedule.eps_bar;
    if (!(round2.sq(ii) > 0.0)) {
      throw DegenerateIterateError("node " + std::to_string(i) + " estimated a zero norm for b2");
    }
    node.x = node.b2 / std::sqrt(round2.sq(ii));
  }
  out.state.k = state.k + 1;
  out.state.sum_n1 = state.sum_n1 + round1.iters;
  out.state.sum_n2 = state.sum_n2 + round2.iters;

  out.cost.n1 = round1.iters;
  out.cost.n2 = round2.iters;
  out.cost.scalar_cost = cfg.scalar_cost;
  out.cost.step = static_cast<double>(round1.iters + 2 * round2.iters) * cfg.scalar_cost;
  out.cost.total = static_cast<double>(out.state.sum_n1 + 2 * out.state.sum_n2) * cfg.scalar_cost;
  return out;
}

double z_dispersion(const DistributedState& state) {
  if (state.nodes.empty()) return 0.0;
  auto [lo, hi] = std::minmax_element(state.nodes.begin(), state.nodes.end(),
                                      [](const NodeState& a, const NodeState& b) { return a.z < b.z; });
  return hi->z - lo->z;
}

DistributedRun run_distributed(const Topology& topo, const LinkFailureModel& fm, const StepSchedule& schedule,
                               const ConsensusConfig& cfg, std::size_t outer_iters, RandomStream& rng,
                               const DistributedOptions& options) {
  if (outer_iters == 0) throw std::invalid_argument("run_distributed: outer_iters must be at least 1");
  if (options.record_every == 0) throw std::invalid_argument("record_every must be positive");
  schedule.validate();
  cfg.validate();
  require_symmetric_failures(fm);

  DistributedRun run;
  run.state = options.initial ? *options.initial : init_nodes(topo.size(), rng);
  run.trace = TraceRecord({"outer_k", "n1", "n2", "cost_total", "z_node0", "z_dispersion", "m_k"});
  run.cost.scalar_cost = cfg.scalar_cost;

  std::size_t streak = 0;
  for (std::size_t it = 0; it < outer_iters; ++it) {
    const double z_prev = run.state.nodes.front().z;
    auto step = distributed_step(run.state, topo, fm, schedule, cfg, rng);
    run.state = std::move(step.state);
    run.cost = step.cost;

    const double z0 = run.state.nodes.front().z;
    streak = delta_converged(z_prev, z0, cfg.delta3) ? streak + 1 : 0;
    bool stop = false;
    if (!run.converged_at && streak >= options.sustain) {
      run.converged_at = run.state.k;
      stop = options.stop_on_convergence;
    }
    if (run.state.k % options.record_every == 0 || stop || it + 1 == outer_iters) {
      run.trace.append({static_cast<double>(run.state.k), static_cast<double>(step.cost.n1),
                        static_cast<double>(step.cost.n2), step.cost.total, z0, z_dispersion(run.state),
                        run.state.nodes.front().m});
    }
    if (stop) break;
  }
  return run;
}

}  // namespace algcon
