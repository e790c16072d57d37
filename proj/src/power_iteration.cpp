#include "algcon/power_iteration.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "algcon/errors.hpp"

namespace algcon {

EstimatorState init_state(std::size_t n, RandomStream& rng) {
  if (n < 2) throw std::invalid_argument("init_state: need at least two nodes");
  EstimatorState s;
  s.x.resize(static_cast<Eigen::Index>(n));
  double norm = 0.0;
  while (!(norm > 1e-8)) {
    for (Eigen::Index i = 0; i < s.x.size(); ++i) s.x(i) = rng.normal();
    s.x.normalize();
    s.x.array() -= s.x.mean();
    norm = s.x.norm();
  }
  s.x /= norm;
  s.y = rng.uniform();
  s.z = rng.uniform();
  s.y0 = std::numeric_limits<double>::quiet_NaN();
  s.k = 0;
  return s;
}

void DeflationContext::validate(std::size_t n) const {
  if (stage != 2 && stage != 3) throw std::invalid_argument("deflation stage must be 2 or 3");
  if (known.size() != static_cast<std::size_t>(stage - 2)) {
    throw std::invalid_argument("stage " + std::to_string(stage) + " needs " + std::to_string(stage - 2) +
                                " known eigenpairs");
  }
  for (std::size_t a = 0; a < known.size(); ++a) {
    const auto& u = known[a].vector;
    if (static_cast<std::size_t>(u.size()) != n) throw std::invalid_argument("known eigenvector has wrong length");
    if (std::abs(u.norm() - 1.0) > 1e-6) throw std::invalid_argument("known eigenvectors must be unit norm");
    for (std::size_t b = 0; b < a; ++b) {
      if (std::abs(u.dot(known[b].vector)) > 1e-6) throw std::invalid_argument("known eigenvectors must be orthogonal");
    }
  }
}

std::pair<Matrix, Matrix> deflated_matrices(const DeflationContext& ctx, const Matrix& b, const Matrix& b2,
                                            double eps_bar, double eps_k) {
  Matrix c = b;
  Matrix c2 = b2;
  for (const auto& pair : ctx.known) {
    const Matrix uut = pair.vector * pair.vector.transpose();
    c -= (1.0 - eps_bar * pair.value) * uut;
    c2 -= (1.0 - eps_k * pair.value) * uut;
  }
  return {std::move(c), std::move(c2)};
}

double rayleigh_ratio(const Vector& x, const Vector& mx) {
  const double den = x.squaredNorm();
  if (!(den > 0.0)) throw DegenerateIterateError("rayleigh_ratio: zero vector");
  return x.dot(mx) / den;
}

EstimatorState step_with_samples(const EstimatorState& state, const Topology& topo, const LinkSample& sample_b,
                                 const LinkSample& sample_b2, const StepSchedule& schedule,
                                 const DeflationContext* deflation, const StepOptions& options) {
  const auto [eps_k, alpha_k] = schedule_value(schedule, state.k);
  const double eps_bar = schedule.eps_bar;
  const Vector& x = state.x;

  const Vector lx = apply_laplacian(topo, sample_b, x);
  const Vector lx2 = (&sample_b == &sample_b2) ? lx : apply_laplacian(topo, sample_b2, x);
  const double m = x.mean();

  Vector bx = x - eps_bar * lx;
  bx.array() -= m;
  Vector b2x = x - eps_k * lx2;
  b2x.array() -= m;
  if (deflation) {
    for (const auto& pair : deflation->known) {
      const double proj = pair.vector.dot(x);
      bx -= (1.0 - eps_bar * pair.value) * proj * pair.vector;
      b2x -= (1.0 - eps_k * pair.value) * proj * pair.vector;
    }
  }

  EstimatorState next;
  next.y0 = rayleigh_ratio(x, bx);
  next.y = state.y + alpha_k * (next.y0 - state.y);
  next.z = (1.0 - next.y) / eps_bar;

  const double norm = b2x.norm();
  if (!(norm >= 1e-14)) {
    throw DegenerateIterateError("power iteration annihilated the iterate at k=" + std::to_string(state.k));
  }
  next.x = b2x / norm;
  next.k = state.k + 1;
  if (options.mean_removal_period != 0 && next.k % options.mean_removal_period == 0) {
    next.x.array() -= next.x.mean();
    const double n2 = next.x.norm();
    if (!(n2 >= 1e-14)) throw DegenerateIterateError("iterate collapsed onto the consensus direction");
    next.x /= n2;
  }
  return next;
}

EstimatorState step_centralized(const EstimatorState& state, const Topology& topo, const LinkFailureModel& fm,
                                const StepSchedule& schedule, RandomStream& rng, const DeflationContext* deflation,
                                const StepOptions& options) {
  if (static_cast<std::size_t>(state.x.size()) != topo.size()) {
    throw std::invalid_argument("estimator state size does not match the topology");
  }
  const LinkSample sample = sample_links(topo, fm, rng);
  if (options.independent_draws) {
    const LinkSample sample2 = sample_links(topo, fm, rng);
    return step_with_samples(state, topo, sample, sample2, schedule, deflation, options);
  }
  return step_with_samples(state, topo, sample, sample, schedule, deflation, options);
}

OracleInfo OracleInfo::from_laplacian(const LaplacianMatrix& expected) {
  const auto spec = laplacian_spectrum(expected);
  return {spec.lambda2, spec.lambda3, spec.fiedler};
}

double fiedler_error(const Vector& x, const Vector& u) {
  const Vector xn = x.normalized();
  return std::min((xn - u).norm(), (xn + u).norm());
}

double fiedler_alignment(const Vector& x, const Vector& u) { return std::abs(x.dot(u)) / x.norm(); }

StepSchedule effective_schedule(const StepSchedule& s, EstimatorMode mode) {
  if (mode == EstimatorMode::adaptive) return StepSchedule::constant(s.eps_bar, s.alpha0, s.eps_bar);
  return s;
}

namespace {

EstimatorRun drive(std::span<const Segment> segments, const StepSchedule& schedule, RandomStream& rng,
                   const RunOptions& options, bool tracking) {
  if (segments.empty()) throw std::invalid_argument("estimator needs at least one segment");
  if (options.record_every == 0) throw std::invalid_argument("record_every must be positive");
  const StepSchedule s = effective_schedule(schedule, options.mode);
  s.validate();
  const std::size_t n = segments.front().topo.size();
  for (const auto& seg : segments) {
    if (seg.topo.size() != n) throw std::invalid_argument("all segments must have the same node count");
    seg.fm.validate_for(seg.topo);
  }
  const DeflationContext* deflation = options.deflation ? &*options.deflation : nullptr;
  if (deflation) deflation->validate(n);

  std::vector<std::string> columns{"k", "y", "z", "fiedler_err", "bound"};
  if (tracking) {
    columns.emplace_back("lambda2");
    columns.emplace_back("segment");
  }
  if (options.timing) columns.emplace_back("wallclock_ns");

  EstimatorRun run;
  run.trace = TraceRecord(columns);
  run.state = options.initial ? *options.initial : init_state(n, rng);

  const auto t0 = std::chrono::steady_clock::now();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::size_t seg_index = 0;
  double eps_sum = 0.0;  // since the active segment started

  auto record = [&](const Segment& seg) {
    std::vector<double> row{static_cast<double>(run.state.k), run.state.y, run.state.z, nan, nan};
    if (seg.oracle) {
      row[3] = fiedler_error(run.state.x, seg.oracle->fiedler);
      row[4] = std::exp(-(seg.oracle->lambda3 - seg.oracle->lambda2) * eps_sum);
    }
    if (tracking) {
      row.push_back(seg.oracle ? seg.oracle->lambda2 : nan);
      row.push_back(static_cast<double>(seg_index));
    }
    if (options.timing) {
      row.push_back(static_cast<double>(
          std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t0).count()));
    }
    run.trace.append(std::move(row));
  };

  record(segments.front());
  std::size_t streak = 0;
  bool stop = false;
  for (; seg_index < segments.size() && !stop; ++seg_index) {
    const Segment& seg = segments[seg_index];
    eps_sum = 0.0;
    for (std::size_t l = 0; l < seg.length; ++l) {
      const double z_prev = run.state.z;
      eps_sum += schedule_value(s, run.state.k).eps;
      run.state = step_centralized(run.state, seg.topo, seg.fm, s, rng, deflation, options.step);

      if (std::abs(run.state.z - z_prev) <= options.delta3 * std::max(std::abs(z_prev), 1e-8)) {
        ++streak;
      } else {
        streak = 0;
      }
      if (!run.converged_at && streak >= options.sustain) {
        run.converged_at = run.state.k;
        if (options.stop_on_convergence) stop = true;
      }
      const bool last = stop || (seg_index + 1 == segments.size() && l + 1 == seg.length);
      if (run.state.k % options.record_every == 0 || last) record(seg);
      if (stop) break;
    }
  }
  return run;
}

}  // namespace

EstimatorRun run_estimator(const Topology& topo, const LinkFailureModel& fm, const StepSchedule& schedule,
                           std::size_t iters, RandomStream& rng, const RunOptions& options,
                           const std::optional<OracleInfo>& oracle) {
  if (iters == 0) throw std::invalid_argument("run_estimator: iters must be at least 1");
  const Segment seg{topo, fm, iters, oracle};
  return drive(std::span<const Segment>(&seg, 1), schedule, rng, options, false);
}

EstimatorRun run_tracking(std::span<const Segment> segments, const StepSchedule& schedule, RandomStream& rng,
                          const RunOptions& options) {
  return drive(segments, schedule, rng, options, true);
}

std::vector<SpectrumEstimate> estimate_spectrum(const Topology& topo, const LinkFailureModel& fm,
                                                const StepSchedule& schedule, std::size_t stages, std::size_t iters,
                                                RandomStream& rng, const RunOptions& options) {
  if (stages != 1 && stages != 2) throw std::invalid_argument("estimate_spectrum: stages must be 1 or 2");
  RunOptions first = options;
  first.deflation.reset();
  auto run1 = run_estimator(topo, fm, schedule, iters, rng, first);
  std::vector<SpectrumEstimate> out{{run1.state.z, run1.state.x.normalized()}};
  if (stages == 2) {
    RunOptions second = options;
    second.initial.reset();
    second.deflation = DeflationContext{3, {{out[0].value, out[0].vector}}};
    auto run2 = run_estimator(topo, fm, schedule, iters, rng, second);
    out.push_back({run2.state.z, run2.state.x.normalized()});
  }
  return out;
}

}  // namespace algcon
