#include "algcon/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "algcon/errors.hpp"

namespace algcon {

void ControlConfig::validate() const {
  if (!(lambda_star > 0.0)) throw std::invalid_argument("lambda_star must be positive");
  if (!(mu >= 0.0)) throw std::invalid_argument("mu must be nonnegative");
  if (!(p_min > 0.0) || !(p_max >= p_min)) throw std::invalid_argument("need 0 < p_min <= p_max");
}

double power_update(double p, double z_est, const ControlConfig& cfg) {
  return std::clamp(p + cfg.mu * (cfg.lambda_star - z_est), cfg.p_min, cfg.p_max);
}

double MacModel::zeta() const { return std::numbers::pi * radio.rho / radio.p_th; }

void MacModel::validate() const {
  if (m_channels < 2) throw std::invalid_argument("MAC model needs at least two channels");
  if (!(radio.p_th > 0.0) || !(radio.xi > 0.0) || !(radio.rho > 0.0)) {
    throw std::invalid_argument("MAC radio parameters p_th, xi, rho must be positive");
  }
}

double collision_success_prob(const MacModel& mac, double p_tx) {
  mac.validate();
  if (!(p_tx > 0.0)) throw std::invalid_argument("collision_success_prob: p_tx must be positive");
  const double m = static_cast<double>(mac.m_channels);
  return std::pow(1.0 - 1.0 / m, mac.zeta() * p_tx);
}

namespace {

RadioParams at_power(const RadioParams& base, double p_tx) {
  RadioParams r = base;
  r.p_tx = p_tx;
  return r;
}

}  // namespace

std::vector<double> geometric_connectivity(std::span<const Point> positions, const RadioParams& radio,
                                           std::span<const double> p_grid) {
  std::vector<double> out;
  out.reserve(p_grid.size());
  for (double p : p_grid) {
    const Topology topo = build_rgg(positions, at_power(radio, p));
    out.push_back(algebraic_connectivity(laplacian(topo)));
  }
  return out;
}

std::vector<ConnectivityPoint> connectivity_vs_power(std::span<const Point> positions, const MacModel& mac,
                                                     std::span<const double> p_grid, std::span<const double> geom) {
  mac.validate();
  if (p_grid.size() < 2) throw std::invalid_argument("connectivity_vs_power: need at least two grid points");
  if (!geom.empty() && geom.size() != p_grid.size()) {
    throw std::invalid_argument("connectivity_vs_power: cached geometric curve has the wrong length");
  }
  std::vector<ConnectivityPoint> out;
  out.reserve(p_grid.size());
  for (std::size_t g = 0; g < p_grid.size(); ++g) {
    ConnectivityPoint pt;
    pt.p_tx = p_grid[g];
    const RadioParams radio = at_power(mac.radio, pt.p_tx);
    pt.radius = coverage_radius(radio);
    const Topology topo = build_rgg(positions, pt.radius);
    pt.p_c = collision_success_prob(mac, pt.p_tx);
    pt.lambda2_geom = geom.empty() ? algebraic_connectivity(laplacian(topo)) : geom[g];
    pt.lambda2_expected = algebraic_connectivity(expected_laplacian(topo, LinkFailureModel::uniform(pt.p_c)));
    pt.factorization_error = std::abs(pt.lambda2_expected - pt.p_c * pt.lambda2_geom);
    out.push_back(pt);
  }
  return out;
}

double expected_connectivity(std::span<const Point> positions, const MacModel& mac, double p_tx) {
  const Topology topo = build_rgg(positions, at_power(mac.radio, p_tx));
  return algebraic_connectivity(expected_laplacian(topo, LinkFailureModel::uniform(collision_success_prob(mac, p_tx))));
}

// ---------------------------------------------------------------------------

ControlRun run_connectivity_control(std::span<const Point> positions, const RadioParams& radio,
                                    const LinkProbability& link, const StepSchedule& schedule,
                                    const ControlConfig& cfg, double p0, std::size_t iters, RandomStream& rng,
                                    const ControlOptions& options) {
  cfg.validate();
  schedule.validate();
  if (options.record_every == 0) throw std::invalid_argument("record_every must be positive");
  if (!(p0 > 0.0)) throw std::invalid_argument("initial power must be positive");
  if (const auto* mac = std::get_if<MacModel>(&link)) mac->validate();
  const std::size_t n = positions.size();

  ControlRun run;
  run.trace = TraceRecord({"k", "z", "p_tx", "lambda2_true"});
  double power = std::clamp(p0, cfg.p_min, cfg.p_max);

  EstimatorState central;
  DistributedState dist;
  if (options.distributed) {
    dist = init_nodes(n, rng);
  } else {
    central = init_state(n, rng);
  }

  Matrix cached_adj;
  double cached_pc = -1.0;
  double cached_lambda2 = 0.0;

  for (std::size_t k = 0; k < iters; ++k) {
    const Topology topo = build_rgg(positions, at_power(radio, power));
    const double p_c = std::holds_alternative<double>(link) ? std::get<double>(link)
                                                            : collision_success_prob(std::get<MacModel>(link), power);
    const auto fm = LinkFailureModel::uniform(p_c);
    if (p_c != cached_pc || cached_adj.rows() != topo.adjacency().rows() || cached_adj != topo.adjacency()) {
      cached_adj = topo.adjacency();
      cached_pc = p_c;
      cached_lambda2 = algebraic_connectivity(expected_laplacian(topo, fm));
    }

    double z = 0.0;
    if (options.distributed) {
      dist = distributed_step(dist, topo, fm, schedule, options.consensus, rng).state;
      z = dist.nodes.front().z;
    } else {
      central = step_centralized(central, topo, fm, schedule, rng);
      z = central.z;
    }
    const double used = power;
    power = power_update(power, z, cfg);
    if ((k + 1) % options.record_every == 0 || k + 1 == iters) {
      run.trace.append({static_cast<double>(k + 1), z, used, cached_lambda2});
    }
  }
  run.final_power = power;
  return run;
}

// ---------------------------------------------------------------------------

void MeasureConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("measurement alpha must lie in (0, 1]");
  if (!(eps_scale > 0.0 && eps_scale <= 1.0)) throw std::invalid_argument("measurement eps_scale must lie in (0, 1]");
  if (inner_iters == 0) throw std::invalid_argument("inner_iters must be at least 1");
}

double measure_connectivity(double p_tx, std::span<const Point> positions, const MacModel& mac,
                            const MeasureConfig& measure, RandomStream& rng) {
  measure.validate();
  const Topology topo = build_rgg(positions, at_power(mac.radio, p_tx));
  const auto fm = LinkFailureModel::uniform(collision_success_prob(mac, p_tx));
  const LaplacianMatrix expected = expected_laplacian(topo, fm);
  if (topo.edges().empty() || !(expected.diagonal().maxCoeff() > 0.0)) return 0.0;
  const double eps_bar = measure.eps_scale * eps_bar_degree_bound(expected);
  const auto schedule = StepSchedule::constant(eps_bar, measure.alpha, eps_bar);
  RunOptions opts;
  opts.record_every = measure.inner_iters;
  return run_estimator(topo, fm, schedule, measure.inner_iters, rng, opts).state.z;
}

double KwConfig::gain(std::size_t t) const { return q0 / (static_cast<double>(t) + 1.0); }

double KwConfig::perturbation(std::size_t t) const { return c0 / std::cbrt(static_cast<double>(t) + 1.0); }

void KwConfig::validate() const {
  if (!(q0 > 0.0) || !(c0 > 0.0)) throw std::invalid_argument("KW gains q0 and c0 must be positive");
  if (t_max == 0) throw std::invalid_argument("KW t_max must be at least 1");
  if (!(p_floor > 0.0)) throw std::invalid_argument("KW p_floor must be positive");
  measure.validate();
}

KwRun kw_maximize(const Measurement& measure, const KwConfig& kw, double p0, RandomStream& rng,
                  const std::function<double(double)>& truth) {
  kw.validate();
  if (!(p0 > 0.0)) throw std::invalid_argument("kw_maximize: p0 must be positive");
  const double nan = std::numeric_limits<double>::quiet_NaN();
  KwRun run;
  run.trace = TraceRecord({"t", "p_tx", "z_plus", "z_minus", "lambda2"});
  double p = std::max(p0, kw.p_floor);
  for (std::size_t t = 0; t < kw.t_max; ++t) {
    const double c = kw.perturbation(t);
    const double hi = p + c;
    const double lo = std::max(p - c, kw.p_floor);
    const double z_plus = measure(hi, rng);
    const double z_minus = measure(lo, rng);
    run.trace.append({static_cast<double>(t), p, z_plus, z_minus, truth ? truth(p) : nan});
    p = std::max(kw.p_floor, p + kw.gain(t) * (z_plus - z_minus) / (hi - lo));
  }
  run.trace.append({static_cast<double>(kw.t_max), p, nan, nan, truth ? truth(p) : nan});
  run.p_final = p;
  return run;
}

KwRun kw_maximize(std::span<const Point> positions, const MacModel& mac, const KwConfig& kw, double p0,
                  RandomStream& rng) {
  mac.validate();
  const std::vector<Point> pos(positions.begin(), positions.end());
  const Measurement measure = [&pos, &mac, &kw](double p, RandomStream& r) {
    return measure_connectivity(p, pos, mac, kw.measure, r);
  };
  const auto truth = [&pos, &mac](double p) { return expected_connectivity(pos, mac, p); };
  return kw_maximize(measure, kw, p0, rng, truth);
}

}  // namespace algcon
