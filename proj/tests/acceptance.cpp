// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>
#include <json.hpp>

#include "algcon/control.hpp"
#include "algcon/distributed.hpp"
#include "algcon/experiment.hpp"
#include "algcon/harness.hpp"
#include "algcon/power_iteration.hpp"
#include "algcon/spectral.hpp"
#include "test_support.hpp"

using namespace algcon;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

Topology desk_graph(std::uint64_t seed) {
  RandomStream rng(seed, 0);
  return build_rgg(uniform_positions(20, 1.0, 1.0, rng), 0.4);
}

// Jacobi spectra of P3, K_N, S_N against closed forms; reconstruction of
// random symmetric matrices.
Verdict criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  auto compare = [&](const Topology& topo, const std::vector<double>& expect) {
    const auto eig = dense_sym_eig(laplacian(topo));
    for (std::size_t i = 0; i < expect.size(); ++i) worst = std::max(worst, std::abs(eig[i].value - expect[i]));
  };
  compare(path_graph(3), {0.0, 1.0, 3.0});
  for (std::size_t n : {4, 7, 12, 20}) {
    std::vector<double> k(n, static_cast<double>(n));
    k[0] = 0.0;
    compare(complete_graph(n), k);
    std::vector<double> s(n, 1.0);
    s[0] = 0.0;
    s[n - 1] = static_cast<double>(n);
    compare(star_graph(n), s);
  }

  RandomStream rng(2024, 7);
  double recon = 0.0;
  double ortho = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform() * 30.0) % 30;
    const Matrix m = testing_support::random_symmetric(n, rng);
    const auto eig = dense_sym_eig(m);
    Matrix v(n, n);
    Vector d(n);
    for (int i = 0; i < n; ++i) {
      v.col(i) = eig[static_cast<std::size_t>(i)].vector;
      d(i) = eig[static_cast<std::size_t>(i)].value;
    }
    recon = std::max(recon, max_abs(v * d.asDiagonal() * v.transpose() - m));
    ortho = std::max(ortho, max_abs(v.transpose() * v - Matrix::Identity(n, n)));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool pass = worst <= 1e-9 && recon <= 1e-9 && ortho <= 1e-9 && secs < 5.0;
  return {pass, fmt::format("closed-form err {:.2e}, reconstruction {:.2e}, orthogonality {:.2e}, {:.2f}s", worst,
                            recon, ortho, secs)};
}

// 100 seeds on a fixed 20-node RGG for each link probability.
Verdict criterion2() {
  const Topology topo = desk_graph(37);
  const auto sched = StepSchedule::diminishing(0.4, 0.51, 1.5, 0.51, 0.1);
  bool pass = true;
  std::string detail;
  for (double p_c : {0.5, 0.8, 1.0}) {
    const auto fm = LinkFailureModel::uniform(p_c);
    const auto oracle = OracleInfo::from_laplacian(expected_laplacian(topo, fm));
    std::vector<double> err;
    std::vector<double> align;
    double mse3 = 0.0;
    double mse4 = 0.0;
    const int seeds = 100;
    for (int s = 0; s < seeds; ++s) {
      RandomStream rng(1000 + static_cast<std::uint64_t>(s), 1);
      RunOptions opts;
      opts.record_every = 1000;
      const auto run = run_estimator(topo, fm, sched, 20000, rng, opts, oracle);
      const auto k = run.trace.column("k");
      const auto z = run.trace.column("z");
      for (std::size_t r = 0; r < k.size(); ++r) {
        const double e = z[r] - oracle.lambda2;
        if (k[r] == 1000.0) mse3 += e * e / seeds;
        if (k[r] == 10000.0) mse4 += e * e / seeds;
      }
      err.push_back(std::abs(run.state.z - oracle.lambda2));
      align.push_back(fiedler_alignment(run.state.x, oracle.fiedler));
    }
    const double med_err = median(err);
    const double med_align = median(align);
    const bool ok = med_err <= 0.05 * oracle.lambda2 && med_align >= 0.98 && mse3 > 0.0 && mse4 <= 0.1 * mse3;
    pass = pass && ok;
    detail += fmt::format("{}p_c={} lambda2={:.4f} med|err|={:.2e} med align={:.4f} mse ratio={:.3f}",
                          detail.empty() ? "" : "; ", p_c, oracle.lambda2, med_err, med_align, mse4 / mse3);
  }
  return {pass, detail};
}

// eig_map and L-bar = p_c L on random graphs.
Verdict criterion3() {
  RandomStream rng(33, 3);
  double map_err = 0.0;
  double lin_err = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 3 + static_cast<std::size_t>(rng.uniform() * 18.0);
    const Topology topo = testing_support::random_connected_graph(n, 0.3, rng);
    const double p_c = rng.uniform(0.05, 1.0);
    const Matrix ideal = laplacian(topo);
    const Matrix expected = expected_laplacian(topo, LinkFailureModel::uniform(p_c));
    lin_err = std::max(lin_err, max_abs(expected - p_c * ideal));
    // The per-edge route builds L-bar entry by entry instead of scaling L.
    const auto n_idx = static_cast<Eigen::Index>(n);
    const Matrix per_edge = expected_laplacian(topo, LinkFailureModel::per_edge(Matrix::Constant(n_idx, n_idx, p_c)));
    lin_err = std::max(lin_err, max_abs(per_edge - p_c * ideal));

    const double eps_bar = 0.9 * eps_bar_bound(expected);
    const auto w = dense_sym_eig(iteration_matrix(expected, eps_bar));
    const auto l = dense_sym_eig(expected);
    for (std::size_t i = 0; i < n; ++i) map_err = std::max(map_err, std::abs(eig_map(w[n - 1 - i].value, eps_bar) - l[i].value));
  }
  return {map_err <= 1e-10 && lin_err <= 1e-10,
          fmt::format("eig_map err {:.2e}, linearity err {:.2e} over 50 graphs", map_err, lin_err)};
}

// Noise-free run: |<x,u3>| / |<x,u2>| against 10 x bound x initial ratio,
// checked while the bound is above the floating-point floor.
Verdict criterion4() {
  bool pass = true;
  std::string detail;
  const auto sched = StepSchedule::diminishing(0.4, 0.51, 1.5, 0.51, 0.1);
  const auto fm = LinkFailureModel::uniform(1.0);
  const std::vector<std::pair<std::string, Topology>> graphs{{"P4", path_graph(4)}, {"rgg20", desk_graph(37)}};
  for (const auto& [name, topo] : graphs) {
    const auto spec = laplacian_spectrum(laplacian(topo));
    RandomStream rng(4, 4);
    auto state = init_state(topo.size(), rng);
    auto ratio = [&](const Vector& x) { return std::abs(x.dot(spec.third)) / std::abs(x.dot(spec.fiedler)); };
    const double r0 = ratio(state.x);
    double worst = 0.0;
    std::size_t checked = 0;
    for (std::size_t k = 0; k < 20000; ++k) {
      const double bound = convergence_bound(spec.lambda2, spec.lambda3, sched, k);
      if (bound < 1e-10) break;
      state = step_centralized(state, topo, fm, sched, rng);
      worst = std::max(worst, ratio(state.x) / (bound * r0));
      ++checked;
    }
    pass = pass && worst <= 10.0 && checked > 10;
    detail += fmt::format("{}{}: max ratio/bound {:.3f} over {} steps", detail.empty() ? "" : "; ", name, worst, checked);
  }
  return {pass, detail};
}

// Distributed with tiny deltas tracks the centralized z; cost accounting.
Verdict criterion5() {
  const Topology topo = desk_graph(37);
  const auto fm = LinkFailureModel::uniform(1.0);
  const auto sched = StepSchedule::diminishing(0.4, 0.51, 1.5, 0.51, 0.1);
  RandomStream init(5, 0);
  auto central = init_state(topo.size(), init);
  auto nodes = nodes_from_state(central);
  ConsensusConfig cc;
  cc.eps_c = 0.1;
  cc.delta1 = 1e-10;
  cc.delta2 = 1e-10;
  cc.scalar_cost = 2.5;
  RandomStream ra(6, 0);
  RandomStream rb(7, 0);
  double max_diff = 0.0;
  double summed = 0.0;
  bool cost_exact = true;
  for (int k = 0; k < 500; ++k) {
    central = step_centralized(central, topo, fm, sched, ra);
    const auto step = distributed_step(nodes, topo, fm, sched, cc, rb);
    nodes = step.state;
    for (const auto& nd : nodes.nodes) max_diff = std::max(max_diff, std::abs(nd.z - central.z));
    summed += step.cost.step;
    cost_exact = cost_exact && step.cost.step == static_cast<double>(step.cost.n1 + 2 * step.cost.n2) * 2.5 &&
                 step.cost.total == static_cast<double>(nodes.sum_n1 + 2 * nodes.sum_n2) * 2.5;
  }
  const double formula = static_cast<double>(nodes.sum_n1 + 2 * nodes.sum_n2) * 2.5;
  cost_exact = cost_exact && summed == formula;
  return {max_diff <= 1e-6 && cost_exact,
          fmt::format("max |z_dist - z_central| {:.2e}, total cost {} (sum N1 {}, sum N2 {}), exact {}", max_diff,
                      formula, nodes.sum_n1, nodes.sum_n2, cost_exact)};
}

// Steady-state MSE and total cost versus delta2.
Verdict criterion6() {
  const Topology topo = desk_graph(38);
  const auto fm = LinkFailureModel::uniform(0.9);
  const double lambda2 = laplacian_spectrum(expected_laplacian(topo, fm)).lambda2;
  const auto sched = StepSchedule::diminishing(0.35, 0.51, 1.0, 0.8, 0.1);
  const int seeds = 100;
  std::vector<double> mse;
  std::vector<double> cost;
  int failures = 0;
  for (double d2 : {1e-2, 1e-3, 1e-4}) {
    ConsensusConfig cc;
    cc.eps_c = 0.1;
    cc.delta1 = 0.1;
    cc.delta2 = d2;
    double m = 0.0;
    double c = 0.0;
    for (int s = 0; s < seeds; ++s) {
      RandomStream rng(100 + static_cast<std::uint64_t>(s), 2);
      try {
        const auto run = run_distributed(topo, fm, sched, cc, 500, rng);
        const auto z = run.trace.column("z_node0");
        const std::size_t from = z.size() * 4 / 5;
        double acc = 0.0;
        for (std::size_t i = from; i < z.size(); ++i) acc += (z[i] - lambda2) * (z[i] - lambda2);
        m += acc / static_cast<double>(z.size() - from) / seeds;
        c += run.cost.total / seeds;
      } catch (const std::exception&) {
        ++failures;
      }
    }
    mse.push_back(m);
    cost.push_back(c);
  }
  const bool pass = failures == 0 && mse[1] <= mse[0] && mse[2] <= mse[1] && cost[1] >= cost[0] && cost[2] >= cost[1];
  return {pass, fmt::format("mse {:.3e} / {:.3e} / {:.3e}, mean cost {:.0f} / {:.0f} / {:.0f}, failed runs {}", mse[0],
                            mse[1], mse[2], cost[0], cost[1], cost[2], failures)};
}

// Power control on a 25-node deployment.
Verdict criterion7() {
  RandomStream g(2054, 0);
  const auto pos = uniform_positions(25, 40.0, 40.0, g);
  const RadioParams radio{1.0, 0.01, 2.0, 25.0 / 1600.0};
  const auto sched = StepSchedule::constant(0.04, 0.05, 0.04);
  const ControlConfig cfg;  // lambda* = 0.15, mu = 0.05
  const std::size_t iters = 10000;
  const int seeds = 3;
  bool pass = true;
  std::string detail;
  std::vector<double> power;
  for (double p_c : {1.0, 0.5}) {
    double l2 = 0.0;
    double p = 0.0;
    for (int s = 0; s < seeds; ++s) {
      RandomStream rng(static_cast<std::uint64_t>(s), 3);
      const auto run = run_connectivity_control(pos, radio, LinkProbability{p_c}, sched, cfg, 1.0, iters, rng);
      const auto lt = run.trace.column("lambda2_true");
      const auto pt = run.trace.column("p_tx");
      const std::size_t from = lt.size() * 4 / 5;
      for (std::size_t i = from; i < lt.size(); ++i) {
        l2 += lt[i] / static_cast<double>((lt.size() - from) * seeds);
        p += pt[i] / static_cast<double>((lt.size() - from) * seeds);
      }
    }
    pass = pass && std::abs(l2 - cfg.lambda_star) <= 0.1 * cfg.lambda_star;
    power.push_back(p);
    detail += fmt::format("p_c={}: mean lambda2 {:.4f}, steady power {:.4f} mW; ", p_c, l2, p);
  }
  pass = pass && power[1] > power[0];
  detail += fmt::format("power(0.5) > power(1): {}", power[1] > power[0]);
  return {pass, detail};
}

// Collision-model curves on 400 nodes.
Verdict criterion8() {
  const auto t0 = std::chrono::steady_clock::now();
  RandomStream g(1, 0);
  const auto pos = uniform_positions(400, 100.0, 100.0, g);
  MacModel mac;
  mac.radio = RadioParams{1.0, 0.01, 2.0, 0.04};
  std::vector<double> grid;
  for (int i = 1; i <= 40; ++i) grid.push_back(0.25 * i);
  const auto geom = geometric_connectivity(pos, mac.radio, grid);
  std::vector<std::vector<double>> curves;
  double fact = 0.0;
  for (int m : {5, 10, 15, 20}) {
    mac.m_channels = m;
    std::vector<double> c;
    for (const auto& pt : connectivity_vs_power(pos, mac, grid, geom)) {
      c.push_back(pt.lambda2_expected);
      fact = std::max(fact, pt.factorization_error);
    }
    curves.push_back(c);
  }
  bool dominance = true;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    dominance = dominance && curves[3][i] >= curves[1][i] - 1e-12 && curves[1][i] >= curves[0][i] - 1e-12;
  }
  const auto& m15 = curves[2];
  const auto peak = std::max_element(m15.begin(), m15.end());
  const bool interior = *peak > m15.front() && *peak > m15.back();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {fact <= 1e-10 && dominance && interior && secs < 600.0,
          fmt::format("factorization err {:.2e}, dominance {}, M=15 peak {:.4f} at {} mW (ends {:.4f}, {:.4f}), {:.1f}s",
                      fact, dominance, *peak, grid[static_cast<std::size_t>(peak - m15.begin())], m15.front(),
                      m15.back(), secs)};
}

// Kiefer-Wolfowitz on a quadratic and on the collision-model connectivity.
Verdict criterion9() {
  const auto f = [](double p) { return -(p - 5.0) * (p - 5.0); };
  double arg = 0.0;
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 10000; ++i) {
    const double p = 0.001 * i;
    if (f(p) > best) {
      best = f(p);
      arg = p;
    }
  }
  KwConfig quad;
  quad.q0 = 1.0;
  quad.c0 = 1.0;
  quad.t_max = 200;
  RandomStream qrng(0);
  const double quad_err = std::abs(kw_maximize([&](double p, RandomStream&) { return f(p); }, quad, 1.0, qrng).p_final - arg);

  RandomStream g(1, 0);
  const auto pos = uniform_positions(400, 100.0, 100.0, g);
  MacModel mac;
  mac.m_channels = 15;
  mac.radio = RadioParams{1.0, 0.01, 2.0, 0.04};
  std::vector<double> grid;
  for (int i = 1; i <= 40; ++i) grid.push_back(0.25 * i);
  double grid_max = 0.0;
  for (const auto& pt : connectivity_vs_power(pos, mac, grid)) grid_max = std::max(grid_max, pt.lambda2_expected);

  KwConfig kw;
  kw.q0 = 30.0;
  kw.c0 = 1.0;
  kw.t_max = 15;
  kw.measure.inner_iters = 3000;
  kw.measure.eps_scale = 0.15;
  kw.measure.alpha = 0.02;
  std::vector<double> ratios;
  std::string finals;
  for (std::uint64_t s = 0; s < 5; ++s) {
    RandomStream rng(s, 9);
    const auto run = kw_maximize(pos, mac, kw, 1.0, rng);
    ratios.push_back(expected_connectivity(pos, mac, run.p_final) / grid_max);
    finals += fmt::format("{}{:.2f}", finals.empty() ? "" : " ", run.p_final);
  }
  const double med = median(ratios);
  return {quad_err <= 0.1 && med >= 0.9,
          fmt::format("quadratic |p-argmax| {:.2e}; N=400 M=15 p_final [{}], median lambda2/grid max {:.3f} (grid max {:.4f})",
                      quad_err, finals, med, grid_max)};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Every scenario run twice into separate directories, CSVs compared byte by byte.
Verdict criterion10() {
  const std::vector<json> docs{
      json::parse(R"({"scenario": "estimate",
        "topology": {"n": 20, "radius": 0.4, "seed": 37}, "failure": {"p_c": [0.5, 1.0]},
        "schedule": {"mode": "diminishing", "eps0": 0.4, "gamma": 0.51, "alpha0": 1.5, "beta": 0.51, "eps_bar": 0.1},
        "run": {"iters": 2000, "record_every": 10}, "seeds": "0..2"})"),
      json::parse(R"({"scenario": "track",
        "topology": {"n": 20, "radius": 0.4, "seed": 37},
        "schedule": {"mode": "adaptive", "alpha0": 0.05, "eps_bar": 0.1},
        "segments": [{"length": 500, "p_c": 0.5}, {"length": 500, "p_c": 0.5, "radius": 0.5}],
        "run": {"record_every": 5}, "seeds": "0..1"})"),
      json::parse(R"({"scenario": "distributed",
        "topology": {"n": 20, "radius": 0.4, "seed": 38}, "failure": {"p_c": 0.9},
        "schedule": {"mode": "diminishing", "eps0": 0.35, "gamma": 0.51, "alpha0": 1.0, "beta": 0.8, "eps_bar": 0.1},
        "consensus": {"eps_c": 0.1, "delta1": 0.1, "delta2": 0.001},
        "run": {"iters": 50, "record_every": 1}, "seeds": "0..1"})"),
      json::parse(R"({"scenario": "control",
        "topology": {"n": 25, "width": 40.0, "height": 40.0, "seed": 2054}, "failure": {"p_c": [1.0, 0.5]},
        "radio": {"p_th": 0.01, "xi": 2.0},
        "schedule": {"mode": "adaptive", "alpha0": 0.05, "eps_bar": 0.04},
        "control": {"lambda_star": 0.15, "mu": 0.05, "p0": 1.0, "link": "uniform"},
        "run": {"iters": 2000, "record_every": 10}, "seeds": "0..1"})"),
  };
  std::size_t files = 0;
  std::size_t mismatches = 0;
  std::string errors;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    std::vector<fs::path> dirs;
    std::vector<ScenarioResult> results;
    try {
      auto cfg = parse_config(docs[d]);
      for (int rep = 0; rep < 2; ++rep) {
        const fs::path dir = fs::temp_directory_path() / fmt::format("algcon_accept_{}_{}", d, rep);
        fs::remove_all(dir);
        cfg.out_dir = dir.string();
        results.push_back(run_scenario(cfg, {static_cast<std::size_t>(1 + 2 * rep), true}));
        dirs.push_back(dir);
      }
    } catch (const std::exception& e) {
      errors += fmt::format(" config {}: {}", d, e.what());
      continue;
    }
    for (const auto& r : results[0].runs) {
      if (!r.ok) {
        errors += fmt::format(" {} failed: {}", r.csv, r.error);
        continue;
      }
      ++files;
      const auto a = slurp(dirs[0] / r.csv);
      const auto b = slurp(dirs[1] / r.csv);
      if (a.empty() || a != b) ++mismatches;
    }
  }
  return {errors.empty() && mismatches == 0 && files > 0,
          fmt::format("{} CSVs compared across repeated runs, {} mismatched{}", files, mismatches, errors)};
}

}  // namespace

int main() {
  const std::vector<std::function<Verdict()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                       criterion6, criterion7, criterion8, criterion9, criterion10};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i]();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %zu: %s [%.1fs]\n", v.pass ? "PASS" : "FAIL", i + 1, v.detail.c_str(), secs);
    std::fflush(stdout);
    if (!v.pass) ++failed;
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
