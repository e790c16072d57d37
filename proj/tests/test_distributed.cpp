#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "algcon/distributed.hpp"
#include "algcon/errors.hpp"
#include "test_support.hpp"

using namespace algcon;

namespace {

Topology rgg20(std::uint64_t seed, double radius) {
  RandomStream rng(seed, 0);
  return build_rgg(uniform_positions(20, 1.0, 1.0, rng), radius);
}

double spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

}  // namespace

TEST_CASE("delta convergence with the zero guard") {
  CHECK(delta_converged(1.0, 1.05, 0.1));
  CHECK_FALSE(delta_converged(1.0, 1.2, 0.1));
  CHECK(delta_converged(0.0, 1e-9, 0.1));  // guard floor 1e-8
  CHECK_FALSE(delta_converged(0.0, 1e-8, 0.1));
}

TEST_CASE("consensus average examples") {
  RandomStream rng(1);
  const Topology topo = rgg20(37, 0.4);
  const std::vector<double> same(20, 2.5);
  const auto fixed = consensus_average(same, topo, LinkFailureModel::uniform(1.0), 0.1, 1e-6, 1000, rng);
  CHECK(fixed.iters == 1);
  for (double v : fixed.values) CHECK(v == 2.5);

  // One tick averages exactly; the round then needs a second tick to see no change.
  const std::vector<double> k3{0.0, 3.0, 6.0};
  try {
    consensus_average(k3, complete_graph(3), LinkFailureModel::uniform(1.0), 1.0 / 3.0, 1e-6, 1, rng);
    FAIL("a single tick cannot confirm convergence");
  } catch (const RoundTimeoutError& e) {
    for (double v : e.partial()) CHECK(v == doctest::Approx(3.0).epsilon(1e-15));
  }
  const auto k3_round = consensus_average(k3, complete_graph(3), LinkFailureModel::uniform(1.0), 1.0 / 3.0, 1e-6, 10, rng);
  CHECK(k3_round.iters == 2);

  // Oracle: the arithmetic mean, preserved by doubly stochastic ticks.
  const std::vector<double> p3{1.0, 2.0, 3.0};
  const double mean = std::accumulate(p3.begin(), p3.end(), 0.0) / 3.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RandomStream r(seed);
    const auto res = consensus_average(p3, path_graph(3), LinkFailureModel::uniform(0.9), 0.3, 1e-6, 100000, r);
    for (double v : res.values) CHECK(std::abs(v - mean) <= 1e-4);
  }
}

TEST_CASE("consensus errors") {
  RandomStream rng(2);
  const std::vector<double> v{1.0, 5.0, -2.0};
  CHECK_THROWS_AS(
      consensus_average(v, path_graph(3), LinkFailureModel::uniform(0.9, SymmetryMode::asymmetric), 0.3, 1e-3, 100, rng),
      std::invalid_argument);
  try {
    consensus_average(v, path_graph(3), LinkFailureModel::uniform(0.9), 0.3, 1e-12, 3, rng);
    FAIL("expected a timeout");
  } catch (const RoundTimeoutError& e) {
    CHECK(e.iters() == 3);
    CHECK(e.partial().size() == 3);
    CHECK(std::accumulate(e.partial().begin(), e.partial().end(), 0.0) == doctest::Approx(4.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(consensus_ratio(v, std::vector<double>{1.0, -1.0, 0.0}, path_graph(3), LinkFailureModel::uniform(1.0),
                                  0.3, 1e-3, 100, rng),
                  std::invalid_argument);
}

TEST_CASE("property: consensus preserves the sum and every tick matrix is doubly stochastic") {
  RandomStream gen(3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 3 + static_cast<std::size_t>(gen.uniform() * 20);
    const Topology topo = testing_support::random_connected_graph(n, 0.3, gen);
    const auto fm = LinkFailureModel::uniform(gen.uniform(0.3, 1.0));
    const double eps_c = 0.9 / topo.max_degree();

    const LinkSample s = sample_links(topo, fm, gen);
    const Matrix w = iteration_matrix(laplacian_from_sample(topo, s), eps_c);
    CHECK((w.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
    CHECK((w.colwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);

    std::vector<double> v(n);
    for (auto& x : v) x = gen.uniform(-5.0, 5.0);
    const double sum = std::accumulate(v.begin(), v.end(), 0.0);
    const auto max_ticks = 1 + static_cast<std::size_t>(gen.uniform() * 50);
    try {
      const auto res = consensus_average(v, topo, fm, eps_c, 1e-14, max_ticks, gen);
      CHECK(std::abs(std::accumulate(res.values.begin(), res.values.end(), 0.0) - sum) <= 1e-9);
    } catch (const RoundTimeoutError& e) {
      CHECK(std::abs(std::accumulate(e.partial().begin(), e.partial().end(), 0.0) - sum) <= 1e-9);
    }
  }
}

TEST_CASE("consensus ratio examples") {
  RandomStream rng(4);
  const Topology topo = rgg20(37, 0.4);
  std::vector<double> d(20);
  for (auto& x : d) x = rng.uniform(0.5, 2.0);
  const auto ones = consensus_ratio(d, d, topo, LinkFailureModel::uniform(0.8), 0.1, 1e-6, 100000, rng);
  for (double v : ones.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

  const std::vector<double> numer{0.9, 0.0, 0.9};  // x_i b_i for x = (1, 0, -1), b = (0.9, 0, -0.9)
  const std::vector<double> denom{1.0, 0.0, 1.0};
  const auto r = consensus_ratio(numer, denom, path_graph(3), LinkFailureModel::uniform(1.0), 0.3, 1e-10, 100000, rng);
  for (double v : r.values) CHECK(v == doctest::Approx(0.9).epsilon(1e-9));

  std::vector<double> vals(20);
  for (auto& x : vals) x = rng.uniform(-1.0, 1.0);
  const std::vector<double> unit(20, 1.0);
  RandomStream a(77);
  RandomStream b(77);
  const auto ratio = consensus_ratio(vals, unit, topo, LinkFailureModel::uniform(0.8), 0.1, 1e-8, 100000, a);
  const auto avg = consensus_average(vals, topo, LinkFailureModel::uniform(0.8), 0.1, 1e-8, 100000, b);
  for (std::size_t i = 0; i < 20; ++i) CHECK(ratio.values[i] == doctest::Approx(avg.values[i]).epsilon(1e-6));
}

TEST_CASE("local b examples") {
  const double eps_bar = 0.1;
  const std::vector<NeighborValue> n0{{0.0, 1.0}};
  const std::vector<NeighborValue> n1{{1.0, 1.0}, {-1.0, 1.0}};
  const std::vector<NeighborValue> n2{{0.0, 1.0}};
  CHECK(local_b(1.0, n0, 0.0, eps_bar, 0.2).b == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(local_b(0.0, n1, 0.0, eps_bar, 0.2).b == doctest::Approx(0.0));
  CHECK(local_b(-1.0, n2, 0.0, eps_bar, 0.2).b == doctest::Approx(-0.9).epsilon(1e-15));
  CHECK(local_b(1.0, n0, 0.0, eps_bar, 0.2).b2 == doctest::Approx(0.8).epsilon(1e-15));

  const std::vector<NeighborValue> dropped{{4.0, 0.0}, {-2.0, 0.0}};
  CHECK(local_b(0.7, dropped, 0.0, eps_bar, 0.2).b == 0.7);
  CHECK(local_b(0.7, {}, 0.0, eps_bar, 0.2).b2 == 0.7);

  const std::vector<NeighborValue> flat{{2.5, 1.0}, {2.5, 1.0}, {2.5, 1.0}};
  const auto lb = local_b(2.5, flat, 2.5, eps_bar, 0.3);
  CHECK(lb.b == 0.0);
  CHECK(lb.b2 == 0.0);

  // Oracle: the same values from the dense deflated matrix on P3.
  Vector x(3);
  x << 1, 0, -1;
  const Vector b = deflate(iteration_matrix(laplacian(path_graph(3)), eps_bar)) * x;
  CHECK(b(0) == doctest::Approx(0.9));
  CHECK(b(2) == doctest::Approx(-0.9));
}

TEST_CASE("initial node states") {
  RandomStream a(5);
  const auto s = init_nodes(12, a);
  double sum = 0.0;
  double sq = 0.0;
  for (const auto& node : s.nodes) {
    sum += node.x;
    sq += node.x * node.x;
  }
  CHECK(std::abs(sum) <= 1e-9);
  CHECK(sq == doctest::Approx(12.0).epsilon(1e-12));
  CHECK(s.nodes[0].y != s.nodes[1].y);
  RandomStream b(5);
  const auto common = init_nodes(12, b, true);
  for (const auto& node : common.nodes) CHECK(node.y == common.nodes[0].y);
}

TEST_CASE("exact consensus reproduces the centralized step") {
  const Topology topo = rgg20(37, 0.4);
  const auto fm = LinkFailureModel::uniform(1.0);
  const auto sched = StepSchedule::diminishing(0.4, 0.51, 1.5, 0.51, 0.1);
  ConsensusConfig cfg;
  cfg.eps_c = 0.1;
  cfg.delta1 = cfg.delta2 = 1e-10;
  RandomStream init_rng(3);
  EstimatorState central = init_state(topo.size(), init_rng);
  DistributedState dist = nodes_from_state(central);
  RandomStream rc(10);
  RandomStream rd(11);
  for (int k = 0; k < 100; ++k) {
    central = step_centralized(central, topo, fm, sched, rc);
    auto step = distributed_step(dist, topo, fm, sched, cfg, rd);
    dist = std::move(step.state);
    CHECK(std::abs(dist.nodes[0].z - central.z) <= 1e-6);
    CHECK(z_dispersion(dist) <= 1e-6);
    // sqrt(avg b2^2) = ||b2|| / sqrt(N): the new x has squared norm N.
    double sq = 0.0;
    for (const auto& node : dist.nodes) sq += node.x * node.x;
    CHECK(std::abs(sq / 20.0 - 1.0) <= 1e-8);
  }
}

TEST_CASE("sqrt(N) scaling of x does not change the next Rayleigh ratio") {
  const Topology topo = rgg20(38, 0.4);
  const auto fm = LinkFailureModel::uniform(1.0);
  const auto sched = StepSchedule::diminishing(0.35, 0.51, 1.0, 0.8, 0.1);
  ConsensusConfig cfg;
  cfg.delta1 = cfg.delta2 = 1e-12;
  RandomStream init_rng(8);
  const EstimatorState base = init_state(topo.size(), init_rng);
  const DistributedState scaled = nodes_from_state(base);
  DistributedState unit = scaled;
  for (auto& node : unit.nodes) node.x /= std::sqrt(20.0);
  RandomStream a(1);
  RandomStream b(1);
  const auto s1 = distributed_step(scaled, topo, fm, sched, cfg, a);
  const auto s2 = distributed_step(unit, topo, fm, sched, cfg, b);
  for (std::size_t i = 0; i < 20; ++i) {
    CHECK(std::abs(s1.state.nodes[i].y - s2.state.nodes[i].y) <= 1e-9);
    CHECK(std::abs(s1.state.nodes[i].x - s2.state.nodes[i].x) <= 1e-9);
  }
}

TEST_CASE("communication cost totals") {
  const Topology topo = rgg20(38, 0.4);
  const auto fm = LinkFailureModel::uniform(0.9);
  const auto sched = StepSchedule::diminishing(0.35, 0.51, 1.0, 0.8, 0.1);
  ConsensusConfig cfg;
  cfg.delta2 = 1e-3;
  cfg.scalar_cost = 2.5;
  RandomStream rng(6);
  const auto run = run_distributed(topo, fm, sched, cfg, 60, rng);
  const auto n1 = run.trace.column("n1");
  const auto n2 = run.trace.column("n2");
  const auto total = run.trace.column("cost_total");
  double s1 = 0.0;
  double s2 = 0.0;
  for (std::size_t r = 0; r < n1.size(); ++r) {
    s1 += n1[r];
    s2 += n2[r];
    CHECK(total[r] == (s1 + 2.0 * s2) * 2.5);
    if (r > 0) CHECK(total[r] >= total[r - 1]);
  }
  CHECK(run.cost.total == (static_cast<double>(run.state.sum_n1) + 2.0 * static_cast<double>(run.state.sum_n2)) * 2.5);
  CHECK(run.state.sum_n1 == static_cast<std::size_t>(s1));
  CHECK(run.cost.step == (n1.back() + 2.0 * n2.back()) * 2.5);
}

TEST_CASE("node agreement after each outer step") {
  // Nodes start from common estimates, so disagreement comes only from the
  // round-2 stopping precision. A per-tick change below delta leaves a
  // residual disagreement up to about 1 / (eps_c lambda2) times larger, the
  // number of ticks the slowest consensus mode needs to contract.
  const Topology topo = rgg20(38, 0.4);
  const auto fm = LinkFailureModel::uniform(0.9);
  const auto sched = StepSchedule::diminishing(0.35, 0.51, 1.0, 0.8, 0.1);
  const double lambda2 = laplacian_spectrum(expected_laplacian(topo, fm)).lambda2;
  for (double delta2 : {1e-2, 1e-3, 1e-4}) {
    ConsensusConfig cfg;
    cfg.delta2 = delta2;
    const double mixing = 1.0 / (cfg.eps_c * lambda2);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      RandomStream rng(seed, 2);
      DistributedState s = init_nodes(20, rng, true);
      for (int k = 0; k < 100; ++k) {
        s = distributed_step(s, topo, fm, sched, cfg, rng).state;
        std::vector<double> ys;
        for (const auto& node : s.nodes) ys.push_back(node.y);
        CHECK(spread(ys) == doctest::Approx(sched.eps_bar * z_dispersion(s)).epsilon(1e-9));
        CHECK(z_dispersion(s) <= 4.0 * delta2 * mixing * std::abs(s.nodes[0].z) + 1e-9);
      }
    }
  }
}

TEST_CASE("asymmetric failures are rejected") {
  RandomStream rng(1);
  const Topology topo = rgg20(38, 0.4);
  const auto fm = LinkFailureModel::uniform(0.9, SymmetryMode::asymmetric);
  CHECK_THROWS_AS(run_distributed(topo, fm, StepSchedule{}, ConsensusConfig{}, 5, rng), std::invalid_argument);
  CHECK_THROWS_AS(distributed_step(init_nodes(20, rng), topo, fm, StepSchedule{}, ConsensusConfig{}, rng),
                  std::invalid_argument);
}

TEST_CASE("denser expected graph needs fewer transmissions to converge") {
  const auto fm = LinkFailureModel::uniform(0.9);
  const auto sched = StepSchedule::diminishing(0.35, 0.51, 1.0, 0.8, 0.05);
  ConsensusConfig cfg;
  cfg.eps_c = 0.05;
  DistributedOptions opts;
  opts.stop_on_convergence = true;
  opts.record_every = 1000;
  double previous = std::numeric_limits<double>::infinity();
  double previous_l2 = 0.0;
  for (double radius : {0.4, 0.55, 0.7}) {
    const Topology topo = rgg20(38, radius);
    const Matrix lbar = expected_laplacian(topo, fm);
    const double l2 = laplacian_spectrum(lbar).lambda2;
    REQUIRE(cfg.eps_c < eps_bar_bound(lbar));
    REQUIRE(sched.eps_bar < eps_bar_bound(lbar));
    CHECK(l2 > previous_l2);
    double cost = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      RandomStream rng(seed, 3);
      const auto run = run_distributed(topo, fm, sched, cfg, 2000, rng, opts);
      REQUIRE(run.converged_at.has_value());
      cost += run.cost.total;
    }
    CHECK(cost < previous);
    previous = cost;
    previous_l2 = l2;
  }
}
