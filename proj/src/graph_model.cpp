#include "algcon/graph_model.hpp"

#include <cmath>
#include <numbers>
#include <queue>
#include <stdexcept>
#include <string>

namespace algcon {

namespace {

void check_positions(const std::vector<Point>& positions, std::size_t n) {
  if (!positions.empty() && positions.size() != n) {
    throw std::invalid_argument("topology has " + std::to_string(n) + " nodes but " +
                                std::to_string(positions.size()) + " positions");
  }
  for (const auto& p : positions) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw std::invalid_argument("non-finite node position");
  }
}

}  // namespace

Topology Topology::from_adjacency(Matrix adjacency, std::vector<Point> positions) {
  if (adjacency.rows() != adjacency.cols()) throw std::invalid_argument("adjacency must be square");
  const auto n = static_cast<std::size_t>(adjacency.rows());
  check_positions(positions, n);
  Topology t;
  for (Eigen::Index i = 0; i < adjacency.rows(); ++i) {
    if (adjacency(i, i) != 0.0) throw std::invalid_argument("adjacency has a self loop at node " + std::to_string(i));
    for (Eigen::Index j = 0; j < adjacency.cols(); ++j) {
      const double a = adjacency(i, j);
      if (!std::isfinite(a) || a < 0.0) throw std::invalid_argument("adjacency weights must be finite and nonnegative");
      if (a != adjacency(j, i)) throw std::invalid_argument("adjacency must be symmetric");
      if (j > i && a > 0.0) t.edges_.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), a});
    }
  }
  t.adjacency_ = std::move(adjacency);
  t.positions_ = std::move(positions);
  return t;
}

Topology Topology::from_edges(std::size_t n, std::span<const Edge> edges, std::vector<Point> positions) {
  Matrix a = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (const auto& e : edges) {
    if (e.i >= n || e.j >= n) throw std::invalid_argument("edge endpoint out of range");
    if (e.i == e.j) throw std::invalid_argument("self loops are not allowed");
    if (!(e.w >= 0.0) || !std::isfinite(e.w)) throw std::invalid_argument("edge weight must be finite and nonnegative");
    const auto i = static_cast<Eigen::Index>(e.i);
    const auto j = static_cast<Eigen::Index>(e.j);
    a(i, j) = e.w;
    a(j, i) = e.w;
  }
  return from_adjacency(std::move(a), std::move(positions));
}

std::vector<std::size_t> Topology::neighbors(std::size_t i) const {
  std::vector<std::size_t> out;
  const auto row = adjacency_.row(static_cast<Eigen::Index>(i));
  for (Eigen::Index j = 0; j < row.size(); ++j) {
    if (row(j) > 0.0) out.push_back(static_cast<std::size_t>(j));
  }
  return out;
}

double Topology::max_degree() const {
  if (adjacency_.size() == 0) return 0.0;
  return adjacency_.rowwise().sum().maxCoeff();
}

Topology path_graph(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i + 1 < n; ++i) e.push_back({i, i + 1, 1.0});
  return Topology::from_edges(n, e);
}

Topology complete_graph(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) e.push_back({i, j, 1.0});
  return Topology::from_edges(n, e);
}

Topology star_graph(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t j = 1; j < n; ++j) e.push_back({0, j, 1.0});
  return Topology::from_edges(n, e);
}

Topology cycle_graph(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i < n; ++i) e.push_back({std::min(i, (i + 1) % n), std::max(i, (i + 1) % n), 1.0});
  return Topology::from_edges(n, e);
}

bool is_connected(const Topology& topo) {
  const auto n = topo.size();
  if (n <= 1) return true;
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& e : topo.edges()) {
    adj[e.i].push_back(e.j);
    adj[e.j].push_back(e.i);
  }
  std::vector<bool> seen(n, false);
  std::queue<std::size_t> q;
  q.push(0);
  seen[0] = true;
  std::size_t count = 1;
  while (!q.empty()) {
    const auto u = q.front();
    q.pop();
    for (auto v : adj[u]) {
      if (!seen[v]) {
        seen[v] = true;
        ++count;
        q.push(v);
      }
    }
  }
  return count == n;
}

// ---------------------------------------------------------------------------

LinkFailureModel LinkFailureModel::uniform(double p, SymmetryMode mode) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("link success probability must lie in [0, 1]");
  LinkFailureModel fm;
  fm.uniform_ = p;
  fm.mode_ = mode;
  return fm;
}

LinkFailureModel LinkFailureModel::per_edge(Matrix probs, SymmetryMode mode) {
  if (probs.rows() != probs.cols() || probs.size() == 0) {
    throw std::invalid_argument("per-edge probability matrix must be square and non-empty");
  }
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    for (Eigen::Index j = 0; j < probs.cols(); ++j) {
      const double p = probs(i, j);
      if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("link success probability must lie in [0, 1]");
      if (mode == SymmetryMode::symmetric && p != probs(j, i)) {
        throw std::invalid_argument("symmetric failure mode needs a symmetric probability matrix");
      }
    }
  }
  LinkFailureModel fm;
  fm.probs_ = std::move(probs);
  fm.mode_ = mode;
  return fm;
}

double LinkFailureModel::success_prob(std::size_t i, std::size_t j) const {
  if (is_uniform()) return uniform_;
  return probs_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
}

void LinkFailureModel::validate_for(const Topology& topo) const {
  if (!is_uniform() && static_cast<std::size_t>(probs_.rows()) != topo.size()) {
    throw std::invalid_argument("per-edge probability matrix does not match the topology size");
  }
}

LinkSample sample_links(const Topology& topo, const LinkFailureModel& fm, RandomStream& rng) {
  const auto& edges = topo.edges();
  LinkSample s;
  s.forward.resize(edges.size());
  s.backward.resize(edges.size());
  const bool sym = fm.mode() == SymmetryMode::symmetric;
  if (fm.is_uniform() && sym) {
    const double p = fm.uniform_prob();
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const double w = rng.bernoulli(p) ? edges[e].w : 0.0;
      s.forward[e] = w;
      s.backward[e] = w;
    }
    return s;
  }
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto& ed = edges[e];
    const bool fwd = rng.bernoulli(fm.success_prob(ed.i, ed.j));
    const bool bwd = sym ? fwd : rng.bernoulli(fm.success_prob(ed.j, ed.i));
    s.forward[e] = fwd ? ed.w : 0.0;
    s.backward[e] = bwd ? ed.w : 0.0;
  }
  return s;
}

Vector apply_laplacian(const Topology& topo, const LinkSample& sample, const Vector& x) {
  const auto& edges = topo.edges();
  Vector out = Vector::Zero(x.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto i = static_cast<Eigen::Index>(edges[e].i);
    const auto j = static_cast<Eigen::Index>(edges[e].j);
    const double d = x(i) - x(j);
    out(i) += sample.forward[e] * d;
    out(j) -= sample.backward[e] * d;
  }
  return out;
}

LaplacianMatrix laplacian_from_sample(const Topology& topo, const LinkSample& sample) {
  const auto n = static_cast<Eigen::Index>(topo.size());
  LaplacianMatrix l = LaplacianMatrix::Zero(n, n);
  const auto& edges = topo.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto i = static_cast<Eigen::Index>(edges[e].i);
    const auto j = static_cast<Eigen::Index>(edges[e].j);
    l(i, j) = -sample.forward[e];
    l(i, i) += sample.forward[e];
    l(j, i) = -sample.backward[e];
    l(j, j) += sample.backward[e];
  }
  return l;
}

LaplacianMatrix laplacian(const Topology& topo) {
  const Matrix& a = topo.adjacency();
  LaplacianMatrix l = -a;
  l.diagonal() = a.rowwise().sum();
  return l;
}

LaplacianMatrix sample_laplacian(const Topology& topo, const LinkFailureModel& fm, RandomStream& rng) {
  return laplacian_from_sample(topo, sample_links(topo, fm, rng));
}

LaplacianMatrix expected_laplacian(const Topology& topo, const LinkFailureModel& fm) {
  fm.validate_for(topo);
  if (fm.is_uniform()) return fm.uniform_prob() * laplacian(topo);
  const auto n = static_cast<Eigen::Index>(topo.size());
  LaplacianMatrix l = LaplacianMatrix::Zero(n, n);
  for (const auto& e : topo.edges()) {
    const auto i = static_cast<Eigen::Index>(e.i);
    const auto j = static_cast<Eigen::Index>(e.j);
    l(i, j) = -fm.success_prob(e.i, e.j) * e.w;
    l(j, i) = -fm.success_prob(e.j, e.i) * e.w;
  }
  l.diagonal() = -l.rowwise().sum();
  return l;
}

// ---------------------------------------------------------------------------

void RadioParams::validate() const {
  if (!(p_tx > 0.0) || !(p_th > 0.0) || !(xi > 0.0) || !(rho > 0.0)) {
    throw std::invalid_argument("radio parameters p_tx, p_th, xi, rho must be strictly positive");
  }
}

double coverage_radius(const RadioParams& radio) {
  radio.validate();
  return std::pow(radio.p_tx / radio.p_th, 1.0 / radio.xi);
}

double mean_degree(const RadioParams& radio) {
  radio.validate();
  return std::numbers::pi * std::pow(radio.p_tx / radio.p_th, 2.0 / radio.xi) * radio.rho;
}

Topology build_rgg(std::span<const Point> positions, double radius) {
  if (!(radius >= 0.0)) throw std::invalid_argument("coverage radius must be nonnegative");
  const auto n = positions.size();
  std::vector<Point> pos(positions.begin(), positions.end());
  check_positions(pos, n);
  Matrix a = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const double r2 = radius * radius;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = pos[i].x - pos[j].x;
      const double dy = pos[i].y - pos[j].y;
      const double d2 = dx * dx + dy * dy;
      if (d2 == 0.0) {
        throw std::invalid_argument("nodes " + std::to_string(i) + " and " + std::to_string(j) +
                                    " share a position");
      }
      if (d2 <= r2) {
        a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
        a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = 1.0;
      }
    }
  }
  return Topology::from_adjacency(std::move(a), std::move(pos));
}

Topology build_rgg(std::span<const Point> positions, const RadioParams& radio) {
  return build_rgg(positions, coverage_radius(radio));
}

std::vector<Point> uniform_positions(std::size_t n, double width, double height, RandomStream& rng) {
  if (!(width > 0.0) || !(height > 0.0)) throw std::invalid_argument("deployment area must be positive");
  std::vector<Point> out(n);
  for (auto& p : out) {
    p.x = rng.uniform(0.0, width);
    p.y = rng.uniform(0.0, height);
  }
  return out;
}

}  // namespace algcon
