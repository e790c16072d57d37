#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "algcon/random.hpp"

namespace algcon {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// L = D - A for some (ideal, sampled or expected) weight pattern. Rows sum to zero.
using LaplacianMatrix = Eigen::MatrixXd;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Undirected edge with i < j and weight w > 0.
struct Edge {
  std::size_t i = 0;
  std::size_t j = 0;
  double w = 1.0;
};

/// Undirected weighted graph: symmetric nonnegative adjacency, zero diagonal,
/// optional planar node positions in meters.
class Topology {
 public:
  Topology() = default;

  static Topology from_adjacency(Matrix adjacency, std::vector<Point> positions = {});
  static Topology from_edges(std::size_t n, std::span<const Edge> edges, std::vector<Point> positions = {});

  std::size_t size() const noexcept { return static_cast<std::size_t>(adjacency_.rows()); }
  const Matrix& adjacency() const noexcept { return adjacency_; }
  /// Active edges in row-major order of (i, j), i < j.
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::vector<Point>& positions() const noexcept { return positions_; }
  bool has_positions() const noexcept { return !positions_.empty(); }

  std::vector<std::size_t> neighbors(std::size_t i) const;
  double degree(std::size_t i) const { return adjacency_.row(static_cast<Eigen::Index>(i)).sum(); }
  double max_degree() const;

 private:
  Matrix adjacency_;
  std::vector<Edge> edges_;
  std::vector<Point> positions_;
};

/// Convenience constructors for the graphs used throughout the tests.
Topology path_graph(std::size_t n);
Topology complete_graph(std::size_t n);
Topology star_graph(std::size_t n);
Topology cycle_graph(std::size_t n);

bool is_connected(const Topology& topo);

enum class SymmetryMode { symmetric, asymmetric };

/// Independent per-link Bernoulli failures. A link (i, j) survives one draw
/// with probability success_prob(i, j); in symmetric mode one draw governs
/// both directions, in asymmetric mode each direction draws separately.
class LinkFailureModel {
 public:
  static LinkFailureModel uniform(double p, SymmetryMode mode = SymmetryMode::symmetric);
  /// Per-edge probabilities; entry (i, j) is the probability that i hears j.
  /// Symmetric mode requires a symmetric matrix.
  static LinkFailureModel per_edge(Matrix probs, SymmetryMode mode = SymmetryMode::symmetric);

  SymmetryMode mode() const noexcept { return mode_; }
  bool is_uniform() const noexcept { return probs_.size() == 0; }
  double uniform_prob() const noexcept { return uniform_; }
  double success_prob(std::size_t i, std::size_t j) const;

  /// Throws std::invalid_argument when the model does not fit the topology.
  void validate_for(const Topology& topo) const;

 private:
  double uniform_ = 1.0;
  Matrix probs_;
  SymmetryMode mode_ = SymmetryMode::symmetric;
};

/// One realization of the link process: `forward[e]` is the weight node
/// edges()[e].i hears from edges()[e].j this tick, `backward[e]` the reverse.
struct LinkSample {
  std::vector<double> forward;
  std::vector<double> backward;
};

LinkSample sample_links(const Topology& topo, const LinkFailureModel& fm, RandomStream& rng);
/// (L[k] x) computed from the surviving links without forming L[k].
Vector apply_laplacian(const Topology& topo, const LinkSample& sample, const Vector& x);
LaplacianMatrix laplacian_from_sample(const Topology& topo, const LinkSample& sample);

LaplacianMatrix laplacian(const Topology& topo);
LaplacianMatrix sample_laplacian(const Topology& topo, const LinkFailureModel& fm, RandomStream& rng);
LaplacianMatrix expected_laplacian(const Topology& topo, const LinkFailureModel& fm);

/// Free-space style threshold radio model (P_R = P_T / r^xi).
struct RadioParams {
  double p_tx = 1.0;   // mW
  double p_th = 0.01;  // mW
  double xi = 2.0;
  double rho = 1.0;    // nodes / m^2

  void validate() const;
};

double coverage_radius(const RadioParams& radio);
double mean_degree(const RadioParams& radio);

/// a_ij = 1 iff 0 < dist(i, j) <= radius. Coincident distinct nodes are rejected.
Topology build_rgg(std::span<const Point> positions, double radius);
Topology build_rgg(std::span<const Point> positions, const RadioParams& radio);

std::vector<Point> uniform_positions(std::size_t n, double width, double height, RandomStream& rng);

}  // namespace algcon
