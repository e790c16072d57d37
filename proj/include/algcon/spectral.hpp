#pragma once

#include <cstddef>
#include <vector>

#include "algcon/graph_model.hpp"

namespace algcon {

/// I - eps * L. Unit row sums for any Laplacian.
Matrix iteration_matrix(const LaplacianMatrix& lap, double eps);

/// W - (1/n) 11^T, removing the consensus direction.
Matrix deflate(const Matrix& w);

/// Maps an eigenvalue of I - eps_bar L to the matching Laplacian eigenvalue.
double eig_map(double lambda_w, double eps_bar);

/// 2 / lambda_max(L_expected). eps_bar must lie strictly inside (0, bound).
/// Throws DegenerateGraphError for a zero Laplacian.
double eps_bar_bound(const LaplacianMatrix& lap_expected);

/// 1 / max_i L_ii. Since lambda_max <= 2 max degree, this never exceeds
/// eps_bar_bound and is computable from local degrees alone.
double eps_bar_degree_bound(const LaplacianMatrix& lap_expected);

struct EigPair {
  double value = 0.0;
  Vector vector;  // unit norm, first component above 1e-9 in magnitude is positive
};

/// Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations,
/// ascending order. Throws std::invalid_argument for non-symmetric input.
std::vector<EigPair> dense_sym_eig(const Matrix& m);

/// Eigenvalues only (ascending), via Householder tridiagonalization + QR.
/// Used for the large sweeps where Jacobi is too slow; cross-checked against
/// dense_sym_eig in the tests.
std::vector<double> sym_eigenvalues(const Matrix& m);

/// Flip `v` so its first component exceeding 1e-9 in magnitude is positive.
void normalize_sign(Vector& v);

/// Spectral summary of a symmetric Laplacian from the Jacobi oracle.
struct LaplacianSpectrum {
  std::vector<double> values;  // ascending
  double lambda2 = 0.0;
  double lambda3 = 0.0;
  double lambda_max = 0.0;
  Vector fiedler;  // unit norm, sign-normalized
  Vector third;    // eigenvector of lambda3 (empty for n < 3)
  bool connected = false;
  bool degenerate_gap = false;  // lambda2 == lambda3 within tolerance
};

LaplacianSpectrum laplacian_spectrum(const LaplacianMatrix& lap);

/// lambda_2 only; uses the fast eigenvalue path.
double algebraic_connectivity(const LaplacianMatrix& lap);

enum class ScheduleKind { diminishing, constant };

/// eps[k] = eps0 / (k+1)^gamma, alpha[k] = alpha0 / (k+1)^beta, plus the fixed
/// eps_bar used in the Rayleigh ratio. Constant kind has gamma = beta = 0.
struct StepSchedule {
  ScheduleKind kind = ScheduleKind::diminishing;
  double eps0 = 0.4;
  double gamma = 0.51;
  double alpha0 = 1.5;
  double beta = 0.51;
  double eps_bar = 0.1;

  static StepSchedule diminishing(double eps0, double gamma, double alpha0, double beta, double eps_bar);
  static StepSchedule constant(double eps, double alpha, double eps_bar);

  /// Throws std::invalid_argument naming the violated condition.
  void validate() const;
};

struct StepValues {
  double eps = 0.0;
  double alpha = 0.0;
};

StepValues schedule_value(const StepSchedule& s, std::size_t k);

/// exp(-(lambda3 - lambda2) * sum_{l=0..k} eps[l]).
double convergence_bound(double lambda2, double lambda3, const StepSchedule& s, std::size_t k);

/// Running version of convergence_bound for traces: call advance(k) with
/// k = 0, 1, 2, ... in order.
class ConvergenceBoundTracker {
 public:
  ConvergenceBoundTracker(double lambda2, double lambda3, StepSchedule s)
      : gap_(lambda3 - lambda2), schedule_(s) {}

  double advance(std::size_t k);

 private:
  double gap_;
  StepSchedule schedule_;
  double eps_sum_ = 0.0;
  std::size_t next_ = 0;
};

}  // namespace algcon
