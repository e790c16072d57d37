#include "algcon/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "algcon/errors.hpp"

namespace algcon {

Matrix iteration_matrix(const LaplacianMatrix& lap, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("iteration_matrix: eps must be positive");
  return Matrix::Identity(lap.rows(), lap.cols()) - eps * lap;
}

Matrix deflate(const Matrix& w) {
  if (w.rows() != w.cols()) throw std::invalid_argument("deflate: matrix must be square");
  const double inv_n = 1.0 / static_cast<double>(w.rows());
  return (w.array() - inv_n).matrix();
}

double eig_map(double lambda_w, double eps_bar) {
  if (!(eps_bar > 0.0)) throw std::invalid_argument("eig_map: eps_bar must be positive");
  return (1.0 - lambda_w) / eps_bar;
}

double eps_bar_bound(const LaplacianMatrix& lap_expected) {
  const auto values = sym_eigenvalues(lap_expected);
  const double top = values.empty() ? 0.0 : values.back();
  if (!(top > 1e-12)) throw DegenerateGraphError("eps_bar_bound: expected Laplacian has no positive eigenvalue");
  return 2.0 / top;
}

double eps_bar_degree_bound(const LaplacianMatrix& lap_expected) {
  const double dmax = lap_expected.size() ? lap_expected.diagonal().maxCoeff() : 0.0;
  if (!(dmax > 0.0)) throw DegenerateGraphError("eps_bar_degree_bound: graph has no links");
  return 1.0 / dmax;
}

void normalize_sign(Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-9) {
      if (v(i) < 0.0) v = -v;
      return;
    }
  }
}

namespace {

void require_symmetric(const Matrix& m, const char* who) {
  if (m.rows() != m.cols()) throw std::invalid_argument(std::string(who) + ": matrix must be square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw std::invalid_argument(std::string(who) + ": matrix is not symmetric");
  }
}

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace

std::vector<EigPair> dense_sym_eig(const Matrix& m) {
  require_symmetric(m, "dense_sym_eig");
  const Eigen::Index n = m.rows();
  Matrix a = 0.5 * (m + m.transpose());
  Matrix v = Matrix::Identity(n, n);
  const double target = 1e-12 * a.norm();

  for (int sweep = 0; sweep < 100; ++sweep) {
    if (off_diagonal_norm(a) <= target) break;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Eigen::Index r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double arp = a(r, p);
          const double arq = a(r, q);
          a(r, p) = c * arp - s * arq;
          a(p, r) = a(r, p);
          a(r, q) = s * arp + c * arq;
          a(q, r) = a(r, q);
        }
        for (Eigen::Index r = 0; r < n; ++r) {
          const double vrp = v(r, p);
          const double vrq = v(r, q);
          v(r, p) = c * vrp - s * vrq;
          v(r, q) = s * vrp + c * vrq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return a(i, i) < a(j, j); });

  std::vector<EigPair> out;
  out.reserve(order.size());
  for (auto idx : order) {
    EigPair pair{a(idx, idx), v.col(idx)};
    pair.vector.normalize();
    normalize_sign(pair.vector);
    out.push_back(std::move(pair));
  }
  return out;
}

std::vector<double> sym_eigenvalues(const Matrix& m) {
  require_symmetric(m, "sym_eigenvalues");
  if (m.size() == 0) return {};
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error("sym_eigenvalues: eigensolver did not converge");
  const Vector& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

LaplacianSpectrum laplacian_spectrum(const LaplacianMatrix& lap) {
  if (lap.rows() < 2) throw std::invalid_argument("laplacian_spectrum: need at least two nodes");
  auto pairs = dense_sym_eig(lap);
  LaplacianSpectrum s;
  for (const auto& p : pairs) s.values.push_back(p.value);
  s.lambda_max = s.values.back();
  const double tol = 1e-9 * std::max(1.0, std::abs(s.lambda_max));
  s.lambda2 = s.values[1];
  s.fiedler = pairs[1].vector;
  if (pairs.size() > 2) {
    s.lambda3 = s.values[2];
    s.third = pairs[2].vector;
  } else {
    s.lambda3 = s.lambda2;
  }
  s.connected = s.lambda2 > tol;
  s.degenerate_gap = pairs.size() > 2 && std::abs(s.lambda3 - s.lambda2) <= tol;
  return s;
}

double algebraic_connectivity(const LaplacianMatrix& lap) {
  const auto values = sym_eigenvalues(lap);
  if (values.size() < 2) throw std::invalid_argument("algebraic_connectivity: need at least two nodes");
  return values[1];
}

// ---------------------------------------------------------------------------

StepSchedule StepSchedule::diminishing(double eps0, double gamma, double alpha0, double beta, double eps_bar) {
  StepSchedule s{ScheduleKind::diminishing, eps0, gamma, alpha0, beta, eps_bar};
  s.validate();
  return s;
}

StepSchedule StepSchedule::constant(double eps, double alpha, double eps_bar) {
  StepSchedule s{ScheduleKind::constant, eps, 0.0, alpha, 0.0, eps_bar};
  s.validate();
  return s;
}

void StepSchedule::validate() const {
  if (!(eps_bar > 0.0)) throw std::invalid_argument("eps_bar must be positive");
  if (kind == ScheduleKind::diminishing) {
    if (!(eps0 > 0.0)) throw std::invalid_argument("eps0 must be positive");
    if (!(alpha0 > 0.0)) throw std::invalid_argument("alpha0 must be positive");
    if (!(gamma > 0.5 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in (0.5, 1]");
    if (!(beta > 0.5 && beta <= 1.0)) throw std::invalid_argument("beta must lie in (0.5, 1]");
  } else {
    if (!(eps0 > 0.0)) throw std::invalid_argument("constant eps must be positive");
    if (!(alpha0 >= 0.0)) throw std::invalid_argument("constant alpha must be nonnegative");
    if (gamma != 0.0 || beta != 0.0) throw std::invalid_argument("constant schedules have gamma = beta = 0");
  }
}

StepValues schedule_value(const StepSchedule& s, std::size_t k) {
  if (s.kind == ScheduleKind::constant) return {s.eps0, s.alpha0};
  const double kp1 = static_cast<double>(k) + 1.0;
  return {s.eps0 / std::pow(kp1, s.gamma), s.alpha0 / std::pow(kp1, s.beta)};
}

double convergence_bound(double lambda2, double lambda3, const StepSchedule& s, std::size_t k) {
  if (!(lambda2 >= 0.0) || !(lambda3 >= lambda2)) {
    throw std::invalid_argument("convergence_bound: need lambda3 >= lambda2 >= 0");
  }
  double sum = 0.0;
  for (std::size_t l = 0; l <= k; ++l) sum += schedule_value(s, l).eps;
  return std::exp(-(lambda3 - lambda2) * sum);
}

double ConvergenceBoundTracker::advance(std::size_t k) {
  if (k != next_) throw std::logic_error("ConvergenceBoundTracker: indices must be consecutive");
  eps_sum_ += schedule_value(schedule_, k).eps;
  ++next_;
  return std::exp(-gap_ * eps_sum_);
}

}  // namespace algcon
