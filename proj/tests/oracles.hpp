#pragma once

// Independent reference computations used only by the tests. Nothing here
// calls the closed-form operators under test.

#include <Eigen/Dense>

#include <cmath>
#include <random>

namespace fpca::testing {

inline double fraction_objective(double a, double tau, double gamma, double beta) {
  const double ab = a * std::abs(beta);
  return 0.5 * (beta - gamma) * (beta - gamma) + tau * ab / (ab + 1.0);
}

struct BruteMinimum {
  double beta;
  double value;
};

// Exhaustive scan of [lo, hi] at `step`.
inline BruteMinimum brute_force_prox(double a, double tau, double gamma,
                                     double lo, double hi, double step = 1e-6) {
  const auto n = static_cast<long>(std::llround((hi - lo) / step));
  BruteMinimum best{lo, fraction_objective(a, tau, gamma, lo)};
  for (long i = 1; i <= n; ++i) {
    const double beta = lo + static_cast<double>(i) * step;
    const double v = fraction_objective(a, tau, gamma, beta);
    if (v < best.value) best = {beta, v};
  }
  return best;
}

// Largest singular value by power iteration on A^T A.
inline double power_iteration_norm(const Eigen::MatrixXd& a, int iters = 5000) {
  Eigen::VectorXd v = Eigen::VectorXd::Ones(a.cols()).normalized();
  double prev = 0.0;
  for (int k = 0; k < iters; ++k) {
    Eigen::VectorXd w = a.transpose() * (a * v);
    const double nrm = w.norm();
    if (nrm == 0.0) return 0.0;
    v = w / nrm;
    const double est = std::sqrt(nrm);
    if (std::abs(est - prev) <= 1e-15 * est) break;
    prev = est;
  }
  return (a * v).norm();
}

inline Eigen::MatrixXd random_matrix(std::mt19937_64& gen, Eigen::Index rows,
                                     Eigen::Index cols, double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, scale);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(gen);
  return m;
}

inline Eigen::MatrixXd random_orthogonal(std::mt19937_64& gen, Eigen::Index n) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_matrix(gen, n, n));
  return qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
}

}  // namespace fpca::testing
