#pragma once

/// @file
/// Adaptive ADMM for the fraction-penalized low-rank + sparse split M = L + S.
///
/// Each iteration is closed form:
///   L <- G_{a1, 1/mu}(M - S + Y/mu)              singular value thresholding
///   S <- D_{a2, lambda/mu}(M - L + Y/mu)         entrywise thresholding
///   Y <- Y + mu (M - L - S)
///   mu <- min(rho * mu, mu_bar)
/// with lambda re-chosen every iteration so that the entrywise dead zone keeps
/// the `target_sparsity` largest residual entries.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fpca/errors.hpp"
#include "fpca/fraction_prox.hpp"
#include "fpca/thresholding.hpp"

namespace fpca {

struct SolverConfig {
  double a1 = 1.0;
  double a2 = 1.0;
  double rho_factor = 1.5;
  double epsilon = 0.01;
  std::optional<double> mu0_override;
  double mu_bar_multiplier = 1e7;
  /// Expected number of nonzeros in S*. Required; drives the lambda rule.
  long target_sparsity = 0;
  double tol = 1e-6;
  int max_iter = 1000;
  /// Fixed lambda (non-adaptive variant). With this set, rho_factor = 1
  /// gives the plain fixed-parameter iteration.
  std::optional<double> fixed_lambda;

  /// Throws ArgumentError / DegenerateInput if the config cannot drive a
  /// problem of the given shape.
  void validate(Eigen::Index rows, Eigen::Index cols) const {
    auto require = [](bool ok, const std::string& what) {
      if (!ok) throw ArgumentError("SolverConfig: " + what);
    };
    require(a1 > 0.0 && std::isfinite(a1), "a1 must be positive");
    require(a2 > 0.0 && std::isfinite(a2), "a2 must be positive");
    if (fixed_lambda) {
      require(*fixed_lambda > 0.0 && std::isfinite(*fixed_lambda),
              "fixed_lambda must be positive");
      require(rho_factor >= 1.0, "rho_factor must be >= 1");
    } else {
      require(rho_factor > 1.0, "rho_factor must be > 1");
      require(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in (0, 1)");
      require(target_sparsity >= 1, "target_sparsity must be >= 1");
      if (target_sparsity >= static_cast<long>(rows * cols)) {
        throw DegenerateInput("SolverConfig: target_sparsity " +
                              std::to_string(target_sparsity) +
                              " must be < rows*cols = " +
                              std::to_string(rows * cols));
      }
    }
    require(!mu0_override || (*mu0_override > 0.0 && std::isfinite(*mu0_override)),
            "mu0_override must be positive");
    require(mu_bar_multiplier > 0.0, "mu_bar_multiplier must be positive");
    require(tol > 0.0, "tol must be positive");
    require(max_iter >= 1, "max_iter must be >= 1");
  }
};

struct TraceEntry {
  int k = 0;  ///< 1-based iteration number
  double mu = 0.0;
  double lambda = 0.0;
  double residual = 0.0;
};

/// Iterate of the ADMM loop. `mu` is the value the next step will use.
struct SolverState {
  DenseMatrix l;
  DenseMatrix s;
  DenseMatrix y;
  double mu = 0.0;
  double lambda_current = 0.0;
  int k = 0;
  double residual = 0.0;
};

struct DecompositionResult {
  DenseMatrix l_star;
  DenseMatrix s_star;
  int iterations = 0;
  double final_residual = 0.0;
  int recovered_rank = 0;
  long recovered_nnz = 0;
  bool converged = false;
  double mu0 = 0.0;
  double mu_bar = 0.0;
  std::vector<TraceEntry> trace;
};

/// Initial penalty
///   mu0 = min{ 2 / (0.99 ||M||_2 + 1/(2 a1))^2,  a1 / (0.99 ||M||_2) }.
/// Throws DegenerateInput when ||M||_2 = 0.
[[nodiscard]] inline double initial_mu(const DenseMatrix& m, double a1) {
  if (!(a1 > 0.0)) {
    throw ArgumentError("initial_mu: a1 must be positive");
  }
  const double spectral = m.size() == 0 ? 0.0 : singular_values(m).maxCoeff();
  if (!(spectral > 0.0)) {
    throw DegenerateInput("initial_mu: ||M||_2 is zero");
  }
  const double scaled = 0.99 * spectral;
  const double first = 2.0 / std::pow(scaled + 1.0 / (2.0 * a1), 2);
  const double second = a1 / scaled;
  return std::min(first, second);
}

[[nodiscard]] inline double update_mu(double mu, double rho_factor,
                                      double mu_bar) noexcept {
  return std::min(rho_factor * mu, mu_bar);
}

enum class LambdaBranch {
  Linear,     ///< lambda = mu h_{gamma+1} / a2, threshold tau a2
  Quadratic,  ///< lambda = (1-eps) mu (2 a2 h_gamma + 1)^2 / (8 a2^2)
  Floor,      ///< h_{gamma+1} = 0; lambda clamped to a tiny positive value
  Fixed,      ///< user-supplied lambda
};

struct LambdaSelection {
  double lambda = 0.0;
  /// Dead-zone radius implied by the chosen branch.
  double threshold = 0.0;
  LambdaBranch branch = LambdaBranch::Linear;
  double h_gamma = 0.0;       ///< gamma-th largest |T|
  double h_gamma_next = 0.0;  ///< (gamma+1)-th largest |T|
};

/// Scale of the lambda floor relative to mu * max(1, max|T|).
inline constexpr double kLambdaFloorScale = 1e-12;

/// Chooses lambda so the entrywise dead zone passes the `gamma` largest
/// entries of |T| and zeroes the rest (1-based ranks, h_1 >= h_2 >= ...).
[[nodiscard]] inline LambdaSelection select_lambda(const DenseMatrix& t,
                                                   long gamma, double mu,
                                                   double a2, double epsilon) {
  const long count = static_cast<long>(t.size());
  if (gamma < 1) {
    throw ArgumentError("select_lambda: gamma must be >= 1");
  }
  if (gamma + 1 > count) {
    throw DegenerateInput("select_lambda: gamma + 1 = " +
                          std::to_string(gamma + 1) + " exceeds the " +
                          std::to_string(count) + " entries of T");
  }
  if (!(mu > 0.0) || !(a2 > 0.0)) {
    throw ArgumentError("select_lambda: mu and a2 must be positive");
  }

  std::vector<double> h(t.data(), t.data() + count);
  for (double& v : h) v = std::abs(v);
  // Descending order statistics at 0-based positions gamma-1 and gamma.
  auto desc = std::greater<>();
  std::nth_element(h.begin(), h.begin() + gamma, h.end(), desc);
  const double h_next = h[static_cast<std::size_t>(gamma)];
  const double h_gamma = *std::min_element(h.begin(), h.begin() + gamma);

  LambdaSelection sel;
  sel.h_gamma = h_gamma;
  sel.h_gamma_next = h_next;

  const double linear = mu * h_next / a2;
  if (linear <= mu / (2.0 * a2 * a2)) {
    if (h_next > 0.0) {
      sel.branch = LambdaBranch::Linear;
      sel.lambda = linear;
      sel.threshold = h_next;
    } else {
      double max_abs = 0.0;
      for (const double v : h) max_abs = std::max(max_abs, v);
      sel.branch = LambdaBranch::Floor;
      sel.lambda = mu * kLambdaFloorScale * std::max(1.0, max_abs);
      sel.threshold = sel.lambda / mu * a2;
    }
  } else {
    const double q = 2.0 * a2 * h_gamma + 1.0;
    sel.branch = LambdaBranch::Quadratic;
    sel.lambda = (1.0 - epsilon) * mu * q * q / (8.0 * a2 * a2);
    sel.threshold = std::sqrt(2.0 * sel.lambda / mu) - 1.0 / (2.0 * a2);
  }
  return sel;
}

/// Per-iteration diagnostics returned by admm_step().
struct StepReport {
  SingularValueThresholding svt;  ///< L-update (sigma of L^{k+1}, rank)
  Vector z_sigma;                 ///< singular values of Z^k
  double l_threshold = 0.0;       ///< threshold_value(a1, 1/mu_k)
  LambdaSelection selection;
  double mu = 0.0;  ///< mu_k used by this step
  long nnz_s = 0;
};

/// Zero-initialized state with the given starting penalty.
[[nodiscard]] inline SolverState make_state(const DenseMatrix& m, double mu0) {
  SolverState st;
  st.l = DenseMatrix::Zero(m.rows(), m.cols());
  st.s = DenseMatrix::Zero(m.rows(), m.cols());
  st.y = DenseMatrix::Zero(m.rows(), m.cols());
  st.mu = mu0;
  return st;
}

/// One ADMM iteration in place. `m` must be tall; `state` shapes must match.
inline StepReport admm_step(const DenseMatrix& m, const SolverConfig& config,
                            double mu_bar, SolverState& state) {
  const double mu = state.mu;
  const double inv_mu = 1.0 / mu;
  StepReport report;
  report.mu = mu;

  const PenaltyParams l_params(config.a1, inv_mu);
  report.l_threshold = threshold_value(l_params);
  const DenseMatrix z = m - state.s + state.y * inv_mu;
  report.svt = threshold_singular_values(l_params, z);
  report.z_sigma = std::move(report.svt.input_sigma);
  state.l = report.svt.matrix;

  const DenseMatrix t = m - state.l + state.y * inv_mu;
  if (config.fixed_lambda) {
    report.selection.branch = LambdaBranch::Fixed;
    report.selection.lambda = *config.fixed_lambda;
    report.selection.threshold =
        threshold_value(PenaltyParams(config.a2, *config.fixed_lambda * inv_mu));
  } else {
    report.selection = select_lambda(t, config.target_sparsity, mu, config.a2,
                                     config.epsilon);
  }
  const PenaltyParams s_params(config.a2, report.selection.lambda * inv_mu);
  state.s = prox_elementwise(s_params, t, report.selection.threshold);
  report.nnz_s = count_nonzeros(state.s);

  const DenseMatrix r = m - state.l - state.s;
  state.y += mu * r;
  state.residual = r.norm() / std::max(1.0, m.norm());
  state.lambda_current = report.selection.lambda;
  state.mu = update_mu(mu, config.rho_factor, mu_bar);
  ++state.k;
  return report;
}

namespace detail {

inline DecompositionResult solve_tall(const DenseMatrix& m,
                                      const SolverConfig& config,
                                      const DenseMatrix& s0,
                                      const DenseMatrix& y0) {
  double mu0 = 0.0;
  if (config.mu0_override) {
    mu0 = *config.mu0_override;
  } else if (m.isZero(0.0)) {
    // initial_mu is undefined for M = 0; any positive value gives the trivial
    // fixed point once S0 and Y0 are consumed.
    mu0 = 1.0;
  } else {
    mu0 = initial_mu(m, config.a1);
  }
  const double mu_bar = mu0 * config.mu_bar_multiplier;

  SolverState state = make_state(m, mu0);
  state.s = s0;
  state.y = y0;

  DecompositionResult result;
  result.mu0 = mu0;
  result.mu_bar = mu_bar;
  result.trace.reserve(static_cast<std::size_t>(std::min(config.max_iter, 4096)));
  while (state.k < config.max_iter) {
    const StepReport step = admm_step(m, config, mu_bar, state);
    result.trace.push_back(
        {state.k, step.mu, step.selection.lambda, state.residual});
    if (state.residual <= config.tol) {
      result.converged = true;
      break;
    }
  }

  result.iterations = state.k;
  result.final_residual = state.residual;
  result.recovered_rank = numerical_rank(state.l);
  result.recovered_nnz = count_nonzeros(state.s);
  result.l_star = std::move(state.l);
  result.s_star = std::move(state.s);
  return result;
}

}  // namespace detail

/// Runs the adaptive ADMM from (S0, Y0) until rel.err(M) <= tol or max_iter.
/// Wide inputs (rows < cols) are solved transposed and transposed back.
[[nodiscard]] inline DecompositionResult solve(const DenseMatrix& m,
                                               const SolverConfig& config,
                                               const DenseMatrix& s0,
                                               const DenseMatrix& y0) {
  if (m.size() == 0) {
    throw ArgumentError("solve: empty matrix");
  }
  if (!m.allFinite()) {
    throw ArgumentError("solve: M has non-finite entries");
  }
  if (s0.rows() != m.rows() || s0.cols() != m.cols() ||
      y0.rows() != m.rows() || y0.cols() != m.cols()) {
    throw ArgumentError("solve: S0 and Y0 must match the shape of M");
  }
  config.validate(m.rows(), m.cols());

  if (m.rows() >= m.cols()) {
    return detail::solve_tall(m, config, s0, y0);
  }
  DecompositionResult r = detail::solve_tall(
      m.transpose(), config, s0.transpose(), y0.transpose());
  r.l_star.transposeInPlace();
  r.s_star.transposeInPlace();
  return r;
}

[[nodiscard]] inline DecompositionResult solve(const DenseMatrix& m,
                                               const SolverConfig& config) {
  const DenseMatrix zero = DenseMatrix::Zero(m.rows(), m.cols());
  return solve(m, config, zero, zero);
}

}  // namespace fpca
