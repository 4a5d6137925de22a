#pragma once

/// @file
/// Brute-force check of the closed-form fraction prox.
///
/// The oracle never touches the closed form: it evaluates
/// f(beta) = 1/2 (beta - gamma)^2 + tau * a|beta| / (a|beta| + 1) on a lattice
/// and keeps the best point. The lattice is two-level: a 1e-3 scan of
/// [-(|gamma|+1), |gamma|+1] locates every basin, then each basin is scanned
/// at `grid_step`. Both levels are integer multiples of their step, so
/// beta = 0 (the kink) is always evaluated.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "fpca/fraction_prox.hpp"
#include "fpca/matrix_io.hpp"
#include "fpca/synthetic.hpp"

namespace fpca {

struct GridMinimum {
  double beta = 0.0;
  double value = 0.0;
};

namespace detail {

inline double oracle_objective(double a, double tau, double gamma, double beta) {
  const double d = beta - gamma;
  const double ab = a * std::fabs(beta);
  return 0.5 * d * d + tau * ab / (ab + 1.0);
}

}  // namespace detail

/// Best lattice point of f over [-(|gamma|+1), |gamma|+1].
[[nodiscard]] inline GridMinimum grid_minimize(double a, double tau, double gamma,
                                               double grid_step = 1e-6) {
  if (!(grid_step > 0.0)) {
    throw ArgumentError("grid_minimize: grid_step must be positive");
  }
  const double radius = std::fabs(gamma) + 1.0;
  const double coarse = std::max(grid_step, 1e-3);
  auto f = [&](double beta) { return detail::oracle_objective(a, tau, gamma, beta); };

  const auto n_coarse = static_cast<long>(std::floor(radius / coarse));
  std::vector<double> values(static_cast<std::size_t>(2 * n_coarse + 1));
  for (long i = -n_coarse; i <= n_coarse; ++i) {
    values[static_cast<std::size_t>(i + n_coarse)] = f(static_cast<double>(i) * coarse);
  }

  GridMinimum best{0.0, f(0.0)};
  auto consider = [&](double beta) {
    const double v = f(beta);
    if (v < best.value) best = {beta, v};
  };

  const auto n_fine = static_cast<long>(std::floor(radius / grid_step));
  const auto span = static_cast<long>(std::ceil(2.0 * coarse / grid_step));
  const std::size_t count = values.size();
  for (std::size_t k = 0; k < count; ++k) {
    const bool left_ok = k == 0 || values[k] <= values[k - 1];
    const bool right_ok = k + 1 == count || values[k] <= values[k + 1];
    if (!left_ok || !right_ok) continue;
    const double centre = static_cast<double>(static_cast<long>(k) - n_coarse) * coarse;
    const auto c = static_cast<long>(std::llround(centre / grid_step));
    const long lo = std::max(-n_fine, c - span);
    const long hi = std::min(n_fine, c + span);
    for (long j = lo; j <= hi; ++j) {
      consider(static_cast<double>(j) * grid_step);
    }
  }
  return best;
}

struct ProxCheckTolerances {
  double objective_gap = 1e-9;
  double argument_gap = 2e-4;
};

struct ProxCheckSample {
  double a = 0.0;
  double tau = 0.0;
  double gamma = 0.0;
  double prox = 0.0;
  double grid_argmin = 0.0;
  /// f(prox) - f(grid_argmin); negative when the closed form beats the grid.
  double objective_gap = 0.0;
  double argument_gap = 0.0;
  bool pass = false;
};

struct ProxCheckSummary {
  std::vector<ProxCheckSample> samples;
  double max_objective_gap = -std::numeric_limits<double>::infinity();
  double max_argument_gap = 0.0;
  long failures = 0;
};

using ProxFunction = std::function<double(const PenaltyParams&, double)>;

/// Shape parameters sampled by the check.
inline constexpr double kCheckShapes[] = {0.5, 1.0, 5.0, 10.0, 50.0};

/// Draws `samples` triples (a from kCheckShapes, tau log-uniform on
/// [1e-4, 10], gamma uniform on [-5, 5]) and compares `prox` against the
/// grid oracle.
[[nodiscard]] inline ProxCheckSummary check_prox(
    long samples, std::uint64_t seed, double grid_step = 1e-6,
    const ProxFunction& prox = prox_scalar, ProxCheckTolerances tol = {}) {
  if (samples < 0) {
    throw ArgumentError("check_prox: samples must be >= 0");
  }
  Rng rng(seed);
  ProxCheckSummary summary;
  summary.samples.reserve(static_cast<std::size_t>(samples));
  for (long i = 0; i < samples; ++i) {
    ProxCheckSample s;
    s.a = kCheckShapes[rng.below(std::size(kCheckShapes))];
    s.tau = std::pow(10.0, -4.0 + 5.0 * rng.uniform());
    s.gamma = -5.0 + 10.0 * rng.uniform();

    const PenaltyParams params(s.a, s.tau);
    try {
      s.prox = prox(params, s.gamma);
    } catch (const DomainError&) {
      s.prox = std::numeric_limits<double>::quiet_NaN();
    }
    const GridMinimum g = grid_minimize(s.a, s.tau, s.gamma, grid_step);
    s.grid_argmin = g.beta;
    s.objective_gap = detail::oracle_objective(s.a, s.tau, s.gamma, s.prox) - g.value;
    s.argument_gap = std::fabs(s.prox - g.beta);
    s.pass = s.objective_gap <= tol.objective_gap &&
             s.argument_gap <= tol.argument_gap;
    if (!s.pass) ++summary.failures;
    if (!std::isnan(s.objective_gap)) {
      summary.max_objective_gap = std::max(summary.max_objective_gap, s.objective_gap);
      summary.max_argument_gap = std::max(summary.max_argument_gap, s.argument_gap);
    }
    summary.samples.push_back(s);
  }
  return summary;
}

inline void write_prox_report(std::ostream& out, const ProxCheckSummary& summary) {
  out << "a,tau,gamma,prox,grid_argmin,objective_gap,argument_gap,pass\n";
  for (const ProxCheckSample& s : summary.samples) {
    out << format_double(s.a) << ',' << format_double(s.tau) << ','
        << format_double(s.gamma) << ',' << format_double(s.prox) << ','
        << format_double(s.grid_argmin) << ',' << format_double(s.objective_gap)
        << ',' << format_double(s.argument_gap) << ',' << (s.pass ? 1 : 0) << '\n';
  }
}

}  // namespace fpca
