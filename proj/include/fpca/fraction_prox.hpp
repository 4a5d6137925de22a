#pragma once

/// @file
/// Scalar fraction-function penalty rho_a(t) = a|t| / (a|t| + 1) and its
/// closed-form proximal operator
///
///   h(gamma) = argmin_beta  1/2 (beta - gamma)^2 + tau * rho_a(beta).
///
/// The minimizer is exactly zero inside the dead zone |gamma| <= t(a, tau)
/// and otherwise given by the trigonometric root of the stationarity cubic.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "fpca/errors.hpp"

namespace fpca {

/// Shape parameter `a` and proximal weight `tau` of one prox instance.
class PenaltyParams {
 public:
  PenaltyParams(double a, double tau) : a_(a), tau_(tau) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      throw ArgumentError("PenaltyParams: a must be positive and finite");
    }
    if (!(tau > 0.0) || !std::isfinite(tau)) {
      throw ArgumentError("PenaltyParams: tau must be positive and finite");
    }
  }

  [[nodiscard]] double a() const noexcept { return a_; }
  [[nodiscard]] double tau() const noexcept { return tau_; }

  /// tau at which the two threshold regimes meet, 1 / (2 a^2).
  [[nodiscard]] double regime_boundary() const noexcept {
    return 1.0 / (2.0 * a_ * a_);
  }

 private:
  double a_;
  double tau_;
};

/// Tolerated excursion of the arccos argument outside [-1, 1] before the
/// root formula is declared out of domain.
inline constexpr double kArccosSlack = 1e-12;

/// rho_a(t) = a|t| / (a|t| + 1).
[[nodiscard]] inline double rho(double a, double t) noexcept {
  const double at = a * std::abs(t);
  return at / (at + 1.0);
}

[[nodiscard]] inline double rho(const PenaltyParams& params, double t) noexcept {
  return rho(params.a(), t);
}

/// Objective minimized by the prox: 1/2 (beta - gamma)^2 + tau * rho_a(beta).
[[nodiscard]] inline double prox_objective(const PenaltyParams& params,
                                           double gamma, double beta) noexcept {
  const double d = beta - gamma;
  return 0.5 * d * d + params.tau() * rho(params, beta);
}

/// Dead-zone radius t(a, tau):
///   tau * a                    if tau <= 1 / (2 a^2)
///   sqrt(2 tau) - 1 / (2 a)    otherwise.
[[nodiscard]] inline double threshold_value(const PenaltyParams& params) noexcept {
  const double a = params.a();
  const double tau = params.tau();
  if (tau <= params.regime_boundary()) {
    return tau * a;
  }
  return std::sqrt(2.0 * tau) - 1.0 / (2.0 * a);
}

namespace detail {

// phi_sign = +1 is the correct root. The harness in prox_oracle.hpp flips it
// to verify that the oracle detects a corrupted formula.
[[nodiscard]] inline double g_root_impl(const PenaltyParams& params,
                                        double gamma, double phi_sign) {
  const double a = params.a();
  const double tau = params.tau();
  const double abs_gamma = std::abs(gamma);
  const double base = 1.0 + a * abs_gamma;

  double arg = 27.0 * tau * a * a / (2.0 * base * base * base) - 1.0;
  if (arg < -1.0 || arg > 1.0) {
    if (arg < -1.0 - kArccosSlack || arg > 1.0 + kArccosSlack ||
        std::isnan(arg)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "g_root: arccos argument " << arg << " out of [-1, 1] for a="
          << a << " tau=" << tau << " gamma=" << gamma;
      throw DomainError(msg.str());
    }
    arg = arg < -1.0 ? -1.0 : 1.0;
  }

  const double phi = phi_sign * std::acos(arg);
  double magnitude =
      (base / 3.0 * (1.0 + 2.0 * std::cos(phi / 3.0 - std::numbers::pi / 3.0)) -
       1.0) /
      a;
  // Rounding can leave the exact root's bracket [0, |gamma|] by an ulp.
  magnitude = std::clamp(magnitude, 0.0, abs_gamma);
  return gamma < 0.0 ? -magnitude : magnitude;
}

}  // namespace detail

/// Nonzero stationary point selected by the prox outside the dead zone.
/// Requires |gamma| > threshold_value(params); throws DomainError when the
/// arccos argument leaves [-1, 1] by more than kArccosSlack.
[[nodiscard]] inline double g_root(const PenaltyParams& params, double gamma) {
  return detail::g_root_impl(params, gamma, 1.0);
}

/// Proximal operator of tau * rho_a. Returns exactly 0 for
/// |gamma| <= threshold_value(params) (the boundary belongs to the zero branch).
[[nodiscard]] inline double prox_scalar(const PenaltyParams& params,
                                        double gamma) {
  if (std::abs(gamma) <= threshold_value(params)) {
    return 0.0;
  }
  return g_root(params, gamma);
}

}  // namespace fpca
