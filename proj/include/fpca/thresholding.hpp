#pragma once

/// @file
/// The scalar fraction prox lifted to vectors, to matrix entries and to the
/// singular values of a matrix.

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "fpca/errors.hpp"
#include "fpca/fraction_prox.hpp"

namespace fpca {

using DenseMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Relative tolerance of numerical_rank(): sigma_i counts iff
/// sigma_i > kRankTolerance * max(1, sigma_1).
inline constexpr double kRankTolerance = 1e-10;

/// Largest ordering inversion of thresholded singular values that is treated
/// as rounding noise and silently re-sorted.
inline constexpr double kOrderingSlack = 1e-12;

/// Applies prox_scalar to every entry. DomainError messages carry the index.
[[nodiscard]] inline Vector prox_vector(const PenaltyParams& params,
                                        const Vector& x) {
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    try {
      out[i] = prox_scalar(params, x[i]);
    } catch (const DomainError& e) {
      throw DomainError(std::string(e.what()) + " at index " +
                        std::to_string(i));
    }
  }
  return out;
}

/// Entrywise prox of a matrix (or any Eigen expression).
///
/// `dead_zone` widens the zero branch: entries with |b| <= dead_zone map to
/// zero even when they sit above threshold_value(params). The ADMM S-update
/// passes the threshold chosen by the sparsity rule here so that ties with
/// the (gamma+1)-th largest entry are zeroed regardless of rounding in
/// lambda / mu.
template <typename Derived>
[[nodiscard]] DenseMatrix prox_elementwise(const PenaltyParams& params,
                                           const Eigen::MatrixBase<Derived>& b,
                                           double dead_zone = 0.0) {
  const double t = std::max(threshold_value(params), dead_zone);
  DenseMatrix out(b.rows(), b.cols());
  for (Eigen::Index j = 0; j < b.cols(); ++j) {
    for (Eigen::Index i = 0; i < b.rows(); ++i) {
      const double v = b(i, j);
      if (std::abs(v) <= t) {
        out(i, j) = 0.0;
        continue;
      }
      try {
        out(i, j) = g_root(params, v);
      } catch (const DomainError& e) {
        throw DomainError(std::string(e.what()) + " at (" + std::to_string(i) +
                          ", " + std::to_string(j) + ")");
      }
    }
  }
  return out;
}

struct SingularValueDecomposition {
  DenseMatrix u;  ///< m x m (full) or m x n (thin)
  Vector sigma;   ///< length n, nonincreasing, nonnegative
  DenseMatrix v;  ///< n x n
};

enum class SvdVectors { Full, Thin };

namespace detail {

inline void require_tall(Eigen::Index rows, Eigen::Index cols,
                         const char* what) {
  if (rows < cols) {
    throw ArgumentError(std::string(what) + ": expected rows >= cols, got " +
                        std::to_string(rows) + "x" + std::to_string(cols) +
                        " (transpose the problem first)");
  }
  if (cols == 0) {
    throw ArgumentError(std::string(what) + ": empty matrix");
  }
}

}  // namespace detail

/// SVD of a tall (m >= n) matrix, A = U [Diag(sigma); 0] V^T.
[[nodiscard]] inline SingularValueDecomposition svd(
    const DenseMatrix& a, SvdVectors vectors = SvdVectors::Full) {
  detail::require_tall(a.rows(), a.cols(), "svd");
  if (!a.allFinite()) {
    throw ArgumentError("svd: matrix has non-finite entries");
  }
  const unsigned options =
      vectors == SvdVectors::Full
          ? static_cast<unsigned>(Eigen::ComputeFullU | Eigen::ComputeFullV)
          : static_cast<unsigned>(Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::BDCSVD<DenseMatrix> dec(a, options);
  if (dec.info() != Eigen::Success || !dec.singularValues().allFinite()) {
    throw ConvergenceError("svd: factorization did not converge");
  }
  return {dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

/// Singular values only, nonincreasing.
[[nodiscard]] inline Vector singular_values(const DenseMatrix& a) {
  if (a.rows() < a.cols()) {
    return singular_values(a.transpose());
  }
  detail::require_tall(a.rows(), a.cols(), "singular_values");
  Eigen::BDCSVD<DenseMatrix> dec(a);
  if (dec.info() != Eigen::Success || !dec.singularValues().allFinite()) {
    throw ConvergenceError("singular_values: factorization did not converge");
  }
  return dec.singularValues();
}

/// Count of singular values above kRankTolerance * max(1, sigma_1).
[[nodiscard]] inline int numerical_rank(const Vector& sigma) {
  if (sigma.size() == 0) {
    return 0;
  }
  const double cutoff = kRankTolerance * std::max(1.0, sigma.maxCoeff());
  return static_cast<int>((sigma.array() > cutoff).count());
}

[[nodiscard]] inline int numerical_rank(const DenseMatrix& a) {
  if (a.size() == 0) {
    return 0;
  }
  return numerical_rank(singular_values(a));
}

/// Exact count of nonzero entries.
template <typename Derived>
[[nodiscard]] long count_nonzeros(const Eigen::MatrixBase<Derived>& a) {
  return static_cast<long>((a.array() != 0.0).count());
}

/// Checks that `sigma` is nonincreasing. Inversions up to kOrderingSlack are
/// repaired by sorting; anything larger throws DomainError.
inline void enforce_nonincreasing(Vector& sigma) {
  bool inverted = false;
  for (Eigen::Index i = 1; i < sigma.size(); ++i) {
    const double rise = sigma[i] - sigma[i - 1];
    if (rise > kOrderingSlack) {
      throw DomainError("thresholded singular values out of order by " +
                        std::to_string(rise) + " at index " +
                        std::to_string(i));
    }
    inverted = inverted || rise > 0.0;
  }
  if (inverted) {
    std::sort(sigma.begin(), sigma.end(), std::greater<>());
  }
}

struct SingularValueThresholding {
  DenseMatrix matrix;
  Vector sigma;        ///< thresholded singular values, nonincreasing
  Vector input_sigma;  ///< singular values of the input
  int rank = 0;        ///< number of nonzero thresholded singular values
};

/// Singular value thresholding with diagnostics. Only the thin factors are
/// needed: the zero block of [Diag; 0] contributes nothing to U [Diag; 0] V^T.
[[nodiscard]] inline SingularValueThresholding threshold_singular_values(
    const PenaltyParams& params, const DenseMatrix& n) {
  detail::require_tall(n.rows(), n.cols(), "prox_singular_values");
  const SingularValueDecomposition dec = svd(n, SvdVectors::Thin);
  const Vector shrunk = prox_vector(params, dec.sigma);

  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = 0; i < shrunk.size(); ++i) {
    if (shrunk[i] != 0.0) {
      kept.push_back(i);
    }
  }
  const auto k = static_cast<Eigen::Index>(kept.size());
  DenseMatrix u_scaled(n.rows(), k);
  DenseMatrix v_kept(n.cols(), k);
  for (Eigen::Index c = 0; c < k; ++c) {
    u_scaled.col(c) = dec.u.col(kept[c]) * shrunk[kept[c]];
    v_kept.col(c) = dec.v.col(kept[c]);
  }

  SingularValueThresholding result;
  result.matrix = DenseMatrix::Zero(n.rows(), n.cols());
  if (k > 0) {
    result.matrix.noalias() = u_scaled * v_kept.transpose();
  }
  result.sigma = shrunk;
  enforce_nonincreasing(result.sigma);
  result.input_sigma = dec.sigma;
  result.rank = static_cast<int>(k);
  return result;
}

/// Singular value thresholding operator: U [Diag(h(sigma)); 0] V^T.
[[nodiscard]] inline DenseMatrix prox_singular_values(const PenaltyParams& params,
                                                      const DenseMatrix& n) {
  return threshold_singular_values(params, n).matrix;
}

/// 1/2 ||Z - N||_F^2 + tau * sum_i rho_a(sigma_i(Z)), the objective the
/// singular value thresholding operator minimizes.
[[nodiscard]] inline double svt_objective(const PenaltyParams& params,
                                          const DenseMatrix& z,
                                          const DenseMatrix& n) {
  const Vector sigma = singular_values(z);
  double penalty = 0.0;
  for (const double s : sigma) {
    penalty += rho(params, s);
  }
  return 0.5 * (z - n).squaredNorm() + params.tau() * penalty;
}

}  // namespace fpca
