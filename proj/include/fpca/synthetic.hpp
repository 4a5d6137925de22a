#pragma once

/// @file
/// Seeded synthetic low-rank + sparse problems, recovery metrics and the
/// experiment grids of the benchmark tables.

#include <Eigen/Dense>

#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "fpca/admm.hpp"
#include "fpca/errors.hpp"
#include "fpca/thresholding.hpp"

namespace fpca {

/// Thin wrapper over std::mt19937_64 with distribution code spelled out, so
/// streams are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer on [0, bound) by rejection.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x = next();
    while (x >= limit) {
      x = next();
    }
    return x % bound;
  }

  bool coin() { return (next() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct SyntheticProblem {
  int m = 0;
  int r = 0;
  double spr = 0.0;
  std::uint64_t seed = 0;
  DenseMatrix l_true;
  DenseMatrix s_true;
  DenseMatrix m_obs;
};

/// Number of corrupted entries for an m x m problem: round(spr * m^2).
[[nodiscard]] inline long corruption_count(int m, double spr) {
  return std::llround(spr * static_cast<double>(m) * static_cast<double>(m));
}

/// L = (1/m) A B with A (m x r), B (r x m) i.i.d. U[0,1); S has exactly
/// round(spr m^2) entries of +-1 at uniformly drawn positions (fair coin
/// signs); M = L + S.
///
/// Draw order: A column-major, then B column-major, then the support by a
/// partial Fisher-Yates shuffle of the column-major linear indices, each
/// position followed by its sign bit.
[[nodiscard]] inline SyntheticProblem generate_problem(int m, int r, double spr,
                                                       std::uint64_t seed) {
  if (m < 2 || r < 1 || r >= m) {
    throw ArgumentError("generate_problem: need 1 <= r < m, got m=" +
                        std::to_string(m) + " r=" + std::to_string(r));
  }
  if (!(spr >= 0.0 && spr <= 1.0)) {
    throw ArgumentError("generate_problem: spr must lie in [0, 1]");
  }

  Rng rng(seed);
  DenseMatrix a(m, r);
  DenseMatrix b(r, m);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = rng.uniform();
  for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = rng.uniform();

  SyntheticProblem p;
  p.m = m;
  p.r = r;
  p.spr = spr;
  p.seed = seed;
  p.l_true = (a * b) / static_cast<double>(m);

  const auto total = static_cast<std::uint64_t>(m) * static_cast<std::uint64_t>(m);
  const auto nnz = static_cast<std::uint64_t>(corruption_count(m, spr));
  std::vector<std::uint64_t> idx(total);
  for (std::uint64_t i = 0; i < total; ++i) idx[i] = i;
  p.s_true = DenseMatrix::Zero(m, m);
  for (std::uint64_t i = 0; i < nnz; ++i) {
    const std::uint64_t j = i + rng.below(total - i);
    std::swap(idx[i], idx[j]);
    p.s_true.data()[idx[i]] = rng.coin() ? 1.0 : -1.0;
  }

  p.m_obs = p.l_true + p.s_true;
  // |L| < 1 = |S| on the support, so M - S is exact; re-deriving L this way
  // makes M - L - S vanish identically in floating point.
  p.l_true = p.m_obs - p.s_true;
  return p;
}

struct RelativeErrors {
  double m = 0.0;
  double l = 0.0;
  double s = 0.0;
};

/// rel.err(X) = ||X_ref - X_hat||_F / max(1, ||X_ref||_F); for M the
/// numerator is ||M - L* - S*||_F.
[[nodiscard]] inline RelativeErrors relative_errors(const DenseMatrix& m_obs,
                                                    const DenseMatrix& l_true,
                                                    const DenseMatrix& s_true,
                                                    const DenseMatrix& l_hat,
                                                    const DenseMatrix& s_hat) {
  if (l_hat.rows() != m_obs.rows() || l_hat.cols() != m_obs.cols() ||
      s_hat.rows() != m_obs.rows() || s_hat.cols() != m_obs.cols() ||
      l_true.rows() != m_obs.rows() || l_true.cols() != m_obs.cols() ||
      s_true.rows() != m_obs.rows() || s_true.cols() != m_obs.cols()) {
    throw ArgumentError("relative_errors: shape mismatch");
  }
  RelativeErrors e;
  e.m = (m_obs - l_hat - s_hat).norm() / std::max(1.0, m_obs.norm());
  e.l = (l_true - l_hat).norm() / std::max(1.0, l_true.norm());
  e.s = (s_true - s_hat).norm() / std::max(1.0, s_true.norm());
  return e;
}

[[nodiscard]] inline RelativeErrors relative_errors(
    const SyntheticProblem& problem, const DecompositionResult& result) {
  return relative_errors(problem.m_obs, problem.l_true, problem.s_true,
                         result.l_star, result.s_star);
}

/// One (a1, a2, m, r, spr) point of an experiment grid.
struct TableCell {
  double a1 = 1.0;
  double a2 = 1.0;
  int m = 0;
  int r = 0;
  double spr = 0.0;
};

struct TrialReport {
  double a1 = 0.0;
  double a2 = 0.0;
  int m = 0;
  int r = 0;
  double spr = 0.0;
  std::uint64_t seed = 0;
  double rel_err_m = 0.0;
  double rel_err_l = 0.0;
  double rel_err_s = 0.0;
  int recovered_rank = 0;
  long recovered_nnz = 0;
  int iterations = 0;
  bool converged = false;
  double wall_time_s = 0.0;
  /// Empty on success; otherwise the failure message of this cell.
  std::string error;
};

/// Grid of one of the benchmark tables (1, 2 or 3):
///   1: a1 = a2 in {1, 5, 10, 50, 80}, m = 400, r in {35, 40, 50}, spr 0.15
///   2: a1 = a2 = 1, m in {500..800}, r in {m/10, m/10+10, m/10+20}, spr 0.20
///   3: as table 2 with spr 0.25
[[nodiscard]] inline std::vector<TableCell> table_grid(int table) {
  std::vector<TableCell> cells;
  switch (table) {
    case 1:
      for (const double a : {1.0, 5.0, 10.0, 50.0, 80.0}) {
        for (const int r : {35, 40, 50}) {
          cells.push_back({a, a, 400, r, 0.15});
        }
      }
      break;
    case 2:
    case 3: {
      const double spr = table == 2 ? 0.20 : 0.25;
      for (const int m : {500, 600, 700, 800}) {
        for (const int dr : {0, 10, 20}) {
          cells.push_back({1.0, 1.0, m, m / 10 + dr, spr});
        }
      }
      break;
    }
    default:
      throw ArgumentError("table_grid: unknown table " + std::to_string(table));
  }
  return cells;
}

/// Per-trial seed: base_seed XOR a SplitMix64 chain over the cell's
/// parameters (as IEEE-754 bit patterns) and the trial index. A cell can be
/// re-run alone without knowing its position in the grid.
[[nodiscard]] inline std::uint64_t derive_seed(std::uint64_t base_seed,
                                               const TableCell& cell,
                                               int trial) {
  std::uint64_t h = 0;
  h = mix64(h ^ std::bit_cast<std::uint64_t>(cell.a1));
  h = mix64(h ^ std::bit_cast<std::uint64_t>(cell.a2));
  h = mix64(h ^ static_cast<std::uint64_t>(cell.m));
  h = mix64(h ^ static_cast<std::uint64_t>(cell.r));
  h = mix64(h ^ std::bit_cast<std::uint64_t>(cell.spr));
  h = mix64(h ^ static_cast<std::uint64_t>(trial));
  return base_seed ^ h;
}

/// Generates, solves and scores one trial. Failures land in `error`.
[[nodiscard]] inline TrialReport run_trial(const TableCell& cell,
                                           std::uint64_t seed,
                                           const SolverConfig& base) {
  TrialReport rep;
  rep.a1 = cell.a1;
  rep.a2 = cell.a2;
  rep.m = cell.m;
  rep.r = cell.r;
  rep.spr = cell.spr;
  rep.seed = seed;
  const auto start = std::chrono::steady_clock::now();
  try {
    const SyntheticProblem p = generate_problem(cell.m, cell.r, cell.spr, seed);
    SolverConfig cfg = base;
    cfg.a1 = cell.a1;
    cfg.a2 = cell.a2;
    cfg.target_sparsity = count_nonzeros(p.s_true);
    const DecompositionResult res = solve(p.m_obs, cfg);
    const RelativeErrors e = relative_errors(p, res);
    rep.rel_err_m = e.m;
    rep.rel_err_l = e.l;
    rep.rel_err_s = e.s;
    rep.recovered_rank = res.recovered_rank;
    rep.recovered_nnz = res.recovered_nnz;
    rep.iterations = res.iterations;
    rep.converged = res.converged;
  } catch (const std::exception& ex) {
    rep.error = ex.what();
  }
  rep.wall_time_s = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - start)
                        .count();
  return rep;
}

/// Runs every (cell, trial) pair. Reports are ordered by cell then trial,
/// independent of `workers`.
[[nodiscard]] inline std::vector<TrialReport> run_table(
    const std::vector<TableCell>& cells, int trials_per_cell,
    std::uint64_t base_seed, const SolverConfig& base = {}, int workers = 1) {
  if (trials_per_cell < 1) {
    throw ArgumentError("run_table: trials_per_cell must be >= 1");
  }
  const std::size_t jobs = cells.size() * static_cast<std::size_t>(trials_per_cell);
  std::vector<TrialReport> reports(jobs);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t j = next++; j < jobs; j = next++) {
      const TableCell& cell = cells[j / static_cast<std::size_t>(trials_per_cell)];
      const int trial = static_cast<int>(j % static_cast<std::size_t>(trials_per_cell));
      reports[j] = run_trial(cell, derive_seed(base_seed, cell, trial), base);
    }
  };
  if (workers <= 1 || jobs <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return reports;
}

}  // namespace fpca
