// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if a gating criterion fails. Criterion 6 is informational.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fpca/fpca.hpp"
#include "oracles.hpp"

#ifndef FPCA_CLI_PATH
#error "FPCA_CLI_PATH must point at the fpca executable"
#endif

namespace fs = std::filesystem;
using fpca::DenseMatrix;

namespace {

constexpr std::uint64_t kBaseSeed = 20240917;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_gating_failures = 0;

void report(int id, const char* name, const Outcome& o, bool gating = true) {
  const char* tag = o.pass ? "PASS" : (gating ? "FAIL" : "INFO");
  std::printf("[%s] criterion %d (%s)%s: %s\n", tag, id, name,
              gating ? "" : " non-gating", o.detail.c_str());
  std::fflush(stdout);
  if (gating && !o.pass) ++g_gating_failures;
}

std::string sci(double v) { return fpca::format_sci3(v); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome prox_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto s = fpca::check_prox(1000, 1, 1e-6);
  std::ostringstream d;
  d << "samples=" << s.samples.size() << " failures=" << s.failures
    << " max_objective_gap=" << sci(s.max_objective_gap)
    << " max_argument_gap=" << sci(s.max_argument_gap)
    << " time=" << sci(seconds_since(t0)) << "s";
  return {s.failures == 0 && s.samples.size() == 1000, d.str()};
}

Outcome threshold_continuity() {
  // Both branches have slope a at the boundary, so the jump over +-delta is
  // about 2 a delta. a is drawn over [1e-2, 1e2], which covers every shape
  // used by the benchmarks; the bound cannot hold beyond a = 500.
  std::mt19937_64 gen(kBaseSeed);
  std::uniform_real_distribution<double> log_a(-2.0, 2.0);
  const double delta = 1e-9;
  double worst = 0.0;
  double worst_gap = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double a = std::pow(10.0, log_a(gen));
    const double b = 1.0 / (2.0 * a * a);
    const double hi = fpca::threshold_value(fpca::PenaltyParams(a, b + delta));
    const double lo = fpca::threshold_value(fpca::PenaltyParams(a, b - delta));
    worst = std::max(worst, std::abs(hi - lo));
    const double branch_gap = std::abs(b * a - (std::sqrt(2.0 * b) - 1.0 / (2.0 * a)));
    worst_gap = std::max(worst_gap, branch_gap / std::max(1.0, b * a));
  }
  return {worst <= 1e-6, "max_jump=" + sci(worst) +
                             " max_branch_mismatch_at_boundary=" + sci(worst_gap) +
                             " over 100 values of a in [1e-2, 1e2]"};
}

Outcome svt_optimality() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 gen(kBaseSeed + 3);
  std::uniform_real_distribution<double> log_a(-1.0, 1.5);
  std::uniform_real_distribution<double> log_tau(-2.0, 0.5);
  // Absolute slack for rounding in the objective evaluations themselves.
  const double slack = 1e-12;
  long probes = 0;
  long violations = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 50; ++trial) {
    const DenseMatrix n = fpca::testing::random_matrix(gen, 6, 4);
    const fpca::PenaltyParams p(std::pow(10.0, log_a(gen)), std::pow(10.0, log_tau(gen)));
    const DenseMatrix z = fpca::prox_singular_values(p, n);
    const double best = fpca::svt_objective(p, z, n);
    for (const double eta : {1e-3, 1e-2, 1e-1}) {
      for (int k = 0; k < 10000; ++k) {
        const DenseMatrix delta = fpca::testing::random_matrix(gen, 6, 4).normalized();
        const double gap = best - fpca::svt_objective(p, z + eta * delta, n);
        worst = std::max(worst, gap);
        if (gap > slack) ++violations;
        ++probes;
      }
    }
  }
  std::ostringstream d;
  d << "probes=" << probes << " violations=" << violations
    << " max(f(prox)-f(perturbed))=" << sci(worst)
    << " time=" << sci(seconds_since(t0)) << "s";
  return {violations == 0, d.str()};
}

struct RecoveryLimits {
  double rel_m = 1e-6;
  double rel_l = 1e-3;
  double rel_s = 1e-4;
  int max_iterations = 60;
};

std::string describe(const fpca::TrialReport& r) {
  std::ostringstream d;
  d << "m=" << r.m << " r=" << r.r << " spr=" << r.spr << " a=" << r.a1
    << ": rel_err_M=" << sci(r.rel_err_m) << " rel_err_L=" << sci(r.rel_err_l)
    << " rank=" << r.recovered_rank << " rel_err_S=" << sci(r.rel_err_s)
    << " nnz=" << r.recovered_nnz << " iterations=" << r.iterations
    << " converged=" << (r.converged ? "yes" : "no")
    << " time=" << sci(r.wall_time_s) << "s";
  if (!r.error.empty()) d << " error=" << r.error;
  return d.str();
}

bool recovered(const fpca::TrialReport& r, const RecoveryLimits& lim) {
  return r.error.empty() && r.converged && r.rel_err_m <= lim.rel_m &&
         r.recovered_rank == r.r &&
         r.recovered_nnz == fpca::corruption_count(r.m, r.spr) &&
         r.rel_err_l <= lim.rel_l && r.rel_err_s <= lim.rel_s &&
         r.iterations <= lim.max_iterations;
}

fpca::TrialReport run_cell(const fpca::TableCell& cell) {
  return fpca::run_trial(cell, fpca::derive_seed(kBaseSeed, cell, 0), {});
}

Outcome recovery(const std::vector<fpca::TableCell>& cells) {
  Outcome o{true, ""};
  for (const auto& cell : cells) {
    const auto r = run_cell(cell);
    const bool ok = recovered(r, {});
    o.pass = o.pass && ok;
    o.detail += "\n    " + std::string(ok ? "ok   " : "FAIL ") + describe(r);
  }
  return o;
}

Outcome degradation() {
  const auto r = run_cell({80.0, 80.0, 400, 35, 0.15});
  return {r.error.empty() && r.recovered_rank > 200 && r.rel_err_l > 1e-2,
          describe(r)};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + FPCA_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string bench_body(const std::vector<fpca::TrialReport>& reports) {
  std::ostringstream csv;
  fpca::write_bench_csv(csv, reports);
  std::istringstream in(csv.str());
  std::string line;
  std::string out;
  while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + '\n';
  return out;
}

Outcome determinism_and_parity() {
  const std::vector<fpca::TableCell> cells = {
      {1.0, 1.0, 60, 6, 0.1}, {1.0, 1.0, 80, 8, 0.15}, {5.0, 5.0, 60, 6, 0.1}};
  const std::string first = bench_body(fpca::run_table(cells, 2, kBaseSeed));
  const std::string second = bench_body(fpca::run_table(cells, 2, kBaseSeed, {}, 3));
  const bool bench_same = first == second;

  const fs::path dir = fs::temp_directory_path() / "fpca_acceptance";
  fs::create_directories(dir);
  const auto p = fpca::generate_problem(120, 12, 0.1, kBaseSeed);
  const long gamma = fpca::corruption_count(120, 0.1);
  fpca::write_matrix(dir / "m.bin", p.m_obs);
  const int code = run_cli("solve --input " + (dir / "m.bin").string() +
                           " --sparsity " + std::to_string(gamma) + " --out-l " +
                           (dir / "l.bin").string() + " --out-s " +
                           (dir / "s.bin").string());
  bool parity = false;
  if (code == 0) {
    fpca::SolverConfig cfg;
    cfg.target_sparsity = gamma;
    const auto lib = fpca::solve(p.m_obs, cfg);
    const DenseMatrix l = fpca::read_matrix(dir / "l.bin");
    const DenseMatrix s = fpca::read_matrix(dir / "s.bin");
    parity = l.size() == lib.l_star.size() && s.size() == lib.s_star.size() &&
             std::memcmp(l.data(), lib.l_star.data(), sizeof(double) * l.size()) == 0 &&
             std::memcmp(s.data(), lib.s_star.data(), sizeof(double) * s.size()) == 0;
  }
  std::ostringstream d;
  d << "bench CSV bodies (timing column removed) identical=" << (bench_same ? "yes" : "no")
    << ", CLI exit=" << code << ", CLI/library bitwise parity=" << (parity ? "yes" : "no");
  return {bench_same && parity, d.str()};
}

Outcome mu_schedule() {
  std::mt19937_64 gen(kBaseSeed + 8);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const DenseMatrix m = fpca::testing::random_matrix(gen, 30 + trial, 20, 1.0 + trial);
    const double a1 = std::pow(10.0, -1.0 + 0.15 * trial);
    const double s = fpca::testing::power_iteration_norm(m);
    const double expected = std::min(2.0 / std::pow(0.99 * s + 1.0 / (2.0 * a1), 2.0),
                                     a1 / (0.99 * s));
    worst = std::max(worst, std::abs(fpca::initial_mu(m, a1) - expected) / expected);
  }

  const auto p = fpca::generate_problem(100, 10, 0.1, kBaseSeed);
  fpca::SolverConfig cfg;
  cfg.target_sparsity = fpca::corruption_count(100, 0.1);
  cfg.tol = 1e-14;
  cfg.max_iter = 80;
  const auto res = fpca::solve(p.m_obs, cfg);
  bool monotone = true;
  bool capped = true;
  double prev = 0.0;
  for (const auto& e : res.trace) {
    monotone = monotone && e.mu >= prev;
    capped = capped && e.mu <= res.mu0 * 1e7;
    prev = e.mu;
  }
  const bool cap_reached = !res.trace.empty() && res.trace.back().mu == res.mu_bar &&
                           res.mu_bar == res.mu0 * 1e7;
  std::ostringstream d;
  d << "initial_mu max relative error=" << sci(worst) << " over 20 matrices, "
    << res.trace.size() << "-step trace nondecreasing=" << (monotone ? "yes" : "no")
    << " capped=" << (capped ? "yes" : "no")
    << " cap reached=" << (cap_reached ? "yes" : "no");
  return {worst <= 1e-8 && monotone && capped && cap_reached, d.str()};
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  report(1, "prox oracle equivalence", prox_oracle());
  report(2, "threshold branch continuity", threshold_continuity());
  report(3, "SVT objective optimality probe", svt_optimality());
  report(4, "m=400 headline recovery",
         recovery({{1.0, 1.0, 400, 35, 0.15},
                   {1.0, 1.0, 400, 40, 0.15},
                   {1.0, 1.0, 400, 50, 0.15}}));
  report(5, "m=500 scale trend",
         recovery({{1.0, 1.0, 500, 50, 0.20}, {1.0, 1.0, 500, 50, 0.25}}));
  report(6, "degradation at a=80", degradation(), false);
  report(7, "determinism and parity", determinism_and_parity());
  report(8, "mu0 and mu schedule", mu_schedule());
  std::printf("%s: %d gating failure(s), total time %.1fs\n",
              g_gating_failures == 0 ? "ACCEPTED" : "REJECTED", g_gating_failures,
              seconds_since(t0));
  return g_gating_failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
