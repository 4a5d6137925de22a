// Command-line front end: solve, bench and proxcheck.
//
// Exit codes: 0 success / converged, 1 usage or input error, 2 solve did not
// converge within max_iter, 3 prox oracle violation.

#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "fpca/fpca.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitOracleViolation = 3;

struct SolveArgs {
  std::string input;
  long sparsity = 0;
  double a1 = 1.0;
  double a2 = 1.0;
  double tol = 1e-6;
  int max_iter = 1000;
  double rho = 1.5;
  double epsilon = 0.01;
  double mu_bar_multiplier = 1e7;
  std::optional<double> mu0;
  std::optional<double> fixed_lambda;
  std::string out_l;
  std::string out_s;
  std::optional<std::int64_t> seed;
};

struct BenchArgs {
  std::optional<int> table;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> trials;
  int workers = 1;
};

struct ProxCheckArgs {
  long samples = 1000;
  std::uint64_t seed = 0;
  double grid_step = 1e-6;
  std::string report;
  std::string inject_fault;
};

int run_solve(const SolveArgs& args) {
  const fpca::DenseMatrix m = fpca::read_matrix(args.input);
  fpca::SolverConfig cfg;
  cfg.a1 = args.a1;
  cfg.a2 = args.a2;
  cfg.tol = args.tol;
  cfg.max_iter = args.max_iter;
  cfg.rho_factor = args.rho;
  cfg.epsilon = args.epsilon;
  cfg.mu_bar_multiplier = args.mu_bar_multiplier;
  cfg.mu0_override = args.mu0;
  cfg.fixed_lambda = args.fixed_lambda;
  cfg.target_sparsity = args.sparsity;

  const fpca::DecompositionResult res = fpca::solve(m, cfg);
  if (!args.out_l.empty()) fpca::write_matrix(args.out_l, res.l_star);
  if (!args.out_s.empty()) fpca::write_matrix(args.out_s, res.s_star);

  std::cout << "iterations=" << res.iterations
            << " rel_err_M=" << fpca::format_sci3(res.final_residual)
            << " rank=" << res.recovered_rank << " nnz=" << res.recovered_nnz
            << " converged=" << (res.converged ? "true" : "false") << '\n';
  return res.converged ? kExitOk : kExitNotConverged;
}

int run_bench(const BenchArgs& args) {
  std::vector<fpca::TableCell> cells;
  fpca::SolverConfig base;
  int trials = 1;
  std::uint64_t seed = 0;
  std::string out = args.out;

  if (args.table) {
    cells = fpca::table_grid(*args.table);
  } else {
    const fpca::RunConfig rc = fpca::read_run_config(args.config);
    cells = rc.cells();
    base = rc.solver;
    trials = rc.trials;
    seed = rc.base_seed;
    if (out.empty() && rc.out) out = *rc.out;
  }
  if (args.trials) trials = *args.trials;
  if (args.seed) seed = *args.seed;

  const auto reports = fpca::run_table(cells, trials, seed, base, args.workers);

  fpca::write_markdown_table(std::cout, reports);
  if (out.empty()) {
    std::cout << '\n';
    fpca::write_bench_csv(std::cout, reports);
  } else {
    std::ofstream file(out, std::ios::trunc);
    if (!file) throw fpca::ParseError("cannot write " + out);
    fpca::write_bench_csv(file, reports);
  }
  return kExitOk;
}

int run_proxcheck(const ProxCheckArgs& args) {
  fpca::ProxFunction prox = fpca::prox_scalar;
  if (args.inject_fault == "negate-phi") {
    prox = [](const fpca::PenaltyParams& p, double gamma) {
      if (std::abs(gamma) <= fpca::threshold_value(p)) return 0.0;
      return fpca::detail::g_root_impl(p, gamma, -1.0);
    };
  } else if (!args.inject_fault.empty()) {
    throw fpca::ArgumentError("unknown fault '" + args.inject_fault + "'");
  }

  const fpca::ProxCheckSummary summary =
      fpca::check_prox(args.samples, args.seed, args.grid_step, prox);
  if (!args.report.empty()) {
    std::ofstream file(args.report, std::ios::trunc);
    if (!file) throw fpca::ParseError("cannot write " + args.report);
    fpca::write_prox_report(file, summary);
  }

  std::cout << "samples=" << summary.samples.size()
            << " failures=" << summary.failures;
  if (!summary.samples.empty()) {
    std::cout << " max_objective_gap=" << fpca::format_sci3(summary.max_objective_gap)
              << " max_argument_gap=" << fpca::format_sci3(summary.max_argument_gap);
  }
  std::cout << '\n';

  if (summary.failures > 0) {
    for (const auto& s : summary.samples) {
      if (s.pass) continue;
      std::cerr << "oracle violation: a=" << fpca::format_double(s.a)
                << " tau=" << fpca::format_double(s.tau)
                << " gamma=" << fpca::format_double(s.gamma)
                << " objective_gap=" << fpca::format_sci3(s.objective_gap)
                << " argument_gap=" << fpca::format_sci3(s.argument_gap) << '\n';
    }
    return kExitOracleViolation;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-rank + sparse decomposition with the fraction-function penalty"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "Decompose a matrix file into L* + S*");
  solve->add_option("--input", solve_args.input, "Matrix file (CSV or FPCA1)")
      ->required()
      ->check(CLI::ExistingFile);
  solve->add_option("--sparsity", solve_args.sparsity,
                    "Target number of nonzeros in S*")
      ->required()
      ->check(CLI::PositiveNumber);
  solve->add_option("--a1", solve_args.a1, "Low-rank penalty shape")->capture_default_str();
  solve->add_option("--a2", solve_args.a2, "Sparse penalty shape")->capture_default_str();
  solve->add_option("--tol", solve_args.tol, "Stop when rel.err(M) <= tol")
      ->capture_default_str();
  solve->add_option("--max-iter", solve_args.max_iter)->capture_default_str();
  solve->add_option("--rho", solve_args.rho, "mu growth factor")->capture_default_str();
  solve->add_option("--epsilon", solve_args.epsilon)->capture_default_str();
  solve->add_option("--mu-bar-multiplier", solve_args.mu_bar_multiplier)
      ->capture_default_str();
  solve->add_option("--mu0", solve_args.mu0, "Override the initial mu");
  solve->add_option("--fixed-lambda", solve_args.fixed_lambda,
                    "Disable the adaptive lambda rule");
  solve->add_option("--out-l", solve_args.out_l, "Output path for L*");
  solve->add_option("--out-s", solve_args.out_s, "Output path for S*");
  solve->add_option("--seed", solve_args.seed, "Accepted and ignored; solve is deterministic");

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "Run a synthetic experiment grid");
  auto* table_opt = bench->add_option("--table", bench_args.table, "Built-in grid")
                        ->check(CLI::IsMember({1, 2, 3}));
  auto* config_opt = bench->add_option("--config", bench_args.config, "key=value grid file")
                         ->check(CLI::ExistingFile);
  table_opt->excludes(config_opt);
  bench->add_option("--seed", bench_args.seed, "Base seed");
  bench->add_option("--out", bench_args.out, "CSV output path");
  bench->add_option("--trials", bench_args.trials, "Trials per cell")
      ->check(CLI::PositiveNumber);
  bench->add_option("--workers", bench_args.workers, "Parallel cells")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  ProxCheckArgs check_args;
  auto* check = app.add_subcommand("proxcheck", "Compare the closed-form prox with a grid oracle");
  check->add_option("--samples", check_args.samples)
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  check->add_option("--seed", check_args.seed)->capture_default_str();
  check->add_option("--grid-step", check_args.grid_step)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  check->add_option("--report", check_args.report, "Per-sample CSV report");
  check->add_option("--inject-fault", check_args.inject_fault)->group("");

  try {
    app.parse(argc, argv);
    if (bench->parsed() && !bench_args.table && bench_args.config.empty()) {
      throw CLI::RequiredError("bench: one of --table or --config");
    }
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (solve->parsed()) return run_solve(solve_args);
    if (bench->parsed()) return run_bench(bench_args);
    return run_proxcheck(check_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}
