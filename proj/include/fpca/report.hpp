#pragma once

/// @file
/// Benchmark report rendering: lossless CSV and a human-readable Markdown
/// table laid out like the published result tables.

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "fpca/matrix_io.hpp"
#include "fpca/synthetic.hpp"

namespace fpca {

inline constexpr const char* kBenchCsvHeader =
    "a1,a2,m,r,spr,seed,rel_err_M,rel_err_L,rank_L,rel_err_S,nnz_S,iterations,"
    "wall_time_s";

/// True when some report carries an error, in which case a trailing
/// `status` column is emitted.
[[nodiscard]] inline bool has_failures(const std::vector<TrialReport>& reports) {
  return std::any_of(reports.begin(), reports.end(),
                     [](const TrialReport& r) { return !r.error.empty(); });
}

inline std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += (c == '\n' || c == '\r') ? ' ' : c;
  }
  return out + "\"";
}

inline void write_bench_csv(std::ostream& out,
                            const std::vector<TrialReport>& reports) {
  const bool status = has_failures(reports);
  out << kBenchCsvHeader << (status ? ",status" : "") << '\n';
  for (const TrialReport& r : reports) {
    out << format_double(r.a1) << ',' << format_double(r.a2) << ',' << r.m << ','
        << r.r << ',' << format_double(r.spr) << ',' << r.seed << ','
        << format_double(r.rel_err_m) << ',' << format_double(r.rel_err_l) << ','
        << r.recovered_rank << ',' << format_double(r.rel_err_s) << ','
        << r.recovered_nnz << ',' << r.iterations << ','
        << format_double(r.wall_time_s);
    if (status) {
      out << ',' << (r.error.empty() ? std::string("ok") : csv_quote(r.error));
    }
    out << '\n';
  }
}

/// Three significant digits in scientific notation, e.g. 7.75e-07.
inline std::string format_sci3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

inline void write_markdown_table(std::ostream& out,
                                 const std::vector<TrialReport>& reports) {
  out << "| a1 | a2 | m | r | rel.err(M) | rel.err(L) | rank(L) | rel.err(S) "
         "| ‖S‖₀ | Iteration k |\n";
  out << "|---|---|---|---|---|---|---|---|---|---|\n";
  for (const TrialReport& r : reports) {
    out << "| " << format_double(r.a1) << " | " << format_double(r.a2) << " | "
        << r.m << " | " << r.r << " | ";
    if (!r.error.empty()) {
      out << "failed: " << r.error << " | | | | | |\n";
      continue;
    }
    out << format_sci3(r.rel_err_m) << " | " << format_sci3(r.rel_err_l) << " | "
        << r.recovered_rank << " | " << format_sci3(r.rel_err_s) << " | "
        << r.recovered_nnz << " | " << r.iterations
        << (r.converged ? "" : " (max)") << " |\n";
  }
}

}  // namespace fpca
