#pragma once

/// @file
/// Plain-text benchmark configuration, one `key = value` per line. Blank
/// lines and lines starting with '#' are ignored. List values are
/// comma-separated. Recognized keys:
///
///   a1, a2, rho, epsilon, mu_bar_multiplier, tol, max_iter,
///   m_list, r_list, spr_list, trials, base_seed, out
///
/// The grid is the Cartesian product m_list x r_list x spr_list; any empty
/// list yields an empty grid.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "fpca/admm.hpp"
#include "fpca/errors.hpp"
#include "fpca/matrix_io.hpp"
#include "fpca/synthetic.hpp"

namespace fpca {

struct RunConfig {
  SolverConfig solver;
  std::vector<int> m_list;
  std::vector<int> r_list;
  std::vector<double> spr_list;
  int trials = 1;
  std::uint64_t base_seed = 0;
  std::optional<std::string> out;

  [[nodiscard]] std::vector<TableCell> cells() const {
    std::vector<TableCell> grid;
    for (const int m : m_list) {
      for (const int r : r_list) {
        for (const double spr : spr_list) {
          grid.push_back({solver.a1, solver.a2, m, r, spr});
        }
      }
    }
    return grid;
  }
};

namespace detail {

template <typename T>
T parse_number(std::string_view text, int line_no, std::string_view key) {
  T v{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (text.empty() || ec != std::errc() || ptr != last) {
    throw ParseError("config line " + std::to_string(line_no) + ": bad value '" +
                     std::string(text) + "' for key '" + std::string(key) + "'");
  }
  return v;
}

template <typename T>
std::vector<T> parse_list(std::string_view text, int line_no,
                          std::string_view key) {
  std::vector<T> out;
  if (trim(text).empty()) return out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = text.find(',', pos);
    out.push_back(parse_number<T>(
        trim(text.substr(pos, comma == std::string_view::npos
                                  ? std::string_view::npos
                                  : comma - pos)),
        line_no, key));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace detail

[[nodiscard]] inline RunConfig parse_run_config(std::istream& in) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("config line " + std::to_string(line_no) +
                       ": expected key = value");
    }
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string_view value = detail::trim(line.substr(eq + 1));
    if (!seen.insert(key).second) {
      throw ParseError("config line " + std::to_string(line_no) +
                       ": duplicate key '" + key + "'");
    }
    using detail::parse_list;
    using detail::parse_number;
    if (key == "a1") {
      cfg.solver.a1 = parse_number<double>(value, line_no, key);
    } else if (key == "a2") {
      cfg.solver.a2 = parse_number<double>(value, line_no, key);
    } else if (key == "rho") {
      cfg.solver.rho_factor = parse_number<double>(value, line_no, key);
    } else if (key == "epsilon") {
      cfg.solver.epsilon = parse_number<double>(value, line_no, key);
    } else if (key == "mu_bar_multiplier") {
      cfg.solver.mu_bar_multiplier = parse_number<double>(value, line_no, key);
    } else if (key == "tol") {
      cfg.solver.tol = parse_number<double>(value, line_no, key);
    } else if (key == "max_iter") {
      cfg.solver.max_iter = parse_number<int>(value, line_no, key);
    } else if (key == "m_list") {
      cfg.m_list = parse_list<int>(value, line_no, key);
    } else if (key == "r_list") {
      cfg.r_list = parse_list<int>(value, line_no, key);
    } else if (key == "spr_list") {
      cfg.spr_list = parse_list<double>(value, line_no, key);
    } else if (key == "trials") {
      cfg.trials = parse_number<int>(value, line_no, key);
    } else if (key == "base_seed") {
      cfg.base_seed = parse_number<std::uint64_t>(value, line_no, key);
    } else if (key == "out") {
      cfg.out = std::string(value);
    } else {
      throw ParseError("config line " + std::to_string(line_no) +
                       ": unknown key '" + key + "'");
    }
  }
  if (cfg.trials < 1) {
    throw ParseError("config: trials must be >= 1");
  }
  return cfg;
}

[[nodiscard]] inline RunConfig read_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open " + path.string());
  }
  try {
    return parse_run_config(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace fpca
