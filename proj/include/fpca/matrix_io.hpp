#pragma once

/// @file
/// Dense matrix files.
///
/// CSV: UTF-8 text, one row per line, comma-separated decimal floats, no
/// header. Written with 17 significant digits.
///
/// Binary ("FPCA1"): the five ASCII bytes F P C A 1, then rows and cols as
/// little-endian u64, then rows*cols little-endian IEEE-754 doubles in
/// row-major order.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "fpca/errors.hpp"
#include "fpca/thresholding.hpp"

namespace fpca {

inline constexpr std::string_view kBinaryMagic = "FPCA1";

enum class MatrixFormat { Csv, Binary };

/// Shortest text that from_chars turns back into exactly `v`.
inline std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> bytes{};
  for (int i = 0; i < 8; ++i) {
    bytes[static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xffU);
  }
  out.write(bytes.data(), bytes.size());
}

inline std::uint64_t get_u64(std::istream& in, const char* what) {
  std::array<unsigned char, 8> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (in.gcount() != 8) {
    throw ParseError(std::string("FPCA1: truncated ") + what);
  }
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) {
    v = (v << 8) | bytes[static_cast<std::size_t>(i)];
  }
  return v;
}

}  // namespace detail

/// Parses CSV text. Errors name the 1-based line and column (field).
[[nodiscard]] inline DenseMatrix read_csv(std::istream& in) {
  std::vector<double> values;
  Eigen::Index cols = -1;
  Eigen::Index rows = 0;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = detail::trim(line);
    if (row.empty()) continue;

    Eigen::Index field_count = 0;
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = row.find(',', pos);
      const std::string_view field = detail::trim(
          row.substr(pos, comma == std::string_view::npos ? std::string_view::npos
                                                          : comma - pos));
      ++field_count;
      double v = 0.0;
      const char* first = field.data();
      const char* last = field.data() + field.size();
      if (!field.empty() && *first == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, last, v);
      if (field.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
        throw ParseError("CSV line " + std::to_string(line_no) + ", column " +
                         std::to_string(field_count) + ": cannot parse '" +
                         std::string(field) + "' as a finite number");
      }
      values.push_back(v);
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }

    if (cols < 0) {
      cols = field_count;
    } else if (field_count != cols) {
      throw ParseError("CSV line " + std::to_string(line_no) + ", column " +
                       std::to_string(std::min(field_count, cols) + 1) +
                       ": expected " + std::to_string(cols) + " fields, found " +
                       std::to_string(field_count));
    }
    ++rows;
  }
  if (rows == 0) {
    throw ParseError("CSV: no data rows");
  }
  DenseMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      m(i, j) = values[static_cast<std::size_t>(i * cols + j)];
    }
  }
  return m;
}

inline void write_csv(std::ostream& out, const DenseMatrix& m) {
  std::string line;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    line.clear();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) line += ',';
      line += format_double(m(i, j));
    }
    line += '\n';
    out << line;
  }
}

/// Reads an FPCA1 stream; the magic bytes must not have been consumed.
[[nodiscard]] inline DenseMatrix read_binary(std::istream& in) {
  std::array<char, kBinaryMagic.size()> magic{};
  in.read(magic.data(), magic.size());
  if (in.gcount() != static_cast<std::streamsize>(magic.size()) ||
      std::string_view(magic.data(), magic.size()) != kBinaryMagic) {
    throw ParseError("FPCA1: bad magic bytes");
  }
  const std::uint64_t rows = detail::get_u64(in, "row count");
  const std::uint64_t cols = detail::get_u64(in, "column count");
  if (rows == 0 || cols == 0 || rows > (1ULL << 31) || cols > (1ULL << 31)) {
    throw ParseError("FPCA1: invalid shape " + std::to_string(rows) + "x" +
                     std::to_string(cols));
  }
  DenseMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::uint64_t i = 0; i < rows; ++i) {
    for (std::uint64_t j = 0; j < cols; ++j) {
      const double v = std::bit_cast<double>(detail::get_u64(in, "payload"));
      if (!std::isfinite(v)) {
        throw ParseError("FPCA1: non-finite entry at row " + std::to_string(i) +
                         ", column " + std::to_string(j));
      }
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw ParseError("FPCA1: trailing bytes after payload");
  }
  return m;
}

inline void write_binary(std::ostream& out, const DenseMatrix& m) {
  out.write(kBinaryMagic.data(), static_cast<std::streamsize>(kBinaryMagic.size()));
  detail::put_u64(out, static_cast<std::uint64_t>(m.rows()));
  detail::put_u64(out, static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      detail::put_u64(out, std::bit_cast<std::uint64_t>(m(i, j)));
    }
  }
}

/// Reads either format, sniffing the magic bytes.
[[nodiscard]] inline DenseMatrix read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError("cannot open " + path.string());
  }
  std::array<char, kBinaryMagic.size()> head{};
  in.read(head.data(), head.size());
  const bool binary = in.gcount() == static_cast<std::streamsize>(head.size()) &&
                      std::string_view(head.data(), head.size()) == kBinaryMagic;
  in.clear();
  in.seekg(0);
  try {
    return binary ? read_binary(in) : read_csv(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

/// `.bin` and `.fpca` select the binary container; anything else is CSV.
[[nodiscard]] inline MatrixFormat format_for(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  return ext == ".bin" || ext == ".fpca" ? MatrixFormat::Binary : MatrixFormat::Csv;
}

inline void write_matrix(const std::filesystem::path& path, const DenseMatrix& m,
                         MatrixFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw ParseError("cannot write " + path.string());
  }
  if (format == MatrixFormat::Binary) {
    write_binary(out, m);
  } else {
    write_csv(out, m);
  }
  if (!out) {
    throw ParseError("write failed for " + path.string());
  }
}

inline void write_matrix(const std::filesystem::path& path, const DenseMatrix& m) {
  write_matrix(path, m, format_for(path));
}

}  // namespace fpca
