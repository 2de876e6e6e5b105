#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mcfem/version.hpp"

namespace mcfem::app {

/// Shortest text that parses back to the same double.
inline std::string fmt_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), end);
}

/// Comma-separated file with '#' comment header. Rows are buffered and
/// written once, so a failed run never leaves a half-written file behind.
class CsvWriter {
 public:
  CsvWriter(std::filesystem::path path, std::vector<std::string> columns)
      : path_(std::move(path)), columns_(std::move(columns)) {}

  void comment(std::string_view line) {
    header_ += "# ";
    header_ += line;
    header_ += '\n';
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) body_ += ',';
      body_ += cells[i];
    }
    body_ += '\n';
  }

  void row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(fmt_double(v));
    row(cells);
  }

  const std::filesystem::path& path() const noexcept { return path_; }

  void write() const {
    std::ofstream out(path_, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path_.string());
    out << "# mcfem " << kVersion << '\n' << header_;
    for (std::size_t i = 0; i < columns_.size(); ++i) out << (i ? "," : "") << columns_[i];
    out << '\n' << body_;
    if (!out) throw std::runtime_error("write failed for " + path_.string());
  }

 private:
  std::filesystem::path path_;
  std::vector<std::string> columns_;
  std::string header_;
  std::string body_;
};

}  // namespace mcfem::app
