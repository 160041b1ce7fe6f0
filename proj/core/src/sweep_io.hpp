#pragma once

// Table and report writers shared by the sweep runners.

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "moire_ssh/sweep.hpp"

namespace moire_ssh::detail {

struct TableCell {
  enum class Kind { Number, Integer, Text };
  Kind kind;
  double number = 0.0;
  long long integer = 0;
  std::string text;

  static TableCell num(double x) { return {Kind::Number, x, 0, {}}; }
  static TableCell integral(long long x) { return {Kind::Integer, 0.0, x, {}}; }
  static TableCell str(std::string s) { return {Kind::Text, 0.0, 0, std::move(s)}; }
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<TableCell>> rows;
};

/// JSON text with every floating-point value printed by format_double and
/// non-finite values as null.
std::string dump_json(const nlohmann::json& value);

/// Writes `table` as CSV (with a '#' config header line) or JSON; the
/// extension is appended to `stem`.
std::filesystem::path write_table(const std::string& stem, OutputFormat format, const std::string& config_json,
                                  const Table& table);

/// Writes text to `path` through a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view text);

}  // namespace moire_ssh::detail
