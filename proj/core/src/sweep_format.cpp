#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "sweep_io.hpp"

namespace moire_ssh {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";  // drops the sign of -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {

namespace {

void dump_into(const nlohmann::json& v, std::string& out) {
  using nlohmann::json;
  switch (v.type()) {
    case json::value_t::object: {
      out += '{';
      bool first = true;
      for (const auto& [key, item] : v.items()) {
        if (!first) out += ',';
        first = false;
        out += json(key).dump();
        out += ':';
        dump_into(item, out);
      }
      out += '}';
      break;
    }
    case json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) out += ',';
        dump_into(v[i], out);
      }
      out += ']';
      break;
    }
    case json::value_t::number_float: {
      const double x = v.get<double>();
      out += std::isfinite(x) ? format_double(x) : "null";
      break;
    }
    default:
      out += v.dump();
  }
}

std::string csv_field(const TableCell& c) {
  switch (c.kind) {
    case TableCell::Kind::Number:
      return format_double(c.number);
    case TableCell::Kind::Integer:
      return std::to_string(c.integer);
    case TableCell::Kind::Text:
      break;
  }
  if (c.text.find_first_of(",\"\n") == std::string::npos) return c.text;
  std::string q = "\"";
  for (const char ch : c.text) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + '"';
}

}  // namespace

std::string dump_json(const nlohmann::json& value) {
  std::string out;
  dump_into(value, out);
  return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f << text;
    if (!f.flush()) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

std::filesystem::path write_table(const std::string& stem, OutputFormat format, const std::string& config_json,
                                  const Table& table) {
  std::string text;
  std::filesystem::path path = stem;
  if (format == OutputFormat::Csv) {
    path += ".csv";
    text += "# " + config_json + "\n";
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      if (i > 0) text += ',';
      text += table.columns[i];
    }
    text += '\n';
    for (const auto& row : table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i > 0) text += ',';
        text += csv_field(row[i]);
      }
      text += '\n';
    }
  } else {
    path += ".json";
    text += "{\"config\":" + config_json + ",\"columns\":" + nlohmann::json(table.columns).dump() + ",\"rows\":[";
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      text += r == 0 ? "\n[" : ",\n[";
      const auto& row = table.rows[r];
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i > 0) text += ',';
        const auto& c = row[i];
        switch (c.kind) {
          case TableCell::Kind::Number:
            text += std::isfinite(c.number) ? format_double(c.number) : "null";
            break;
          case TableCell::Kind::Integer:
            text += std::to_string(c.integer);
            break;
          case TableCell::Kind::Text:
            text += nlohmann::json(c.text).dump();
            break;
        }
      }
      text += ']';
    }
    text += "\n]}\n";
  }
  write_file_atomic(path, text);
  return path;
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace detail
}  // namespace moire_ssh
