#include "table.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "echolab/errors.hpp"
#include "echolab/version.hpp"

namespace echolab::cli {

void Table::add_row(std::initializer_list<double> values) {
  if (values.size() != columns.size())
    fail(ErrorCode::format, "table: row width does not match the column count");
  rows.emplace_back(values);
}

double Table::annotation_number(const std::string& key) const {
  for (const auto& [k, v] : annotations)
    if (k == key) return std::stod(v);
  fail(ErrorCode::format, "table: missing annotation '" + key + "'");
}

std::uint64_t fnv1a_digest(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void write_table(const Table& t, const std::string& csv_path, const nlohmann::json& manifest) {
  nlohmann::json full = manifest;
  full["tool"] = "echo-lab";
  full["version"] = kEcholabVersion;
  const std::string manifest_text = full.dump(2);
  const std::string manifest_path = csv_path + ".manifest.json";
  {
    std::ofstream mf(manifest_path);
    if (!mf) fail(ErrorCode::format, "table: cannot write " + manifest_path);
    mf << manifest_text << "\n";
  }

  std::ofstream out(csv_path);
  if (!out) fail(ErrorCode::format, "table: cannot write " + csv_path);
  char buf[64];
  out << "# " << t.title << "\n";
  out << "# version: " << kEcholabVersion << "\n";
  out << "# manifest: " << manifest_path << "\n";
  std::snprintf(buf, sizeof buf, "%016" PRIx64, fnv1a_digest(manifest_text));
  out << "# manifest-digest: fnv1a:" << buf << "\n";
  for (const auto& [k, v] : t.annotations) out << "# " << k << ": " << v << "\n";
  for (std::size_t c = 0; c < t.columns.size(); ++c)
    out << t.columns[c] << (c + 1 < t.columns.size() ? "," : "");
  out << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::snprintf(buf, sizeof buf, "%.12e", row[c]);
      out << buf << (c + 1 < row.size() ? "," : "");
    }
    out << "\n";
  }
}

Table read_table(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) fail(ErrorCode::format, "table: cannot open " + csv_path);
  Table t;
  std::string line;
  bool header_done = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string body = line.substr(line.find_first_not_of("# "));
      const auto colon = body.find(": ");
      if (t.title.empty() && colon == std::string::npos) t.title = body;
      else if (colon != std::string::npos)
        t.annotations.emplace_back(body.substr(0, colon), body.substr(colon + 2));
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    if (!header_done) {
      while (std::getline(ss, cell, ',')) t.columns.push_back(cell);
      header_done = true;
      continue;
    }
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != t.columns.size())
      fail(ErrorCode::format, "table: ragged row in " + csv_path);
    t.rows.push_back(std::move(row));
  }
  if (!header_done) fail(ErrorCode::format, "table: no header row in " + csv_path);
  return t;
}

}  // namespace echolab::cli
