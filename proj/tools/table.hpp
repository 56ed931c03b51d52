#pragma once

#include <json.hpp>
#include <map>
#include <string>
#include <vector>

namespace echolab::cli {

/// A CSV table with a '#'-prefixed header block. Annotations are extra
/// header lines ("key: value"); columns/rows are the payload.
struct Table {
  std::string title;
  std::vector<std::pair<std::string, std::string>> annotations;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::initializer_list<double> values);
  double annotation_number(const std::string& key) const;
};

std::uint64_t fnv1a_digest(const std::string& text);

/// Writes table + manifest side by side; the CSV header carries the
/// manifest digest. Values are printed with %.12e for bit-stable output.
void write_table(const Table& t, const std::string& csv_path, const nlohmann::json& manifest);

Table read_table(const std::string& csv_path);

}  // namespace echolab::cli
