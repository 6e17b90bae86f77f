#pragma once

// CSV and JSON writers. Numbers use the shortest decimal text that reads back
// to the same double, independent of the C and C++ locales.

#include <deque>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "otoc/cli/config.hpp"

namespace otoc::cli {

std::string format_double(double x);
double parse_double(const std::string& text);  // strict, whole string

struct Column {
  std::string name;
  std::string unit;
  std::vector<double> values;
};

struct Table {
  std::string name;
  std::vector<std::pair<std::string, std::string>> meta;
  std::deque<Column> columns;  // stable references from add()

  Column& add(std::string name, std::string unit);
  void note(std::string key, std::string value) { meta.emplace_back(std::move(key), std::move(value)); }
  std::size_t rows() const;
};

struct ResultEnvelope {
  static constexpr int schema_version = 1;
  RunConfig config;
  std::string produced_at;
  std::vector<Table> tables;
  // Named JSON summaries (fits); written next to the tables.
  std::vector<std::pair<std::string, nlohmann::ordered_json>> summaries;
};

// UTC ISO-8601 stamp; SOURCE_DATE_EPOCH pins it for reproducible builds.
std::string timestamp_now();

std::string render_csv(const Table& table, const ResultEnvelope& env);
nlohmann::ordered_json render_json(const nlohmann::ordered_json& body, const ResultEnvelope& env);

// Writes <dir>/<table>.csv and <dir>/<summary>.json; returns the paths written.
std::vector<std::filesystem::path> write_envelope(const ResultEnvelope& env);

}  // namespace otoc::cli
