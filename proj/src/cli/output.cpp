#include "otoc/cli/output.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <system_error>

namespace otoc::cli {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  const char* first = text.data();
  const char* last = first + text.size();
  if (first != last && *first == '+') ++first;
  double v = 0.0;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || first == last) {
    throw ParameterError("'" + text + "' is not a number");
  }
  return v;
}

Column& Table::add(std::string column, std::string unit) {
  columns.push_back({std::move(column), std::move(unit), {}});
  return columns.back();
}

std::size_t Table::rows() const { return columns.empty() ? 0 : columns.front().values.size(); }

std::string timestamp_now() {
  std::time_t t = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
    t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  }
  std::tm utc{};
  gmtime_r(&t, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

std::string render_csv(const Table& table, const ResultEnvelope& env) {
  for (const auto& c : table.columns) {
    if (c.values.size() != table.rows()) throw ShapeError("table " + table.name + ": ragged column " + c.name);
  }
  std::string out;
  auto line = [&](const std::string& key, const std::string& value) { out += "# " + key + " = " + value + "\n"; };
  line("schema_version", std::to_string(ResultEnvelope::schema_version));
  line("produced_at", env.produced_at);
  line("table", table.name);
  std::string names, units;
  for (std::size_t j = 0; j < table.columns.size(); ++j) {
    names += (j ? "," : "") + table.columns[j].name;
    units += (j ? "," : "") + table.columns[j].unit;
  }
  line("units", units);
  for (const auto& [k, v] : table.meta) line(k, v);
  for (const auto& [k, v] : snapshot(env.config)) line("config." + k, v);
  out += names + "\n";
  for (std::size_t i = 0; i < table.rows(); ++i) {
    for (std::size_t j = 0; j < table.columns.size(); ++j) {
      if (j) out += ',';
      out += format_double(table.columns[j].values[i]);
    }
    out += '\n';
  }
  return out;
}

nlohmann::ordered_json render_json(const nlohmann::ordered_json& body, const ResultEnvelope& env) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = ResultEnvelope::schema_version;
  doc["produced_at"] = env.produced_at;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  for (const auto& [k, v] : snapshot(env.config)) config[k] = v;
  doc["config"] = config;
  for (const auto& [k, v] : body.items()) doc[k] = v;
  return doc;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.close();
  if (!out) throw ResourceError("cannot write " + path.string());
}

}  // namespace

std::vector<std::filesystem::path> write_envelope(const ResultEnvelope& env) {
  const std::filesystem::path dir(env.config.output);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ResourceError("cannot create output directory " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  for (const auto& t : env.tables) {
    written.push_back(dir / (t.name + ".csv"));
    write_file(written.back(), render_csv(t, env));
  }
  for (const auto& [name, body] : env.summaries) {
    written.push_back(dir / (name + ".json"));
    write_file(written.back(), render_json(body, env).dump(2) + "\n");
  }
  return written;
}

}  // namespace otoc::cli
