#include "sdnls/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "sdnls/errors.hpp"

namespace sdnls {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

EnvironmentStamp current_environment() {
  EnvironmentStamp env;
#if defined(__linux__)
  env.platform = "linux";
#elif defined(__APPLE__)
  env.platform = "macos";
#elif defined(_WIN32)
  env.platform = "windows";
#else
  env.platform = "unknown";
#endif
#if defined(__clang__)
  env.compiler = "clang " __clang_version__;
#elif defined(__GNUC__)
  env.compiler = "gcc " __VERSION__;
#else
  env.compiler = "unknown";
#endif
  return env;
}

ReportDocument make_report(const RunConfig& config, const SuiteResult& suite) {
  ReportDocument doc;
  doc.config_text = to_config_text(config);
  doc.suite = suite;
  doc.verdicts = {suite.count(CheckStatus::pass), suite.count(CheckStatus::fail),
                  suite.count(CheckStatus::reported)};
  doc.passed = suite.passed();
  doc.environment = current_environment();
  return doc;
}

// ---- CSV ------------------------------------------------------------------

namespace {

constexpr const char* kCsvHeader =
    "t,mass_sq,l2ma_pow,h1,h2,linf,mass_law_residual,dtu_l2,nls_energy";

void put(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17e", v);
  out += buf;
}

void write_file(const std::string& path, const std::string& content) {
  const fs::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << content;
  out.close();
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::string timeseries_csv(const TimeSeries& series) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : series) {
    for (double v : {r.t, r.mass_sq, r.l2ma_pow, r.h1, r.h2, r.linf, r.mass_law_residual}) {
      put(out, v);
      out += ',';
    }
    if (r.dtu_l2) put(out, *r.dtu_l2);
    out += ',';
    if (r.nls_energy) put(out, *r.nls_energy);
    out += '\n';
  }
  return out;
}

void write_timeseries_csv(const TimeSeries& series, const std::string& path) {
  write_file(path, timeseries_csv(series));
}

TimeSeries parse_timeseries_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw IoError("time series CSV has an unexpected header");
  }
  TimeSeries series;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != 9) throw IoError("time series row has the wrong column count");
    auto num = [](const std::string& s) { return std::strtod(s.c_str(), nullptr); };
    TimeSeriesRecord r;
    r.t = num(cells[0]);
    r.mass_sq = num(cells[1]);
    r.l2ma_pow = num(cells[2]);
    r.h1 = num(cells[3]);
    r.h2 = num(cells[4]);
    r.linf = num(cells[5]);
    r.mass_law_residual = num(cells[6]);
    if (!cells[7].empty()) r.dtu_l2 = num(cells[7]);
    if (!cells[8].empty()) r.nls_energy = num(cells[8]);
    series.push_back(r);
  }
  return series;
}

TimeSeries read_timeseries_csv(const std::string& path) {
  return parse_timeseries_csv(read_file(path));
}

// ---- JSON -----------------------------------------------------------------

namespace {

// JSON has no inf/nan; they travel as strings so the round trip is lossless.
json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double number_from(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw IoError("unexpected number string '" + s + "'");
  }
  return j.get<double>();
}

json optional_number(const std::optional<double>& v) {
  return v ? number(*v) : json(nullptr);
}

std::optional<double> optional_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return number_from(j);
}

json record_json(const TimeSeriesRecord& r) {
  return json{{"t", number(r.t)},
              {"mass_sq", number(r.mass_sq)},
              {"l2ma_pow", number(r.l2ma_pow)},
              {"h1", number(r.h1)},
              {"h2", number(r.h2)},
              {"linf", number(r.linf)},
              {"mass_law_residual", number(r.mass_law_residual)},
              {"dtu_l2", optional_number(r.dtu_l2)},
              {"nls_energy", optional_number(r.nls_energy)}};
}

TimeSeriesRecord record_from(const json& j) {
  TimeSeriesRecord r;
  r.t = number_from(j.at("t"));
  r.mass_sq = number_from(j.at("mass_sq"));
  r.l2ma_pow = number_from(j.at("l2ma_pow"));
  r.h1 = number_from(j.at("h1"));
  r.h2 = number_from(j.at("h2"));
  r.linf = number_from(j.at("linf"));
  r.mass_law_residual = number_from(j.at("mass_law_residual"));
  r.dtu_l2 = optional_from(j.at("dtu_l2"));
  r.nls_energy = optional_from(j.at("nls_energy"));
  return r;
}

json extinction_json(const ExtinctionReport& e) {
  return json{{"extinct", e.extinct},
              {"t_v", optional_number(e.t_v)},
              {"mass_at_end", number(e.mass_at_end)},
              {"bound_1d", optional_number(e.bound_1d)},
              {"bound_23d", optional_number(e.bound_23d)},
              {"nash_constant_estimate", number(e.nash_constant_estimate)}};
}

ExtinctionReport extinction_from(const json& j) {
  ExtinctionReport e;
  e.extinct = j.at("extinct").get<bool>();
  e.t_v = optional_from(j.at("t_v"));
  e.mass_at_end = number_from(j.at("mass_at_end"));
  e.bound_1d = optional_from(j.at("bound_1d"));
  e.bound_23d = optional_from(j.at("bound_23d"));
  e.nash_constant_estimate = number_from(j.at("nash_constant_estimate"));
  return e;
}

CheckStatus status_from(const std::string& s) {
  if (s == "pass") return CheckStatus::pass;
  if (s == "fail") return CheckStatus::fail;
  if (s == "reported") return CheckStatus::reported;
  throw IoError("unknown check status '" + s + "'");
}

json scenario_json(const ScenarioResult& r) {
  json runs = json::array();
  for (const auto& run : r.runs) {
    json series = json::array();
    for (const auto& rec : run.series) series.push_back(record_json(rec));
    runs.push_back(json{{"label", run.label},
                        {"steps", run.steps},
                        {"t_final", number(run.t_final)},
                        {"extinction", extinction_json(run.extinction)},
                        {"series", std::move(series)}});
  }
  json checks = json::array();
  for (const auto& c : r.checks) {
    checks.push_back(json{{"id", c.id},
                          {"status", to_string(c.status)},
                          {"value", optional_number(c.value)},
                          {"threshold", optional_number(c.threshold)},
                          {"detail", c.detail}});
  }
  json constants = json::object();
  for (const auto& [k, v] : r.constants) constants[k] = number(v);
  return json{{"name", r.name},
              {"kind", to_string(r.kind)},
              {"passed", r.passed()},
              {"error", r.error ? json(*r.error) : json(nullptr)},
              {"wall_seconds", number(r.wall_seconds)},
              {"checks", std::move(checks)},
              {"constants", std::move(constants)},
              {"runs", std::move(runs)}};
}

ScenarioResult scenario_from(const json& j) {
  ScenarioResult r;
  r.name = j.at("name").get<std::string>();
  const auto kind = scenario_kind_from_string(j.at("kind").get<std::string>());
  if (!kind) throw IoError("unknown scenario kind in report");
  r.kind = *kind;
  if (!j.at("error").is_null()) r.error = j.at("error").get<std::string>();
  r.wall_seconds = number_from(j.at("wall_seconds"));
  for (const auto& c : j.at("checks")) {
    r.checks.push_back({c.at("id").get<std::string>(),
                        status_from(c.at("status").get<std::string>()),
                        optional_from(c.at("value")), optional_from(c.at("threshold")),
                        c.at("detail").get<std::string>()});
  }
  for (const auto& [k, v] : j.at("constants").items()) r.constants[k] = number_from(v);
  for (const auto& run : j.at("runs")) {
    RunRecord rec;
    rec.label = run.at("label").get<std::string>();
    rec.steps = run.at("steps").get<std::int64_t>();
    rec.t_final = number_from(run.at("t_final"));
    rec.extinction = extinction_from(run.at("extinction"));
    for (const auto& s : run.at("series")) rec.series.push_back(record_from(s));
    r.runs.push_back(std::move(rec));
  }
  return r;
}

}  // namespace

json to_json(const ReportDocument& report) {
  json scenarios = json::array();
  for (const auto& e : report.suite.entries) scenarios.push_back(scenario_json(e));
  return json{
      {"schema_version", report.schema_version},
      {"passed", report.passed},
      {"verdicts",
       json{{"pass", report.verdicts.pass},
            {"fail", report.verdicts.fail},
            {"reported", report.verdicts.reported}}},
      {"environment",
       json{{"precision", report.environment.precision},
            {"platform", report.environment.platform},
            {"compiler", report.environment.compiler}}},
      {"config", report.config_text},
      {"scenarios", std::move(scenarios)},
  };
}

ReportDocument report_from_json(const json& j) {
  ReportDocument doc;
  doc.schema_version = j.at("schema_version").get<int>();
  if (doc.schema_version != kReportSchemaVersion) {
    throw IoError("unsupported report schema version " +
                  std::to_string(doc.schema_version));
  }
  doc.passed = j.at("passed").get<bool>();
  const auto& v = j.at("verdicts");
  doc.verdicts = {v.at("pass").get<std::size_t>(), v.at("fail").get<std::size_t>(),
                  v.at("reported").get<std::size_t>()};
  const auto& env = j.at("environment");
  doc.environment = {env.at("precision").get<std::string>(),
                     env.at("platform").get<std::string>(),
                     env.at("compiler").get<std::string>()};
  doc.config_text = j.at("config").get<std::string>();
  for (const auto& s : j.at("scenarios")) doc.suite.entries.push_back(scenario_from(s));
  return doc;
}

std::string report_json_text(const ReportDocument& report) {
  return to_json(report).dump(2) + "\n";
}

void write_report_json(const ReportDocument& report, const std::string& path) {
  write_file(path, report_json_text(report));
}

ReportDocument read_report_json(const std::string& path) {
  const auto text = read_file(path);
  try {
    return report_from_json(json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed report '" + path + "': " + e.what());
  }
}

// ---- sink -----------------------------------------------------------------

CsvDirectorySink::CsvDirectorySink(std::string directory)
    : directory_(std::move(directory)) {}

namespace {

std::string safe_name(const std::string& s) {
  std::string out;
  for (char c : s) {
    const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '-' ||
                      c == '_' || c == '.' || c == '=';
    out += keep ? c : '_';
  }
  return out.empty() ? "_" : out;
}

}  // namespace

void CsvDirectorySink::on_scenario(const Scenario& /*scenario*/,
                                   const ScenarioResult& result) {
  const fs::path dir = fs::path(directory_) / safe_name(result.name);
  for (const auto& run : result.runs) {
    write_timeseries_csv(run.series, (dir / (safe_name(run.label) + ".csv")).string());
  }
}

}  // namespace sdnls
