#pragma once

#include <string>

#include <json.hpp>

#include "sdnls/config.hpp"
#include "sdnls/experiments.hpp"

namespace sdnls {

inline constexpr int kReportSchemaVersion = 1;

struct EnvironmentStamp {
  std::string precision = "binary64";
  std::string platform;
  std::string compiler;
  bool operator==(const EnvironmentStamp&) const = default;
};

EnvironmentStamp current_environment();

struct VerdictCounts {
  std::size_t pass = 0;
  std::size_t fail = 0;
  std::size_t reported = 0;
  bool operator==(const VerdictCounts&) const = default;
};

struct ReportDocument {
  int schema_version = kReportSchemaVersion;
  /// Canonical text of the config that produced the results.
  std::string config_text;
  SuiteResult suite;
  VerdictCounts verdicts;
  bool passed = false;
  EnvironmentStamp environment;

  bool operator==(const ReportDocument&) const = default;
};

ReportDocument make_report(const RunConfig& config, const SuiteResult& suite);

/// Header plus one row per record, %.17e numbers, empty cells for absent values.
std::string timeseries_csv(const TimeSeries& series);
void write_timeseries_csv(const TimeSeries& series, const std::string& path);
TimeSeries parse_timeseries_csv(const std::string& text);
TimeSeries read_timeseries_csv(const std::string& path);

nlohmann::ordered_json to_json(const ReportDocument& report);
ReportDocument report_from_json(const nlohmann::ordered_json& j);
/// Two-space indented JSON with a trailing newline.
std::string report_json_text(const ReportDocument& report);
void write_report_json(const ReportDocument& report, const std::string& path);
ReportDocument read_report_json(const std::string& path);

/// Writes <dir>/<scenario>/<run label>.csv for every run of every scenario.
class CsvDirectorySink : public ResultSink {
 public:
  explicit CsvDirectorySink(std::string directory);
  void on_scenario(const Scenario& scenario, const ScenarioResult& result) override;

 private:
  std::string directory_;
};

}  // namespace sdnls
