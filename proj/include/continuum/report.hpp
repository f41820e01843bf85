#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "continuum/engine.hpp"
#include "continuum/metrics.hpp"
#include "continuum/model.hpp"
#include "continuum/stats.hpp"

namespace continuum {

// A named network condition applied to every scenario of an experiment.
struct NetworkCondition {
  std::string name;                           // normal | unstable | down | schedule file stem
  std::optional<OutageMode> full_horizon;     // one window covering the whole run
  std::optional<std::vector<OutageWindow>> windows;  // explicit schedule
  // Neither set: the scenario keeps its own schedule.

  // Returns `config` with this condition's schedule installed.
  ScenarioConfig apply(ScenarioConfig config) const;
};

// normal/none, unstable, down; nullopt for other names.
std::optional<NetworkCondition> standard_condition(const std::string& name);

struct ScenarioInput {
  std::string source;  // preset name or file path, as given
  ScenarioConfig config;
};

struct ExperimentSpec {
  std::vector<ScenarioInput> scenarios;
  std::vector<Architecture> architectures;
  std::size_t runs = 10;
  std::uint64_t base_seed = 42;
  std::optional<double> duration_s;  // overrides every scenario's duration
  std::vector<NetworkCondition> conditions{{"normal", std::nullopt, std::nullopt}};
  std::size_t parallel = 1;
  std::ostream* trace = nullptr;  // lifecycle CSV of the first run only
};

struct RunRecord {
  std::uint64_t seed = 0;
  std::map<std::string, double> values;  // metric id -> value
  EnergyBreakdown energy;
  CostBreakdown cost;
  std::uint64_t generated = 0, completed = 0, failed = 0, deferred = 0;
  std::vector<std::string> warnings;
};

struct ArchitectureResult {
  Architecture architecture = Architecture::CloudCentric;
  std::vector<RunRecord> runs;
  std::map<std::string, stats::SummaryStatistics> summary;
  // Normal condition only.
  std::optional<LatencyBreakdown> analytic_breakdown;
  std::optional<double> analytic_latency_ms;
  std::optional<double> analytic_energy_wh_per_day;
};

struct ComparisonTest {
  std::string metric;
  Architecture a = Architecture::DfcAi;
  Architecture b = Architecture::CloudCentric;
  stats::TTestResult result;
};

struct ScenarioResult {
  ScenarioName scenario = ScenarioName::DroneFleet;
  std::string source;
  std::string condition;
  double duration_s = 0.0;
  std::vector<ArchitectureResult> architectures;
  std::vector<ComparisonTest> tests;
  std::string tests_skipped_reason;
  std::map<std::string, double> derived;  // percentages computed once, printed verbatim

  const ArchitectureResult* find(Architecture a) const;
};

struct LatencyValidation {
  ScenarioName scenario;
  Architecture architecture;
  double simulated_ms;
  double analytic_ms;
  double rel_error;
  double error_pct;
  bool pass;
};

struct EnergySavingsValidation {
  double simulated_avg_pct = 0.0;
  double analytic_avg_pct = 0.0;
  double rel_error = 0.0;
  double error_pct = 0.0;
  bool pass = false;
  std::size_t scenarios = 0;
};

inline constexpr double kLatencyValidationTolerance = 0.20;
inline constexpr double kEnergyValidationTolerance = 0.10;

struct ExperimentReport {
  std::size_t runs = 0;
  std::uint64_t base_seed = 0;
  std::vector<Architecture> architectures;
  std::vector<ScenarioResult> results;  // scenario-major, then condition
  std::map<ScenarioName, ScenarioConfig> configs;
  std::vector<LatencyValidation> latency_validation;
  std::optional<EnergySavingsValidation> energy_validation;

  const ScenarioResult* find(ScenarioName s, const std::string& condition) const;
};

// Metric ids used in summaries, csv rows and the reference file.
inline constexpr const char* kLatencyMetric = "latency_ms";
inline constexpr const char* kEnergyMetric = "energy_wh_per_day";
inline constexpr const char* kCostMetric = "cost_usd_per_year";
inline constexpr const char* kCapabilityMetric = "capability_pct";
std::string location_metric(ProcessedAt at);  // "pct_<location>"

ExperimentReport run_experiment(const ExperimentSpec& spec);

// Loads a scenario by preset name (drone, sensor, safety or the file stem) or path.
ScenarioInput resolve_scenario(const std::string& name_or_path);
std::vector<std::string> preset_names();

class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ReportFormat { Markdown, Csv, Json };

nlohmann::json report_to_json(const ExperimentReport& report);
std::string report_to_markdown(const ExperimentReport& report);
std::string report_to_csv(const ExperimentReport& report);

// Writes report.md / report.csv / report.json under `dir`. Throws ReportError
// (before touching the filesystem) when the report has no architectures.
std::vector<std::filesystem::path> emit_report(const ExperimentReport& report, const std::set<ReportFormat>& formats,
                                               const std::filesystem::path& dir);

class MissingReferenceMetric : public std::runtime_error {
 public:
  explicit MissingReferenceMetric(const std::string& cell_id);
};

struct CellComparison {
  std::string id;
  std::string description;
  bool gated = true;
  bool missing = false;
  double actual = 0.0;
  double expected = 0.0;  // midpoint for ranges
  double rel_error = 0.0;
  bool pass = false;
  std::string criterion;  // human-readable tolerance
};

struct ComparisonOutcome {
  std::vector<CellComparison> cells;
  bool all_gated_pass() const;
};

ComparisonOutcome compare_to_reference(const nlohmann::json& report, const nlohmann::json& reference,
                                       bool skip_missing = false);
std::string comparison_to_markdown(const ComparisonOutcome& outcome);

}  // namespace continuum
