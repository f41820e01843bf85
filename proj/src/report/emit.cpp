#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "continuum/report.hpp"
#include "continuum/scenario_io.hpp"

namespace continuum {

using nlohmann::json;

namespace {

json summary_json(const stats::SummaryStatistics& s) {
  json j{{"n", s.n}, {"mean", s.mean}};
  if (s.n >= 2) {
    j["std"] = s.sample_std;
    j["ci95"] = s.ci95_halfwidth;
  } else {
    j["std"] = nullptr;
    j["ci95"] = nullptr;
  }
  return j;
}

json breakdown_json(const LatencyBreakdown& b) {
  return {{"t_net_up", b.t_net_up},     {"t_queue", b.t_queue},           {"t_proc", b.t_proc},
          {"t_net_down", b.t_net_down}, {"t_d_to_g", b.t_d_to_g},         {"t_proc_gateway", b.t_proc_gateway},
          {"t_g_to_d", b.t_g_to_d},     {"t_proc_local", b.t_proc_local}, {"t_collab", b.t_collab}};
}

json run_json(const RunRecord& r) {
  json energy{{"e_processing", r.energy.e_processing}, {"e_transmission", r.energy.e_transmission},
              {"total", r.energy.total}};
  for (const auto& [tier, wh] : r.energy.per_tier) energy["per_tier"][std::string(to_string(tier))] = wh;
  for (const auto& [cls, wh] : r.energy.per_device_class) energy["per_device_class"][std::string(to_string(cls))] = wh;
  json j{{"seed", r.seed},
         {"tasks", {{"generated", r.generated}, {"completed", r.completed}, {"failed", r.failed}, {"deferred", r.deferred}}},
         {"metrics", r.values},
         {"energy_wh_per_day", energy},
         {"cost_usd_per_year",
          {{"c_compute", r.cost.c_compute},
           {"c_transfer", r.cost.c_transfer},
           {"c_infrastructure", r.cost.c_infrastructure},
           {"c_operations", r.cost.c_operations},
           {"total", r.cost.total}}},
         {"warnings", r.warnings}};
  return j;
}

std::string pm(const stats::SummaryStatistics& s, int digits) {
  if (s.n < 2) return fmt::format("{:.{}f}", s.mean, digits);
  return fmt::format("{:.{}f} ± {:.{}f}", s.mean, digits, s.ci95_halfwidth, digits);
}

std::string cell(const ScenarioResult* sr, Architecture a, const std::string& metric, int digits) {
  if (!sr) return "n/a";
  const ArchitectureResult* ar = sr->find(a);
  if (!ar) return "n/a";
  auto it = ar->summary.find(metric);
  return it == ar->summary.end() ? "n/a" : pm(it->second, digits);
}

std::vector<ScenarioName> scenarios_in(const ExperimentReport& r) {
  std::vector<ScenarioName> out;
  for (const auto& sr : r.results) {
    if (std::find(out.begin(), out.end(), sr.scenario) == out.end()) out.push_back(sr.scenario);
  }
  return out;
}

std::vector<std::string> conditions_in(const ExperimentReport& r) {
  std::vector<std::string> out;
  for (const auto& sr : r.results) {
    if (std::find(out.begin(), out.end(), sr.condition) == out.end()) out.push_back(sr.condition);
  }
  return out;
}

void metric_table(std::ostringstream& md, const ExperimentReport& r, const std::string& condition,
                  const std::string& title, const std::string& metric, int digits) {
  const auto scenarios = scenarios_in(r);
  md << "### " << title << "\n\n| Architecture |";
  for (auto s : scenarios) md << ' ' << to_string(s) << " |";
  md << "\n|---|";
  for (std::size_t i = 0; i < scenarios.size(); ++i) md << "---:|";
  md << '\n';
  for (Architecture a : r.architectures) {
    md << "| " << display_name(a) << " |";
    for (auto s : scenarios) md << ' ' << cell(r.find(s, condition), a, metric, digits) << " |";
    md << '\n';
  }
  md << '\n';
}

}  // namespace

json report_to_json(const ExperimentReport& report) {
  json doc;
  json archs = json::array();
  for (auto a : report.architectures) archs.push_back(short_name(a));
  doc["metadata"] = {{"runs", report.runs},
                     {"base_seed", report.base_seed},
                     {"architectures", archs},
                     {"seeds", fmt::format("{}..{}", report.base_seed, report.base_seed + report.runs - 1)},
                     {"t_test", "Welch two-sample, two-sided"},
                     {"confidence_interval", "95%, Student t"}};

  json calibration = json::object();
  for (const auto& [name, cfg] : report.configs) {
    const json s = serialize_scenario(cfg);
    calibration[std::string(to_string(name))] = {{"calibration", s["calibration"]},
                                                 {"pricing", s["pricing"]},
                                                 {"architectures", s["architectures"]},
                                                 {"links", s["links"]},
                                                 {"cloud_route", s["cloud_route"]},
                                                 {"duration_s", s["duration_s"]}};
  }
  doc["calibration"] = calibration;

  json results = json::array();
  for (const auto& sr : report.results) {
    json r{{"scenario", to_string(sr.scenario)},
           {"source", sr.source},
           {"condition", sr.condition},
           {"duration_s", sr.duration_s}};
    json archs_j = json::array();
    for (const auto& ar : sr.architectures) {
      json a{{"architecture", short_name(ar.architecture)}};
      json summary = json::object();
      for (const auto& [k, s] : ar.summary) summary[k] = summary_json(s);
      a["summary"] = summary;
      json runs = json::array();
      for (const auto& run : ar.runs) runs.push_back(run_json(run));
      a["runs"] = runs;
      if (ar.analytic_breakdown) {
        a["analytic"] = {{"breakdown_ms", breakdown_json(*ar.analytic_breakdown)},
                         {"latency_ms", *ar.analytic_latency_ms},
                         {"energy_wh_per_day", *ar.analytic_energy_wh_per_day}};
      }
      archs_j.push_back(a);
    }
    r["architectures"] = archs_j;
    json tests = json::array();
    for (const auto& t : sr.tests) {
      tests.push_back({{"metric", t.metric},
                       {"comparison", fmt::format("{}_vs_{}", short_name(t.a), short_name(t.b))},
                       {"t", std::isfinite(t.result.t_statistic) ? json(t.result.t_statistic) : json(nullptr)},
                       {"df", t.result.degrees_of_freedom},
                       {"p", t.result.p_value},
                       {"significant", t.result.significant},
                       {"degenerate", t.result.degenerate}});
    }
    r["t_tests"] = tests;
    if (!sr.tests_skipped_reason.empty()) r["t_tests_skipped"] = sr.tests_skipped_reason;
    r["derived"] = sr.derived;
    results.push_back(r);
  }
  doc["results"] = results;

  json validation = json::object();
  json lat = json::array();
  for (const auto& v : report.latency_validation) {
    lat.push_back({{"scenario", to_string(v.scenario)},
                   {"architecture", short_name(v.architecture)},
                   {"simulated_ms", v.simulated_ms},
                   {"analytic_ms", v.analytic_ms},
                   {"rel_error", v.rel_error},
                   {"error_pct", v.error_pct},
                   {"pass", v.pass}});
  }
  validation["latency"] = lat;
  validation["latency_tolerance"] = kLatencyValidationTolerance;
  if (report.energy_validation) {
    const auto& e = *report.energy_validation;
    validation["energy_savings"] = {{"scenarios", e.scenarios},
                                    {"simulated_avg_pct", e.simulated_avg_pct},
                                    {"analytic_avg_pct", e.analytic_avg_pct},
                                    {"rel_error", e.rel_error},
                                    {"error_pct", e.error_pct},
                                    {"pass", e.pass}};
  }
  validation["energy_tolerance"] = kEnergyValidationTolerance;
  doc["validation"] = validation;
  return doc;
}

std::string report_to_markdown(const ExperimentReport& report) {
  std::ostringstream md;
  md << "# Continuum simulation report\n\n";
  md << fmt::format("{} run(s) per architecture, seeds {}..{}. Values are mean ± 95% CI half-width.\n\n", report.runs,
                    report.base_seed, report.base_seed + report.runs - 1);

  for (const auto& cond : conditions_in(report)) {
    md << "## Network condition: " << cond << "\n\n";
    metric_table(md, report, cond, "Mean latency (ms)", kLatencyMetric, 1);
    metric_table(md, report, cond, "Daily energy (Wh/day)", kEnergyMetric, 1);
    metric_table(md, report, cond, "Annual operating cost (USD/year)", kCostMetric, 2);
    metric_table(md, report, cond, "Operational capability (% of time-critical tasks)", kCapabilityMetric, 1);
  }

  const auto conditions = conditions_in(report);
  if (conditions.size() > 1) {
    for (auto s : scenarios_in(report)) {
      md << "### Resilience: " << to_string(s) << " (capability %)\n\n| Architecture |";
      for (const auto& c : conditions) md << ' ' << c << " |";
      md << "\n|---|";
      for (std::size_t i = 0; i < conditions.size(); ++i) md << "---:|";
      md << '\n';
      for (Architecture a : report.architectures) {
        md << "| " << display_name(a) << " |";
        for (const auto& c : conditions) md << ' ' << cell(report.find(s, c), a, kCapabilityMetric, 1) << " |";
        md << '\n';
      }
      md << '\n';
    }
  }

  for (const auto& sr : report.results) {
    md << "### Processing location (%): " << to_string(sr.scenario) << ", " << sr.condition << "\n\n";
    md << "| Location |";
    for (const auto& ar : sr.architectures) md << ' ' << display_name(ar.architecture) << " |";
    md << "\n|---|";
    for (std::size_t i = 0; i < sr.architectures.size(); ++i) md << "---:|";
    md << '\n';
    for (std::size_t i = 0; i < kProcessedAtCount; ++i) {
      const auto at = static_cast<ProcessedAt>(i);
      md << "| " << to_string(at) << " |";
      for (const auto& ar : sr.architectures) md << ' ' << cell(&sr, ar.architecture, location_metric(at), 1) << " |";
      md << '\n';
    }
    md << '\n';
  }

  md << "## Significance tests\n\n";
  for (const auto& sr : report.results) {
    md << "### " << to_string(sr.scenario) << ", " << sr.condition << "\n\n";
    if (sr.tests.empty()) {
      md << "Skipped: " << sr.tests_skipped_reason << "\n\n";
      continue;
    }
    md << "| Comparison | Metric | t | df | p | p < 0.05 |\n|---|---|---:|---:|---:|:---:|\n";
    for (const auto& t : sr.tests) {
      md << fmt::format("| {} vs {} | {} | {:.3f} | {:.2f} | {:.3e} | {} |\n", display_name(t.a), display_name(t.b),
                        t.metric, t.result.t_statistic, t.result.degrees_of_freedom, t.result.p_value,
                        t.result.significant ? "yes" : "no");
    }
    md << '\n';
    if (!sr.derived.empty()) {
      md << "| Derived | Value (%) |\n|---|---:|\n";
      for (const auto& [k, v] : sr.derived) md << fmt::format("| {} | {:.1f} |\n", k, v);
      md << '\n';
    }
  }

  if (!report.latency_validation.empty() || report.energy_validation) {
    md << "## Analytic model vs simulation\n\n| Metric | Theory | Simulation | Error (%) | Pass |\n|---|---:|---:|---:|:---:|\n";
    for (const auto& v : report.latency_validation) {
      md << fmt::format("| {} latency ({}) | {:.1f} ms | {:.1f} ms | {:.1f} | {} |\n", display_name(v.architecture),
                        to_string(v.scenario), v.analytic_ms, v.simulated_ms, v.error_pct, v.pass ? "yes" : "no");
    }
    if (report.energy_validation) {
      const auto& e = *report.energy_validation;
      md << fmt::format("| Energy savings (avg over {}) | {:.1f}% | {:.1f}% | {:.1f} | {} |\n", e.scenarios,
                        e.analytic_avg_pct, e.simulated_avg_pct, e.error_pct, e.pass ? "yes" : "no");
    }
    md << '\n';
  }

  bool any_warning = false;
  for (const auto& sr : report.results) {
    for (const auto& ar : sr.architectures) {
      for (const auto& run : ar.runs) {
        for (const auto& w : run.warnings) {
          if (!any_warning) md << "## Warnings\n\n";
          any_warning = true;
          md << fmt::format("- {} {} {} seed {}: {}\n", to_string(sr.scenario), sr.condition,
                            short_name(ar.architecture), run.seed, w);
        }
      }
    }
  }
  return md.str();
}

std::string report_to_csv(const ExperimentReport& report) {
  std::string out = "scenario,condition,architecture,metric,mean,std,ci95\n";
  for (const auto& sr : report.results) {
    for (const auto& ar : sr.architectures) {
      for (const auto& [k, s] : ar.summary) {
        if (s.n >= 2) {
          out += fmt::format("{},{},{},{},{},{},{}\n", to_string(sr.scenario), sr.condition, short_name(ar.architecture),
                             k, s.mean, s.sample_std, s.ci95_halfwidth);
        } else {
          out += fmt::format("{},{},{},{},{},,\n", to_string(sr.scenario), sr.condition, short_name(ar.architecture), k,
                             s.mean);
        }
      }
    }
  }
  return out;
}

std::vector<std::filesystem::path> emit_report(const ExperimentReport& report, const std::set<ReportFormat>& formats,
                                               const std::filesystem::path& dir) {
  if (report.architectures.empty()) throw ReportError("report has no architectures; nothing written");
  if (formats.empty()) throw ReportError("no output format selected");
  std::vector<std::pair<std::filesystem::path, std::string>> files;
  if (formats.contains(ReportFormat::Markdown)) files.emplace_back(dir / "report.md", report_to_markdown(report));
  if (formats.contains(ReportFormat::Csv)) files.emplace_back(dir / "report.csv", report_to_csv(report));
  if (formats.contains(ReportFormat::Json)) files.emplace_back(dir / "report.json", report_to_json(report).dump(2) + "\n");

  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ReportError(fmt::format("IoError: cannot create {}: {}", dir.string(), ec.message()));
  std::vector<std::filesystem::path> written;
  for (const auto& [path, body] : files) {
    std::ofstream out(path, std::ios::binary);
    out << body;
    if (!out) throw ReportError(fmt::format("IoError: cannot write {}", path.string()));
    written.push_back(path);
  }
  return written;
}

}  // namespace continuum
