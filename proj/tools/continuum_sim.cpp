// continuum_sim: run architecture sweeps and check them against reference tables.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "continuum/report.hpp"
#include "continuum/scenario_io.hpp"
#include "continuum/workload.hpp"

namespace {

using namespace continuum;

std::vector<std::string> split_commas(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (!part.empty()) out.push_back(part);
    }
  }
  return out;
}

std::vector<Architecture> parse_architectures(const std::vector<std::string>& names) {
  std::vector<Architecture> out;
  for (const auto& n : split_commas(names)) {
    if (n == "all") {
      out = {Architecture::CloudCentric, Architecture::GatewayEdge, Architecture::DfcAi};
      continue;
    }
    auto a = parse_architecture(n);
    if (!a) throw CLI::ValidationError("--arch", "unknown architecture '" + n + "'");
    if (std::find(out.begin(), out.end(), *a) == out.end()) out.push_back(*a);
  }
  return out;
}

std::vector<NetworkCondition> parse_conditions(const std::vector<std::string>& names) {
  std::vector<NetworkCondition> out;
  for (const auto& n : split_commas(names)) {
    if (auto c = standard_condition(n)) {
      out.push_back(*c);
      continue;
    }
    std::ifstream in(n);
    if (!in) throw CLI::ValidationError("--outage", "not a mode or a readable schedule file: " + n);
    const auto doc = nlohmann::json::parse(in);
    // Horizon checks happen per scenario when the schedule is applied.
    NetworkCondition c;
    c.name = std::filesystem::path(n).stem().string();
    c.windows = parse_outage_windows(doc, std::numeric_limits<double>::infinity());
    out.push_back(std::move(c));
  }
  return out;
}

std::uint64_t seed_from_env(std::uint64_t fallback) {
  const char* v = std::getenv("CONTINUUM_SIM_SEED");
  if (!v || !*v) return fallback;
  return std::stoull(v);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cloud, gateway and device-first continuum simulator"};
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "Run a sweep and write reports");
  std::vector<std::string> scenarios, archs{"all"}, outages{"none"}, formats{"md,csv,json"};
  std::size_t runs = 10, parallel = 1;
  std::optional<std::uint64_t> seed;
  std::optional<double> duration;
  std::string output = "report", trace_path, workload_path;
  sim->add_option("--scenario", scenarios, "Preset name, scenario file or 'all' (repeatable)")->required();
  sim->add_option("--arch", archs, "cloud, gateway, dfc or all (comma list)");
  sim->add_option("--runs", runs, "Runs per architecture")->check(CLI::PositiveNumber);
  sim->add_option("--seed", seed, "Base seed (default $CONTINUUM_SIM_SEED or 42)");
  sim->add_option("--duration-s", duration, "Override simulated horizon in seconds");
  sim->add_option("--outage", outages, "none, unstable, down or a schedule file (comma list)");
  sim->add_option("--output", output, "Output directory");
  sim->add_option("--format", formats, "md, csv, json (comma list)");
  sim->add_option("--parallel", parallel, "Concurrent runs")->check(CLI::PositiveNumber);
  sim->add_option("--trace", trace_path, "Task lifecycle CSV of the first run");
  sim->add_option("--dump-workload", workload_path, "Generated workload CSV of the first scenario");

  auto* cmp = app.add_subcommand("compare", "Check a report against reference values");
  std::string report_dir, reference = std::string(CONTINUUM_DEFAULT_REFERENCE);
  bool skip_missing = false;
  cmp->add_option("--report", report_dir, "Directory holding report.json")->required();
  cmp->add_option("--reference", reference, "Reference table file");
  cmp->add_flag("--skip-missing", skip_missing, "Skip cells the report does not cover");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      ExperimentSpec spec;
      for (const auto& s : split_commas(scenarios)) {
        if (s == "all") {
          for (const auto& p : preset_names()) spec.scenarios.push_back(resolve_scenario(p));
        } else {
          spec.scenarios.push_back(resolve_scenario(s));
        }
      }
      spec.architectures = parse_architectures(archs);
      spec.runs = runs;
      spec.base_seed = seed ? *seed : seed_from_env(42);
      spec.duration_s = duration;
      spec.conditions = parse_conditions(outages);
      spec.parallel = parallel;

      std::set<ReportFormat> fmts;
      for (const auto& f : split_commas(formats)) {
        if (f == "md" || f == "markdown") fmts.insert(ReportFormat::Markdown);
        else if (f == "csv") fmts.insert(ReportFormat::Csv);
        else if (f == "json") fmts.insert(ReportFormat::Json);
        else throw CLI::ValidationError("--format", "unknown format '" + f + "'");
      }

      if (!workload_path.empty() && !spec.scenarios.empty()) {
        ScenarioConfig cfg = spec.scenarios.front().config;
        if (duration) cfg.duration_s = *duration;
        std::ofstream w(workload_path);
        if (!w) throw ReportError("cannot write " + workload_path);
        write_workload_csv(cfg, spec.base_seed, w);
      }

      std::ofstream trace;
      if (!trace_path.empty()) {
        trace.open(trace_path);
        if (!trace) throw ReportError("cannot write " + trace_path);
        spec.trace = &trace;
      }

      const auto report = run_experiment(spec);
      for (const auto& path : emit_report(report, fmts, output)) std::cout << path.string() << "\n";
      return 0;
    }

    std::ifstream rin(std::filesystem::path(report_dir) / "report.json");
    if (!rin) throw ReportError("no report.json in " + report_dir);
    std::ifstream fin(reference);
    if (!fin) throw ReportError("cannot read " + reference);
    const auto outcome =
        compare_to_reference(nlohmann::json::parse(rin), nlohmann::json::parse(fin), skip_missing);
    std::cout << comparison_to_markdown(outcome);
    return outcome.all_gated_pass() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
