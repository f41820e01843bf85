#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "continuum/report.hpp"

using namespace continuum;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

ExperimentSpec drone_spec(std::size_t runs) {
  ExperimentSpec spec;
  spec.scenarios = {resolve_scenario("drone")};
  spec.architectures = {kAllArchitectures.begin(), kAllArchitectures.end()};
  spec.runs = runs;
  spec.base_seed = 42;
  return spec;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("continuum_test_" + name);
  fs::remove_all(dir);
  return dir;
}

// Minimal report holding one summary mean and the validation blocks.
json tiny_report(double dfc_latency, double savings_rel_error) {
  json summary = {{"latency_ms", {{"n", 10}, {"mean", dfc_latency}, {"std", 1.0}, {"ci95", 0.7}}}};
  return {{"results",
           {{{"scenario", "DroneFleet"},
             {"condition", "normal"},
             {"architectures", {{{"architecture", "dfc"}, {"summary", summary}}}},
             {"derived", json::object()}}}},
          {"validation",
           {{"latency", json::array()},
            {"energy_savings", {{"rel_error", savings_rel_error}, {"simulated_avg_pct", 76.0}}}}}};
}

json tiny_reference() {
  return {{"cells",
           {{{"id", "latency.drone.dfc"},
             {"scenario", "DroneFleet"},
             {"architecture", "dfc"},
             {"metric", "latency_ms"},
             {"expected", 40.0},
             {"relative", 0.15}},
            {{"id", "validation.energy_savings"},
             {"source", "validation.energy_savings"},
             {"field", "rel_error"},
             {"max", 0.10}}}}};
}

}  // namespace

TEST_CASE("single-run sweep has no CIs and skips the t-tests") {
  const auto report = run_experiment(drone_spec(1));
  const json j = report_to_json(report);
  const json& s = j["results"][0]["architectures"][0]["summary"]["latency_ms"];
  CHECK(s["n"] == 1);
  CHECK(s["ci95"].is_null());
  CHECK(j["results"][0]["t_tests"].empty());
  CHECK_FALSE(j["results"][0]["t_tests_skipped"].get<std::string>().empty());
  CHECK(report_to_markdown(report).find("Skipped:") != std::string::npos);
}

TEST_CASE("identical invocations write byte-identical reports") {
  const std::set<ReportFormat> all{ReportFormat::Markdown, ReportFormat::Csv, ReportFormat::Json};
  const auto a = scratch("det_a"), b = scratch("det_b");
  auto spec = drone_spec(3);
  emit_report(run_experiment(spec), all, a);
  spec.parallel = 3;
  emit_report(run_experiment(spec), all, b);
  for (const char* f : {"report.md", "report.csv", "report.json"}) {
    CAPTURE(f);
    CHECK(slurp(a / f) == slurp(b / f));
    CHECK_FALSE(slurp(a / f).empty());
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("drone report has the expected tables and rows") {
  const auto report = run_experiment(drone_spec(2));
  const auto md = report_to_markdown(report);
  CHECK(md.find("| DFC-AI | ") != std::string::npos);
  CHECK(md.find("| Cloud-Centric | ") != std::string::npos);
  CHECK(md.find("Processing location") != std::string::npos);
  CHECK(md.find("Significance tests") != std::string::npos);
  const auto* sr = report.find(ScenarioName::DroneFleet, "normal");
  REQUIRE(sr != nullptr);
  CHECK(sr->tests.size() >= 3);
}

TEST_CASE("empty architecture set fails before anything is written") {
  ExperimentReport empty;
  const auto dir = scratch("empty");
  CHECK_THROWS_AS(emit_report(empty, {ReportFormat::Json}, dir), ReportError);
  CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("csv reproduces the json summary exactly") {
  const auto report = run_experiment(drone_spec(2));
  const json j = report_to_json(report);
  std::istringstream csv(report_to_csv(report));
  std::string line;
  std::getline(csv, line);
  int rows = 0;
  while (std::getline(csv, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) f.push_back(c);
    REQUIRE(f.size() == 7);
    const json* arch = nullptr;
    for (const auto& r : j["results"]) {
      if (r["scenario"] != f[0] || r["condition"] != f[1]) continue;
      for (const auto& a : r["architectures"]) {
        if (a["architecture"] == f[2]) arch = &a;
      }
    }
    REQUIRE(arch != nullptr);
    const json& s = (*arch)["summary"][f[3]];
    CHECK(std::stod(f[4]) == s["mean"].get<double>());
    CHECK(std::stod(f[5]) == s["std"].get<double>());
    CHECK(std::stod(f[6]) == s["ci95"].get<double>());
    ++rows;
  }
  CHECK(rows > 20);
}

TEST_CASE("an empty outage schedule is the normal condition") {
  const auto cfg = resolve_scenario("drone").config;
  const auto normal = standard_condition("normal");
  REQUIRE(normal.has_value());
  const auto applied = normal->apply(cfg);
  CHECK(applied.outage_windows.empty());
  for (Architecture a : kAllArchitectures) {
    const auto m1 = run_simulation(cfg, cfg.params(a), 4);
    const auto m2 = run_simulation(applied, applied.params(a), 4);
    CHECK(m1.latency_sum_ms == m2.latency_sum_ms);
    CHECK(m1.location_counts == m2.location_counts);
  }
  CHECK_FALSE(standard_condition("sideways").has_value());
}

TEST_CASE("compare passes a cell inside its tolerance") {
  const auto out = compare_to_reference(tiny_report(37.1, 0.04), tiny_reference());
  REQUIRE(out.cells.size() == 2);
  CHECK(out.cells[0].pass);
  CHECK(out.cells[0].rel_error == doctest::Approx(0.0725));
  CHECK(out.cells[1].pass);
  CHECK(out.all_gated_pass());
}

TEST_CASE("compare fails a cell outside its tolerance and names it") {
  const auto out = compare_to_reference(tiny_report(60.0, 0.04), tiny_reference());
  CHECK_FALSE(out.cells[0].pass);
  CHECK_FALSE(out.all_gated_pass());
  const auto md = comparison_to_markdown(out);
  CHECK(md.find("latency.drone.dfc") != std::string::npos);
  CHECK(md.find("| 40 | 60 |") != std::string::npos);
  CHECK(md.find("FAIL") != std::string::npos);
}

TEST_CASE("informational cells never fail the comparison") {
  json ref = tiny_reference();
  ref["cells"][0]["gated"] = false;
  const auto out = compare_to_reference(tiny_report(60.0, 0.04), ref);
  CHECK_FALSE(out.cells[0].pass);
  CHECK(out.all_gated_pass());
}

TEST_CASE("missing cells throw unless skipped") {
  json report = tiny_report(37.1, 0.04);
  report.erase("validation");
  CHECK_THROWS_AS(compare_to_reference(report, tiny_reference()), MissingReferenceMetric);
  const auto out = compare_to_reference(report, tiny_reference(), true);
  CHECK(out.cells[1].missing);
  CHECK(out.all_gated_pass());
  CHECK(comparison_to_markdown(out).find("1 cell(s) skipped") != std::string::npos);
}

TEST_CASE("shipped reference file is well formed") {
  std::ifstream in(CONTINUUM_TEST_REFERENCE);
  const json ref = json::parse(in);
  REQUIRE(ref["cells"].is_array());
  std::set<std::string> ids;
  for (const auto& c : ref["cells"]) {
    CHECK(ids.insert(c["id"].get<std::string>()).second);
    const bool has_criterion = c.contains("range") || c.contains("max") || c.contains("min") || c.contains("expected");
    CHECK(has_criterion);
  }
}
