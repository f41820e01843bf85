#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include <fmt/format.h>

#include "continuum/report.hpp"

namespace continuum {

using nlohmann::json;

MissingReferenceMetric::MissingReferenceMetric(const std::string& cell_id)
    : std::runtime_error("MissingReferenceMetric: report has no value for reference cell '" + cell_id + "'") {}

bool ComparisonOutcome::all_gated_pass() const {
  for (const auto& c : cells) {
    if (c.gated && !c.pass) return false;
  }
  return true;
}

namespace {

const json* find_result(const json& report, const std::string& scenario, const std::string& condition) {
  if (!report.contains("results")) return nullptr;
  for (const auto& r : report.at("results")) {
    if (r.value("scenario", "") == scenario && r.value("condition", "") == condition) return &r;
  }
  return nullptr;
}

std::optional<double> number(const json* j) {
  if (!j || !j->is_number()) return std::nullopt;
  return j->get<double>();
}

std::optional<double> lookup(const json& report, const json& cell) {
  const std::string source = cell.value("source", "summary");
  const std::string scenario = cell.value("scenario", "");
  const std::string condition = cell.value("condition", "normal");
  const std::string arch = cell.value("architecture", "");
  const std::string field = cell.value("field", "mean");

  if (source == "validation.latency") {
    if (!report.contains("validation")) return std::nullopt;
    for (const auto& v : report["validation"].value("latency", json::array())) {
      if (v.value("scenario", "") == scenario && v.value("architecture", "") == arch) {
        return v.contains(field) ? number(&v.at(field)) : std::nullopt;
      }
    }
    return std::nullopt;
  }
  if (source == "validation.energy_savings") {
    if (!report.contains("validation") || !report["validation"].contains("energy_savings")) return std::nullopt;
    const json& e = report["validation"]["energy_savings"];
    return e.contains(field) ? number(&e.at(field)) : std::nullopt;
  }
  const json* r = find_result(report, scenario, condition);
  if (!r) return std::nullopt;
  if (source == "derived") {
    const json& d = r->value("derived", json::object());
    const std::string key = cell.value("metric", "");
    return d.contains(key) ? number(&d.at(key)) : std::nullopt;
  }
  for (const auto& a : r->value("architectures", json::array())) {
    if (a.value("architecture", "") != arch) continue;
    const json& summary = a.value("summary", json::object());
    const std::string metric = cell.value("metric", "");
    if (!summary.contains(metric)) return std::nullopt;
    const json& s = summary.at(metric);
    return s.contains(field) ? number(&s.at(field)) : std::nullopt;
  }
  return std::nullopt;
}

}  // namespace

ComparisonOutcome compare_to_reference(const json& report, const json& reference, bool skip_missing) {
  ComparisonOutcome out;
  if (!reference.contains("cells") || !reference.at("cells").is_array()) {
    throw ReportError("reference file has no 'cells' array");
  }
  for (const auto& cell : reference.at("cells")) {
    CellComparison c;
    c.id = cell.value("id", "");
    c.description = cell.value("description", c.id);
    c.gated = cell.value("gated", true);
    const auto actual = lookup(report, cell);
    if (!actual) {
      if (!skip_missing) throw MissingReferenceMetric(c.id);
      c.missing = true;
      c.pass = true;
      c.criterion = "missing";
      out.cells.push_back(c);
      continue;
    }
    c.actual = *actual;

    // Bands report how far outside the band the value fell.
    auto outside = [&](double lo, double hi) {
      const double gap = c.actual < lo ? lo - c.actual : c.actual > hi ? c.actual - hi : 0.0;
      const double scale = std::max(std::abs(lo), std::abs(hi));
      return scale > 0.0 ? gap / scale : gap;
    };
    const double inf = std::numeric_limits<double>::infinity();
    if (cell.contains("range")) {
      const double lo = cell["range"][0].get<double>(), hi = cell["range"][1].get<double>();
      c.expected = 0.5 * (lo + hi);
      c.pass = c.actual >= lo && c.actual <= hi;
      c.rel_error = outside(lo, hi);
      c.criterion = fmt::format("in [{}, {}]", lo, hi);
    } else if (cell.contains("max")) {
      c.expected = cell["max"].get<double>();
      c.pass = c.actual <= c.expected;
      c.rel_error = outside(-inf, c.expected);
      c.criterion = fmt::format("<= {}", c.expected);
    } else if (cell.contains("min")) {
      c.expected = cell["min"].get<double>();
      c.pass = c.actual >= c.expected;
      c.rel_error = outside(c.expected, inf);
      c.criterion = fmt::format(">= {}", c.expected);
    } else {
      c.expected = cell.at("expected").get<double>();
      if (cell.contains("absolute")) {
        const double tol = cell["absolute"].get<double>();
        c.pass = std::abs(c.actual - c.expected) <= tol;
        c.criterion = fmt::format("± {}", tol);
      } else {
        const double tol = cell.value("relative", 0.0);
        c.pass = std::abs(c.actual - c.expected) <= tol * std::abs(c.expected);
        c.criterion = fmt::format("± {}%", 100.0 * tol);
      }
      c.rel_error = c.expected != 0.0 ? std::abs(c.actual - c.expected) / std::abs(c.expected) : std::abs(c.actual);
    }
    // Validation cells carry their own relative error.
    if (cell.value("field", "") == "rel_error") c.rel_error = c.actual;
    out.cells.push_back(c);
  }
  return out;
}

std::string comparison_to_markdown(const ComparisonOutcome& outcome) {
  std::ostringstream md;
  md << "| Cell | Reference | Simulated | Error (%) | Criterion | Gated | Result |\n";
  md << "|---|---:|---:|---:|---|:---:|:---:|\n";
  for (const auto& c : outcome.cells) {
    if (c.missing) {
      md << fmt::format("| {} | | | | missing | {} | {} |\n", c.description, c.gated ? "yes" : "no",
                        c.pass ? "skip" : "FAIL");
      continue;
    }
    md << fmt::format("| {} | {:.4g} | {:.4g} | {:.1f} | {} | {} | {} |\n", c.description, c.expected, c.actual,
                      100.0 * c.rel_error, c.criterion, c.gated ? "yes" : "no", c.pass ? "pass" : "FAIL");
  }
  const auto skipped = std::count_if(outcome.cells.begin(), outcome.cells.end(), [](const auto& c) { return c.missing; });
  md << fmt::format("\n{}\n", outcome.all_gated_pass() ? "All gated cells pass." : "Some gated cells FAIL.");
  if (skipped > 0) md << fmt::format("{} cell(s) skipped: not present in the report.\n", skipped);
  return md.str();
}

}  // namespace continuum
