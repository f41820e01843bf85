#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <thread>

#include <fmt/format.h>

#include "continuum/report.hpp"
#include "continuum/scenario_io.hpp"

namespace continuum {

namespace {

struct Preset {
  const char* file;
  std::vector<const char*> aliases;
};

const std::vector<Preset>& presets() {
  static const std::vector<Preset> table = {
      {"drone_fleet.json", {"drone", "drone_fleet", "DroneFleet"}},
      {"sensor_network.json", {"sensor", "sensor_network", "SensorNetwork"}},
      {"worker_safety.json", {"safety", "worker", "worker_safety", "WorkerSafety"}},
  };
  return table;
}

std::filesystem::path scenario_dir() {
  if (const char* env = std::getenv("CONTINUUM_SCENARIO_DIR"); env && *env) return env;
  return CONTINUUM_DEFAULT_SCENARIO_DIR;
}

}  // namespace

std::vector<std::string> preset_names() { return {"drone", "sensor", "safety"}; }

ScenarioInput resolve_scenario(const std::string& name_or_path) {
  for (const auto& p : presets()) {
    for (const char* alias : p.aliases) {
      if (name_or_path == alias) return {name_or_path, load_scenario(scenario_dir() / p.file)};
    }
  }
  return {name_or_path, load_scenario(name_or_path)};
}

std::string location_metric(ProcessedAt at) { return fmt::format("pct_{}", to_string(at)); }

ScenarioConfig NetworkCondition::apply(ScenarioConfig config) const {
  if (full_horizon) {
    config.outage_windows = {{0.0, config.duration_s, *full_horizon}};
  } else if (windows) {
    for (const auto& w : *windows) {
      if (w.end_s > config.duration_s) {
        throw ConfigError(ConfigErrorKind::InvalidValue, "outage_windows",
                          fmt::format("window ends at {} s, past the {} s horizon", w.end_s, config.duration_s));
      }
    }
    config.outage_windows = *windows;
  }
  return config;
}

std::optional<NetworkCondition> standard_condition(const std::string& name) {
  if (name == "normal" || name == "none") return NetworkCondition{"normal", std::nullopt, std::nullopt};
  if (name == "unstable") return NetworkCondition{"unstable", OutageMode::InternetUnstable, std::nullopt};
  if (name == "down") return NetworkCondition{"down", OutageMode::InternetDown, std::nullopt};
  return std::nullopt;
}

const ArchitectureResult* ScenarioResult::find(Architecture a) const {
  for (const auto& r : architectures) {
    if (r.architecture == a) return &r;
  }
  return nullptr;
}

const ScenarioResult* ExperimentReport::find(ScenarioName s, const std::string& condition) const {
  for (const auto& r : results) {
    if (r.scenario == s && r.condition == condition) return &r;
  }
  return nullptr;
}

namespace {

RunRecord record_run(const RunMetrics& m, const ScenarioConfig& config) {
  RunRecord r;
  r.seed = m.seed;
  r.energy = account_energy(m, config);
  r.cost = account_cost(m, config);
  r.generated = m.generated;
  r.completed = m.completed;
  r.failed = m.failed;
  r.deferred = m.deferred;
  r.warnings = m.warnings;

  auto& v = r.values;
  if (m.completed > 0) {
    v[kLatencyMetric] = m.mean_latency_ms();
    const double n = static_cast<double>(m.completed);
    v["t_net_up_ms"] = m.breakdown_sum.t_net_up / n;
    v["t_queue_ms"] = m.breakdown_sum.t_queue / n;
    v["t_proc_ms"] = m.breakdown_sum.t_proc / n;
    v["t_net_down_ms"] = m.breakdown_sum.t_net_down / n;
  }
  v[kEnergyMetric] = r.energy.total;
  v["e_processing_wh_per_day"] = r.energy.e_processing;
  v["e_transmission_wh_per_day"] = r.energy.e_transmission;
  v[kCostMetric] = r.cost.total;
  v["c_compute_usd_per_year"] = r.cost.c_compute;
  v["c_transfer_usd_per_year"] = r.cost.c_transfer;
  v["c_infrastructure_usd_per_year"] = r.cost.c_infrastructure;
  v["c_operations_usd_per_year"] = r.cost.c_operations;
  for (std::size_t i = 0; i < kProcessedAtCount; ++i) {
    const auto at = static_cast<ProcessedAt>(i);
    v[location_metric(at)] = 100.0 * m.location_fraction(at);
  }
  if (m.horizon.arrived > 0) v[kCapabilityMetric] = 100.0 * capability_fraction(m.horizon);
  v["tasks_generated"] = static_cast<double>(m.generated);
  return r;
}

void summarize_runs(ArchitectureResult& ar) {
  std::map<std::string, std::vector<double>> series;
  for (const auto& run : ar.runs) {
    for (const auto& [k, val] : run.values) series[k].push_back(val);
  }
  for (auto& [k, xs] : series) {
    // A metric missing from some runs (e.g. no task completed) is summarized over the runs that have it.
    ar.summary[k] = xs.size() >= 2 ? stats::summarize(xs, k) : stats::describe(xs, k);
  }
}

std::vector<double> metric_series(const ArchitectureResult& ar, const std::string& metric) {
  std::vector<double> xs;
  for (const auto& run : ar.runs) {
    auto it = run.values.find(metric);
    if (it != run.values.end()) xs.push_back(it->second);
  }
  return xs;
}

double mean_of(const ArchitectureResult& ar, const std::string& metric) {
  auto it = ar.summary.find(metric);
  return it == ar.summary.end() ? std::nan("") : it->second.mean;
}

void add_tests(ScenarioResult& sr, std::size_t runs) {
  if (runs < 2) {
    sr.tests_skipped_reason = "t-tests need at least 2 runs per architecture";
    return;
  }
  const ArchitectureResult* dfc = sr.find(Architecture::DfcAi);
  if (!dfc) {
    sr.tests_skipped_reason = "DFC-AI not part of this experiment";
    return;
  }
  for (Architecture other : {Architecture::CloudCentric, Architecture::GatewayEdge}) {
    const ArchitectureResult* o = sr.find(other);
    if (!o) continue;
    for (const char* metric : {kLatencyMetric, kEnergyMetric, kCostMetric}) {
      const auto a = metric_series(*dfc, metric), b = metric_series(*o, metric);
      if (a.size() < 2 || b.size() < 2) continue;
      sr.tests.push_back({metric, Architecture::DfcAi, other, stats::welch_t_test(a, b)});
    }
  }
  if (sr.tests.empty()) sr.tests_skipped_reason = "no architecture to compare DFC-AI against";
}

void add_derived(ScenarioResult& sr) {
  const ArchitectureResult* cloud = sr.find(Architecture::CloudCentric);
  if (!cloud) return;
  for (const auto& ar : sr.architectures) {
    if (ar.architecture == Architecture::CloudCentric) continue;
    const std::string key(short_name(ar.architecture));
    const double lat = mean_of(ar, kLatencyMetric), lat_c = mean_of(*cloud, kLatencyMetric);
    if (std::isfinite(lat) && std::isfinite(lat_c) && lat_c > 0.0) {
      sr.derived[key + ".latency_reduction_pct_vs_cloud"] = 100.0 * (1.0 - lat / lat_c);
    }
    const double e = mean_of(ar, kEnergyMetric), e_c = mean_of(*cloud, kEnergyMetric);
    if (e_c > 0.0) sr.derived[key + ".energy_savings_pct_vs_cloud"] = 100.0 * (1.0 - e / e_c);
    const double c = mean_of(ar, kCostMetric), c_c = mean_of(*cloud, kCostMetric);
    if (c_c > 0.0) sr.derived[key + ".cost_savings_pct_vs_cloud"] = 100.0 * (1.0 - c / c_c);
  }
}

void add_validation(ExperimentReport& report) {
  double sim_sum = 0.0, ana_sum = 0.0;
  std::size_t n = 0;
  for (const auto& sr : report.results) {
    if (sr.condition != "normal") continue;
    for (const auto& ar : sr.architectures) {
      if (!ar.analytic_latency_ms) continue;
      const double sim = mean_of(ar, kLatencyMetric);
      if (!std::isfinite(sim)) continue;
      const double ana = *ar.analytic_latency_ms;
      const double err = std::abs(sim - ana) / ana;
      report.latency_validation.push_back(
          {sr.scenario, ar.architecture, sim, ana, err, 100.0 * err, err <= kLatencyValidationTolerance});
    }
    const ArchitectureResult* cloud = sr.find(Architecture::CloudCentric);
    const ArchitectureResult* dfc = sr.find(Architecture::DfcAi);
    if (cloud && dfc && cloud->analytic_energy_wh_per_day && dfc->analytic_energy_wh_per_day) {
      auto it = sr.derived.find("dfc.energy_savings_pct_vs_cloud");
      if (it == sr.derived.end()) continue;
      sim_sum += it->second;
      ana_sum += 100.0 * (1.0 - *dfc->analytic_energy_wh_per_day / *cloud->analytic_energy_wh_per_day);
      ++n;
    }
  }
  if (n > 0) {
    EnergySavingsValidation v;
    v.scenarios = n;
    v.simulated_avg_pct = sim_sum / static_cast<double>(n);
    v.analytic_avg_pct = ana_sum / static_cast<double>(n);
    v.rel_error = std::abs(v.simulated_avg_pct - v.analytic_avg_pct) / std::abs(v.analytic_avg_pct);
    v.error_pct = 100.0 * v.rel_error;
    v.pass = v.rel_error <= kEnergyValidationTolerance;
    report.energy_validation = v;
  }
}

}  // namespace

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  if (spec.architectures.empty()) throw ReportError("no architectures selected");
  if (spec.scenarios.empty()) throw ReportError("no scenarios selected");
  if (spec.runs < 1) throw ReportError("runs must be >= 1");
  if (spec.conditions.empty()) throw ReportError("no network conditions selected");

  // One config per (scenario, condition).
  std::vector<ScenarioConfig> configs;
  for (const auto& in : spec.scenarios) {
    ScenarioConfig base = in.config;
    if (spec.duration_s) {
      if (!(*spec.duration_s > 0.0)) throw ConfigError(ConfigErrorKind::NegativeParameter, "duration_s", "must be > 0");
      base.duration_s = *spec.duration_s;
    }
    for (const auto& cond : spec.conditions) configs.push_back(cond.apply(base));
  }

  const std::size_t n_arch = spec.architectures.size();
  const std::size_t n_jobs = configs.size() * n_arch * spec.runs;
  std::vector<RunRecord> records(n_jobs);
  std::vector<std::exception_ptr> errors(n_jobs);

  auto run_job = [&](std::size_t j) {
    const std::size_t cfg = j / (n_arch * spec.runs);
    const std::size_t arch = (j / spec.runs) % n_arch;
    const std::size_t run = j % spec.runs;
    try {
      const ScenarioConfig& config = configs[cfg];
      const ArchitectureParams& params = config.params(spec.architectures[arch]);
      RunOptions opts;
      if (j == 0) opts.trace = spec.trace;
      const RunMetrics m = run_simulation(config, params, spec.base_seed + run, opts);
      records[j] = record_run(m, config);
    } catch (...) {
      errors[j] = std::current_exception();
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(spec.parallel, n_jobs));
  if (workers == 1) {
    for (std::size_t j = 0; j < n_jobs; ++j) run_job(j);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t j = next++; j < n_jobs; j = next++) run_job(j);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  ExperimentReport report;
  report.runs = spec.runs;
  report.base_seed = spec.base_seed;
  report.architectures = spec.architectures;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    const ScenarioConfig& config = configs[c];
    const std::size_t scenario_idx = c / spec.conditions.size();
    const NetworkCondition& cond = spec.conditions[c % spec.conditions.size()];
    report.configs.emplace(config.name, spec.scenarios[scenario_idx].config);

    ScenarioResult sr;
    sr.scenario = config.name;
    sr.source = spec.scenarios[scenario_idx].source;
    sr.condition = cond.name;
    sr.duration_s = config.duration_s;
    for (std::size_t a = 0; a < n_arch; ++a) {
      ArchitectureResult ar;
      ar.architecture = spec.architectures[a];
      for (std::size_t r = 0; r < spec.runs; ++r) ar.runs.push_back(std::move(records[(c * n_arch + a) * spec.runs + r]));
      summarize_runs(ar);
      if (cond.name == "normal" && config.outage_windows.empty()) {
        const ArchitectureParams& params = config.params(ar.architecture);
        ar.analytic_breakdown = analytic_breakdown(config, params);
        ar.analytic_latency_ms = analytic_latency(params, *ar.analytic_breakdown);
        ar.analytic_energy_wh_per_day = analytic_energy_wh_per_day(config, params);
      }
      sr.architectures.push_back(std::move(ar));
    }
    add_tests(sr, spec.runs);
    add_derived(sr);
    report.results.push_back(std::move(sr));
  }
  add_validation(report);
  return report;
}

}  // namespace continuum
