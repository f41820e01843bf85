#include "continuum/scenario_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <fmt/format.h>

namespace continuum {

using nlohmann::json;

namespace {

[[noreturn]] void fail(ConfigErrorKind kind, const std::string& path, const std::string& detail) {
  throw ConfigError(kind, path, detail);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) {
    fail(ConfigErrorKind::InvalidValue, path + "." + key, "missing required key");
  }
  return obj.at(key);
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(ConfigErrorKind::InvalidValue, path, "expected a number");
  return v.get<double>();
}

double number_at(const json& obj, const std::string& key, const std::string& path) {
  return number(require(obj, key, path), path + "." + key);
}

double number_or(const json& obj, const std::string& key, const std::string& path, double fallback) {
  if (!obj.contains(key)) return fallback;
  return number(obj.at(key), path + "." + key);
}

bool bool_or(const json& obj, const std::string& key, const std::string& path, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_boolean()) fail(ConfigErrorKind::InvalidValue, path + "." + key, "expected a boolean");
  return v.get<bool>();
}

std::string string_at(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = require(obj, key, path);
  if (!v.is_string()) fail(ConfigErrorKind::InvalidValue, path + "." + key, "expected a string");
  return v.get<std::string>();
}

void non_negative(double v, const std::string& path) {
  if (!(v >= 0.0) || !std::isfinite(v)) fail(ConfigErrorKind::NegativeParameter, path, fmt::format("{} < 0", v));
}

void positive(double v, const std::string& path) {
  if (!(v > 0.0) || !std::isfinite(v)) fail(ConfigErrorKind::NegativeParameter, path, fmt::format("{} <= 0", v));
}

void unit_interval(double v, const std::string& path) {
  if (!(v >= 0.0 && v <= 1.0)) fail(ConfigErrorKind::InvalidValue, path, fmt::format("{} not in [0, 1]", v));
}

TaskClassId task_class_key(const std::string& name, const std::string& path) {
  auto cls = parse_task_class(name);
  if (!cls) fail(ConfigErrorKind::InvalidValue, path, "unknown task class '" + name + "'");
  return *cls;
}

std::map<TaskClassId, double> parse_mixture(const json& v, const std::string& path) {
  if (!v.is_object() || v.empty()) fail(ConfigErrorKind::InvalidValue, path, "expected a non-empty object");
  std::map<TaskClassId, double> mixture;
  double sum = 0.0;
  for (const auto& [name, p] : v.items()) {
    const std::string key = path + "." + name;
    double prob = number(p, key);
    non_negative(prob, key);
    mixture[task_class_key(name, key)] = prob;
    sum += prob;
  }
  if (std::abs(sum - 1.0) > kMixtureTolerance) {
    fail(ConfigErrorKind::MixtureNotNormalized, path, fmt::format("probabilities sum to {}", sum));
  }
  return mixture;
}

std::vector<Architecture> parse_architecture_list(const json& v, const std::string& path) {
  if (!v.is_array()) fail(ConfigErrorKind::InvalidValue, path, "expected an array");
  std::vector<Architecture> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string key = fmt::format("{}[{}]", path, i);
    if (!v[i].is_string()) fail(ConfigErrorKind::InvalidValue, key, "expected a string");
    auto a = parse_architecture(v[i].get<std::string>());
    if (!a) fail(ConfigErrorKind::InvalidValue, key, "unknown architecture");
    out.push_back(*a);
  }
  return out;
}

MicroservicePowerProfile parse_profile(const json& v, const std::string& path) {
  MicroservicePowerProfile p;
  p.service_id = string_at(v, "service_id", path);
  p.p_idle_w = number_at(v, "p_idle", path);
  p.p_active_w = number_at(v, "p_active", path);
  non_negative(p.p_idle_w, path + ".p_idle");
  non_negative(p.p_active_w, path + ".p_active");
  if (p.p_idle_w > p.p_active_w) fail(ConfigErrorKind::InvalidValue, path, "p_idle exceeds p_active");
  if (v.contains("serves")) {
    const auto& serves = v.at("serves");
    if (!serves.is_array()) fail(ConfigErrorKind::InvalidValue, path + ".serves", "expected an array");
    for (std::size_t i = 0; i < serves.size(); ++i) {
      const std::string key = fmt::format("{}.serves[{}]", path, i);
      if (!serves[i].is_string()) fail(ConfigErrorKind::InvalidValue, key, "expected a string");
      p.serves.push_back(task_class_key(serves[i].get<std::string>(), key));
    }
  }
  if (v.contains("deployed_in")) p.deployed_in = parse_architecture_list(v.at("deployed_in"), path + ".deployed_in");
  return p;
}

StreamSpec parse_stream(const json& v, const std::string& path) {
  StreamSpec s;
  const std::string process = v.value("process", std::string("poisson"));
  auto p = parse_arrival_process(process);
  if (!p) fail(ConfigErrorKind::InvalidValue, path + ".process", "expected poisson or periodic");
  s.process = *p;
  s.rate_per_s = number_at(v, "rate_per_s", path);
  positive(s.rate_per_s, path + ".rate_per_s");
  s.mixture = parse_mixture(require(v, "mixture", path), path + ".mixture");
  return s;
}

std::vector<DeviceSpec> parse_devices(const json& v, const StreamSpec& default_stream, const std::string& path) {
  if (!v.is_array()) fail(ConfigErrorKind::InvalidValue, path, "expected an array");
  if (v.empty()) fail(ConfigErrorKind::NegativeParameter, path, "no devices");
  std::vector<DeviceSpec> devices;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string dpath = fmt::format("{}[{}]", path, i);
    const json& d = v[i];
    DeviceSpec spec;
    const std::string class_name = string_at(d, "class", dpath);
    auto cls = parse_device_class(class_name);
    if (!cls) fail(ConfigErrorKind::UnknownDeviceClass, dpath + ".class", "unknown device class '" + class_name + "'");
    spec.device_class = *cls;
    spec.processing_power = number_at(d, "processing_power", dpath);
    positive(spec.processing_power, dpath + ".processing_power");
    if (is_gpu_class(spec.device_class) && spec.processing_power < 10.0) {
      fail(ConfigErrorKind::InvalidValue, dpath + ".processing_power", "GPU-class devices need processing_power >= 10");
    }
    spec.owned_by_enterprise = bool_or(d, "owned_by_enterprise", dpath, true);
    const double servers = number_or(d, "servers", dpath, 1.0);
    if (servers < 1.0 || servers != std::floor(servers)) {
      fail(ConfigErrorKind::NegativeParameter, dpath + ".servers", "servers must be an integer >= 1");
    }
    spec.servers = static_cast<int>(servers);
    if (d.contains("present_in")) spec.present_in = parse_architecture_list(d.at("present_in"), dpath + ".present_in");

    const json& profiles = require(d, "power_profile", dpath);
    if (!profiles.is_array() || profiles.empty()) {
      fail(ConfigErrorKind::InvalidValue, dpath + ".power_profile", "at least one power profile entry required");
    }
    for (std::size_t k = 0; k < profiles.size(); ++k) {
      spec.power_profile.push_back(parse_profile(profiles[k], fmt::format("{}.power_profile[{}]", dpath, k)));
    }

    if (d.contains("streams")) {
      const json& streams = d.at("streams");
      if (!streams.is_array()) fail(ConfigErrorKind::InvalidValue, dpath + ".streams", "expected an array");
      for (std::size_t k = 0; k < streams.size(); ++k) {
        spec.streams.push_back(parse_stream(streams[k], fmt::format("{}.streams[{}]", dpath, k)));
      }
    } else if (bool_or(d, "emits", dpath, false)) {
      if (default_stream.rate_per_s <= 0.0) {
        fail(ConfigErrorKind::NegativeParameter, "arrival_rate_per_device", "emitting devices need a positive rate");
      }
      spec.streams.push_back(default_stream);
    }

    const std::string id = string_at(d, "id", dpath);
    const double count = number_or(d, "count", dpath, 1.0);
    if (count < 1.0 || count != std::floor(count)) {
      fail(ConfigErrorKind::NegativeParameter, dpath + ".count", "count must be an integer >= 1");
    }
    if (!d.contains("count")) {
      spec.id = id;
      devices.push_back(spec);
    } else {
      for (int k = 1; k <= static_cast<int>(count); ++k) {
        DeviceSpec copy = spec;
        copy.id = fmt::format("{}-{:03}", id, k);
        devices.push_back(std::move(copy));
      }
    }
  }
  std::set<std::string> ids;
  std::size_t clouds = 0;
  for (std::size_t i = 0; i < devices.size(); ++i) {
    if (!ids.insert(devices[i].id).second) {
      fail(ConfigErrorKind::InvalidValue, path, "duplicate device id '" + devices[i].id + "'");
    }
    if (devices[i].device_class == DeviceClass::Cloud) ++clouds;
  }
  if (clouds != 1) fail(ConfigErrorKind::InvalidValue, path, "exactly one Cloud device is required");
  return devices;
}

TaskClass parse_task_class(TaskClassId id, const json& v, const std::string& path) {
  TaskClass c;
  c.id = id;
  c.payload_bytes = number_at(v, "payload_bytes", path);
  positive(c.payload_bytes, path + ".payload_bytes");
  if (v.contains("payload_max_bytes")) {
    c.payload_max_bytes = number(v.at("payload_max_bytes"), path + ".payload_max_bytes");
    if (*c.payload_max_bytes < c.payload_bytes) {
      fail(ConfigErrorKind::InvalidValue, path + ".payload_max_bytes", "below payload_bytes");
    }
  }
  c.result_bytes = number_or(v, "result_bytes", path, 0.0);
  non_negative(c.result_bytes, path + ".result_bytes");
  c.base_proc_ms = number_at(v, "base_proc_ms", path);
  positive(c.base_proc_ms, path + ".base_proc_ms");
  if (v.contains("deadline_ms") && !v.at("deadline_ms").is_null()) {
    c.deadline_ms = number(v.at("deadline_ms"), path + ".deadline_ms");
    positive(*c.deadline_ms, path + ".deadline_ms");
  }
  c.deferrable = bool_or(v, "deferrable", path, false);
  const std::string gw = v.value("gateway", std::string("gateway"));
  auto gp = parse_gateway_placement(gw);
  if (!gp) fail(ConfigErrorKind::InvalidValue, path + ".gateway", "expected gateway or cloud");
  c.gateway = *gp;
  const std::string dfc = v.value("dfc", std::string("origin"));
  auto dp = parse_dfc_placement(dfc);
  if (!dp) fail(ConfigErrorKind::InvalidValue, path + ".dfc", "expected origin, cluster_gpu or cloud");
  c.dfc = *dp;
  c.escalation_eligible = bool_or(v, "escalation_eligible", path, false);
  return c;
}

LinkSpec parse_link(LinkTier tier, const json& v, const std::string& path) {
  LinkSpec l;
  l.tier = tier;
  l.bandwidth_mbps = number_at(v, "bandwidth_mbps", path);
  positive(l.bandwidth_mbps, path + ".bandwidth_mbps");
  l.latency_min_ms = number_at(v, "latency_min_ms", path);
  l.latency_max_ms = number_at(v, "latency_max_ms", path);
  non_negative(l.latency_min_ms, path + ".latency_min_ms");
  if (l.latency_max_ms < l.latency_min_ms) {
    fail(ConfigErrorKind::InvalidValue, path + ".latency_max_ms", "below latency_min_ms");
  }
  l.reliability = number_or(v, "reliability", path, 1.0);
  if (!(l.reliability > 0.0 && l.reliability <= 1.0)) {
    fail(ConfigErrorKind::InvalidValue, path + ".reliability", "must lie in (0, 1]");
  }
  l.energy_wh_per_gb = number_at(v, "energy_wh_per_gb", path);
  non_negative(l.energy_wh_per_gb, path + ".energy_wh_per_gb");
  return l;
}

// Fallback/collaboration presets for documents that omit "architectures".
ArchitectureParams preset_params(ScenarioName name, Architecture a) {
  ArchitectureParams p{a, 0.0, 0.0};
  if (a == Architecture::GatewayEdge) {
    p.alpha = name == ScenarioName::DroneFleet ? 0.068 : 0.05;
  } else if (a == Architecture::DfcAi) {
    p.beta = name == ScenarioName::DroneFleet ? 0.053 : name == ScenarioName::SensorNetwork ? 0.01 : 0.02;
  }
  return p;
}

void check_escalation_budget(const ScenarioConfig& cfg, Architecture a, double budget, const std::string& path) {
  const auto rates = cfg.class_rates(a);
  double total = 0.0, forced = 0.0, eligible = 0.0;
  for (const auto& [cls, rate] : rates) {
    const TaskClass& tc = cfg.task_class(cls);
    total += rate;
    const bool to_cloud = a == Architecture::GatewayEdge ? tc.gateway == GatewayPlacement::Cloud
                                                          : tc.dfc == DfcPlacement::Cloud;
    if (to_cloud) {
      forced += rate;
    } else if (tc.escalation_eligible) {
      eligible += rate;
    }
  }
  if (total <= 0.0) return;
  const double forced_share = forced / total;
  if (budget + 1e-12 < forced_share) {
    fail(ConfigErrorKind::InvalidValue, path,
         fmt::format("{} is below the share of cloud-placed tasks ({})", budget, forced_share));
  }
  if (budget - forced_share > 1e-12 && eligible <= 0.0) {
    fail(ConfigErrorKind::InvalidValue, path, "no escalation-eligible task class can absorb the residual share");
  }
  if (eligible > 0.0 && (budget - forced_share) * total > eligible * (1.0 + 1e-12)) {
    fail(ConfigErrorKind::InvalidValue, path, "residual share exceeds the escalation-eligible traffic");
  }
}

}  // namespace

ScenarioConfig validate_scenario(const json& raw) {
  if (!raw.is_object()) fail(ConfigErrorKind::InvalidValue, "$", "scenario document must be an object");
  ScenarioConfig cfg;

  const std::string name = string_at(raw, "name", "$");
  auto scenario = parse_scenario_name(name);
  if (!scenario) fail(ConfigErrorKind::InvalidValue, "name", "unknown scenario '" + name + "'");
  cfg.name = *scenario;

  cfg.duration_s = number_at(raw, "duration_s", "$");
  positive(cfg.duration_s, "duration_s");

  // Task classes first: mixtures and profiles refer to them.
  const json& classes = require(raw, "task_classes", "$");
  if (!classes.is_object() || classes.empty()) fail(ConfigErrorKind::InvalidValue, "task_classes", "expected an object");
  for (const auto& [cname, cv] : classes.items()) {
    const std::string path = "task_classes." + cname;
    TaskClassId id = task_class_key(cname, path);
    cfg.task_classes[id] = parse_task_class(id, cv, path);
  }

  cfg.task_mixture = parse_mixture(require(raw, "task_mixture", "$"), "task_mixture");
  cfg.arrival_rate_per_device = number_or(raw, "arrival_rate_per_device", "$", 0.0);
  non_negative(cfg.arrival_rate_per_device, "arrival_rate_per_device");

  StreamSpec default_stream{ArrivalProcess::Poisson, cfg.arrival_rate_per_device, cfg.task_mixture};
  cfg.devices = parse_devices(require(raw, "devices", "$"), default_stream, "devices");

  auto check_class_known = [&](TaskClassId id, const std::string& path) {
    if (!cfg.task_classes.contains(id)) {
      fail(ConfigErrorKind::InvalidValue, path, "task class '" + std::string(to_string(id)) + "' is not defined");
    }
  };
  for (const auto& [cls, p] : cfg.task_mixture) check_class_known(cls, "task_mixture." + std::string(to_string(cls)));
  for (std::size_t i = 0; i < cfg.devices.size(); ++i) {
    for (std::size_t k = 0; k < cfg.devices[i].streams.size(); ++k) {
      for (const auto& [cls, p] : cfg.devices[i].streams[k].mixture) {
        check_class_known(cls, fmt::format("devices[{}].streams[{}].mixture", i, k));
      }
    }
  }

  const json& links = require(raw, "links", "$");
  if (!links.is_object()) fail(ConfigErrorKind::InvalidValue, "links", "expected an object");
  for (const auto& [tname, lv] : links.items()) {
    auto tier = parse_link_tier(tname);
    if (!tier) fail(ConfigErrorKind::InvalidValue, "links." + tname, "unknown link tier");
    cfg.links[*tier] = parse_link(*tier, lv, "links." + tname);
  }
  for (LinkTier t : {LinkTier::LocalMesh, LinkTier::LocalNetwork, LinkTier::Uplink}) {
    if (!cfg.links.contains(t)) fail(ConfigErrorKind::InvalidValue, "links." + std::string(to_string(t)), "missing tier");
  }

  if (raw.contains("cloud_route")) {
    const json& route = raw.at("cloud_route");
    if (!route.is_array() || route.empty()) fail(ConfigErrorKind::InvalidValue, "cloud_route", "expected a non-empty array");
    for (std::size_t i = 0; i < route.size(); ++i) {
      auto tier = route[i].is_string() ? parse_link_tier(route[i].get<std::string>()) : std::nullopt;
      if (!tier) fail(ConfigErrorKind::InvalidValue, fmt::format("cloud_route[{}]", i), "unknown link tier");
      cfg.cloud_route.push_back(*tier);
    }
    if (cfg.cloud_route.back() != LinkTier::Uplink) {
      fail(ConfigErrorKind::InvalidValue, "cloud_route", "the last hop to the cloud must be the Uplink");
    }
  } else {
    cfg.cloud_route = {LinkTier::Uplink};
  }

  const json arch_doc = raw.value("architectures", json::object());
  for (Architecture a : kAllArchitectures) {
    const std::string key(short_name(a));
    ArchitectureParams p = preset_params(cfg.name, a);
    const std::string path = "architectures." + key;
    if (arch_doc.contains(key)) {
      const json& av = arch_doc.at(key);
      p.alpha = number_or(av, "alpha", path, p.alpha);
      p.beta = number_or(av, "beta", path, p.beta);
    }
    unit_interval(p.alpha, path + ".alpha");
    unit_interval(p.beta, path + ".beta");
    cfg.architectures[a] = p;
  }

  if (raw.contains("pricing")) {
    const json& pv = raw.at("pricing");
    PricingTable& pr = cfg.pricing;
    pr.cloud_gpu_per_hour = number_or(pv, "cloud_gpu_per_hour", "pricing", pr.cloud_gpu_per_hour);
    pr.edge_server_per_hour = number_or(pv, "edge_server_per_hour", "pricing", pr.edge_server_per_hour);
    pr.edge_maintenance_per_hour = number_or(pv, "edge_maintenance_per_hour", "pricing", pr.edge_maintenance_per_hour);
    pr.device_compute_per_hour = number_or(pv, "device_compute_per_hour", "pricing", pr.device_compute_per_hour);
    pr.cloud_egress_per_gb = number_or(pv, "cloud_egress_per_gb", "pricing", pr.cloud_egress_per_gb);
    pr.maintenance_floor_hours_per_day =
        number_or(pv, "maintenance_floor_hours_per_day", "pricing", pr.maintenance_floor_hours_per_day);
    pr.device_upkeep_per_device_year =
        number_or(pv, "device_upkeep_per_device_year", "pricing", pr.device_upkeep_per_device_year);
    for (auto [key, value] : {std::pair{"cloud_gpu_per_hour", pr.cloud_gpu_per_hour},
                              {"edge_server_per_hour", pr.edge_server_per_hour},
                              {"edge_maintenance_per_hour", pr.edge_maintenance_per_hour},
                              {"device_compute_per_hour", pr.device_compute_per_hour},
                              {"cloud_egress_per_gb", pr.cloud_egress_per_gb},
                              {"maintenance_floor_hours_per_day", pr.maintenance_floor_hours_per_day},
                              {"device_upkeep_per_device_year", pr.device_upkeep_per_device_year}}) {
      non_negative(value, std::string("pricing.") + key);
    }
    if (pr.maintenance_floor_hours_per_day > 24.0) {
      fail(ConfigErrorKind::InvalidValue, "pricing.maintenance_floor_hours_per_day", "exceeds 24 h");
    }
  }

  if (raw.contains("calibration")) {
    const json& cv = raw.at("calibration");
    Calibration& c = cfg.calibration;
    c.instability_factor = number_or(cv, "instability_factor", "calibration", c.instability_factor);
    unit_interval(c.instability_factor, "calibration.instability_factor");
    c.retry_backoff_ms = number_or(cv, "retry_backoff_ms", "calibration", c.retry_backoff_ms);
    non_negative(c.retry_backoff_ms, "calibration.retry_backoff_ms");
    const double retries = number_or(cv, "max_retries", "calibration", c.max_retries);
    if (retries < 0.0 || retries != std::floor(retries)) {
      fail(ConfigErrorKind::NegativeParameter, "calibration.max_retries", "must be a non-negative integer");
    }
    c.max_retries = static_cast<int>(retries);
    c.discovery_delay_ms = number_or(cv, "discovery_delay_ms", "calibration", c.discovery_delay_ms);
    non_negative(c.discovery_delay_ms, "calibration.discovery_delay_ms");
    c.gateway_offline_coverage = number_or(cv, "gateway_offline_coverage", "calibration", c.gateway_offline_coverage);
    unit_interval(c.gateway_offline_coverage, "calibration.gateway_offline_coverage");
    c.gateway_offline_slowdown = number_or(cv, "gateway_offline_slowdown", "calibration", c.gateway_offline_slowdown);
    if (c.gateway_offline_slowdown < 1.0) {
      fail(ConfigErrorKind::InvalidValue, "calibration.gateway_offline_slowdown", "must be >= 1");
    }
  }

  if (raw.contains("outage_windows")) {
    cfg.outage_windows = parse_outage_windows(raw.at("outage_windows"), cfg.duration_s);
  }

  if (raw.contains("membership_events")) {
    const json& ev = raw.at("membership_events");
    if (!ev.is_array()) fail(ConfigErrorKind::InvalidValue, "membership_events", "expected an array");
    for (std::size_t i = 0; i < ev.size(); ++i) {
      const std::string path = fmt::format("membership_events[{}]", i);
      MembershipEvent m;
      m.t_s = number_at(ev[i], "t_s", path);
      if (m.t_s < 0.0 || m.t_s > cfg.duration_s) fail(ConfigErrorKind::InvalidValue, path + ".t_s", "outside horizon");
      m.device_id = string_at(ev[i], "device", path);
      auto idx = cfg.device_index(m.device_id);
      if (!idx) fail(ConfigErrorKind::InvalidValue, path + ".device", "unknown device '" + m.device_id + "'");
      const DeviceClass dc = cfg.devices[*idx].device_class;
      if (dc == DeviceClass::Cloud || dc == DeviceClass::Gateway) {
        fail(ConfigErrorKind::InvalidValue, path + ".device", "only LocalMesh-reachable devices can join or leave");
      }
      const std::string change = string_at(ev[i], "change", path);
      if (change == "join") {
        m.change = MembershipChange::Join;
      } else if (change == "leave") {
        m.change = MembershipChange::Leave;
      } else {
        fail(ConfigErrorKind::InvalidValue, path + ".change", "expected join or leave");
      }
      cfg.membership_events.push_back(m);
    }
    std::stable_sort(cfg.membership_events.begin(), cfg.membership_events.end(),
                     [](const auto& a, const auto& b) { return a.t_s < b.t_s; });
  }

  // Every class that can arrive must be defined; the cloud budget has to cover forced placements.
  check_escalation_budget(cfg, Architecture::GatewayEdge, cfg.params(Architecture::GatewayEdge).alpha,
                          "architectures.gateway.alpha");
  check_escalation_budget(cfg, Architecture::DfcAi, cfg.params(Architecture::DfcAi).beta, "architectures.dfc.beta");
  return cfg;
}

std::vector<OutageWindow> parse_outage_windows(const json& doc, double duration_s) {
  const json& list = doc.is_object() && doc.contains("outage_windows") ? doc.at("outage_windows") : doc;
  if (!list.is_array()) fail(ConfigErrorKind::InvalidValue, "outage_windows", "expected an array");
  std::vector<OutageWindow> windows;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string path = fmt::format("outage_windows[{}]", i);
    OutageWindow w;
    w.start_s = number_at(list[i], "start_s", path);
    w.end_s = number_at(list[i], "end_s", path);
    const std::string mode = string_at(list[i], "mode", path);
    auto m = parse_outage_mode(mode);
    if (!m || *m == OutageMode::Normal) {
      fail(ConfigErrorKind::InvalidValue, path + ".mode", "expected InternetDown or InternetUnstable");
    }
    w.mode = *m;
    if (w.start_s < 0.0) fail(ConfigErrorKind::NegativeParameter, path + ".start_s", "negative start");
    if (!(w.end_s > w.start_s)) fail(ConfigErrorKind::InvalidValue, path + ".end_s", "window must have end_s > start_s");
    if (w.end_s > duration_s) fail(ConfigErrorKind::InvalidValue, path + ".end_s", "window extends past duration_s");
    windows.push_back(w);
  }
  std::sort(windows.begin(), windows.end(), [](const auto& a, const auto& b) { return a.start_s < b.start_s; });
  for (std::size_t i = 1; i < windows.size(); ++i) {
    if (windows[i].start_s < windows[i - 1].end_s) {
      fail(ConfigErrorKind::OverlappingOutageWindows, fmt::format("outage_windows[{}]", i),
           fmt::format("[{}, {}) overlaps [{}, {})", windows[i].start_s, windows[i].end_s, windows[i - 1].start_s,
                       windows[i - 1].end_s));
    }
  }
  return windows;
}

namespace {

json architecture_list(const std::vector<Architecture>& list) {
  json out = json::array();
  for (Architecture a : list) out.push_back(short_name(a));
  return out;
}

json mixture_json(const std::map<TaskClassId, double>& mixture) {
  json out = json::object();
  for (const auto& [cls, p] : mixture) out[std::string(to_string(cls))] = p;
  return out;
}

}  // namespace

json serialize_scenario(const ScenarioConfig& cfg) {
  json doc;
  doc["name"] = to_string(cfg.name);
  doc["duration_s"] = cfg.duration_s;
  doc["arrival_rate_per_device"] = cfg.arrival_rate_per_device;
  doc["task_mixture"] = mixture_json(cfg.task_mixture);

  json classes = json::object();
  for (const auto& [id, c] : cfg.task_classes) {
    json cj;
    cj["payload_bytes"] = c.payload_bytes;
    if (c.payload_max_bytes) cj["payload_max_bytes"] = *c.payload_max_bytes;
    cj["result_bytes"] = c.result_bytes;
    cj["base_proc_ms"] = c.base_proc_ms;
    if (c.deadline_ms) cj["deadline_ms"] = *c.deadline_ms;
    cj["deferrable"] = c.deferrable;
    cj["gateway"] = to_string(c.gateway);
    cj["dfc"] = to_string(c.dfc);
    cj["escalation_eligible"] = c.escalation_eligible;
    classes[std::string(to_string(id))] = cj;
  }
  doc["task_classes"] = classes;

  json devices = json::array();
  for (const auto& d : cfg.devices) {
    json dj;
    dj["id"] = d.id;
    dj["class"] = to_string(d.device_class);
    dj["processing_power"] = d.processing_power;
    dj["servers"] = d.servers;
    dj["owned_by_enterprise"] = d.owned_by_enterprise;
    if (!d.present_in.empty()) dj["present_in"] = architecture_list(d.present_in);
    json profiles = json::array();
    for (const auto& p : d.power_profile) {
      json pj;
      pj["service_id"] = p.service_id;
      pj["p_idle"] = p.p_idle_w;
      pj["p_active"] = p.p_active_w;
      if (!p.serves.empty()) {
        json serves = json::array();
        for (auto cls : p.serves) serves.push_back(to_string(cls));
        pj["serves"] = serves;
      }
      if (!p.deployed_in.empty()) pj["deployed_in"] = architecture_list(p.deployed_in);
      profiles.push_back(pj);
    }
    dj["power_profile"] = profiles;
    json streams = json::array();
    for (const auto& s : d.streams) {
      streams.push_back({{"process", to_string(s.process)}, {"rate_per_s", s.rate_per_s}, {"mixture", mixture_json(s.mixture)}});
    }
    dj["streams"] = streams;
    devices.push_back(dj);
  }
  doc["devices"] = devices;

  json links = json::object();
  for (const auto& [tier, l] : cfg.links) {
    links[std::string(to_string(tier))] = {{"bandwidth_mbps", l.bandwidth_mbps},
                                           {"latency_min_ms", l.latency_min_ms},
                                           {"latency_max_ms", l.latency_max_ms},
                                           {"reliability", l.reliability},
                                           {"energy_wh_per_gb", l.energy_wh_per_gb}};
  }
  doc["links"] = links;
  json route = json::array();
  for (auto t : cfg.cloud_route) route.push_back(to_string(t));
  doc["cloud_route"] = route;

  json archs = json::object();
  for (const auto& [a, p] : cfg.architectures) archs[std::string(short_name(a))] = {{"alpha", p.alpha}, {"beta", p.beta}};
  doc["architectures"] = archs;

  const PricingTable& pr = cfg.pricing;
  doc["pricing"] = {{"cloud_gpu_per_hour", pr.cloud_gpu_per_hour},
                    {"edge_server_per_hour", pr.edge_server_per_hour},
                    {"edge_maintenance_per_hour", pr.edge_maintenance_per_hour},
                    {"device_compute_per_hour", pr.device_compute_per_hour},
                    {"cloud_egress_per_gb", pr.cloud_egress_per_gb},
                    {"maintenance_floor_hours_per_day", pr.maintenance_floor_hours_per_day},
                    {"device_upkeep_per_device_year", pr.device_upkeep_per_device_year}};
  const Calibration& c = cfg.calibration;
  doc["calibration"] = {{"instability_factor", c.instability_factor},
                        {"retry_backoff_ms", c.retry_backoff_ms},
                        {"max_retries", c.max_retries},
                        {"discovery_delay_ms", c.discovery_delay_ms},
                        {"gateway_offline_coverage", c.gateway_offline_coverage},
                        {"gateway_offline_slowdown", c.gateway_offline_slowdown}};

  json windows = json::array();
  for (const auto& w : cfg.outage_windows) {
    windows.push_back({{"start_s", w.start_s}, {"end_s", w.end_s}, {"mode", to_string(w.mode)}});
  }
  doc["outage_windows"] = windows;
  json events = json::array();
  for (const auto& m : cfg.membership_events) {
    events.push_back({{"t_s", m.t_s}, {"device", m.device_id}, {"change", m.change == MembershipChange::Join ? "join" : "leave"}});
  }
  doc["membership_events"] = events;
  return doc;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ConfigError(ConfigErrorKind::InvalidValue, path.string(), e.what());
  }
  return validate_scenario(doc);
}

}  // namespace continuum
