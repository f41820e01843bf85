#include "continuum/model.hpp"

#include <algorithm>

namespace continuum {

namespace {

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(std::string_view s, const std::array<std::pair<Enum, std::string_view>, N>& table) {
  for (const auto& [value, name] : table) {
    if (name == s) return value;
  }
  return std::nullopt;
}

template <typename Enum, std::size_t N>
std::string_view name_of(Enum e, const std::array<std::pair<Enum, std::string_view>, N>& table) {
  for (const auto& [value, name] : table) {
    if (value == e) return name;
  }
  return "?";
}

constexpr std::array<std::pair<DeviceClass, std::string_view>, 11> kDeviceClassNames{{
    {DeviceClass::SimpleSensor, "SimpleSensor"},
    {DeviceClass::SmartSensor, "SmartSensor"},
    {DeviceClass::CpuDevice, "CpuDevice"},
    {DeviceClass::GpuDevice, "GpuDevice"},
    {DeviceClass::Gateway, "Gateway"},
    {DeviceClass::EdgeServer, "EdgeServer"},
    {DeviceClass::Cloud, "Cloud"},
    {DeviceClass::Wearable, "Wearable"},
    {DeviceClass::Camera, "Camera"},
    {DeviceClass::Vehicle, "Vehicle"},
    {DeviceClass::MiniPcGpu, "MiniPcGpu"},
}};

constexpr std::array<std::pair<TaskClassId, std::string_view>, kTaskClassCount> kTaskClassNames{{
    {TaskClassId::Simple, "Simple"},
    {TaskClassId::Complex, "Complex"},
    {TaskClassId::CloudOnly, "CloudOnly"},
    {TaskClassId::Normal, "Normal"},
    {TaskClassId::Anomaly, "Anomaly"},
    {TaskClassId::Critical, "Critical"},
    {TaskClassId::VitalSign, "VitalSign"},
    {TaskClassId::VideoFrame, "VideoFrame"},
}};

constexpr std::array<std::pair<LinkTier, std::string_view>, kLinkTierCount> kLinkTierNames{{
    {LinkTier::LocalMesh, "LocalMesh"},
    {LinkTier::LocalNetwork, "LocalNetwork"},
    {LinkTier::Uplink, "Uplink"},
}};

constexpr std::array<std::pair<Architecture, std::string_view>, 3> kArchitectureNames{{
    {Architecture::CloudCentric, "CloudCentric"},
    {Architecture::GatewayEdge, "GatewayEdge"},
    {Architecture::DfcAi, "DfcAi"},
}};

constexpr std::array<std::pair<Architecture, std::string_view>, 3> kArchitectureShortNames{{
    {Architecture::CloudCentric, "cloud"},
    {Architecture::GatewayEdge, "gateway"},
    {Architecture::DfcAi, "dfc"},
}};

constexpr std::array<std::pair<Architecture, std::string_view>, 3> kArchitectureDisplayNames{{
    {Architecture::CloudCentric, "Cloud-Centric"},
    {Architecture::GatewayEdge, "Gateway-Edge"},
    {Architecture::DfcAi, "DFC-AI"},
}};

constexpr std::array<std::pair<ScenarioName, std::string_view>, 3> kScenarioNames{{
    {ScenarioName::DroneFleet, "DroneFleet"},
    {ScenarioName::SensorNetwork, "SensorNetwork"},
    {ScenarioName::WorkerSafety, "WorkerSafety"},
}};

constexpr std::array<std::pair<OutageMode, std::string_view>, 3> kOutageModeNames{{
    {OutageMode::Normal, "Normal"},
    {OutageMode::InternetUnstable, "InternetUnstable"},
    {OutageMode::InternetDown, "InternetDown"},
}};

constexpr std::array<std::pair<ArrivalProcess, std::string_view>, 2> kArrivalNames{{
    {ArrivalProcess::Poisson, "poisson"},
    {ArrivalProcess::Periodic, "periodic"},
}};

constexpr std::array<std::pair<GatewayPlacement, std::string_view>, 2> kGatewayPlacementNames{{
    {GatewayPlacement::Gateway, "gateway"},
    {GatewayPlacement::Cloud, "cloud"},
}};

constexpr std::array<std::pair<DfcPlacement, std::string_view>, 3> kDfcPlacementNames{{
    {DfcPlacement::Origin, "origin"},
    {DfcPlacement::ClusterGpu, "cluster_gpu"},
    {DfcPlacement::Cloud, "cloud"},
}};

constexpr std::array<std::pair<ProcessedAt, std::string_view>, kProcessedAtCount> kProcessedAtNames{{
    {ProcessedAt::OriginDevice, "OriginDevice"},
    {ProcessedAt::ClusterGpu, "ClusterGpu"},
    {ProcessedAt::Gateway, "Gateway"},
    {ProcessedAt::EdgeServer, "EdgeServer"},
    {ProcessedAt::Cloud, "Cloud"},
    {ProcessedAt::Failed, "Failed"},
    {ProcessedAt::Deferred, "Deferred"},
}};

constexpr std::array<std::pair<ConfigErrorKind, std::string_view>, 5> kConfigErrorNames{{
    {ConfigErrorKind::MixtureNotNormalized, "MixtureNotNormalized"},
    {ConfigErrorKind::NegativeParameter, "NegativeParameter"},
    {ConfigErrorKind::UnknownDeviceClass, "UnknownDeviceClass"},
    {ConfigErrorKind::OverlappingOutageWindows, "OverlappingOutageWindows"},
    {ConfigErrorKind::InvalidValue, "InvalidValue"},
}};

}  // namespace

std::string_view to_string(DeviceClass c) { return name_of(c, kDeviceClassNames); }
std::string_view to_string(TaskClassId c) { return name_of(c, kTaskClassNames); }
std::string_view to_string(LinkTier t) { return name_of(t, kLinkTierNames); }
std::string_view to_string(Architecture a) { return name_of(a, kArchitectureNames); }
std::string_view to_string(ScenarioName s) { return name_of(s, kScenarioNames); }
std::string_view to_string(OutageMode m) { return name_of(m, kOutageModeNames); }
std::string_view to_string(ArrivalProcess p) { return name_of(p, kArrivalNames); }
std::string_view to_string(GatewayPlacement p) { return name_of(p, kGatewayPlacementNames); }
std::string_view to_string(DfcPlacement p) { return name_of(p, kDfcPlacementNames); }
std::string_view to_string(ProcessedAt p) { return name_of(p, kProcessedAtNames); }
std::string_view to_string(ConfigErrorKind k) { return name_of(k, kConfigErrorNames); }

std::string_view short_name(Architecture a) { return name_of(a, kArchitectureShortNames); }
std::string_view display_name(Architecture a) { return name_of(a, kArchitectureDisplayNames); }

std::optional<DeviceClass> parse_device_class(std::string_view s) { return lookup(s, kDeviceClassNames); }
std::optional<TaskClassId> parse_task_class(std::string_view s) { return lookup(s, kTaskClassNames); }
std::optional<LinkTier> parse_link_tier(std::string_view s) { return lookup(s, kLinkTierNames); }
std::optional<ScenarioName> parse_scenario_name(std::string_view s) { return lookup(s, kScenarioNames); }
std::optional<OutageMode> parse_outage_mode(std::string_view s) { return lookup(s, kOutageModeNames); }
std::optional<ArrivalProcess> parse_arrival_process(std::string_view s) { return lookup(s, kArrivalNames); }
std::optional<GatewayPlacement> parse_gateway_placement(std::string_view s) {
  return lookup(s, kGatewayPlacementNames);
}
std::optional<DfcPlacement> parse_dfc_placement(std::string_view s) { return lookup(s, kDfcPlacementNames); }

std::optional<Architecture> parse_architecture(std::string_view s) {
  if (auto a = lookup(s, kArchitectureNames)) return a;
  return lookup(s, kArchitectureShortNames);
}

bool is_gpu_class(DeviceClass c) {
  return c == DeviceClass::GpuDevice || c == DeviceClass::MiniPcGpu || c == DeviceClass::EdgeServer ||
         c == DeviceClass::Cloud;
}

bool is_gateway_class(DeviceClass c) { return c == DeviceClass::Gateway || c == DeviceClass::EdgeServer; }

bool MicroservicePowerProfile::serves_class(TaskClassId c) const {
  return serves.empty() || std::find(serves.begin(), serves.end(), c) != serves.end();
}

bool MicroservicePowerProfile::deployed(Architecture a) const {
  return deployed_in.empty() || std::find(deployed_in.begin(), deployed_in.end(), a) != deployed_in.end();
}

bool DeviceSpec::present(Architecture a) const {
  return present_in.empty() || std::find(present_in.begin(), present_in.end(), a) != present_in.end();
}

double TaskClass::mean_payload_bytes() const {
  return payload_max_bytes ? 0.5 * (payload_bytes + *payload_max_bytes) : payload_bytes;
}

const TaskClass& ScenarioConfig::task_class(TaskClassId id) const {
  auto it = task_classes.find(id);
  if (it == task_classes.end()) {
    throw ConfigError(ConfigErrorKind::InvalidValue, "task_classes." + std::string(to_string(id)),
                      "task class is not defined");
  }
  return it->second;
}

const LinkSpec& ScenarioConfig::link(LinkTier tier) const {
  auto it = links.find(tier);
  if (it == links.end()) {
    throw ConfigError(ConfigErrorKind::InvalidValue, "links." + std::string(to_string(tier)),
                      "link tier is not defined");
  }
  return it->second;
}

const ArchitectureParams& ScenarioConfig::params(Architecture a) const {
  auto it = architectures.find(a);
  if (it == architectures.end()) {
    throw ConfigError(ConfigErrorKind::InvalidValue, "architectures." + std::string(short_name(a)),
                      "architecture parameters are not defined");
  }
  return it->second;
}

std::size_t ScenarioConfig::cloud_index() const {
  for (std::size_t i = 0; i < devices.size(); ++i) {
    if (devices[i].device_class == DeviceClass::Cloud) return i;
  }
  throw ConfigError(ConfigErrorKind::InvalidValue, "devices", "scenario has no Cloud device");
}

std::optional<std::size_t> ScenarioConfig::device_index(std::string_view id) const {
  for (std::size_t i = 0; i < devices.size(); ++i) {
    if (devices[i].id == id) return i;
  }
  return std::nullopt;
}

std::map<TaskClassId, double> ScenarioConfig::class_rates(Architecture a) const {
  std::map<TaskClassId, double> rates;
  for (const auto& device : devices) {
    if (!device.present(a)) continue;
    for (const auto& stream : device.streams) {
      for (const auto& [cls, p] : stream.mixture) rates[cls] += stream.rate_per_s * p;
    }
  }
  return rates;
}

double ScenarioConfig::total_rate(Architecture a) const {
  double total = 0.0;
  for (const auto& [cls, rate] : class_rates(a)) total += rate;
  return total;
}

ConfigError::ConfigError(ConfigErrorKind kind, std::string key_path, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + " at '" + key_path + "': " + detail),
      kind_(kind),
      key_path_(std::move(key_path)) {}

const std::vector<SymbolSource>& equation_symbol_table() {
  static const std::vector<SymbolSource> table = {
      // latency
      {"T_net^up", "/links/Uplink/bandwidth_mbps"},
      {"T_queue", "/devices/0/servers"},
      {"T_proc^cloud", "/task_classes/*/base_proc_ms"},
      {"T_net^down", "/task_classes/*/result_bytes"},
      {"T_d->g", "/links/LocalNetwork/latency_min_ms"},
      {"T_proc^gateway", "/devices/*/processing_power"},
      {"T_g->d", "/links/LocalNetwork/latency_max_ms"},
      {"alpha", "/architectures/gateway/alpha"},
      {"L_cloud", "/cloud_route"},
      {"T_proc^local", "/task_classes/*/dfc"},
      {"beta", "/architectures/dfc/beta"},
      {"T_collab", "/links/Uplink/latency_max_ms"},
      // energy
      {"N", "/devices/*/power_profile"},
      {"P_idle^i", "/devices/*/power_profile/*/p_idle"},
      {"P_active^i", "/devices/*/power_profile/*/p_active"},
      {"rho_i", "measured:device_usage.busy_s"},
      {"T", "/duration_s"},
      {"E_trans", "/links/*/energy_wh_per_gb"},
      // cost
      {"C_compute", "/pricing/cloud_gpu_per_hour"},
      {"C_compute^edge", "/pricing/edge_server_per_hour"},
      {"C_compute^device", "/pricing/device_compute_per_hour"},
      {"C_transfer", "/pricing/cloud_egress_per_gb"},
      {"C_infrastructure", "/pricing/edge_maintenance_per_hour"},
      {"C_operations", "/pricing/device_upkeep_per_device_year"},
  };
  return table;
}

}  // namespace continuum
