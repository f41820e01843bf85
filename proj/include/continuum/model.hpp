#pragma once

// Domain types shared by every module of the simulator: devices, task classes,
// links, pricing and the validated scenario configuration.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace continuum {

enum class DeviceClass {
  SimpleSensor,
  SmartSensor,
  CpuDevice,
  GpuDevice,
  Gateway,
  EdgeServer,
  Cloud,
  Wearable,
  Camera,
  Vehicle,
  MiniPcGpu,
};

enum class TaskClassId {
  Simple,
  Complex,
  CloudOnly,
  Normal,
  Anomaly,
  Critical,
  VitalSign,
  VideoFrame,
};
inline constexpr std::size_t kTaskClassCount = 8;

enum class LinkTier { LocalMesh, LocalNetwork, Uplink };
inline constexpr std::size_t kLinkTierCount = 3;

enum class Architecture { CloudCentric, GatewayEdge, DfcAi };
inline constexpr std::array<Architecture, 3> kAllArchitectures = {
    Architecture::CloudCentric, Architecture::GatewayEdge, Architecture::DfcAi};

enum class ScenarioName { DroneFleet, SensorNetwork, WorkerSafety };

enum class OutageMode { Normal, InternetUnstable, InternetDown };

enum class ArrivalProcess { Poisson, Periodic };

// Where a task class is handled by the gateway architecture.
enum class GatewayPlacement { Gateway, Cloud };

// Where a task class is handled by the device-first architecture.
enum class DfcPlacement { Origin, ClusterGpu, Cloud };

// Final outcome of a task, including the location that processed it.
enum class ProcessedAt {
  OriginDevice,
  ClusterGpu,
  Gateway,
  EdgeServer,
  Cloud,
  Failed,
  Deferred,
};
inline constexpr std::size_t kProcessedAtCount = 7;

std::string_view to_string(DeviceClass c);
std::string_view to_string(TaskClassId c);
std::string_view to_string(LinkTier t);
std::string_view to_string(Architecture a);
std::string_view to_string(ScenarioName s);
std::string_view to_string(OutageMode m);
std::string_view to_string(ArrivalProcess p);
std::string_view to_string(GatewayPlacement p);
std::string_view to_string(DfcPlacement p);
std::string_view to_string(ProcessedAt p);

// Short CLI spelling: cloud | gateway | dfc.
std::string_view short_name(Architecture a);
// Human label used in report tables.
std::string_view display_name(Architecture a);

// Parsers return nullopt for unknown spellings.
std::optional<DeviceClass> parse_device_class(std::string_view s);
std::optional<TaskClassId> parse_task_class(std::string_view s);
std::optional<LinkTier> parse_link_tier(std::string_view s);
std::optional<Architecture> parse_architecture(std::string_view s);  // accepts long and short names
std::optional<ScenarioName> parse_scenario_name(std::string_view s);
std::optional<OutageMode> parse_outage_mode(std::string_view s);
std::optional<ArrivalProcess> parse_arrival_process(std::string_view s);
std::optional<GatewayPlacement> parse_gateway_placement(std::string_view s);
std::optional<DfcPlacement> parse_dfc_placement(std::string_view s);

// GpuDevice, MiniPcGpu, EdgeServer and Cloud.
bool is_gpu_class(DeviceClass c);
// Gateway and EdgeServer: the processors used by the gateway architecture.
bool is_gateway_class(DeviceClass c);

struct MicroservicePowerProfile {
  std::string service_id;
  double p_idle_w = 0.0;
  double p_active_w = 0.0;
  double rho = 0.0;  // measured during a run, never configured
  std::vector<TaskClassId> serves;         // empty: serves every class
  std::vector<Architecture> deployed_in;   // empty: deployed in every architecture

  bool serves_class(TaskClassId c) const;
  bool deployed(Architecture a) const;
  bool operator==(const MicroservicePowerProfile&) const = default;
};

struct StreamSpec {
  ArrivalProcess process = ArrivalProcess::Poisson;
  double rate_per_s = 0.0;
  std::map<TaskClassId, double> mixture;
  bool operator==(const StreamSpec&) const = default;
};

struct DeviceSpec {
  std::string id;
  DeviceClass device_class = DeviceClass::CpuDevice;
  double processing_power = 1.0;  // 1.0 = baseline ARM-class CPU
  std::vector<MicroservicePowerProfile> power_profile;
  bool owned_by_enterprise = true;
  int servers = 1;                           // parallel servers per microservice
  std::vector<Architecture> present_in;      // empty: present in every architecture
  std::vector<StreamSpec> streams;           // task sources originating here

  bool present(Architecture a) const;
  bool operator==(const DeviceSpec&) const = default;
};

struct LatencyBreakdown {
  double t_net_up = 0.0;
  double t_queue = 0.0;
  double t_proc = 0.0;  // cloud processing
  double t_net_down = 0.0;
  double t_d_to_g = 0.0;
  double t_proc_gateway = 0.0;
  double t_g_to_d = 0.0;
  double t_proc_local = 0.0;
  double t_collab = 0.0;
};

struct ArchitectureParams {
  Architecture architecture = Architecture::CloudCentric;
  double alpha = 0.0;  // gateway -> cloud fallback probability
  double beta = 0.0;   // device-first external collaboration fraction
  bool operator==(const ArchitectureParams&) const = default;
};

struct TaskClass {
  TaskClassId id = TaskClassId::Simple;
  double payload_bytes = 1.0;
  std::optional<double> payload_max_bytes;  // set: payload ~ U[payload_bytes, payload_max_bytes]
  double result_bytes = 0.0;
  double base_proc_ms = 1.0;  // at processing_power 1.0
  std::optional<double> deadline_ms;
  bool deferrable = false;
  GatewayPlacement gateway = GatewayPlacement::Gateway;
  DfcPlacement dfc = DfcPlacement::Origin;
  bool escalation_eligible = false;

  double mean_payload_bytes() const;
  bool operator==(const TaskClass&) const = default;
};

struct LinkSpec {
  LinkTier tier = LinkTier::Uplink;
  double bandwidth_mbps = 1.0;
  double latency_min_ms = 0.0;
  double latency_max_ms = 0.0;
  double reliability = 1.0;
  double energy_wh_per_gb = 0.0;
  bool operator==(const LinkSpec&) const = default;
};

struct PricingTable {
  double cloud_gpu_per_hour = 3.50;
  double edge_server_per_hour = 0.80;
  double edge_maintenance_per_hour = 0.20;
  double device_compute_per_hour = 0.00;
  double cloud_egress_per_gb = 0.09;
  double maintenance_floor_hours_per_day = 4.0;
  double device_upkeep_per_device_year = 0.0;
  bool operator==(const PricingTable&) const = default;
};

// Behavioural constants that the source material leaves open.
struct Calibration {
  double instability_factor = 0.3;
  double retry_backoff_ms = 100.0;
  int max_retries = 1;
  double discovery_delay_ms = 500.0;
  double gateway_offline_coverage = 0.41;
  double gateway_offline_slowdown = 2.0;
  bool operator==(const Calibration&) const = default;
};

struct OutageWindow {
  double start_s = 0.0;
  double end_s = 0.0;
  OutageMode mode = OutageMode::InternetDown;
  bool operator==(const OutageWindow&) const = default;
};

enum class MembershipChange { Join, Leave };

struct MembershipEvent {
  double t_s = 0.0;
  std::string device_id;
  MembershipChange change = MembershipChange::Join;
  bool operator==(const MembershipEvent&) const = default;
};

struct ScenarioConfig {
  ScenarioName name = ScenarioName::DroneFleet;
  std::vector<DeviceSpec> devices;
  std::map<TaskClassId, double> task_mixture;
  double arrival_rate_per_device = 0.0;
  std::map<TaskClassId, TaskClass> task_classes;
  std::map<LinkTier, LinkSpec> links;
  std::vector<LinkTier> cloud_route;  // hops an end device uses to reach the cloud
  std::map<Architecture, ArchitectureParams> architectures;
  PricingTable pricing;
  Calibration calibration;
  double duration_s = 86400.0;
  std::vector<OutageWindow> outage_windows;
  std::vector<MembershipEvent> membership_events;

  const TaskClass& task_class(TaskClassId id) const;
  const LinkSpec& link(LinkTier tier) const;
  const ArchitectureParams& params(Architecture a) const;
  std::size_t cloud_index() const;
  std::optional<std::size_t> device_index(std::string_view id) const;

  // Aggregate arrival rate per class over all streams of devices present in `a`.
  std::map<TaskClassId, double> class_rates(Architecture a) const;
  double total_rate(Architecture a) const;

  bool operator==(const ScenarioConfig&) const = default;
};

enum class ConfigErrorKind {
  MixtureNotNormalized,
  NegativeParameter,
  UnknownDeviceClass,
  OverlappingOutageWindows,
  InvalidValue,
};

std::string_view to_string(ConfigErrorKind k);

class ConfigError : public std::runtime_error {
 public:
  ConfigError(ConfigErrorKind kind, std::string key_path, const std::string& detail);
  ConfigErrorKind kind() const { return kind_; }
  const std::string& key_path() const { return key_path_; }

 private:
  ConfigErrorKind kind_;
  std::string key_path_;
};

inline constexpr double kMixtureTolerance = 1e-9;
inline constexpr double kBytesPerMb = 1e6;
inline constexpr double kBytesPerGb = 1e9;
inline constexpr double kSecondsPerDay = 86400.0;
inline constexpr double kDaysPerYear = 365.0;

// Every symbol of the latency, energy and cost equations and where its value
// comes from: a JSON pointer into the serialized scenario, or a quantity
// measured during a run ("measured:<field>").
struct SymbolSource {
  std::string symbol;
  std::string source;
};
const std::vector<SymbolSource>& equation_symbol_table();

}  // namespace continuum
