#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "continuum/model.hpp"
#include "continuum/network.hpp"
#include "continuum/random.hpp"
#include "continuum/workload.hpp"

namespace continuum {

// FIFO multi-server queue; arrivals must be admitted in time order.
class ServerQueue {
 public:
  ServerQueue(std::size_t device, int servers);

  struct Admission {
    double start_s;
    double finish_s;
    double wait_s;
    int server;
  };
  Admission admit(double arrival_s, double service_s);

  double earliest_free() const;
  std::size_t device() const { return device_; }
  int servers() const { return static_cast<int>(busy_until_.size()); }
  double busy_s() const { return busy_s_; }
  std::uint64_t admitted() const { return admitted_; }

 private:
  std::size_t device_;
  std::vector<double> busy_until_;
  double busy_s_ = 0.0;
  std::uint64_t admitted_ = 0;
};

// LocalMesh membership as seen by device-first routing.
class ClusterRegistry {
 public:
  ClusterRegistry() = default;
  // Every LocalMesh-reachable device present in `arch`, minus devices whose
  // first membership event is a join.
  static ClusterRegistry initial(const ScenarioConfig& config, Architecture arch);

  // Joins take effect after the discovery delay; a leave is immediate and
  // cancels any join still pending for that device.
  void apply(const MembershipEvent& event, double discovery_delay_s);
  // Commits pending joins that are due by t_s.
  void advance(double t_s);

  bool contains(std::size_t device) const;
  bool is_gpu_node(std::size_t device) const;
  const std::vector<std::size_t>& members() const { return members_; }
  const std::vector<std::size_t>& gpu_nodes() const { return gpu_nodes_; }
  double last_discovery_at() const { return last_discovery_at_; }

  bool operator==(const ClusterRegistry&) const = default;

 private:
  struct PendingJoin {
    double ready_at;
    std::size_t device;
    bool gpu;
    bool operator==(const PendingJoin&) const = default;
  };
  void insert(std::size_t device, bool gpu);
  void erase(std::size_t device);

  std::vector<std::size_t> members_;    // sorted
  std::vector<std::size_t> gpu_nodes_;  // sorted, subset of members_
  std::vector<PendingJoin> pending_;
  double last_discovery_at_ = 0.0;
  const ScenarioConfig* config_ = nullptr;
};

ClusterRegistry discover_resources(const ClusterRegistry& registry, const MembershipEvent& event, double t_s,
                                   double discovery_delay_s);

inline constexpr std::size_t kNoDevice = static_cast<std::size_t>(-1);

// Up to four link traversals in order.
struct HopList {
  std::array<LinkTier, 4> hops{};
  std::uint8_t size = 0;

  void push(LinkTier t) { hops[size++] = t; }
  const LinkTier* begin() const { return hops.data(); }
  const LinkTier* end() const { return hops.data() + size; }
  bool empty() const { return size == 0; }
};

struct ProcessingDecision {
  bool routable = true;  // false: NoRouteAvailable
  ProcessedAt location = ProcessedAt::Failed;
  std::size_t target = 0;   // device index
  std::size_t profile = 0;  // microservice on the target
  HopList up;
  HopList down;
  double slowdown = 1.0;
  bool escalated = false;       // cloud leg chosen from the collaboration/fallback budget
  bool cloud_required = false;  // cannot be retargeted when the cloud is unreachable
  std::size_t gateway = kNoDevice;  // gateway a fallback task passes through
};

class NoRouteAvailable : public std::runtime_error {
 public:
  explicit NoRouteAvailable(std::uint64_t task_id);
};

// Residual escalation probability applied to escalation-eligible classes so
// that the total share of cloud-processed tasks equals alpha (gateway) or
// beta (device-first).
double escalation_probability(const ScenarioConfig& config, const ArchitectureParams& params);

// Microservice on `device` that handles `cls` in `arch`.
std::size_t select_profile(const DeviceSpec& device, TaskClassId cls, Architecture arch);

double processing_time(const TaskClass& task_class, const DeviceSpec& device);

struct RoutingContext {
  RoutingContext(const ScenarioConfig& config, const ArchitectureParams& params, const ClusterRegistry& registry,
                 const OutageState& outage);

  const ScenarioConfig& config;
  const ArchitectureParams& params;
  const ClusterRegistry& registry;
  const OutageState& outage;
  double escalation_q = 0.0;
  std::vector<std::size_t> gateways;  // gateway-class devices present in the architecture
  // Queues per [device][profile]; used to pick the earliest-free gateway or
  // GPU node. Null means every candidate counts as idle.
  const std::vector<std::vector<ServerQueue>>* queues = nullptr;
};

// Decides where the task runs and which hops it needs. `allow_escalation`
// false forces a local decision (used after a failed cloud leg).
ProcessingDecision route_task(const Task& task, const RoutingContext& ctx, RandomStream& rng,
                              bool allow_escalation = true);

struct CapabilityCount {
  OutageWindow window;
  std::uint64_t arrived = 0;    // non-deferrable tasks created in the window
  std::uint64_t succeeded = 0;  // ... completed within their deadline
};

class EmptyWindow : public std::runtime_error {
 public:
  EmptyWindow(double start_s, double end_s);
};

struct RunMetrics {
  Architecture architecture = Architecture::CloudCentric;
  std::uint64_t seed = 0;
  double duration_s = 0.0;

  std::uint64_t generated = 0;
  std::uint64_t completed = 0;
  std::uint64_t failed = 0;
  std::uint64_t deferred = 0;
  std::array<std::uint64_t, kProcessedAtCount> location_counts{};

  double latency_sum_ms = 0.0;
  double latency_sumsq_ms = 0.0;
  std::array<double, kTaskClassCount> class_latency_sum_ms{};
  std::array<std::uint64_t, kTaskClassCount> class_completed{};
  LatencyBreakdown breakdown_sum;  // t_net_up, t_queue, t_proc, t_net_down summed over completed tasks

  std::array<double, kLinkTierCount> bytes_per_tier{};
  std::array<std::uint64_t, kLinkTierCount> traversals_per_tier{};

  // busy seconds per [device][profile]
  std::vector<std::vector<double>> profile_busy_s;
  std::vector<std::vector<std::uint64_t>> profile_tasks;

  std::vector<CapabilityCount> windows;  // one per outage window, schedule order
  CapabilityCount horizon;               // whole run

  std::vector<std::string> warnings;

  double mean_latency_ms() const;
  double location_fraction(ProcessedAt at) const;  // over generated tasks
};

struct RunOptions {
  std::ostream* trace = nullptr;  // task lifecycle CSV
  bool write_trace_header = true;
};

RunMetrics run_simulation(const ScenarioConfig& scenario, const ArchitectureParams& arch, std::uint64_t seed,
                          const RunOptions& options = {});

// Throws EmptyWindow when no time-critical task arrived in the window, and
// std::invalid_argument when the window is not part of the run's schedule.
double capability_fraction(const RunMetrics& metrics, const OutageWindow& window);
double capability_fraction(const CapabilityCount& count);

inline constexpr double kQueueInstabilityThreshold = 0.95;

}  // namespace continuum
