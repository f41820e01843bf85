#include <algorithm>
#include <cmath>
#include <ostream>
#include <queue>

#include <fmt/format.h>

#include "continuum/engine.hpp"

namespace continuum {

EmptyWindow::EmptyWindow(double start_s, double end_s)
    : std::runtime_error(fmt::format("EmptyWindow: no time-critical task arrived in [{}, {}) s", start_s, end_s)) {}

double RunMetrics::mean_latency_ms() const {
  return completed == 0 ? 0.0 : latency_sum_ms / static_cast<double>(completed);
}

double RunMetrics::location_fraction(ProcessedAt at) const {
  if (generated == 0) return 0.0;
  return static_cast<double>(location_counts[static_cast<std::size_t>(at)]) / static_cast<double>(generated);
}

double capability_fraction(const CapabilityCount& count) {
  if (count.arrived == 0) throw EmptyWindow(count.window.start_s, count.window.end_s);
  return static_cast<double>(count.succeeded) / static_cast<double>(count.arrived);
}

double capability_fraction(const RunMetrics& metrics, const OutageWindow& window) {
  for (const auto& c : metrics.windows) {
    if (c.window == window) return capability_fraction(c);
  }
  if (window.start_s == metrics.horizon.window.start_s && window.end_s == metrics.horizon.window.end_s) {
    return capability_fraction(metrics.horizon);
  }
  throw std::invalid_argument(fmt::format("window [{}, {}) is not part of this run", window.start_s, window.end_s));
}

namespace {

struct InFlight {
  Task task;
  RandomStream rng{0};
  ProcessingDecision decision;
  double net_up_ms = 0.0;
  double wait_ms = 0.0;
  double proc_ms = 0.0;
  double net_down_ms = 0.0;
  double energy_wh = 0.0;  // transmission plus active increment, for the trace only
};

struct ArrivalEvent {
  double time_s;
  double created_at;
  std::uint64_t id;
  std::uint32_t slot;
  bool operator>(const ArrivalEvent& o) const {
    if (time_s != o.time_s) return time_s > o.time_s;
    if (created_at != o.created_at) return created_at > o.created_at;
    return id > o.id;
  }
};

class Simulation {
 public:
  Simulation(const ScenarioConfig& config, const ArchitectureParams& params, std::uint64_t seed,
             const RunOptions& options)
      : config_(config),
        params_(params),
        seed_(seed),
        options_(options),
        outage_(config.outage_windows, config.calibration.instability_factor),
        registry_(ClusterRegistry::initial(config, params.architecture)),
        ctx_(config, params, registry_, outage_),
        stream_(config, seed) {
    queues_.reserve(config.devices.size());
    for (std::size_t d = 0; d < config.devices.size(); ++d) {
      std::vector<ServerQueue> per_profile;
      for (std::size_t p = 0; p < config.devices[d].power_profile.size(); ++p) {
        per_profile.emplace_back(d, config.devices[d].servers);
      }
      queues_.push_back(std::move(per_profile));
    }
    ctx_.queues = &queues_;

    metrics_.architecture = params.architecture;
    metrics_.seed = seed;
    metrics_.duration_s = config.duration_s;
    metrics_.horizon.window = {0.0, config.duration_s, OutageMode::Normal};
    for (const auto& w : outage_.windows()) metrics_.windows.push_back({w, 0, 0});
  }

  RunMetrics run() {
    if (options_.trace && options_.write_trace_header) {
      *options_.trace << "task_id,class,route,queue_ms,proc_ms,net_ms,total_ms,energy_wh,outcome\n";
    }
    for (;;) {
      const auto next_create = stream_.peek_time();
      if (!arrivals_.empty() && (!next_create || arrivals_.top().time_s <= *next_create)) {
        const ArrivalEvent ev = arrivals_.top();
        arrivals_.pop();
        serve(ev);
      } else if (next_create) {
        create(*stream_.next());
      } else {
        break;
      }
    }
    finish_metrics();
    return std::move(metrics_);
  }

 private:
  std::uint32_t allocate_slot() {
    if (!free_slots_.empty()) {
      const std::uint32_t s = free_slots_.back();
      free_slots_.pop_back();
      return s;
    }
    slots_.emplace_back();
    return static_cast<std::uint32_t>(slots_.size() - 1);
  }

  void apply_membership(double t_s) {
    const auto& events = config_.membership_events;
    while (next_membership_ < events.size() && events[next_membership_].t_s <= t_s) {
      registry_.apply(events[next_membership_], config_.calibration.discovery_delay_ms / 1000.0);
      ++next_membership_;
    }
    registry_.advance(t_s);
  }

  // Walks the hops in order starting at t_s. Returns false at the first failed hop
  // (left in `failed`); `t_s` and `ms` advance by the time spent either way.
  bool traverse_hops(const HopList& hops, double bytes, double& t_s, double& ms, InFlight& f,
                     LinkTier* failed = nullptr) {
    for (LinkTier tier : hops) {
      const LinkSpec& link = config_.link(tier);
      const Traversal tr = try_traverse(bytes, link, outage_, t_s, config_.calibration, f.rng);
      t_s += tr.ms / 1000.0;
      ms += tr.ms;
      if (!tr.ok) {
        if (failed) *failed = tier;
        return false;
      }
      const auto i = static_cast<std::size_t>(tier);
      metrics_.bytes_per_tier[i] += bytes;
      ++metrics_.traversals_per_tier[i];
      f.energy_wh += transmission_energy(bytes, link);
    }
    return true;
  }

  void create(const Task& task) {
    apply_membership(task.created_at);
    ++metrics_.generated;
    const std::uint32_t slot = allocate_slot();
    InFlight& f = slots_[slot];
    f = InFlight{};
    f.task = task;
    f.rng = task_rng(seed_, config_, task);
    f.decision = route_task(task, ctx_, f.rng);

    if (!f.decision.routable) {
      finalize(slot, false, task.created_at);
      return;
    }
    double t = task.created_at;
    LinkTier failed = LinkTier::Uplink;
    if (!traverse_hops(f.decision.up, task.payload_bytes, t, f.net_up_ms, f, &failed)) {
      if (!f.decision.escalated || !retarget(f, t, failed)) {
        finalize(slot, false, t);
        return;
      }
    }
    arrivals_.push({t, task.created_at, task.id, slot});
  }

  // A cloud leg taken from the escalation budget failed: process locally instead.
  bool retarget(InFlight& f, double& t, LinkTier failed) {
    if (params_.architecture == Architecture::GatewayEdge) {
      // Only a task that reached its gateway can be processed there.
      if (f.decision.gateway == kNoDevice || failed != LinkTier::Uplink) return false;
      const DeviceSpec& gw = config_.devices[f.decision.gateway];
      ProcessingDecision d;
      d.location = gw.device_class == DeviceClass::EdgeServer ? ProcessedAt::EdgeServer : ProcessedAt::Gateway;
      d.target = f.decision.gateway;
      d.profile = select_profile(gw, f.task.task_class, params_.architecture);
      d.gateway = f.decision.gateway;
      d.down.push(LinkTier::LocalNetwork);
      f.decision = d;
      return true;
    }
    f.decision = route_task(f.task, ctx_, f.rng, false);
    return traverse_hops(f.decision.up, f.task.payload_bytes, t, f.net_up_ms, f);
  }

  void serve(const ArrivalEvent& ev) {
    InFlight& f = slots_[ev.slot];
    const ProcessingDecision& d = f.decision;
    const DeviceSpec& dev = config_.devices[d.target];
    const TaskClass& tc = config_.task_class(f.task.task_class);
    const double service_ms = processing_time(tc, dev) * d.slowdown;
    const auto adm = queues_[d.target][d.profile].admit(ev.time_s, service_ms / 1000.0);
    f.wait_ms = adm.wait_s * 1000.0;
    f.proc_ms = service_ms;
    const auto& profile = dev.power_profile[d.profile];
    f.energy_wh += (profile.p_active_w - profile.p_idle_w) * service_ms / 3.6e6;

    double t = adm.finish_s;
    const bool delivered = traverse_hops(d.down, tc.result_bytes, t, f.net_down_ms, f);
    finalize(ev.slot, delivered, t);
  }

  void finalize(std::uint32_t slot, bool completed, double t_end) {
    InFlight& f = slots_[slot];
    const TaskClass& tc = config_.task_class(f.task.task_class);
    ProcessedAt outcome = f.decision.location;
    const double latency_ms = (t_end - f.task.created_at) * 1000.0;

    if (completed) {
      ++metrics_.completed;
      metrics_.latency_sum_ms += latency_ms;
      metrics_.latency_sumsq_ms += latency_ms * latency_ms;
      const auto c = static_cast<std::size_t>(f.task.task_class);
      metrics_.class_latency_sum_ms[c] += latency_ms;
      ++metrics_.class_completed[c];
      metrics_.breakdown_sum.t_net_up += f.net_up_ms;
      metrics_.breakdown_sum.t_queue += f.wait_ms;
      metrics_.breakdown_sum.t_proc += f.proc_ms;
      metrics_.breakdown_sum.t_net_down += f.net_down_ms;
    } else if (tc.deferrable) {
      outcome = ProcessedAt::Deferred;
      ++metrics_.deferred;
    } else {
      outcome = ProcessedAt::Failed;
      ++metrics_.failed;
    }
    ++metrics_.location_counts[static_cast<std::size_t>(outcome)];

    if (!tc.deferrable) {
      const bool ok = completed && (!tc.deadline_ms || latency_ms <= *tc.deadline_ms);
      auto count = [&](CapabilityCount& c) {
        ++c.arrived;
        if (ok) ++c.succeeded;
      };
      count(metrics_.horizon);
      const double t0 = f.task.created_at;
      auto it = std::upper_bound(metrics_.windows.begin(), metrics_.windows.end(), t0,
                                 [](double t, const CapabilityCount& c) { return t < c.window.start_s; });
      if (it != metrics_.windows.begin() && t0 < std::prev(it)->window.end_s) count(*std::prev(it));
    }

    if (options_.trace) write_trace(f, outcome, completed ? latency_ms : 0.0);
    free_slots_.push_back(slot);
  }

  void write_trace(const InFlight& f, ProcessedAt outcome, double total_ms) {
    std::string route;
    for (LinkTier t : f.decision.up) {
      route += to_string(t);
      route += '>';
    }
    route += config_.devices[f.decision.target].id;
    *options_.trace << fmt::format("{},{},{},{},{},{},{},{},{}\n", f.task.id, to_string(f.task.task_class), route,
                                   f.wait_ms, f.proc_ms, f.net_up_ms + f.net_down_ms, total_ms, f.energy_wh,
                                   to_string(outcome));
  }

  void finish_metrics() {
    metrics_.profile_busy_s.resize(queues_.size());
    metrics_.profile_tasks.resize(queues_.size());
    for (std::size_t d = 0; d < queues_.size(); ++d) {
      for (const auto& q : queues_[d]) {
        metrics_.profile_busy_s[d].push_back(q.busy_s());
        metrics_.profile_tasks[d].push_back(q.admitted());
        const double rho = q.busy_s() / (q.servers() * config_.duration_s);
        if (rho > kQueueInstabilityThreshold) {
          metrics_.warnings.push_back(fmt::format("QueueInstability: {} profile {} utilization {:.3f}",
                                                  config_.devices[d].id,
                                                  config_.devices[d].power_profile[metrics_.profile_busy_s[d].size() - 1].service_id,
                                                  rho));
        }
      }
    }
  }

  const ScenarioConfig& config_;
  const ArchitectureParams& params_;
  std::uint64_t seed_;
  const RunOptions& options_;
  OutageState outage_;
  ClusterRegistry registry_;
  RoutingContext ctx_;
  TaskStream stream_;
  std::vector<std::vector<ServerQueue>> queues_;
  std::vector<InFlight> slots_;
  std::vector<std::uint32_t> free_slots_;
  std::priority_queue<ArrivalEvent, std::vector<ArrivalEvent>, std::greater<>> arrivals_;
  std::size_t next_membership_ = 0;
  RunMetrics metrics_;
};

}  // namespace

RunMetrics run_simulation(const ScenarioConfig& scenario, const ArchitectureParams& arch, std::uint64_t seed,
                          const RunOptions& options) {
  Simulation sim(scenario, arch, seed, options);
  return sim.run();
}

}  // namespace continuum
