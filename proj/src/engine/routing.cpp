#include <algorithm>
#include <limits>

#include <fmt/format.h>

#include "continuum/engine.hpp"

namespace continuum {

NoRouteAvailable::NoRouteAvailable(std::uint64_t task_id)
    : std::runtime_error(fmt::format("NoRouteAvailable: task {} has no reachable processing location", task_id)) {}

double escalation_probability(const ScenarioConfig& config, const ArchitectureParams& params) {
  if (params.architecture == Architecture::CloudCentric) return 0.0;
  const bool gateway = params.architecture == Architecture::GatewayEdge;
  const double budget = gateway ? params.alpha : params.beta;
  double total = 0.0, forced = 0.0, eligible = 0.0;
  for (const auto& [cls, rate] : config.class_rates(params.architecture)) {
    const TaskClass& tc = config.task_class(cls);
    total += rate;
    const bool to_cloud = gateway ? tc.gateway == GatewayPlacement::Cloud : tc.dfc == DfcPlacement::Cloud;
    if (to_cloud) {
      forced += rate;
    } else if (tc.escalation_eligible) {
      eligible += rate;
    }
  }
  if (total <= 0.0 || eligible <= 0.0) return 0.0;
  const double q = (budget * total - forced) / eligible;
  return std::clamp(q, 0.0, 1.0);
}

std::size_t select_profile(const DeviceSpec& device, TaskClassId cls, Architecture arch) {
  const auto& profiles = device.power_profile;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    if (profiles[i].deployed(arch) && profiles[i].serves_class(cls)) return i;
  }
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    if (profiles[i].deployed(arch)) return i;
  }
  return 0;
}

double processing_time(const TaskClass& task_class, const DeviceSpec& device) {
  return task_class.base_proc_ms / device.processing_power;
}

RoutingContext::RoutingContext(const ScenarioConfig& config_, const ArchitectureParams& params_,
                               const ClusterRegistry& registry_, const OutageState& outage_)
    : config(config_), params(params_), registry(registry_), outage(outage_) {
  escalation_q = escalation_probability(config, params);
  for (std::size_t i = 0; i < config.devices.size(); ++i) {
    const DeviceSpec& d = config.devices[i];
    if (is_gateway_class(d.device_class) && d.present(params.architecture)) gateways.push_back(i);
  }
}

namespace {

// Classes that need accelerator-grade compute; they run slower on a gateway
// that has lost its cloud orchestration.
bool heavy_class(TaskClassId c) {
  return c == TaskClassId::Complex || c == TaskClassId::Anomaly || c == TaskClassId::VideoFrame;
}

double free_at(const RoutingContext& ctx, std::size_t device, std::size_t profile) {
  if (!ctx.queues) return 0.0;
  return (*ctx.queues)[device][profile].earliest_free();
}

// Earliest-free candidate, lowest index on ties.
std::size_t pick_earliest_free(const RoutingContext& ctx, const std::vector<std::size_t>& candidates, TaskClassId cls) {
  std::size_t best = kNoDevice;
  double best_t = std::numeric_limits<double>::infinity();
  for (std::size_t dev : candidates) {
    const double t = free_at(ctx, dev, select_profile(ctx.config.devices[dev], cls, ctx.params.architecture));
    if (t < best_t) {
      best_t = t;
      best = dev;
    }
  }
  return best;
}

ProcessingDecision cloud_decision(const Task& task, const RoutingContext& ctx) {
  ProcessingDecision d;
  d.location = ProcessedAt::Cloud;
  d.target = ctx.config.cloud_index();
  d.profile = select_profile(ctx.config.devices[d.target], task.task_class, ctx.params.architecture);
  for (LinkTier t : ctx.config.cloud_route) d.up.push(t);
  for (auto it = ctx.config.cloud_route.rbegin(); it != ctx.config.cloud_route.rend(); ++it) d.down.push(*it);
  d.routable = ctx.outage.mode_at(task.created_at) != OutageMode::InternetDown;
  return d;
}

ProcessingDecision at_device(const Task& task, const RoutingContext& ctx, std::size_t device, ProcessedAt location) {
  ProcessingDecision d;
  d.location = location;
  d.target = device;
  d.profile = select_profile(ctx.config.devices[device], task.task_class, ctx.params.architecture);
  return d;
}

ProcessedAt gateway_location(const DeviceSpec& d) {
  return d.device_class == DeviceClass::EdgeServer ? ProcessedAt::EdgeServer : ProcessedAt::Gateway;
}

// The gateway keeps its cloud orchestration while the uplink answers a probe.
bool gateway_orchestrated(const RoutingContext& ctx, double t_s, RandomStream& rng) {
  if (ctx.outage.mode_at(t_s) == OutageMode::Normal) return true;
  const LinkSpec& up = ctx.config.link(LinkTier::Uplink);
  const Calibration& cal = ctx.config.calibration;
  for (int attempt = 0; attempt <= cal.max_retries; ++attempt) {
    const double now = t_s + attempt * cal.retry_backoff_ms / 1000.0;
    if (is_available(up, ctx.outage, now, rng)) return true;
    if (ctx.outage.mode_at(now) == OutageMode::InternetDown) return false;
  }
  return false;
}

ProcessingDecision route_gateway(const Task& task, const RoutingContext& ctx, RandomStream& rng, bool allow_escalation) {
  const TaskClass& tc = ctx.config.task_class(task.task_class);
  const std::size_t gw = pick_earliest_free(ctx, ctx.gateways, task.task_class);
  if (gw == kNoDevice) {
    ProcessingDecision d = cloud_decision(task, ctx);
    d.cloud_required = true;
    return d;
  }
  const DeviceSpec& gw_dev = ctx.config.devices[gw];

  if (!gateway_orchestrated(ctx, task.created_at, rng)) {
    ProcessingDecision d = at_device(task, ctx, gw, gateway_location(gw_dev));
    d.gateway = gw;
    d.cloud_required = tc.gateway == GatewayPlacement::Cloud;
    if (d.cloud_required || !rng.bernoulli(ctx.config.calibration.gateway_offline_coverage)) {
      d.routable = false;
      return d;
    }
    if (heavy_class(task.task_class)) d.slowdown = ctx.config.calibration.gateway_offline_slowdown;
    d.up.push(LinkTier::LocalNetwork);
    d.down.push(LinkTier::LocalNetwork);
    return d;
  }

  const bool forced = tc.gateway == GatewayPlacement::Cloud;
  const bool fallback =
      forced || (allow_escalation && tc.escalation_eligible && ctx.escalation_q > 0.0 && rng.bernoulli(ctx.escalation_q));
  if (fallback) {
    ProcessingDecision d;
    d.location = ProcessedAt::Cloud;
    d.target = ctx.config.cloud_index();
    d.profile = select_profile(ctx.config.devices[d.target], task.task_class, ctx.params.architecture);
    d.gateway = gw;
    d.escalated = !forced;
    d.cloud_required = forced;
    d.up.push(LinkTier::LocalNetwork);
    d.up.push(LinkTier::Uplink);
    d.down.push(LinkTier::Uplink);
    d.down.push(LinkTier::LocalNetwork);
    return d;
  }
  ProcessingDecision d = at_device(task, ctx, gw, gateway_location(gw_dev));
  d.gateway = gw;
  d.up.push(LinkTier::LocalNetwork);
  d.down.push(LinkTier::LocalNetwork);
  return d;
}

ProcessingDecision route_local(const Task& task, const RoutingContext& ctx, const TaskClass& tc) {
  const std::size_t origin = task.origin;
  if (tc.dfc != DfcPlacement::ClusterGpu) return at_device(task, ctx, origin, ProcessedAt::OriginDevice);
  if (ctx.registry.is_gpu_node(origin) || is_gpu_class(ctx.config.devices[origin].device_class)) {
    return at_device(task, ctx, origin, ProcessedAt::ClusterGpu);
  }
  const std::size_t node = pick_earliest_free(ctx, ctx.registry.gpu_nodes(), task.task_class);
  if (node == kNoDevice) return at_device(task, ctx, origin, ProcessedAt::OriginDevice);
  ProcessingDecision d = at_device(task, ctx, node, ProcessedAt::ClusterGpu);
  d.up.push(LinkTier::LocalMesh);
  d.down.push(LinkTier::LocalMesh);
  return d;
}

ProcessingDecision route_dfc(const Task& task, const RoutingContext& ctx, RandomStream& rng, bool allow_escalation) {
  const TaskClass& tc = ctx.config.task_class(task.task_class);
  if (tc.dfc == DfcPlacement::Cloud) {
    ProcessingDecision d = cloud_decision(task, ctx);
    d.cloud_required = true;
    return d;
  }
  if (allow_escalation && tc.escalation_eligible && ctx.escalation_q > 0.0 && rng.bernoulli(ctx.escalation_q)) {
    ProcessingDecision d = cloud_decision(task, ctx);
    d.escalated = true;
    if (d.routable) return d;
  }
  return route_local(task, ctx, tc);
}

}  // namespace

ProcessingDecision route_task(const Task& task, const RoutingContext& ctx, RandomStream& rng, bool allow_escalation) {
  switch (ctx.params.architecture) {
    case Architecture::CloudCentric: {
      ProcessingDecision d = cloud_decision(task, ctx);
      d.cloud_required = true;
      return d;
    }
    case Architecture::GatewayEdge:
      return route_gateway(task, ctx, rng, allow_escalation);
    case Architecture::DfcAi:
      return route_dfc(task, ctx, rng, allow_escalation);
  }
  return {};
}

}  // namespace continuum
