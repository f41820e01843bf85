#include <cmath>
#include <limits>
#include <map>

#include "continuum/metrics.hpp"
#include "continuum/network.hpp"

namespace continuum {

double analytic_latency(const ArchitectureParams& arch, const LatencyBreakdown& b) {
  const double cloud = b.t_net_up + b.t_queue + b.t_proc + b.t_net_down;
  switch (arch.architecture) {
    case Architecture::CloudCentric:
      return cloud;
    case Architecture::GatewayEdge:
      return b.t_d_to_g + b.t_proc_gateway + b.t_g_to_d + arch.alpha * cloud;
    case Architecture::DfcAi:
      return b.t_proc_local + arch.beta * b.t_collab;
  }
  return 0.0;
}

double erlang_c_wait(double arrival_rate, double mean_service, int servers) {
  if (arrival_rate <= 0.0 || mean_service <= 0.0) return 0.0;
  const double c = servers;
  const double a = arrival_rate * mean_service;
  if (a >= c) return std::numeric_limits<double>::infinity();
  // Terms a^k / k! built incrementally.
  double term = 1.0, sum = 0.0;
  for (int k = 0; k < servers; ++k) {
    sum += term;
    term *= a / (k + 1);
  }
  const double tail = term / (1.0 - a / c);
  const double p_wait = tail / (sum + tail);
  return p_wait * mean_service / (c - a);
}

namespace {

struct Path {
  double prob = 1.0;
  std::size_t target = 0;
  std::size_t profile = 0;
  HopList up;
  HopList down;
  bool cloud = false;
  bool local_gateway = false;
};

struct Load {
  double rate = 0.0;          // tasks/s
  double busy_per_s = 0.0;    // sum of rate * service_s
};

class AnalyticModel {
 public:
  AnalyticModel(const ScenarioConfig& s, const ArchitectureParams& p)
      : s_(s), p_(p), registry_(ClusterRegistry::initial(s, p.architecture)) {
    q_ = escalation_probability(s, p);
    for (std::size_t i = 0; i < s.devices.size(); ++i) {
      if (is_gateway_class(s.devices[i].device_class) && s.devices[i].present(p.architecture)) gateways_.push_back(i);
    }
    for (std::size_t d = 0; d < s.devices.size(); ++d) {
      for (const auto& stream : s.devices[d].streams) {
        for (const auto& [cls, share] : stream.mixture) {
          const double rate = stream.rate_per_s * share;
          if (rate <= 0.0) continue;
          for (const Path& path : paths(d, cls)) {
            Load& l = loads_[{path.target, path.profile}];
            l.rate += rate * path.prob;
            l.busy_per_s += rate * path.prob * service_ms(cls, path.target) / 1000.0;
          }
        }
      }
    }
  }

  template <typename Fn>
  void for_each_path(Fn&& fn) const {
    for (std::size_t d = 0; d < s_.devices.size(); ++d) {
      for (const auto& stream : s_.devices[d].streams) {
        for (const auto& [cls, share] : stream.mixture) {
          const double rate = stream.rate_per_s * share;
          if (rate <= 0.0) continue;
          for (const Path& path : paths(d, cls)) fn(cls, rate * path.prob, path);
        }
      }
    }
  }

  double service_ms(TaskClassId cls, std::size_t device) const {
    return processing_time(s_.task_class(cls), s_.devices[device]);
  }

  double wait_ms(std::size_t device, std::size_t profile) const {
    auto it = loads_.find({device, profile});
    if (it == loads_.end() || it->second.rate <= 0.0) return 0.0;
    const double mean_s = it->second.busy_per_s / it->second.rate;
    return erlang_c_wait(it->second.rate, mean_s, s_.devices[device].servers) * 1000.0;
  }

  double hops_ms(const HopList& hops, double bytes) const {
    double ms = 0.0;
    for (LinkTier t : hops) {
      const LinkSpec& l = s_.link(t);
      ms += serialization_ms(bytes, l) + 0.5 * (l.latency_min_ms + l.latency_max_ms);
    }
    return ms;
  }

  double hops_wh(const HopList& hops, double bytes) const {
    double wh = 0.0;
    for (LinkTier t : hops) wh += transmission_energy(bytes, s_.link(t));
    return wh;
  }

  const std::map<std::pair<std::size_t, std::size_t>, Load>& loads() const { return loads_; }

 private:
  Path at(std::size_t device, TaskClassId cls, double prob) const {
    Path p;
    p.prob = prob;
    p.target = device;
    p.profile = select_profile(s_.devices[device], cls, p_.architecture);
    return p;
  }

  Path to_cloud(TaskClassId cls, double prob, bool via_gateway) const {
    Path p = at(s_.cloud_index(), cls, prob);
    p.cloud = true;
    if (via_gateway) {
      p.up.push(LinkTier::LocalNetwork);
      p.up.push(LinkTier::Uplink);
      p.down.push(LinkTier::Uplink);
      p.down.push(LinkTier::LocalNetwork);
    } else {
      for (LinkTier t : s_.cloud_route) p.up.push(t);
      for (auto it = s_.cloud_route.rbegin(); it != s_.cloud_route.rend(); ++it) p.down.push(*it);
    }
    return p;
  }

  std::vector<Path> paths(std::size_t origin, TaskClassId cls) const {
    const TaskClass& tc = s_.task_class(cls);
    std::vector<Path> out;
    switch (p_.architecture) {
      case Architecture::CloudCentric:
        out.push_back(to_cloud(cls, 1.0, false));
        break;
      case Architecture::GatewayEdge: {
        if (gateways_.empty()) {
          out.push_back(to_cloud(cls, 1.0, false));
          break;
        }
        const double fallback = tc.gateway == GatewayPlacement::Cloud ? 1.0 : tc.escalation_eligible ? q_ : 0.0;
        if (fallback > 0.0) out.push_back(to_cloud(cls, fallback, true));
        if (fallback < 1.0) {
          const double share = (1.0 - fallback) / static_cast<double>(gateways_.size());
          for (std::size_t g : gateways_) {
            Path p = at(g, cls, share);
            p.local_gateway = true;
            p.up.push(LinkTier::LocalNetwork);
            p.down.push(LinkTier::LocalNetwork);
            out.push_back(p);
          }
        }
        break;
      }
      case Architecture::DfcAi: {
        const double escalate = tc.dfc == DfcPlacement::Cloud ? 1.0 : tc.escalation_eligible ? q_ : 0.0;
        if (escalate > 0.0) out.push_back(to_cloud(cls, escalate, false));
        if (escalate < 1.0) {
          const double local = 1.0 - escalate;
          const auto& nodes = registry_.gpu_nodes();
          if (tc.dfc != DfcPlacement::ClusterGpu || is_gpu_class(s_.devices[origin].device_class) ||
              registry_.is_gpu_node(origin) || nodes.empty()) {
            out.push_back(at(origin, cls, local));
          } else {
            for (std::size_t n : nodes) {
              Path p = at(n, cls, local / static_cast<double>(nodes.size()));
              p.up.push(LinkTier::LocalMesh);
              p.down.push(LinkTier::LocalMesh);
              out.push_back(p);
            }
          }
        }
        break;
      }
    }
    return out;
  }

  const ScenarioConfig& s_;
  const ArchitectureParams& p_;
  ClusterRegistry registry_;
  double q_ = 0.0;
  std::vector<std::size_t> gateways_;
  std::map<std::pair<std::size_t, std::size_t>, Load> loads_;
};

}  // namespace

LatencyBreakdown analytic_breakdown(const ScenarioConfig& s, const ArchitectureParams& p) {
  AnalyticModel model(s, p);
  LatencyBreakdown b;
  double total = 0.0, cloud_w = 0.0, local_w = 0.0, local_ms = 0.0, cloud_ms = 0.0;

  model.for_each_path([&](TaskClassId cls, double w, const Path& path) {
    const TaskClass& tc = s.task_class(cls);
    const double up = model.hops_ms(path.up, tc.mean_payload_bytes());
    const double down = model.hops_ms(path.down, tc.result_bytes);
    const double wait = model.wait_ms(path.target, path.profile);
    const double proc = model.service_ms(cls, path.target);
    total += w;
    switch (p.architecture) {
      case Architecture::CloudCentric:
        b.t_net_up += w * up;
        b.t_queue += w * wait;
        b.t_proc += w * proc;
        b.t_net_down += w * down;
        break;
      case Architecture::GatewayEdge: {
        const double d_to_g = model.hops_ms(HopList{{LinkTier::LocalNetwork}, 1}, tc.mean_payload_bytes());
        const double g_to_d = model.hops_ms(HopList{{LinkTier::LocalNetwork}, 1}, tc.result_bytes);
        b.t_d_to_g += w * d_to_g;
        b.t_g_to_d += w * g_to_d;
        if (path.cloud) {
          cloud_w += w;
          b.t_net_up += w * (up - d_to_g);
          b.t_queue += w * wait;
          b.t_proc += w * proc;
          b.t_net_down += w * (down - g_to_d);
        } else {
          b.t_proc_gateway += w * (wait + proc);
        }
        break;
      }
      case Architecture::DfcAi:
        if (path.cloud) {
          cloud_w += w;
          cloud_ms += w * (up + wait + proc + down);
        } else {
          local_w += w;
          local_ms += w * (up + wait + proc + down);
        }
        break;
    }
  });
  if (total <= 0.0) return b;

  switch (p.architecture) {
    case Architecture::CloudCentric:
      b.t_net_up /= total;
      b.t_queue /= total;
      b.t_proc /= total;
      b.t_net_down /= total;
      break;
    case Architecture::GatewayEdge:
      b.t_d_to_g /= total;
      b.t_g_to_d /= total;
      b.t_proc_gateway /= total;
      // Cloud fields become the conditional cost of one fallback.
      if (cloud_w > 0.0) {
        b.t_net_up /= cloud_w;
        b.t_queue /= cloud_w;
        b.t_proc /= cloud_w;
        b.t_net_down /= cloud_w;
      }
      break;
    case Architecture::DfcAi: {
      b.t_proc_local = local_w > 0.0 ? local_ms / local_w : 0.0;
      const double collab = cloud_w > 0.0 ? cloud_ms / cloud_w : 0.0;
      b.t_collab = std::max(0.0, collab - b.t_proc_local);
      break;
    }
  }
  return b;
}

double analytic_energy_wh_per_day(const ScenarioConfig& s, const ArchitectureParams& p) {
  AnalyticModel model(s, p);
  double wh = 0.0;
  for (std::size_t d = 0; d < s.devices.size(); ++d) {
    const DeviceSpec& dev = s.devices[d];
    if (!dev.present(p.architecture)) continue;
    for (std::size_t k = 0; k < dev.power_profile.size(); ++k) {
      const auto& prof = dev.power_profile[k];
      if (!prof.deployed(p.architecture)) continue;
      wh += dev.servers * prof.p_idle_w * 24.0;
      auto it = model.loads().find({d, k});
      if (it != model.loads().end()) {
        wh += (prof.p_active_w - prof.p_idle_w) * it->second.busy_per_s * kSecondsPerDay / 3600.0;
      }
    }
  }
  model.for_each_path([&](TaskClassId cls, double w, const Path& path) {
    const TaskClass& tc = s.task_class(cls);
    const double per_task = model.hops_wh(path.up, tc.mean_payload_bytes()) + model.hops_wh(path.down, tc.result_bytes);
    wh += w * kSecondsPerDay * per_task;
  });
  return wh;
}

}  // namespace continuum
