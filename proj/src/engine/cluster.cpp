#include <algorithm>

#include "continuum/engine.hpp"

namespace continuum {

namespace {

bool mesh_reachable(DeviceClass c) { return c != DeviceClass::Cloud && c != DeviceClass::Gateway; }

}  // namespace

ClusterRegistry ClusterRegistry::initial(const ScenarioConfig& config, Architecture arch) {
  ClusterRegistry r;
  r.config_ = &config;
  std::vector<bool> joins_later(config.devices.size(), false), seen(config.devices.size(), false);
  for (const auto& ev : config.membership_events) {
    auto idx = config.device_index(ev.device_id);
    if (!idx || seen[*idx]) continue;
    seen[*idx] = true;
    joins_later[*idx] = ev.change == MembershipChange::Join;
  }
  for (std::size_t i = 0; i < config.devices.size(); ++i) {
    const DeviceSpec& d = config.devices[i];
    if (!d.present(arch) || !mesh_reachable(d.device_class) || joins_later[i]) continue;
    r.insert(i, is_gpu_class(d.device_class));
  }
  return r;
}

void ClusterRegistry::insert(std::size_t device, bool gpu) {
  auto it = std::lower_bound(members_.begin(), members_.end(), device);
  if (it == members_.end() || *it != device) members_.insert(it, device);
  if (gpu) {
    auto g = std::lower_bound(gpu_nodes_.begin(), gpu_nodes_.end(), device);
    if (g == gpu_nodes_.end() || *g != device) gpu_nodes_.insert(g, device);
  }
}

void ClusterRegistry::erase(std::size_t device) {
  std::erase(members_, device);
  std::erase(gpu_nodes_, device);
}

void ClusterRegistry::apply(const MembershipEvent& event, double discovery_delay_s) {
  auto idx = config_ ? config_->device_index(event.device_id) : std::nullopt;
  if (!idx) return;
  if (event.change == MembershipChange::Join) {
    pending_.push_back({event.t_s + discovery_delay_s, *idx, is_gpu_class(config_->devices[*idx].device_class)});
  } else {
    std::erase_if(pending_, [&](const PendingJoin& p) { return p.device == *idx; });
    erase(*idx);
  }
}

void ClusterRegistry::advance(double t_s) {
  if (pending_.empty()) return;
  std::stable_sort(pending_.begin(), pending_.end(), [](const auto& a, const auto& b) { return a.ready_at < b.ready_at; });
  std::size_t done = 0;
  while (done < pending_.size() && pending_[done].ready_at <= t_s) {
    insert(pending_[done].device, pending_[done].gpu);
    last_discovery_at_ = pending_[done].ready_at;
    ++done;
  }
  pending_.erase(pending_.begin(), pending_.begin() + static_cast<std::ptrdiff_t>(done));
}

bool ClusterRegistry::contains(std::size_t device) const {
  return std::binary_search(members_.begin(), members_.end(), device);
}

bool ClusterRegistry::is_gpu_node(std::size_t device) const {
  return std::binary_search(gpu_nodes_.begin(), gpu_nodes_.end(), device);
}

ClusterRegistry discover_resources(const ClusterRegistry& registry, const MembershipEvent& event, double t_s,
                                   double discovery_delay_s) {
  ClusterRegistry next = registry;
  next.apply(event, discovery_delay_s);
  next.advance(t_s);
  return next;
}

}  // namespace continuum
