#include <algorithm>

#include <fmt/format.h>

#include "continuum/metrics.hpp"
#include "continuum/network.hpp"

namespace continuum {

UtilizationOutOfRange::UtilizationOutOfRange(const std::string& service_id, double rho)
    : std::invalid_argument(fmt::format("UtilizationOutOfRange: {} has rho = {}", service_id, rho)) {}

double energy_microservices(std::span<const MicroservicePowerProfile> profiles, double duration_s) {
  double watts = 0.0;
  for (const auto& p : profiles) {
    if (!(p.rho >= 0.0 && p.rho <= 1.0)) throw UtilizationOutOfRange(p.service_id, p.rho);
    watts += p.p_idle_w * (1.0 - p.rho) + p.p_active_w * p.rho;
  }
  return watts * duration_s / 3600.0;
}

namespace {

double busy_hours(const RunMetrics& m, const ScenarioConfig& s, std::size_t device) {
  double busy = 0.0;
  const auto& profiles = s.devices[device].power_profile;
  for (std::size_t p = 0; p < profiles.size(); ++p) {
    if (profiles[p].deployed(m.architecture)) busy += m.profile_busy_s[device][p];
  }
  return busy / 3600.0;
}

// Devices that originate or host AI work in the device-first architecture.
bool ai_device(const DeviceSpec& d, Architecture arch) {
  if (!d.present(arch) || d.device_class == DeviceClass::Cloud || d.device_class == DeviceClass::Gateway) return false;
  return !d.streams.empty() || is_gpu_class(d.device_class);
}

}  // namespace

EnergyBreakdown account_energy(const RunMetrics& m, const ScenarioConfig& s) {
  EnergyBreakdown e;
  const double T = m.duration_s;
  const double per_day = kSecondsPerDay / T;

  for (std::size_t d = 0; d < s.devices.size(); ++d) {
    const DeviceSpec& dev = s.devices[d];
    if (!dev.present(m.architecture)) continue;
    std::vector<MicroservicePowerProfile> active;
    for (std::size_t p = 0; p < dev.power_profile.size(); ++p) {
      if (!dev.power_profile[p].deployed(m.architecture)) continue;
      MicroservicePowerProfile prof = dev.power_profile[p];
      prof.rho = m.profile_busy_s[d][p] / (dev.servers * T);
      active.push_back(prof);
    }
    const double wh = energy_microservices(active, T) * dev.servers * per_day;
    e.per_device_class[dev.device_class] += wh;
  }
  for (std::size_t t = 0; t < kLinkTierCount; ++t) {
    const auto tier = static_cast<LinkTier>(t);
    e.per_tier[tier] = transmission_energy(m.bytes_per_tier[t], s.link(tier)) * per_day;
  }
  for (const auto& [cls, wh] : e.per_device_class) e.e_processing += wh;
  for (const auto& [tier, wh] : e.per_tier) e.e_transmission += wh;
  e.total = e.e_processing + e.e_transmission;
  return e;
}

CostBreakdown account_cost(const RunMetrics& m, const ScenarioConfig& s, double horizon_s) {
  const PricingTable& pr = s.pricing;
  const double scale = horizon_s / m.duration_s;
  const double days = m.duration_s / kSecondsPerDay;
  CostBreakdown c;

  double edge_busy_h = 0.0;
  for (std::size_t d = 0; d < s.devices.size(); ++d) {
    const DeviceSpec& dev = s.devices[d];
    if (!dev.present(m.architecture)) continue;
    const double h = busy_hours(m, s, d);
    if (dev.device_class == DeviceClass::Cloud) {
      c.c_compute += h * pr.cloud_gpu_per_hour;
    } else if (m.architecture == Architecture::GatewayEdge && is_gateway_class(dev.device_class)) {
      c.c_compute += h * pr.edge_server_per_hour;
      edge_busy_h += h;
    } else if (!dev.owned_by_enterprise) {
      c.c_compute += h * pr.device_compute_per_hour;
    }
  }
  c.c_transfer = m.bytes_per_tier[static_cast<std::size_t>(LinkTier::Uplink)] / kBytesPerGb * pr.cloud_egress_per_gb;

  if (m.architecture == Architecture::GatewayEdge) {
    const double billed_h = std::max(pr.maintenance_floor_hours_per_day * days, edge_busy_h);
    c.c_infrastructure = billed_h * pr.edge_maintenance_per_hour;
  }
  if (m.architecture == Architecture::DfcAi) {
    const auto devices = std::count_if(s.devices.begin(), s.devices.end(),
                                       [&](const DeviceSpec& d) { return ai_device(d, m.architecture); });
    c.c_operations = static_cast<double>(devices) * pr.device_upkeep_per_device_year * m.duration_s / kSecondsPerYear;
  }

  c.c_compute *= scale;
  c.c_transfer *= scale;
  c.c_infrastructure *= scale;
  c.c_operations *= scale;
  c.total = c.c_compute + c.c_transfer + c.c_infrastructure + c.c_operations;
  return c;
}

}  // namespace continuum
