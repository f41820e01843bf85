#pragma once

#include <map>
#include <span>
#include <stdexcept>

#include "continuum/engine.hpp"
#include "continuum/model.hpp"

namespace continuum {

class UtilizationOutOfRange : public std::invalid_argument {
 public:
  UtilizationOutOfRange(const std::string& service_id, double rho);
};

// Daily figures (Wh/day). Components add up to `total` exactly.
struct EnergyBreakdown {
  double e_processing = 0.0;
  double e_transmission = 0.0;
  double total = 0.0;
  std::map<LinkTier, double> per_tier;
  std::map<DeviceClass, double> per_device_class;
};

// USD over the requested horizon. Components add up to `total` exactly.
struct CostBreakdown {
  double c_compute = 0.0;
  double c_transfer = 0.0;
  double c_infrastructure = 0.0;
  double c_operations = 0.0;
  double total = 0.0;
};

// Sum over services of (p_idle (1 - rho) + p_active rho) * duration, in Wh.
double energy_microservices(std::span<const MicroservicePowerProfile> profiles, double duration_s);

// Processing energy from measured busy time plus transmission tariffs,
// normalized to one day.
EnergyBreakdown account_energy(const RunMetrics& metrics, const ScenarioConfig& scenario);

inline constexpr double kSecondsPerYear = kDaysPerYear * kSecondsPerDay;

// Run totals extrapolated to `horizon_s` (default one year).
CostBreakdown account_cost(const RunMetrics& metrics, const ScenarioConfig& scenario, double horizon_s = kSecondsPerYear);

// Closed-form latency for the architecture:
//   cloud:   t_net_up + t_queue + t_proc + t_net_down
//   gateway: t_d_to_g + t_proc_gateway + t_g_to_d + alpha * (t_net_up + t_queue + t_proc + t_net_down)
//   dfc:     t_proc_local + beta * t_collab
double analytic_latency(const ArchitectureParams& arch, const LatencyBreakdown& breakdown);

// Expected breakdown under normal network conditions, weighted by the
// scenario's arrival streams. Queueing uses the Erlang-C wait of each
// (device, microservice) queue.
//   gateway: the cloud fields describe a fallback task's extra cloud leg.
//   dfc: t_proc_local is the mean latency of locally processed tasks and
//        t_collab the extra latency a cloud-collaborating task pays.
LatencyBreakdown analytic_breakdown(const ScenarioConfig& scenario, const ArchitectureParams& arch);

// Expected daily energy under normal conditions.
double analytic_energy_wh_per_day(const ScenarioConfig& scenario, const ArchitectureParams& arch);

// Mean wait in an M/M/c queue (same unit as mean_service).
double erlang_c_wait(double arrival_rate, double mean_service, int servers);

}  // namespace continuum
