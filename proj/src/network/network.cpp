#include "continuum/network.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace continuum {

LinkUnavailable::LinkUnavailable(LinkTier tier, double t_s)
    : std::runtime_error(fmt::format("LinkUnavailable: {} at t={} s", to_string(tier), t_s)), tier_(tier) {}

OutageState::OutageState(std::vector<OutageWindow> windows, double instability_factor)
    : windows_(std::move(windows)), instability_factor_(instability_factor) {
  std::sort(windows_.begin(), windows_.end(), [](const auto& a, const auto& b) { return a.start_s < b.start_s; });
}

OutageMode OutageState::mode_at(double t_s) const {
  auto it = std::upper_bound(windows_.begin(), windows_.end(), t_s,
                             [](double t, const OutageWindow& w) { return t < w.start_s; });
  if (it == windows_.begin()) return OutageMode::Normal;
  --it;
  return t_s < it->end_s ? it->mode : OutageMode::Normal;
}

double serialization_ms(double payload_bytes, const LinkSpec& link) {
  return payload_bytes * 8.0 / (link.bandwidth_mbps * 1e6) * 1000.0;
}

double transmission_time(double payload_bytes, const LinkSpec& link, RandomStream& rng) {
  return serialization_ms(payload_bytes, link) + rng.uniform(link.latency_min_ms, link.latency_max_ms);
}

double transmission_energy(double payload_bytes, const LinkSpec& link) {
  return payload_bytes / kBytesPerGb * link.energy_wh_per_gb;
}

bool is_available(const LinkSpec& link, const OutageState& outage, double t_s, RandomStream& rng) {
  if (link.tier == LinkTier::Uplink) {
    switch (outage.mode_at(t_s)) {
      case OutageMode::InternetDown:
        return false;
      case OutageMode::InternetUnstable:
        return rng.bernoulli(outage.instability_factor());
      case OutageMode::Normal:
        break;
    }
  }
  return link.reliability >= 1.0 || rng.bernoulli(link.reliability);
}

Traversal try_traverse(double payload_bytes, const LinkSpec& link, const OutageState& outage,
                                      double t_s, const Calibration& calibration, RandomStream& rng) {
  Traversal tr;
  for (int attempt = 0; attempt <= calibration.max_retries; ++attempt) {
    const double now = t_s + tr.ms / 1000.0;
    ++tr.attempts;
    if (is_available(link, outage, now, rng)) {
      tr.ms += transmission_time(payload_bytes, link, rng);
      tr.ok = true;
      return tr;
    }
    if (link.tier == LinkTier::Uplink && outage.mode_at(now) == OutageMode::InternetDown) return tr;
    if (attempt < calibration.max_retries) tr.ms += calibration.retry_backoff_ms;
  }
  return tr;
}

Traversal traverse(double payload_bytes, const LinkSpec& link, const OutageState& outage, double t_s,
                   const Calibration& calibration, RandomStream& rng) {
  Traversal tr = try_traverse(payload_bytes, link, outage, t_s, calibration, rng);
  if (!tr.ok) throw LinkUnavailable(link.tier, t_s);
  return tr;
}

}  // namespace continuum
