#pragma once

#include <stdexcept>
#include <vector>

#include "continuum/model.hpp"
#include "continuum/random.hpp"

namespace continuum {

class LinkUnavailable : public std::runtime_error {
 public:
  LinkUnavailable(LinkTier tier, double t_s);
  LinkTier tier() const { return tier_; }

 private:
  LinkTier tier_;
};

// Which internet mode is active at each simulated instant.
class OutageState {
 public:
  OutageState() = default;
  OutageState(std::vector<OutageWindow> windows, double instability_factor);

  OutageMode mode_at(double t_s) const;
  double instability_factor() const { return instability_factor_; }
  const std::vector<OutageWindow>& windows() const { return windows_; }

 private:
  std::vector<OutageWindow> windows_;  // sorted, non-overlapping
  double instability_factor_ = 0.3;
};

// Pure serialization delay in ms.
double serialization_ms(double payload_bytes, const LinkSpec& link);

// Serialization plus one uniform latency draw. Assumes the link is available.
double transmission_time(double payload_bytes, const LinkSpec& link, RandomStream& rng);

double transmission_energy(double payload_bytes, const LinkSpec& link);

bool is_available(const LinkSpec& link, const OutageState& outage, double t_s, RandomStream& rng);

struct Traversal {
  bool ok = false;
  double ms = 0.0;  // time spent, including retry backoff
  int attempts = 0;
};

// One hop with the retry policy applied: a failed availability draw waits
// `backoff_ms` and tries again, up to `max_retries` times. A deterministic
// InternetDown uplink is never retried.
Traversal try_traverse(double payload_bytes, const LinkSpec& link, const OutageState& outage,
                                      double t_s, const Calibration& calibration, RandomStream& rng);

// Throwing form of try_traverse.
Traversal traverse(double payload_bytes, const LinkSpec& link, const OutageState& outage, double t_s,
                   const Calibration& calibration, RandomStream& rng);

}  // namespace continuum
