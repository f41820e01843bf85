#include <algorithm>

#include "continuum/engine.hpp"

namespace continuum {

ServerQueue::ServerQueue(std::size_t device, int servers) : device_(device), busy_until_(std::max(servers, 1), 0.0) {}

ServerQueue::Admission ServerQueue::admit(double arrival_s, double service_s) {
  auto it = std::min_element(busy_until_.begin(), busy_until_.end());
  Admission a;
  a.server = static_cast<int>(it - busy_until_.begin());
  a.start_s = std::max(arrival_s, *it);
  a.wait_s = a.start_s - arrival_s;
  a.finish_s = a.start_s + service_s;
  *it = a.finish_s;
  busy_s_ += service_s;
  ++admitted_;
  return a;
}

double ServerQueue::earliest_free() const { return *std::min_element(busy_until_.begin(), busy_until_.end()); }

}  // namespace continuum
