#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <queue>
#include <stdexcept>
#include <vector>

#include "continuum/model.hpp"
#include "continuum/random.hpp"

namespace continuum {

struct Task {
  std::uint64_t id = 0;          // global creation order within a run
  std::size_t origin = 0;        // index into ScenarioConfig::devices
  std::uint64_t origin_seq = 0;  // per-origin creation counter
  TaskClassId task_class = TaskClassId::Simple;
  double payload_bytes = 0.0;
  double created_at = 0.0;  // simulated s
  std::optional<double> completed_at;
  ProcessedAt processed_at = ProcessedAt::Failed;
};

class NonPositiveRate : public std::invalid_argument {
 public:
  explicit NonPositiveRate(double rate);
};

double sample_interarrival(double rate_per_s, RandomStream& rng);

// Throws ConfigError(MixtureNotNormalized) for a mixture that does not sum to 1.
TaskClassId classify_task(const std::map<TaskClassId, double>& mixture, RandomStream& rng);

// Lazily merges every device stream of a scenario into one sequence ordered by
// created_at. Equal timestamps are broken by device then stream order.
class TaskStream {
 public:
  TaskStream(const ScenarioConfig& config, std::uint64_t seed);
  std::optional<Task> next();
  // Creation time of the task next() would return, or nullopt at the end.
  std::optional<double> peek_time() const;

 private:
  struct Source {
    std::size_t device;
    const StreamSpec* spec;
    RandomStream arrivals;
    RandomStream attributes;
    double next_time;
    double phase = 0.0;        // periodic sources only
    std::uint64_t emitted = 0;
  };
  struct Pending {
    double time;
    std::size_t source;
    bool operator>(const Pending& o) const { return time != o.time ? time > o.time : source > o.source; }
  };

  const ScenarioConfig& config_;
  std::uint64_t seed_;
  std::vector<Source> sources_;
  std::vector<std::uint64_t> device_hash_;
  std::vector<std::uint64_t> device_seq_;
  std::priority_queue<Pending, std::vector<Pending>, std::greater<>> heap_;
  std::uint64_t next_id_ = 0;
};

std::vector<Task> generate_stream(const ScenarioConfig& config, std::uint64_t seed);

// Stream used for everything the engine draws for one task.
RandomStream task_rng(std::uint64_t seed, const ScenarioConfig& config, const Task& task);

// task_id,origin,class,payload_bytes,created_at_s
void write_workload_csv(const ScenarioConfig& config, std::uint64_t seed, std::ostream& out);

}  // namespace continuum
