#include "continuum/workload.hpp"

#include <cmath>
#include <ostream>

#include <fmt/format.h>

namespace continuum {

NonPositiveRate::NonPositiveRate(double rate)
    : std::invalid_argument(fmt::format("NonPositiveRate: arrival rate {} must be > 0", rate)) {}

double sample_interarrival(double rate_per_s, RandomStream& rng) {
  if (!(rate_per_s > 0.0) || !std::isfinite(rate_per_s)) throw NonPositiveRate(rate_per_s);
  return rng.exponential(rate_per_s);
}

TaskClassId classify_task(const std::map<TaskClassId, double>& mixture, RandomStream& rng) {
  double sum = 0.0;
  for (const auto& [cls, p] : mixture) sum += p;
  if (mixture.empty() || std::abs(sum - 1.0) > kMixtureTolerance) {
    throw ConfigError(ConfigErrorKind::MixtureNotNormalized, "mixture", fmt::format("probabilities sum to {}", sum));
  }
  const double u = rng.uniform();
  double acc = 0.0;
  TaskClassId last = mixture.begin()->first;
  for (const auto& [cls, p] : mixture) {
    if (p <= 0.0) continue;
    acc += p;
    last = cls;
    if (u < acc) return cls;
  }
  return last;  // rounding slack at the top of the interval
}

TaskStream::TaskStream(const ScenarioConfig& config, std::uint64_t seed) : config_(config), seed_(seed) {
  device_hash_.reserve(config.devices.size());
  for (const auto& d : config.devices) device_hash_.push_back(fnv1a(d.id));
  device_seq_.assign(config.devices.size(), 0);

  for (std::size_t d = 0; d < config.devices.size(); ++d) {
    const auto& streams = config.devices[d].streams;
    for (std::size_t k = 0; k < streams.size(); ++k) {
      Source src{d, &streams[k],
                 RandomStream::derive(seed, {device_hash_[d], k, static_cast<std::uint64_t>(StreamPurpose::Arrivals)}),
                 RandomStream::derive(seed, {device_hash_[d], k, static_cast<std::uint64_t>(StreamPurpose::TaskAttributes)}),
                 0.0};
      if (src.spec->process == ArrivalProcess::Periodic) {
        src.phase = src.arrivals.uniform(0.0, 1.0 / src.spec->rate_per_s);
        src.next_time = src.phase;
      } else {
        src.next_time = sample_interarrival(src.spec->rate_per_s, src.arrivals);
      }
      sources_.push_back(src);
    }
  }
  for (std::size_t i = 0; i < sources_.size(); ++i) {
    if (sources_[i].next_time < config_.duration_s) heap_.push({sources_[i].next_time, i});
  }
}

std::optional<double> TaskStream::peek_time() const {
  if (heap_.empty()) return std::nullopt;
  return heap_.top().time;
}

std::optional<Task> TaskStream::next() {
  if (heap_.empty()) return std::nullopt;
  const Pending top = heap_.top();
  heap_.pop();
  Source& src = sources_[top.source];

  Task task;
  task.id = next_id_++;
  task.origin = src.device;
  task.origin_seq = device_seq_[src.device]++;
  task.created_at = top.time;
  task.task_class = classify_task(src.spec->mixture, src.attributes);
  const TaskClass& tc = config_.task_class(task.task_class);
  task.payload_bytes = tc.payload_max_bytes ? src.attributes.uniform(tc.payload_bytes, *tc.payload_max_bytes)
                                            : tc.payload_bytes;

  ++src.emitted;
  if (src.spec->process == ArrivalProcess::Periodic) {
    src.next_time = src.phase + static_cast<double>(src.emitted) / src.spec->rate_per_s;
  } else {
    src.next_time += sample_interarrival(src.spec->rate_per_s, src.arrivals);
  }
  if (src.next_time < config_.duration_s) heap_.push({src.next_time, top.source});
  return task;
}

std::vector<Task> generate_stream(const ScenarioConfig& config, std::uint64_t seed) {
  std::vector<Task> tasks;
  TaskStream stream(config, seed);
  while (auto t = stream.next()) tasks.push_back(*t);
  return tasks;
}

RandomStream task_rng(std::uint64_t seed, const ScenarioConfig& config, const Task& task) {
  return RandomStream::derive(seed, {fnv1a(config.devices[task.origin].id), task.origin_seq,
                                     static_cast<std::uint64_t>(StreamPurpose::TaskRouting)});
}

void write_workload_csv(const ScenarioConfig& config, std::uint64_t seed, std::ostream& out) {
  out << "task_id,origin,class,payload_bytes,created_at_s\n";
  TaskStream stream(config, seed);
  while (auto t = stream.next()) {
    out << fmt::format("{},{},{},{},{}\n", t->id, config.devices[t->origin].id, to_string(t->task_class),
                       t->payload_bytes, t->created_at);
  }
}

}  // namespace continuum
