#include <doctest.h>

#include <cmath>
#include <sstream>

#include "continuum/workload.hpp"
#include "test_support.hpp"

using namespace continuum;

namespace {

std::map<TaskClassId, double> frequencies(const std::map<TaskClassId, double>& mixture, int draws) {
  auto rng = RandomStream::derive(7, {11});
  std::map<TaskClassId, double> f;
  for (int i = 0; i < draws; ++i) f[classify_task(mixture, rng)] += 1.0;
  for (auto& [cls, v] : f) v /= draws;
  return f;
}

std::uint64_t count_tasks(const ScenarioConfig& cfg, std::uint64_t seed, double from_s, double to_s) {
  TaskStream stream(cfg, seed);
  std::uint64_t n = 0;
  while (auto t = stream.next()) {
    if (t->created_at >= from_s && t->created_at < to_s) ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("exponential interarrival mean is 1/rate") {
  auto rng = RandomStream::derive(42, {1});
  double sum = 0.0;
  const int n = 1'000'000;
  for (int i = 0; i < n; ++i) sum += sample_interarrival(0.1, rng);
  CHECK(sum / n == doctest::Approx(10.0).epsilon(0.01));
}

TEST_CASE("non-positive rate is rejected") {
  auto rng = RandomStream::derive(42, {1});
  CHECK_THROWS_AS(sample_interarrival(0.0, rng), NonPositiveRate);
  CHECK_THROWS_AS(sample_interarrival(-1.0, rng), NonPositiveRate);
}

TEST_CASE("sensor and drone mixtures are reproduced by classify_task") {
  const auto sensor = frequencies(test::sensor().task_mixture, 1'000'000);
  CHECK(std::abs(sensor.at(TaskClassId::Normal) - 0.95) < 0.002);
  CHECK(std::abs(sensor.at(TaskClassId::Anomaly) - 0.04) < 0.002);
  CHECK(std::abs(sensor.at(TaskClassId::Critical) - 0.01) < 0.002);

  const auto drone = frequencies(test::drone().task_mixture, 1'000'000);
  CHECK(std::abs(drone.at(TaskClassId::Simple) - 0.80) < 0.002);
  CHECK(std::abs(drone.at(TaskClassId::Complex) - 0.15) < 0.002);
  CHECK(std::abs(drone.at(TaskClassId::CloudOnly) - 0.05) < 0.002);
}

TEST_CASE("degenerate mixture always yields its class") {
  const auto f = frequencies({{TaskClassId::Simple, 1.0}}, 10'000);
  CHECK(f.size() == 1);
  CHECK(f.at(TaskClassId::Simple) == 1.0);
}

TEST_CASE("unnormalized mixture is rejected") {
  auto rng = RandomStream::derive(1, {});
  CHECK_THROWS_AS(classify_task({{TaskClassId::Simple, 0.5}}, rng), ConfigError);
}

TEST_CASE("drone day produces about 86,400 tasks") {
  const auto tasks = generate_stream(test::drone(), 42);
  CHECK(std::abs(static_cast<double>(tasks.size()) - 86'400.0) < 3.0 * std::sqrt(86'400.0));
  for (std::size_t i = 1; i < tasks.size(); ++i) {
    REQUIRE(tasks[i - 1].created_at <= tasks[i].created_at);
    REQUIRE(tasks[i].id == tasks[i - 1].id + 1);
  }
}

TEST_CASE("sensor day produces about 4.32 million readings") {
  const double n = static_cast<double>(count_tasks(test::sensor(), 42, 0.0, 86'400.0));
  CHECK(std::abs(n - 4'320'000.0) < 3.0 * std::sqrt(4'320'000.0));
}

TEST_CASE("worker vital signs are periodic at 1 Hz") {
  const auto cfg = test::safety();
  TaskStream stream(cfg, 3);
  std::map<std::size_t, std::vector<double>> vitals;
  while (auto t = stream.next()) {
    if (t->task_class == TaskClassId::VitalSign) vitals[t->origin].push_back(t->created_at);
  }
  REQUIRE(vitals.size() == 25);
  for (const auto& [dev, times] : vitals) {
    CHECK(times.size() == doctest::Approx(86'400).epsilon(0.001));
    for (std::size_t i = 1; i < times.size(); ++i) REQUIRE(times[i] - times[i - 1] == doctest::Approx(1.0));
  }
}

TEST_CASE("same seed gives identical streams, different seeds differ") {
  const auto cfg = test::drone();
  std::ostringstream a, b, c;
  write_workload_csv(cfg, 9, a);
  write_workload_csv(cfg, 9, b);
  write_workload_csv(cfg, 10, c);
  CHECK(a.str() == b.str());
  CHECK(a.str() != c.str());
  CHECK(a.str().rfind("task_id,origin,class,payload_bytes,created_at_s\n", 0) == 0);
}

TEST_CASE("halves of the day have statistically equal counts") {
  const auto cfg = test::drone();
  const double first = static_cast<double>(count_tasks(cfg, 5, 0.0, 43'200.0));
  const double second = static_cast<double>(count_tasks(cfg, 5, 43'200.0, 86'400.0));
  CHECK(std::abs(first - second) < 5.0 * std::sqrt(first + second));
}

TEST_CASE("generated class frequencies match the mixture within 3 sigma") {
  const auto cfg = test::drone();
  const auto tasks = generate_stream(cfg, 77);
  std::map<TaskClassId, double> counts;
  for (const auto& t : tasks) counts[t.task_class] += 1.0;
  const double n = static_cast<double>(tasks.size());
  for (const auto& [cls, p] : cfg.task_mixture) {
    CAPTURE(to_string(cls));
    CHECK(std::abs(counts[cls] - n * p) < 3.0 * std::sqrt(n * p * (1.0 - p)));
  }
}

TEST_CASE("adding a device leaves other devices' draws untouched") {
  const auto base = test::drone();
  auto extended = base;
  auto extra = base.devices.front();
  extra.id = "drone-extra";
  extended.devices.push_back(extra);

  auto origin_times = [](const ScenarioConfig& cfg, std::size_t origin) {
    std::vector<std::pair<double, TaskClassId>> out;
    for (const auto& t : generate_stream(cfg, 42)) {
      if (t.origin == origin) out.emplace_back(t.created_at, t.task_class);
    }
    return out;
  };
  CHECK(origin_times(base, 0) == origin_times(extended, 0));
  CHECK(origin_times(base, 9) == origin_times(extended, 9));
}

TEST_CASE("sensor payloads are uniform on [100, 1000] bytes") {
  const auto cfg = test::sensor();
  TaskStream stream(cfg, 1);
  double lo = 1e9, hi = 0, sum = 0;
  int n = 0;
  while (n < 200'000) {
    auto t = stream.next();
    REQUIRE(t.has_value());
    lo = std::min(lo, t->payload_bytes);
    hi = std::max(hi, t->payload_bytes);
    sum += t->payload_bytes;
    ++n;
  }
  CHECK(lo >= 100.0);
  CHECK(hi <= 1000.0);
  CHECK(sum / n == doctest::Approx(550.0).epsilon(0.01));
}
