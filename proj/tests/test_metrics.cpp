#include <doctest.h>

#include <cmath>

#include "continuum/metrics.hpp"
#include "test_support.hpp"

using namespace continuum;

namespace {

RunMetrics empty_run(const ScenarioConfig& cfg, Architecture a, double duration_s) {
  RunMetrics m;
  m.architecture = a;
  m.duration_s = duration_s;
  for (const auto& d : cfg.devices) {
    m.profile_busy_s.emplace_back(d.power_profile.size(), 0.0);
    m.profile_tasks.emplace_back(d.power_profile.size(), 0);
  }
  return m;
}

void check_closure(const EnergyBreakdown& e, const CostBreakdown& c) {
  double proc = 0.0, trans = 0.0;
  for (const auto& [cls, wh] : e.per_device_class) proc += wh;
  for (const auto& [tier, wh] : e.per_tier) trans += wh;
  CHECK(proc == e.e_processing);
  CHECK(trans == e.e_transmission);
  CHECK(e.e_processing + e.e_transmission == e.total);
  CHECK(c.c_compute + c.c_transfer + c.c_infrastructure + c.c_operations == c.total);
}

ScenarioConfig doubled_payloads(ScenarioConfig cfg) {
  for (auto& [id, tc] : cfg.task_classes) {
    tc.payload_bytes *= 2.0;
    if (tc.payload_max_bytes) *tc.payload_max_bytes *= 2.0;
    tc.result_bytes *= 2.0;
  }
  return cfg;
}

}  // namespace

TEST_CASE("analytic latency of each architecture") {
  LatencyBreakdown b;
  b.t_proc_local = 10.0;
  b.t_collab = 1234.0;
  CHECK(analytic_latency({Architecture::DfcAi, 0.0, 0.0}, b) == 10.0);

  LatencyBreakdown g;
  g.t_d_to_g = 3;
  g.t_proc_gateway = 5;
  g.t_g_to_d = 3;
  g.t_net_up = 1000;
  CHECK(analytic_latency({Architecture::GatewayEdge, 0.0, 0.0}, g) == doctest::Approx(11.0));

  LatencyBreakdown c;
  c.t_net_up = 400;
  c.t_queue = 30;
  c.t_proc = 0.5;
  c.t_net_down = 54.5;
  CHECK(analytic_latency({Architecture::CloudCentric, 0.0, 0.0}, c) == doctest::Approx(485.0));
}

TEST_CASE("DFC analytic latency is non-decreasing in beta and T_collab") {
  LatencyBreakdown b;
  b.t_proc_local = 8.0;
  double prev = -1.0;
  for (double beta = 0.0; beta <= 1.0; beta += 0.05) {
    b.t_collab = 500.0;
    const double v = analytic_latency({Architecture::DfcAi, 0.0, beta}, b);
    CHECK(v >= prev);
    prev = v;
  }
  prev = -1.0;
  for (double collab = 0.0; collab <= 2000.0; collab += 100.0) {
    b.t_collab = collab;
    const double v = analytic_latency({Architecture::DfcAi, 0.0, 0.2}, b);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("microservice energy") {
  std::vector<MicroservicePowerProfile> one{{"svc", 0.1, 2.0, 0.25, {}, {}}};
  CHECK(energy_microservices(one, 3600.0) == doctest::Approx(0.575));
  one[0].rho = 0.0;
  CHECK(energy_microservices(one, 7200.0) == doctest::Approx(0.2));
  CHECK(energy_microservices({}, 3600.0) == 0.0);
  one[0].rho = 1.5;
  CHECK_THROWS_AS(energy_microservices(one, 3600.0), UtilizationOutOfRange);
}

TEST_CASE("an empty run costs idle power only") {
  const auto cfg = test::drone();
  const auto m = empty_run(cfg, Architecture::DfcAi, kSecondsPerDay);
  const auto e = account_energy(m, cfg);
  CHECK(e.e_transmission == 0.0);
  double idle_w = 0.0;
  for (const auto& d : cfg.devices) {
    if (!d.present(Architecture::DfcAi)) continue;
    for (const auto& p : d.power_profile) {
      if (p.deployed(Architecture::DfcAi)) idle_w += p.p_idle_w * d.servers;
    }
  }
  CHECK(e.e_processing == doctest::Approx(idle_w * 24.0));
}

TEST_CASE("one fully billed cloud GPU hour costs $3.50") {
  const auto cfg = test::drone();
  auto m = empty_run(cfg, Architecture::CloudCentric, 3600.0);
  m.profile_busy_s[cfg.cloud_index()][0] = 3600.0;
  const auto c = account_cost(m, cfg, 3600.0);
  CHECK(c.c_compute == doctest::Approx(3.50));
  CHECK(c.c_transfer == 0.0);
  CHECK(c.total == doctest::Approx(3.50));
}

TEST_CASE("drone energy and cost land near the reference figures") {
  const auto cfg = test::drone();
  const auto cloud = run_simulation(cfg, cfg.params(Architecture::CloudCentric), 42);
  const auto dfc = run_simulation(cfg, cfg.params(Architecture::DfcAi), 42);
  CHECK(std::abs(account_energy(cloud, cfg).total - 355.7) <= 0.15 * 355.7);
  CHECK(std::abs(account_energy(dfc, cfg).total - 67.7) <= 0.15 * 67.7);
  CHECK(std::abs(account_cost(cloud, cfg).total - 14'442.0) <= 0.20 * 14'442.0);
}

TEST_CASE("worker-safety DFC costs about two dollars a year") {
  const auto cfg = test::safety();
  const auto m = run_simulation(cfg, cfg.params(Architecture::DfcAi), 42);
  CHECK(std::abs(account_cost(m, cfg).total - 2.0) <= 0.20 * 2.0);
}

TEST_CASE("breakdowns close exactly") {
  for (const auto& cfg : {test::drone(), test::safety()}) {
    for (Architecture a : kAllArchitectures) {
      CAPTURE(to_string(cfg.name));
      CAPTURE(to_string(a));
      const auto m = run_simulation(cfg, cfg.params(a), 3);
      check_closure(account_energy(m, cfg), account_cost(m, cfg));
    }
  }
}

TEST_CASE("DFC without cloud usage has zero compute cost") {
  auto cfg = test::safety();
  cfg.architectures[Architecture::DfcAi].beta = 0.0;
  const auto m = run_simulation(cfg, cfg.params(Architecture::DfcAi), 5);
  REQUIRE(m.location_counts[static_cast<std::size_t>(ProcessedAt::Cloud)] == 0);
  CHECK(account_cost(m, cfg).c_compute == 0.0);
}

TEST_CASE("doubling every payload doubles transmission energy only") {
  const auto cfg = test::drone();
  const auto big = doubled_payloads(cfg);
  for (Architecture a : kAllArchitectures) {
    CAPTURE(to_string(a));
    const auto e1 = account_energy(run_simulation(cfg, cfg.params(a), 8), cfg);
    const auto e2 = account_energy(run_simulation(big, big.params(a), 8), big);
    CHECK(e2.e_transmission == 2.0 * e1.e_transmission);
    CHECK(e2.e_processing == doctest::Approx(e1.e_processing).epsilon(1e-9));
  }
}

TEST_CASE("Erlang-C waits") {
  CHECK(erlang_c_wait(0.5, 1.0, 1) == doctest::Approx(1.0));
  CHECK(erlang_c_wait(1.0, 1.0, 2) == doctest::Approx(1.0 / 3.0));
  CHECK(erlang_c_wait(0.0, 1.0, 4) == 0.0);
}

TEST_CASE("analytic predictors track the simulation on the drone preset") {
  const auto cfg = test::drone();
  for (Architecture a : kAllArchitectures) {
    CAPTURE(to_string(a));
    const auto& p = cfg.params(a);
    const auto m = run_simulation(cfg, p, 42);
    const double predicted = analytic_latency(p, analytic_breakdown(cfg, p));
    CHECK(std::abs(predicted - m.mean_latency_ms()) <= 0.20 * m.mean_latency_ms());
    const double energy = account_energy(m, cfg).total;
    CHECK(std::abs(analytic_energy_wh_per_day(cfg, p) - energy) <= 0.10 * energy);
  }
}
