#include <doctest.h>

#include "continuum/network.hpp"

using namespace continuum;

namespace {

LinkSpec link(LinkTier tier, double mbps, double lat_ms, double reliability = 1.0, double wh_per_gb = 0.6) {
  return LinkSpec{tier, mbps, lat_ms, lat_ms, reliability, wh_per_gb};
}

OutageState full_day(OutageMode mode) { return OutageState({{0.0, 86'400.0, mode}}, 0.3); }

}  // namespace

TEST_CASE("transmission time is serialization plus the latency draw") {
  auto rng = RandomStream::derive(1, {2});
  CHECK(transmission_time(5e6, link(LinkTier::Uplink, 100, 0), rng) == doctest::Approx(400.0));
  CHECK(transmission_time(0, link(LinkTier::Uplink, 100, 5), rng) == doctest::Approx(5.0));
  CHECK(transmission_time(2e6, link(LinkTier::Uplink, 10, 50), rng) == doctest::Approx(1650.0));
}

TEST_CASE("latency draws stay inside the configured range") {
  auto rng = RandomStream::derive(3, {4});
  const LinkSpec l{LinkTier::Uplink, 100, 5, 50, 1.0, 0.6};
  for (int i = 0; i < 10'000; ++i) {
    const double t = transmission_time(0, l, rng);
    REQUIRE(t >= 5.0);
    REQUIRE(t <= 50.0);
  }
}

TEST_CASE("transmission time is monotone in payload for a fixed draw") {
  const LinkSpec l{LinkTier::Uplink, 100, 5, 50, 1.0, 0.6};
  double prev = -1.0;
  for (double bytes = 0; bytes <= 1e7; bytes += 2.5e5) {
    auto rng = RandomStream::derive(5, {6});
    const double t = transmission_time(bytes, l, rng);
    CHECK(t >= prev);
    prev = t;
  }
}

TEST_CASE("transmission energy follows the per-GB tariff") {
  const auto up = link(LinkTier::Uplink, 100, 0, 1.0, 0.6);
  CHECK(transmission_energy(1e9, up) == doctest::Approx(0.6));
  CHECK(transmission_energy(0, up) == 0.0);
  CHECK(transmission_energy(86'400 * 5e6, up) == doctest::Approx(259.2));
}

TEST_CASE("transmission energy is additive in payload") {
  auto rng = RandomStream::derive(8, {});
  const auto mesh = link(LinkTier::LocalMesh, 1000, 1, 1.0, 0.01);
  for (int i = 0; i < 1000; ++i) {
    const double a = rng.uniform(0, 1e8), b = rng.uniform(0, 1e8);
    CHECK(transmission_energy(a + b, mesh) == doctest::Approx(transmission_energy(a, mesh) + transmission_energy(b, mesh)));
  }
}

TEST_CASE("internet outage cuts only the uplink") {
  auto rng = RandomStream::derive(9, {});
  const auto down = full_day(OutageMode::InternetDown);
  CHECK_FALSE(is_available(link(LinkTier::Uplink, 100, 5), down, 100.0, rng));
  CHECK(is_available(link(LinkTier::LocalMesh, 1000, 1), down, 100.0, rng));
  CHECK(is_available(link(LinkTier::LocalNetwork, 100, 1), down, 100.0, rng));
}

TEST_CASE("availability under normal mode follows link reliability") {
  auto rng = RandomStream::derive(10, {});
  const OutageState normal;
  const auto l = link(LinkTier::Uplink, 10, 30, 0.8);
  int up = 0;
  const int n = 1'000'000;
  for (int i = 0; i < n; ++i) up += is_available(l, normal, 0.0, rng) ? 1 : 0;
  CHECK(std::abs(static_cast<double>(up) / n - 0.8) < 0.002);
}

TEST_CASE("unstable mode scales availability by the instability factor") {
  auto rng = RandomStream::derive(11, {});
  const auto unstable = full_day(OutageMode::InternetUnstable);
  const auto l = link(LinkTier::Uplink, 100, 5);
  int up = 0;
  const int n = 200'000;
  for (int i = 0; i < n; ++i) up += is_available(l, unstable, 10.0, rng) ? 1 : 0;
  CHECK(static_cast<double>(up) / n == doctest::Approx(0.3).epsilon(0.02));
}

TEST_CASE("outage state reports the mode of each window") {
  const OutageState s({{100.0, 200.0, OutageMode::InternetDown}, {300.0, 400.0, OutageMode::InternetUnstable}}, 0.3);
  CHECK(s.mode_at(50.0) == OutageMode::Normal);
  CHECK(s.mode_at(150.0) == OutageMode::InternetDown);
  CHECK(s.mode_at(200.0) == OutageMode::Normal);
  CHECK(s.mode_at(350.0) == OutageMode::InternetUnstable);
}

TEST_CASE("traversal of a dead uplink fails and the throwing form raises") {
  auto rng = RandomStream::derive(12, {});
  const auto down = full_day(OutageMode::InternetDown);
  const Calibration cal;
  const auto l = link(LinkTier::Uplink, 100, 5);
  const Traversal tr = try_traverse(1000, l, down, 10.0, cal, rng);
  CHECK_FALSE(tr.ok);
  CHECK_THROWS_AS(traverse(1000, l, down, 10.0, cal, rng), LinkUnavailable);
}

TEST_CASE("a failed attempt is retried once after the backoff") {
  const Calibration cal;
  const auto l = link(LinkTier::Uplink, 100, 5, 0.5);
  const OutageState normal;
  bool saw_retry = false;
  for (std::uint64_t s = 0; s < 200 && !saw_retry; ++s) {
    auto rng = RandomStream::derive(s, {});
    const auto tr = try_traverse(0, l, normal, 0.0, cal, rng);
    CHECK(tr.attempts <= 1 + cal.max_retries);
    if (tr.ok && tr.attempts == 2) {
      saw_retry = true;
      CHECK(tr.ms == doctest::Approx(cal.retry_backoff_ms + 5.0));
    }
  }
  CHECK(saw_retry);
}
