#include <cmath>

#include "doctest.h"
#include "leolora/battery_accounting.hpp"
#include "leolora/errors.hpp"
#include "oracles.hpp"

using namespace leolora;
using namespace leolora::sim;

namespace {

battery::DegradationParams params() {
  battery::DegradationParams p;
  p.alpha_sei = 0.0575;
  p.k_sei = 121.0;
  return p;
}

mac::NodeBatteryReport report(std::uint32_t node, double start, double end, std::vector<double> dods) {
  mac::NodeBatteryReport r;
  r.node_id = node;
  r.period_start = start;
  r.period_end = end;
  r.mean_temperature_sun = 303.0;
  r.mean_temperature_eclipse = 263.0;
  r.mean_soc = 0.8;
  r.sun_seconds = 0.6 * (end - start);
  r.c_rate = 0.7;
  r.dod_nominal = 0.4;
  r.dod_observations = std::move(dods);
  return r;
}

}  // namespace

TEST_CASE("orbit without discharge only ages the calendar") {
  battery::BatteryState s;
  const auto next = step_battery_per_orbit(s, params(), {}, {5400.0, 3300.0, 0.8, 0.0, 0.7, 0.4});
  CHECK(next.cycles_completed == 0.0);
  CHECK(next.cycle_loss == 0.0);
  CHECK(next.calendar_days == doctest::Approx(5400.0 / 86400.0));
  CHECK(next.calendar_loss > 0.0);
  CHECK(next.fade_fraction == doctest::Approx(battery::sei_capacity_fade(params(), next.calendar_loss)));
}

TEST_CASE("a year of nominal orbits composes the component oracles") {
  battery::BatteryState s;
  auto p = params();
  for (int k = 0; k < 5840; ++k) {
    s = step_battery_per_orbit(s, p, {}, {5400.0, 3300.0, 0.825, 0.4 * s.effective_energy_j(), 12.5, 0.4});
  }
  CHECK(s.cycles_completed == doctest::Approx(5840.0).epsilon(1e-12));
  CHECK(s.calendar_loss == doctest::Approx(9.515337352768020e-7).epsilon(1e-9));
  CHECK(s.cycle_loss == doctest::Approx(1.1594948874812666e-2).epsilon(1e-9));
  CHECK(s.fade_fraction == doctest::Approx(0.05423063201818390).epsilon(1e-9));
}

TEST_CASE("gateway on an empty report list") {
  CHECK(gateway_compute_fleet_degradation({}, params()).empty());
}

TEST_CASE("gateway single report without cycles is calendar-only") {
  const std::vector<mac::NodeBatteryReport> rs{report(3, 0.0, 5400.0, {})};
  const auto a = gateway_compute_fleet_degradation(rs, params());
  REQUIRE(a.size() == 1);
  CHECK(a[0].node_id == 3);
  CHECK(a[0].cycle_loss == 0.0);
  const double expected = battery::calendar_aging(params(), 303.0, 0.8, 3240.0 / 86400.0) +
                          battery::calendar_aging(params(), 263.0, 0.8, 2160.0 / 86400.0);
  CHECK(a[0].calendar_loss == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("gateway rejects overlapping periods for a node") {
  const std::vector<mac::NodeBatteryReport> rs{report(1, 0.0, 5400.0, {0.4}), report(1, 5000.0, 9000.0, {0.4}),
                                               report(2, 5000.0, 9000.0, {0.4})};
  CHECK_THROWS_AS(gateway_compute_fleet_degradation(rs, params()), ValidationError);
}

TEST_CASE("gateway agrees with node-side stepping on randomized reports") {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    auto p = params();
    p.activation_energy = rng.uniform(35000.0, 40000.0);
    std::vector<mac::NodeBatteryReport> rs;
    battery::ThermalProfile th{rng.uniform(290.0, 313.0), rng.uniform(253.0, 275.0)};
    battery::BatteryState node;
    double t = 0.0;
    const int n = 1 + static_cast<int>(rng.below(40));
    for (int k = 0; k < n; ++k) {
      auto r = report(0, t, t + rng.uniform(100.0, 6000.0), {});
      t = r.period_end;
      r.mean_temperature_sun = th.sun_k;
      r.mean_temperature_eclipse = th.eclipse_k;
      r.mean_soc = rng.uniform(0.3, 1.0);
      r.sun_seconds = rng.uniform(0.0, r.period_end - r.period_start);
      r.c_rate = rng.uniform(0.1, 2.0);
      r.dod_nominal = rng.uniform(0.1, 0.8);
      const double dod = rng.uniform(0.0, 0.9);
      r.dod_observations.push_back(dod);
      node = step_battery_per_orbit(node, p, th,
                                    {r.period_end - r.period_start, r.sun_seconds, r.mean_soc,
                                     dod * node.effective_energy_j(), r.c_rate, r.dod_nominal});
      rs.push_back(r);
    }
    const auto a = gateway_compute_fleet_degradation(rs, p);
    REQUIRE(a.size() == 1);
    CHECK(oracle::close_rel(a[0].d_linear, node.d_linear, 1e-12L));
    CHECK(oracle::close_rel(a[0].fade_fraction, node.fade_fraction, 1e-12L));
  }
}
