#include <cmath>

#include "doctest.h"
#include "leolora/energy_model.hpp"
#include "leolora/errors.hpp"

using namespace leolora;
using namespace leolora::energy;

namespace {

NodeEnergyState state(double phi) {
  NodeEnergyState s;
  s.phi = phi;
  s.phi_max = 1000.0;
  s.phi_min = 300.0;
  s.e_critical = 200.0;
  return s;
}

}  // namespace

TEST_CASE("slot balance without clamping") {
  auto s = state(500.0);
  const PowerProfile p{30.0, 10.0};
  auto out = energy_step(s, 1, 1, 50.0, p, Phase::Sun);
  CHECK(out.delta == 20.0);
  CHECK(out.clamp_adjustment == 0.0);
  CHECK(s.phi == 520.0);
  out = energy_step(s, 0, 0, 0.0, p, Phase::Eclipse);
  CHECK(s.phi == 510.0);
  CHECK(s.x_history == std::vector<std::uint8_t>{1, 0});
  CHECK(s.y_history == std::vector<std::uint8_t>{1, 0});
}

TEST_CASE("slot balance clamps at both ends and reports the adjustment") {
  auto s = state(990.0);
  const PowerProfile p{30.0, 10.0};
  auto out = energy_step(s, 0, 1, 50.0, p, Phase::Sun);
  CHECK(out.overflow);
  CHECK(s.phi == 1000.0);
  CHECK(out.clamp_adjustment == doctest::Approx(-30.0));

  s = state(5.0);
  out = energy_step(s, 1, 0, 0.0, p, Phase::Eclipse);
  CHECK(out.brownout);
  CHECK(s.phi == 0.0);
  CHECK(out.clamp_adjustment == doctest::Approx(25.0));
}

TEST_CASE("slot balance contract violations") {
  auto s = state(500.0);
  const PowerProfile p{30.0, 10.0};
  CHECK_THROWS_AS(energy_step(s, 0, 1, 5.0, p, Phase::Eclipse), ContractError);
  CHECK_THROWS_AS(energy_step(s, 2, 0, 0.0, p, Phase::Sun), ContractError);
  CHECK_THROWS_AS(energy_step(s, 0, -1, 0.0, p, Phase::Sun), ContractError);
  CHECK(s.x_history.empty());
}

TEST_CASE("ledger telescopes over random slot sequences") {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    auto s = state(rng.uniform(0.0, 1000.0));
    const double phi0 = s.phi;
    double sum = 0.0;
    for (int t = 0; t < 500; ++t) {
      const bool sun = rng.uniform() < 0.6;
      const int x = rng.uniform() < 0.3 ? 1 : 0;
      const double e_sleep = rng.uniform(0.0, 40.0);
      const PowerProfile p{e_sleep + rng.uniform(1e-3, 40.0), e_sleep};
      const double e_g = sun ? rng.uniform(0.0, 90.0) : 0.0;
      const auto out = energy_step(s, x, sun ? 1 : 0, e_g, p, sun ? Phase::Sun : Phase::Eclipse);
      sum += out.delta + out.clamp_adjustment;
      CHECK(s.phi >= 0.0);
      CHECK(s.phi <= s.phi_max);
    }
    CHECK(std::abs(s.phi - (phi0 + sum)) <= 1e-9 * s.phi_max);
  }
}

TEST_CASE("EWMA update and geometric convergence") {
  CHECK(ewma_update(0.3, 10.0, 0.0) == doctest::Approx(3.0));
  CHECK(ewma_update(1.0, 10.0, 4.0) == 10.0);
  CHECK(ewma_update(0.0, 10.0, 4.0) == 4.0);
  CHECK_THROWS_AS(ewma_update(1.5, 1.0, 1.0), ConfigError);

  double e = 1.0;
  for (int t = 1; t <= 100; ++t) {
    e = ewma_update(0.3, 0.0, e);
    CHECK(e == doctest::Approx(std::pow(0.7, t)).epsilon(1e-12));
  }
}

TEST_CASE("harvest per slot") {
  HarvestModel h{100.0, 60.0};
  CHECK(h.for_slot(0.0, 40.0) == 0.0);
  CHECK(h.for_slot(10.0, 40.0) == doctest::Approx(25.0));
  CHECK(h.for_slot(40.0, 40.0) == 60.0);
  h.charge_rate_limit = -1.0;
  CHECK_THROWS_AS(h.validate(), ConfigError);
}

TEST_CASE("available-energy estimate") {
  auto s = state(500.0);
  s.reserved = 20.0;
  const HarvestModel h{50.0};
  const PowerProfile p{30.0, 10.0};
  const orbit::ForecastWindow sun{0, 100.0, 500.0, Phase::Sun, "gs"};
  const orbit::ForecastWindow ecl{1, 100.0, 500.0, Phase::Eclipse, "gs"};
  CHECK(window_slot_count(sun, 40.0, 0.0) == 10.0);
  CHECK(window_slot_count(sun, 40.0, 300.0) == 5.0);
  CHECK(window_slot_count(sun, 40.0, 600.0) == 0.0);
  CHECK(estimate_available_energy(s, sun, h, p, 40.0, 0.0) == doctest::Approx(480.0 + 10 * 40.0));
  CHECK(estimate_available_energy(s, ecl, h, p, 40.0, 0.0) == doctest::Approx(480.0 - 100.0));
  s.phi = 990.0;
  CHECK(estimate_available_energy(s, sun, h, p, 40.0, 0.0) == 1000.0);
}

TEST_CASE("power profile and state validation") {
  CHECK_THROWS_AS((PowerProfile{5.0, 5.0}.validate()), ConfigError);
  CHECK_NOTHROW((PowerProfile{6.0, 5.0}.validate()));
  auto s = state(500.0);
  s.phi_min = 2000.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
}
