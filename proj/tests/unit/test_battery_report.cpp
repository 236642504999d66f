#include "doctest.h"
#include "leolora/battery_report.hpp"
#include "leolora/errors.hpp"

using namespace leolora;
using namespace leolora::mac;

TEST_CASE("report summary copies the ledger") {
  PeriodLedger l;
  l.start = 5400.0;
  l.end = 10800.0;
  l.slots = 135;
  l.transmissions = 3;
  l.energy_consumed = 1.2e6;
  l.sun_seconds = 3300.0;
  l.soc_time_integral = 0.8 * 5400.0;
  l.dod_observations = {0.4};
  const auto r = report_battery_summary(7, l, {}, 0.7, 0.4);
  CHECK(r.node_id == 7);
  CHECK(r.mean_soc == doctest::Approx(0.8));
  CHECK(r.mean_temperature_eclipse == 263.0);
  CHECK_NOTHROW(r.validate());
}

TEST_CASE("wire format round trip within quantisation") {
  NodeBatteryReport r;
  r.node_id = 12;
  r.period_start = 86400.0;
  r.period_end = 91800.0;
  r.n_slots = 135;
  r.n_transmissions = 4;
  r.energy_consumed = 1234567.5;
  r.mean_soc = 0.8123;
  r.sun_seconds = 3300.0;
  r.mean_temperature_sun = 303.0;
  r.mean_temperature_eclipse = 263.15;
  r.c_rate = 0.7;
  r.dod_nominal = 0.4;
  for (int i = 0; i < 9; ++i) r.dod_observations.push_back(0.1 * i);
  const auto bytes = encode_report(r);
  CHECK(bytes.size() == kMaxReportBytes);
  const auto d = decode_report(bytes);
  CHECK(d.node_id == 12);
  CHECK(d.period_start == 86400.0);
  CHECK(d.period_end == 91800.0);
  CHECK(d.n_transmissions == 4);
  CHECK(d.energy_consumed == doctest::Approx(r.energy_consumed).epsilon(1e-7));
  CHECK(d.mean_soc == doctest::Approx(r.mean_soc).epsilon(1e-4));
  CHECK(d.mean_temperature_eclipse == doctest::Approx(263.15));
  REQUIRE(d.dod_observations.size() == 9);
  CHECK(d.dod_observations[5] == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("wire format limits") {
  NodeBatteryReport r;
  r.period_end = 1.0;
  r.dod_observations.assign(10, 0.1);
  CHECK_THROWS_AS(encode_report(r), ContractError);
  r.dod_observations.clear();
  auto bytes = encode_report(r);
  CHECK(bytes.size() == 33);
  bytes.pop_back();
  CHECK_THROWS_AS(decode_report(bytes), ContractError);
  r.node_id = 70000;
  CHECK_THROWS_AS(encode_report(r), ContractError);
}

TEST_CASE("report invariants") {
  NodeBatteryReport r;
  r.period_start = 10.0;
  r.period_end = 10.0;
  CHECK_THROWS_AS(r.validate(), ContractError);
  r.period_end = 20.0;
  r.dod_observations = {1.5};
  CHECK_THROWS_AS(r.validate(), ContractError);
  r.dod_observations = {0.5};
  r.energy_consumed = -1.0;
  CHECK_THROWS_AS(r.validate(), ContractError);
}
