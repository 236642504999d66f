#include "leolora/degradation_curve.hpp"

#include <cmath>
#include <stdexcept>

#include "leolora/battery_accounting.hpp"
#include "leolora/text_format.hpp"

namespace leolora {

std::vector<CurvePoint> degradation_curve(const ScenarioConfig& c, double years, double resolution_days) {
  if (!(years >= 0.0) || !std::isfinite(years)) throw std::domain_error("years must be a finite value >= 0");
  if (!(resolution_days > 0.0)) throw std::domain_error("resolution must be > 0 days");

  const double period = c.orbit.period_s;
  const double soc = 0.5 * (c.battery.soc_window_low + c.battery.soc_window_high);
  battery::BatteryState state;
  state.soc = soc;
  state.capacity_rated_ah = c.battery.capacity_ah;
  state.voltage_nominal = c.battery.voltage_v;

  std::vector<CurvePoint> out;
  const auto rows = static_cast<std::uint64_t>(std::floor(years * 365.0 / resolution_days + 1e-9));
  std::uint64_t orbits_done = 0;
  for (std::uint64_t r = 1; r <= rows; ++r) {
    const double day = static_cast<double>(r) * resolution_days;
    const auto target = static_cast<std::uint64_t>(std::floor(day * kSecondsPerDay / period + 1e-9));
    for (; orbits_done < target; ++orbits_done) {
      const sim::OrbitLedger ledger{period, c.orbit.sun_duration_s, soc,
                                    c.battery.dod * state.effective_energy_j(), c.battery.c_rate, c.battery.dod};
      state = sim::step_battery_per_orbit(state, c.battery.degradation, c.battery.thermal, ledger);
    }
    out.push_back({day, state.d_linear, state.fade_fraction});
  }
  return out;
}

std::string curve_csv(const std::vector<CurvePoint>& points) {
  std::string out = "day,d_linear,fade_fraction\n";
  for (const auto& p : points) {
    out += format_double(p.day) + ',' + format_double(p.d_linear) + ',' + format_double(p.fade_fraction) + '\n';
  }
  return out;
}

}  // namespace leolora
