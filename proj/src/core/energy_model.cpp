#include "leolora/energy_model.hpp"

#include <algorithm>
#include <cmath>

#include "leolora/errors.hpp"

namespace leolora::energy {

void HarvestModel::validate() const {
  if (!(e_g_sun >= 0.0)) throw ConfigError("e_g_sun must be >= 0");
  if (!(charge_rate_limit >= 0.0)) throw ConfigError("charge_rate_limit must be >= 0");
}

double HarvestModel::for_slot(double sun_seconds, double slot_s) const noexcept {
  if (sun_seconds <= 0.0) return 0.0;
  return std::min(e_g_sun * (sun_seconds / slot_s), charge_rate_limit);
}

void PowerProfile::validate() const {
  if (!(e_sleep >= 0.0)) throw ConfigError("e_sleep must be >= 0");
  if (!(e_cons_tx > e_sleep)) throw ConfigError("e_cons_tx must exceed e_sleep");
}

void NodeEnergyState::validate() const {
  if (!(phi_min < phi_max)) throw ConfigError("phi_min must be below phi_max");
  if (!(phi >= 0.0 && phi <= phi_max)) throw ConfigError("phi must lie in [0, phi_max]");
  if (!(e_critical >= 0.0)) throw ConfigError("e_critical must be >= 0");
}

EnergyStepOutcome energy_step(NodeEnergyState& s, int x, int y, double e_g, const PowerProfile& profile,
                              Phase phase) {
  if ((x != 0 && x != 1) || (y != 0 && y != 1)) throw ContractError("energy_step: x and y must be 0 or 1");
  if (e_g < 0.0) throw ContractError("energy_step: harvest must be >= 0");
  if (phase == Phase::Eclipse && e_g > 0.0) throw ContractError("energy_step: harvest during eclipse");

  EnergyStepOutcome out;
  out.delta = y * e_g - x * profile.e_cons_tx - (1 - x) * profile.e_sleep;
  const double raw = s.phi + out.delta;
  double next = raw;
  if (raw < 0.0) {
    next = 0.0;
    out.brownout = true;
  } else if (raw > s.phi_max) {
    next = s.phi_max;
    out.overflow = true;
  }
  out.clamp_adjustment = next - raw;
  s.phi = next;
  s.x_history.push_back(static_cast<std::uint8_t>(x));
  s.y_history.push_back(static_cast<std::uint8_t>(y));
  return out;
}

double ewma_update(double beta, double e_cons_prev, double ewma_prev) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw ConfigError("ewma beta must lie in [0, 1]");
  return beta * e_cons_prev + (1.0 - beta) * ewma_prev;
}

double window_slot_count(const orbit::ForecastWindow& w, double slot_s, double now) {
  const double remaining = w.end - std::max(w.start, now);
  return remaining > 0.0 ? std::floor(remaining / slot_s + 1e-9) : 0.0;
}

double estimate_available_energy(const NodeEnergyState& s, const orbit::ForecastWindow& w,
                                 const HarvestModel& harvest, const PowerProfile& profile, double slot_s,
                                 double now) {
  const double slots = window_slot_count(w, slot_s, now);
  double estimate = s.available() - slots * profile.e_sleep;
  if (w.phase == Phase::Sun) estimate += slots * std::min(harvest.e_g_sun, harvest.charge_rate_limit);
  return std::min(estimate, s.phi_max);
}

}  // namespace leolora::energy
