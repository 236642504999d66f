#include "leolora/battery_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "leolora/errors.hpp"

namespace leolora::battery {

void DegradationParams::validate() const {
  if (!(k1 > 0.0)) throw ConfigError("k1 must be > 0");
  if (!(k2 > 0.0)) throw ConfigError("k2 must be > 0");
  if (!(activation_energy > 0.0)) throw ConfigError("activation energy must be > 0");
  if (gas_constant != kGasConstant) throw ConfigError("gas constant must be exactly 8.314");
  if (!(soc_exponent >= 0.0)) throw ConfigError("soc exponent b must be >= 0");
  if (!(c_rate_exponent >= 0.0)) throw ConfigError("c-rate exponent c must be >= 0");
  if (!(dod_exponent >= 0.0)) throw ConfigError("dod exponent d must be >= 0");
  if (!(alpha_sei >= 0.0 && alpha_sei <= 1.0)) throw ConfigError("alpha_sei must lie in [0, 1]");
  if (!(k_sei > 0.0)) throw ConfigError("k_sei must be > 0");
}

void ThermalProfile::validate() const {
  if (!(sun_k > 0.0) || !(eclipse_k > 0.0)) throw ConfigError("temperatures must be > 0 K");
}

std::vector<std::string> ThermalProfile::warnings() const {
  std::vector<std::string> out;
  auto check = [&](double t, const char* name) {
    if (t < 253.0 || t > 313.0) {
      out.push_back(std::string(name) + " temperature " + std::to_string(t) +
                    " K is outside the 253-313 K operating range");
    }
  };
  check(sun_k, "sun");
  check(eclipse_k, "eclipse");
  return out;
}

double arrhenius_factor(double ea, double temperature_k, double gas_constant) {
  if (!(temperature_k > 0.0)) throw std::domain_error("arrhenius_factor: temperature must be > 0 K");
  if (!(ea >= 0.0)) throw std::domain_error("arrhenius_factor: activation energy must be >= 0");
  return std::exp(-ea / (gas_constant * temperature_k));
}

double calendar_aging(const DegradationParams& p, double temperature_k, double soc, double t_days) {
  if (!(t_days >= 0.0)) throw std::domain_error("calendar_aging: elapsed days must be >= 0");
  if (!(soc >= 0.0 && soc <= 1.0)) throw std::domain_error("calendar_aging: soc must lie in [0, 1]");
  return p.k1 * arrhenius_factor(p.activation_energy, temperature_k, p.gas_constant) *
         std::pow(soc, p.soc_exponent) * t_days;
}

double cycle_aging(const DegradationParams& p, const CycleStress& s, double n_cycles) {
  if (!(n_cycles >= 0.0)) throw std::domain_error("cycle_aging: cycle count must be >= 0");
  if (!(s.dod >= 0.0 && s.dod <= 1.0)) throw std::domain_error("cycle_aging: dod must lie in [0, 1]");
  if (!(s.c_rate >= 0.0)) throw std::domain_error("cycle_aging: c-rate must be >= 0");
  if (n_cycles == 0.0 || s.dod == 0.0) return 0.0;
  return p.k2 * std::pow(s.dod, p.dod_exponent) * std::pow(s.c_rate, p.c_rate_exponent) *
         arrhenius_factor(p.activation_energy, s.temperature, p.gas_constant) * n_cycles;
}

double linear_degradation(double dc_cal, double dc_cycle) {
  if (!(dc_cal >= 0.0) || !(dc_cycle >= 0.0)) {
    throw std::domain_error("linear_degradation: components must be >= 0");
  }
  return dc_cal + dc_cycle;
}

double sei_capacity_fade(const DegradationParams& p, double d_linear) {
  if (!(d_linear >= 0.0)) throw std::domain_error("sei_capacity_fade: d_linear must be >= 0");
  // expm1 keeps the small-D regime accurate: fade = -a*expm1(-kD) - (1-a)*expm1(-D).
  const double fade = -p.alpha_sei * std::expm1(-p.k_sei * d_linear) -
                      (1.0 - p.alpha_sei) * std::expm1(-d_linear);
  return std::clamp(fade, 0.0, 1.0);
}

double degradation_impact_factor(const DegradationParams& p, const CycleStress& stress_if_tx,
                                 const CycleStress& stress_if_idle, double dif_ref) {
  if (!(dif_ref > 0.0)) throw ConfigError("dif_ref must be > 0");
  const double increment = cycle_aging(p, stress_if_tx, 1.0) - cycle_aging(p, stress_if_idle, 1.0);
  return std::clamp(increment / dif_ref, 0.0, 1.0);
}

}  // namespace leolora::battery
