#pragma once

// Li-ion capacity-fade model: Arrhenius-scaled calendar and cycle aging, their
// linear sum, and the nonlinear SEI-film fade applied on top of it. Every
// function here is pure.

#include <string>
#include <vector>

#include "leolora/types.hpp"

namespace leolora::battery {

inline constexpr double kGasConstant = 8.314;  // J/(mol*K)

struct DegradationParams {
  double k1 = 5.5e-3;   ///< calendar calibration constant (per day)
  double k2 = 2.0;      ///< cycle calibration constant (per cycle)
  double activation_energy = 35000.0;  ///< Ea, J/mol
  double gas_constant = kGasConstant;
  double soc_exponent = 1.3;      ///< b
  double c_rate_exponent = 1.3;   ///< c
  double dod_exponent = 1.2;      ///< d
  double alpha_sei = 0.0;         ///< share of capacity lost to SEI growth
  double k_sei = 1.0;             ///< SEI film formation constant

  /// Throws ConfigError naming the first violated invariant.
  void validate() const;
};

struct ThermalProfile {
  double sun_k = 303.0;
  double eclipse_k = 263.0;

  double temperature(Phase p) const noexcept { return p == Phase::Sun ? sun_k : eclipse_k; }
  void validate() const;
  /// Non-fatal findings, e.g. a temperature outside the 253-313 K operating range.
  std::vector<std::string> warnings() const;
};

struct CycleStress {
  double dod = 0.0;
  double c_rate = 0.0;       ///< current / rated capacity
  double temperature = 0.0;  ///< K
};

struct BatteryState {
  double soc = 1.0;
  double capacity_rated_ah = 25.0;
  double voltage_nominal = 28.0;
  double fade_fraction = 0.0;
  double d_linear = 0.0;
  double cycles_completed = 0.0;
  double calendar_days = 0.0;
  // Components of d_linear, kept so runs can report cycle-aging cost separately.
  double calendar_loss = 0.0;
  double cycle_loss = 0.0;

  double effective_capacity_ah() const noexcept { return capacity_rated_ah * (1.0 - fade_fraction); }
  /// Stored-energy capacity in joules at the current fade.
  double effective_energy_j() const noexcept {
    return voltage_nominal * effective_capacity_ah() * kSecondsPerHour;
  }
};

/// exp(-ea / (R * T)).
double arrhenius_factor(double ea, double temperature_k, double gas_constant = kGasConstant);

double calendar_aging(const DegradationParams& p, double temperature_k, double soc, double t_days);

double cycle_aging(const DegradationParams& p, const CycleStress& stress, double n_cycles);

double linear_degradation(double dc_cal, double dc_cycle);

/// 1 - a*exp(-k*D) - (1-a)*exp(-D). Zero at D = 0, tends to 1.
double sei_capacity_fade(const DegradationParams& p, double d_linear);

/// Incremental single-cycle fade of transmitting versus idling, normalised by
/// dif_ref and clamped to [0, 1].
double degradation_impact_factor(const DegradationParams& p, const CycleStress& stress_if_tx,
                                 const CycleStress& stress_if_idle, double dif_ref);

}  // namespace leolora::battery
