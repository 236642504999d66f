#pragma once

// Per-slot stored-energy balance, solar harvest and the EWMA transmit-energy
// estimator.

#include <cstdint>
#include <limits>
#include <vector>

#include "leolora/orbit_schedule.hpp"
#include "leolora/types.hpp"

namespace leolora::energy {

struct HarvestModel {
  double e_g_sun = 0.0;  ///< J per full sunlit slot
  double charge_rate_limit = std::numeric_limits<double>::infinity();  ///< J per slot

  void validate() const;
  /// Harvest for a slot with `sun_seconds` of light out of `slot_s`. Zero in eclipse.
  double for_slot(double sun_seconds, double slot_s) const noexcept;
};

struct PowerProfile {
  double e_cons_tx = 0.0;  ///< J in a slot with a transmission
  double e_sleep = 0.0;    ///< J in a slot without one

  void validate() const;
};

struct NodeEnergyState {
  double phi = 0.0;           ///< stored energy, J
  double phi_max = 0.0;       ///< Psi_max
  double phi_min = 0.0;       ///< Psi_min
  double e_critical = 0.0;    ///< energy set aside for the eclipse
  double ewma_estimate = 0.0; ///< transmit-energy estimate, J
  double reserved = 0.0;      ///< provisional debits for selected, not yet sent, packets
  std::vector<std::uint8_t> x_history;
  std::vector<std::uint8_t> y_history;

  /// Psi as seen by the MAC: stored energy minus outstanding reservations.
  double available() const noexcept { return phi - reserved; }
  void validate() const;
};

struct EnergyStepOutcome {
  double delta = 0.0;             ///< unclamped y*E_g - x*E_cons - (1-x)*E_sleep
  double clamp_adjustment = 0.0;  ///< phi_after - (phi_before + delta); zero when unclamped
  bool brownout = false;          ///< clamped at 0
  bool overflow = false;          ///< clamped at phi_max
};

/// One application of the slot balance; mutates `state` and appends x, y to its
/// history. Throws ContractError for harvest in eclipse or non-binary x/y.
EnergyStepOutcome energy_step(NodeEnergyState& state, int x, int y, double e_g, const PowerProfile& profile,
                              Phase phase);

/// beta * e_cons_prev + (1 - beta) * ewma_prev.
double ewma_update(double beta, double e_cons_prev, double ewma_prev);

/// Energy the node expects to have over `window` starting from `now`, capped at
/// phi_max. Sun windows add harvest; both subtract projected sleep drain.
double estimate_available_energy(const NodeEnergyState& state, const orbit::ForecastWindow& window,
                                 const HarvestModel& harvest, const PowerProfile& profile, double slot_s,
                                 double now);

/// Whole slots left in `window` from `now`.
double window_slot_count(const orbit::ForecastWindow& window, double slot_s, double now);

}  // namespace leolora::energy
