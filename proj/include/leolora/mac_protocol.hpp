#pragma once

// Battery-lifespan-aware forecast-window selection and the retransmission
// sequence that follows a Transmit decision.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "leolora/battery_model.hpp"
#include "leolora/energy_model.hpp"
#include "leolora/orbit_schedule.hpp"
#include "leolora/radio_airtime.hpp"
#include "leolora/types.hpp"

namespace leolora::mac {

struct MacConfig {
  double beta = 0.3;       ///< EWMA precedence weight
  double w_dif = 1.0;
  double w_energy = 1.0;
  int max_attempts = 8;
  double slot_budget_s = 40.0;
  double dif_ref = 1e-9;
  /// b0 of the backoff bound B_k = k * b0; derived from slot_budget_s when unset.
  std::optional<double> backoff_base_s;
  double deadline_orbits = 2.0;

  void validate() const;
};

enum class DropReason : std::uint8_t { InsufficientEnergySun, BelowReserveEclipse, NoWindow };

constexpr std::string_view to_string(DropReason r) noexcept {
  switch (r) {
    case DropReason::InsufficientEnergySun: return "insufficient_energy_sun";
    case DropReason::BelowReserveEclipse: return "below_reserve_eclipse";
    case DropReason::NoWindow: return "no_window";
  }
  return "unknown";
}

struct Transmit {
  std::uint32_t window_id;
  double objective;
};
struct Drop {
  DropReason reason;
};
using TxDecision = std::variant<Transmit, Drop>;

/// Battery operating point used to turn a transmission into cycle stress.
struct StressContext {
  double dod_nominal = 0.4;
  double c_rate = 0.7;
  battery::ThermalProfile thermal;
  double effective_energy_j = 0.0;
};

struct SelectionContext {
  double now = 0.0;
  double slot_s = 40.0;
  energy::HarvestModel harvest;
  energy::PowerProfile profile;
  MacConfig mac;
  battery::DegradationParams degradation;
  StressContext stress;
};

struct WindowEvaluation {
  bool feasible = false;
  double estimate = 0.0;       ///< projected available energy over the window
  double battery_draw = 0.0;   ///< E(t): transmit energy the battery must supply
  double dif = 0.0;
  double objective = 0.0;      ///< J(t), meaningful only when feasible
  DropReason failure = DropReason::NoWindow;
};

/// Battery-side transmit energy for a window: the EWMA estimate, less the
/// per-slot harvest surplus in sunlight.
double battery_draw_estimate(const orbit::ForecastWindow& window, const energy::NodeEnergyState& energy,
                             const SelectionContext& ctx);

WindowEvaluation evaluate_window(const orbit::ForecastWindow& window, const energy::NodeEnergyState& energy,
                                 const SelectionContext& ctx);

/// Global argmin of J over feasible candidates, earliest start on ties.
/// Candidates may arrive in any order; overlapping windows for one target are
/// a ContractError.
TxDecision select_forecast_window(std::span<const orbit::ForecastWindow> candidates,
                                  const energy::NodeEnergyState& energy, const SelectionContext& ctx);

double resolve_backoff_base(const MacConfig& mac, const radio::RadioConfig& radio);

/// Attempt start times for one packet, beginning at `sequence_start`. Attempt k
/// waits U[0, k*b0] after the previous attempt ends; attempts that would not
/// finish inside the window are cut.
std::vector<double> run_transmission_sequence(const TxDecision& decision, const orbit::ForecastWindow& window,
                                              double sequence_start, const radio::RadioConfig& radio,
                                              const MacConfig& mac, Rng& rng);

}  // namespace leolora::mac
