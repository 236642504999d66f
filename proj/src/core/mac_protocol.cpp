#include "leolora/mac_protocol.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "leolora/errors.hpp"

namespace leolora::mac {

void MacConfig::validate() const {
  if (!(beta >= 0.0 && beta <= 1.0)) throw ConfigError("beta must lie in [0, 1]");
  if (!(w_dif >= 0.0) || !(w_energy >= 0.0)) throw ConfigError("objective weights must be >= 0");
  if (!(w_dif + w_energy > 0.0)) throw ConfigError("w_dif + w_energy must be > 0");
  if (max_attempts < 1) throw ConfigError("max_attempts must be >= 1");
  if (!(slot_budget_s > 0.0)) throw ConfigError("slot_budget_s must be > 0");
  if (!(dif_ref > 0.0)) throw ConfigError("dif_ref must be > 0");
  if (backoff_base_s && !(*backoff_base_s >= 0.0)) throw ConfigError("backoff_base_s must be >= 0");
  if (!(deadline_orbits > 0.0)) throw ConfigError("deadline_orbits must be > 0");
}

double battery_draw_estimate(const orbit::ForecastWindow& w, const energy::NodeEnergyState& e,
                             const SelectionContext& ctx) {
  if (w.phase == Phase::Eclipse) return e.ewma_estimate;
  const double surplus =
      std::max(0.0, std::min(ctx.harvest.e_g_sun, ctx.harvest.charge_rate_limit) - ctx.profile.e_sleep);
  return std::max(0.0, e.ewma_estimate - surplus);
}

WindowEvaluation evaluate_window(const orbit::ForecastWindow& w, const energy::NodeEnergyState& e,
                                 const SelectionContext& ctx) {
  WindowEvaluation ev;
  ev.estimate = energy::estimate_available_energy(e, w, ctx.harvest, ctx.profile, ctx.slot_s, ctx.now);
  if (w.phase == Phase::Sun) {
    ev.feasible = ev.estimate >= e.phi_min + e.e_critical;
    ev.failure = DropReason::InsufficientEnergySun;
  } else {
    ev.feasible = e.available() > e.phi_min;
    ev.failure = DropReason::BelowReserveEclipse;
  }
  if (!ev.feasible) return ev;

  ev.battery_draw = battery_draw_estimate(w, e, ctx);
  const double temperature = ctx.stress.thermal.temperature(w.phase);
  const battery::CycleStress idle{ctx.stress.dod_nominal, ctx.stress.c_rate, temperature};
  battery::CycleStress tx = idle;
  if (ctx.stress.effective_energy_j > 0.0) {
    tx.dod = std::min(1.0, idle.dod + ev.battery_draw / ctx.stress.effective_energy_j);
  }
  ev.dif = battery::degradation_impact_factor(ctx.degradation, tx, idle, ctx.mac.dif_ref);
  const double normalized_energy = e.phi_max > 0.0 ? ev.battery_draw / e.phi_max : 0.0;
  ev.objective = ctx.mac.w_dif * ev.dif + ctx.mac.w_energy * normalized_energy;
  return ev;
}

TxDecision select_forecast_window(std::span<const orbit::ForecastWindow> candidates,
                                  const energy::NodeEnergyState& e, const SelectionContext& ctx) {
  if (candidates.empty()) return Drop{DropReason::NoWindow};
  if (auto issues = orbit::check_windows(candidates); !issues.empty()) {
    throw ContractError("select_forecast_window: invalid schedule: " + issues.front());
  }

  std::vector<const orbit::ForecastWindow*> order;
  order.reserve(candidates.size());
  for (const auto& w : candidates) order.push_back(&w);
  std::sort(order.begin(), order.end(), [](auto* a, auto* b) {
    return std::tie(a->start, a->window_id, a->target) < std::tie(b->start, b->window_id, b->target);
  });

  const orbit::ForecastWindow* best = nullptr;
  double best_objective = 0.0;
  std::optional<DropReason> first_failure;
  for (const auto* w : order) {
    const auto ev = evaluate_window(*w, e, ctx);
    if (!ev.feasible) {
      if (!first_failure) first_failure = ev.failure;
      continue;
    }
    // Relative tolerance so near-equal objectives fall back to the start-time order.
    const double tol = 1e-12 * std::max(std::abs(ev.objective), std::abs(best_objective));
    if (!best || ev.objective < best_objective - tol) {
      best = w;
      best_objective = ev.objective;
    }
  }
  if (best) return Transmit{best->window_id, best_objective};
  return Drop{first_failure.value_or(DropReason::NoWindow)};
}

double resolve_backoff_base(const MacConfig& mac, const radio::RadioConfig& radio) {
  if (mac.backoff_base_s) return *mac.backoff_base_s;
  const double m = mac.max_attempts;
  const double airtime = m * radio::time_on_air(radio);
  // Expected sequence length: sum_k (k*b0/2 + ToA) = b0*m(m+1)/4 + m*ToA.
  const double b0 = (mac.slot_budget_s - airtime) / (m * (m + 1.0) / 4.0);
  if (!(b0 >= 0.0)) {
    throw ConfigError("slot budget is shorter than max_attempts back-to-back transmissions");
  }
  return b0;
}

std::vector<double> run_transmission_sequence(const TxDecision& decision, const orbit::ForecastWindow& window,
                                              double sequence_start, const radio::RadioConfig& radio,
                                              const MacConfig& mac, Rng& rng) {
  if (!std::holds_alternative<Transmit>(decision)) {
    throw ContractError("run_transmission_sequence: decision is a drop");
  }
  const double airtime = radio::time_on_air(radio);
  const double b0 = resolve_backoff_base(mac, radio);
  std::vector<double> starts;
  starts.reserve(static_cast<std::size_t>(mac.max_attempts));
  double previous_end = sequence_start;
  for (int k = 1; k <= mac.max_attempts; ++k) {
    const double start = previous_end + rng.uniform(0.0, k * b0);
    if (start + airtime > window.end) break;
    starts.push_back(start);
    previous_end = start + airtime;
  }
  return starts;
}

}  // namespace leolora::mac
