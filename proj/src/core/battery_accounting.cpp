#include "leolora/battery_accounting.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "leolora/errors.hpp"
#include "leolora/types.hpp"

namespace leolora::sim {

battery::BatteryState step_battery_per_orbit(battery::BatteryState s, const battery::DegradationParams& params,
                                             const battery::ThermalProfile& thermal, const OrbitLedger& ledger) {
  const double eclipse_seconds = std::max(0.0, ledger.duration_s - ledger.sun_seconds);
  const double soc = std::clamp(ledger.mean_soc, 0.0, 1.0);
  double cycles = 0.0;
  if (ledger.dod_nominal > 0.0 && ledger.discharged_j > 0.0) {
    cycles = ledger.discharged_j / (ledger.dod_nominal * s.effective_energy_j());
  }
  const double calendar =
      battery::calendar_aging(params, thermal.sun_k, soc, ledger.sun_seconds / kSecondsPerDay) +
      battery::calendar_aging(params, thermal.eclipse_k, soc, eclipse_seconds / kSecondsPerDay);
  const double cycle =
      battery::cycle_aging(params, {ledger.dod_nominal, ledger.c_rate, thermal.eclipse_k}, cycles);

  s.cycles_completed += cycles;
  s.calendar_days += ledger.duration_s / kSecondsPerDay;
  s.calendar_loss += calendar;
  s.cycle_loss += cycle;
  s.d_linear = battery::linear_degradation(s.calendar_loss, s.cycle_loss);
  s.fade_fraction = battery::sei_capacity_fade(params, s.d_linear);
  return s;
}

std::vector<NodeAssessment> gateway_compute_fleet_degradation(std::span<const mac::NodeBatteryReport> reports,
                                                              const battery::DegradationParams& params) {
  std::map<std::uint32_t, std::vector<const mac::NodeBatteryReport*>> by_node;
  for (const auto& r : reports) {
    r.validate();
    by_node[r.node_id].push_back(&r);
  }

  std::vector<NodeAssessment> out;
  out.reserve(by_node.size());
  for (auto& [node, list] : by_node) {
    std::sort(list.begin(), list.end(), [](auto* a, auto* b) { return a->period_start < b->period_start; });
    for (std::size_t i = 1; i < list.size(); ++i) {
      if (list[i]->period_start < list[i - 1]->period_end) {
        throw ValidationError({"node " + std::to_string(node) + ": report periods [" +
                               std::to_string(list[i - 1]->period_start) + ", " +
                               std::to_string(list[i - 1]->period_end) + ") and [" +
                               std::to_string(list[i]->period_start) + ", " +
                               std::to_string(list[i]->period_end) + ") overlap"});
      }
    }

    NodeAssessment a;
    a.node_id = node;
    a.reports = list.size();
    for (const auto* r : list) {
      const double length = r->period_end - r->period_start;
      const double eclipse_seconds = std::max(0.0, length - r->sun_seconds);
      double dod_sum = 0.0;
      for (double d : r->dod_observations) dod_sum += d;
      const double cycles = r->dod_nominal > 0.0 ? dod_sum / r->dod_nominal : 0.0;

      a.calendar_days += length / kSecondsPerDay;
      a.cycles += cycles;
      a.calendar_loss +=
          battery::calendar_aging(params, r->mean_temperature_sun, r->mean_soc, r->sun_seconds / kSecondsPerDay) +
          battery::calendar_aging(params, r->mean_temperature_eclipse, r->mean_soc,
                                  eclipse_seconds / kSecondsPerDay);
      a.cycle_loss +=
          battery::cycle_aging(params, {r->dod_nominal, r->c_rate, r->mean_temperature_eclipse}, cycles);
    }
    a.d_linear = battery::linear_degradation(a.calendar_loss, a.cycle_loss);
    a.fade_fraction = battery::sei_capacity_fade(params, a.d_linear);
    out.push_back(a);
  }
  return out;
}

}  // namespace leolora::sim
