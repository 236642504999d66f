#pragma once

// Bulk degradation bookkeeping: the node-side per-orbit battery step and the
// gateway's fleet assessment built from uplinked reports. Both accrue calendar
// aging per phase (sun seconds at the sun temperature, the rest at the eclipse
// temperature) and cycle aging at the eclipse temperature.

#include <cstdint>
#include <span>
#include <vector>

#include "leolora/battery_model.hpp"
#include "leolora/battery_report.hpp"

namespace leolora::sim {

/// What one orbit (or partial orbit) did to the pack.
struct OrbitLedger {
  double duration_s = 0.0;
  double sun_seconds = 0.0;
  double mean_soc = 0.0;
  double discharged_j = 0.0;
  double c_rate = 0.0;
  double dod_nominal = 0.0;
};

battery::BatteryState step_battery_per_orbit(battery::BatteryState state, const battery::DegradationParams& params,
                                             const battery::ThermalProfile& thermal, const OrbitLedger& ledger);

struct NodeAssessment {
  std::uint32_t node_id = 0;
  std::size_t reports = 0;
  double calendar_days = 0.0;
  double cycles = 0.0;
  double calendar_loss = 0.0;
  double cycle_loss = 0.0;
  double d_linear = 0.0;
  double fade_fraction = 0.0;
};

/// One assessment per node, ordered by node id. Overlapping report periods
/// for the same node are rejected with a ValidationError.
std::vector<NodeAssessment> gateway_compute_fleet_degradation(std::span<const mac::NodeBatteryReport> reports,
                                                              const battery::DegradationParams& params);

}  // namespace leolora::sim
