#pragma once

// Per-period battery usage summary a node uplinks to its gateway, and the
// accumulator the node fills slot by slot to produce it.
//
// Wire format (little-endian, fixed order, at most 51 bytes):
//
//   offset size field
//   0      2    node_id                    u16
//   2      4    period_start_s             u32, rounded to whole seconds
//   6      4    period_length_s            f32
//   10     2    n_slots                    u16
//   12     2    n_transmissions            u16
//   14     4    energy_consumed_j          f32
//   18     2    mean_soc                   u16, fraction * 65535
//   20     4    sun_seconds                f32
//   24     2    mean_temperature_sun       u16, centikelvin
//   26     2    mean_temperature_eclipse   u16, centikelvin
//   28     2    c_rate                     u16, milli-C
//   30     2    dod_nominal                u16, fraction * 65535
//   32     1    n_dod                      u8, <= 9
//   33     2*n  dod_observations           u16 each, fraction * 65535

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "leolora/battery_model.hpp"

namespace leolora::mac {

inline constexpr std::size_t kMaxReportBytes = 51;
inline constexpr std::size_t kMaxDodObservations = 9;

struct PeriodLedger {
  double start = 0.0;
  double end = 0.0;
  std::uint32_t slots = 0;
  std::uint32_t transmissions = 0;
  double energy_consumed = 0.0;   ///< sum of x*E_cons + (1-x)*E_sleep
  double energy_harvested = 0.0;  ///< sum of y*E_g
  double discharged = 0.0;        ///< battery-supplied energy counted toward cycles
  double sun_seconds = 0.0;
  double soc_time_integral = 0.0;
  std::vector<double> dod_observations;

  double duration() const noexcept { return end - start; }
  double mean_soc() const noexcept;
};

struct NodeBatteryReport {
  std::uint32_t node_id = 0;
  double period_start = 0.0;
  double period_end = 0.0;
  std::uint32_t n_slots = 0;
  std::uint32_t n_transmissions = 0;
  double energy_consumed = 0.0;
  std::vector<double> dod_observations;
  double mean_temperature_sun = 0.0;
  double mean_temperature_eclipse = 0.0;
  double mean_soc = 0.0;
  double sun_seconds = 0.0;
  double c_rate = 0.0;
  double dod_nominal = 0.0;

  void validate() const;
};

NodeBatteryReport report_battery_summary(std::uint32_t node_id, const PeriodLedger& ledger,
                                         const battery::ThermalProfile& thermal, double c_rate,
                                         double dod_nominal);

std::vector<std::uint8_t> encode_report(const NodeBatteryReport& report);
NodeBatteryReport decode_report(std::span<const std::uint8_t> bytes);

}  // namespace leolora::mac
