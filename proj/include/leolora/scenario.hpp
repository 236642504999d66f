#pragma once

// Scenario configuration: JSON ingestion with path-qualified diagnostics, and
// the derived per-slot energy quantities the engine runs on.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "leolora/battery_model.hpp"
#include "leolora/energy_model.hpp"
#include "leolora/mac_protocol.hpp"
#include "leolora/orbit_schedule.hpp"
#include "leolora/radio_airtime.hpp"

namespace leolora {

enum class Protocol : std::uint8_t { BatteryAware, Aloha };

std::string_view to_string(Protocol p) noexcept;

enum class TrafficModel : std::uint8_t { Poisson, Periodic };

struct TrafficConfig {
  TrafficModel model = TrafficModel::Poisson;
  double packets_per_hour = 2.0;
};

struct BatteryConfig {
  battery::DegradationParams degradation;
  battery::ThermalProfile thermal;
  double capacity_ah = 25.0;
  double voltage_v = 28.0;
  double soc_initial = 0.9;
  double dod = 0.4;
  double c_rate = 0.7;
  double soc_window_low = 0.75;
  double soc_window_high = 0.9;

  double rated_energy_j() const noexcept { return voltage_v * capacity_ah * kSecondsPerHour; }
};

struct EnergyConfig {
  std::optional<double> e_sleep_j;
  std::optional<double> e_g_sun_j;
  std::optional<double> e_critical_j;
  std::optional<double> charge_rate_limit_j;
  double harvest_margin = 1.02;
  double psi_min_fraction = 0.3;
};

struct SimConfig {
  double duration_days = 365.0;
  double slot_s = 40.0;
  std::uint32_t nodes = 4;
  TrafficConfig traffic;
  std::uint64_t seed = 1;
  double visibility_step_s = 1.0;
  double metrics_interval_s = kSecondsPerDay;
  Protocol protocol = Protocol::BatteryAware;

  double horizon_s() const noexcept { return duration_days * kSecondsPerDay; }
};

struct ScheduleOverride {
  std::filesystem::path source;
  std::vector<orbit::NodeSchedule> nodes;
};

struct ScenarioConfig {
  orbit::OrbitConfig orbit;
  std::vector<orbit::GroundStation> stations;
  BatteryConfig battery;
  EnergyConfig energy;
  radio::RadioConfig radio;
  mac::MacConfig mac;
  SimConfig sim;
  std::optional<ScheduleOverride> schedule_override;
  std::vector<std::string> warnings;
};

/// Quantities derived from the configuration once, before a run.
struct ResolvedEnergy {
  energy::HarvestModel harvest;
  energy::PowerProfile profile;  ///< nominal: e_cons_tx = e_sleep + full sequence
  double phi_initial = 0.0;
  double phi_max = 0.0;
  double phi_min = 0.0;
  double e_critical = 0.0;
  double attempt_energy = 0.0;   ///< one transmission attempt, J
  double sequence_energy = 0.0;  ///< max_attempts attempts, J
};

ResolvedEnergy resolve_energy(const ScenarioConfig& config);

/// Parses and validates; throws ValidationError listing every problem found.
/// Relative paths (schedule_file) resolve against `base_dir`.
ScenarioConfig parse_scenario(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});

ScenarioConfig load_scenario_file(const std::filesystem::path& path);

}  // namespace leolora
