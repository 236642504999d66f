#pragma once

// Sun/eclipse timeline and ground-station visibility windows for circular
// orbits on a spherical, uniformly rotating Earth.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "leolora/types.hpp"

namespace leolora::orbit {

inline constexpr double kEarthRadiusM = 6.371e6;
inline constexpr double kEarthRotationRadPerS = 7.2921159e-5;
inline constexpr double kMaxWindowS = 1800.0;

struct OrbitConfig {
  double period_s = 5400.0;
  double sun_duration_s = 3300.0;
  double altitude_m = 550e3;
  double inclination_rad = 53.0 * kPi / 180.0;
  double phase_offset_rad = 0.0;
  double raan_rad = 0.0;

  void validate() const;
  /// Time shift that maps simulation time onto the sun/eclipse cycle.
  double anchor_s() const noexcept;
};

/// Orbit of node `index` out of `count`, evenly spaced along the base plane.
OrbitConfig node_orbit(const OrbitConfig& base, std::size_t index, std::size_t count);

struct GroundStation {
  std::string id;
  double latitude_rad = 0.0;
  double longitude_rad = 0.0;
  double min_elevation_rad = 0.0;

  void validate() const;
};

struct GroundPoint {
  double latitude_rad;
  double longitude_rad;
};

struct ForecastWindow {
  std::uint32_t window_id = 0;
  double start = 0.0;
  double end = 0.0;
  Phase phase = Phase::Sun;
  std::string target;

  double duration() const noexcept { return end - start; }
  bool operator==(const ForecastWindow&) const = default;
};

struct PhaseInterval {
  double start;
  double end;
  Phase phase;
};

Phase phase_at(const OrbitConfig& config, double t);

/// Exact sun/eclipse intervals covering [t0, t1).
std::vector<PhaseInterval> phase_timeline(const OrbitConfig& config, double t0, double t1);

/// Seconds of sunlight inside [t0, t1), closed form.
double sun_seconds_between(const OrbitConfig& config, double t0, double t1);

/// Next time strictly after t at which the orbit enters sunlight.
double next_sunrise(const OrbitConfig& config, double t);

GroundPoint subsatellite_point(const OrbitConfig& config, double t);

double central_angle(const GroundPoint& a, const GroundPoint& b);

/// Largest Earth central angle at which a satellite at `altitude_m` is seen at
/// or above `min_elevation_rad`.
double max_central_angle(double altitude_m, double min_elevation_rad);

std::vector<ForecastWindow> visibility_windows(const OrbitConfig& config, const GroundStation& station,
                                               double t0, double t1, double step);

/// Ordered window set T for one node plus its phase partition.
struct NodeSchedule {
  std::vector<ForecastWindow> windows;      ///< sorted by (start, target), ids = position
  std::vector<std::uint32_t> sun_ids;       ///< T_sun
  std::vector<std::uint32_t> eclipse_ids;   ///< T_eclipse

  bool operator==(const NodeSchedule&) const = default;
};

/// Sorts, renumbers and partitions an arbitrary window list.
NodeSchedule make_node_schedule(std::vector<ForecastWindow> windows);

NodeSchedule build_schedule(const OrbitConfig& config, std::span<const GroundStation> stations,
                            double horizon, double step);

/// Checks start < end, the 30-minute cap and per-target disjointness. Returns
/// one message per violation.
std::vector<std::string> check_windows(std::span<const ForecastWindow> windows);

}  // namespace leolora::orbit
