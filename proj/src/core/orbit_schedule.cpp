#include "leolora/orbit_schedule.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>

#include "leolora/errors.hpp"

namespace leolora::orbit {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

// Cumulative sunlit seconds from the cycle anchor up to shifted time tau.
double cumulative_sun(const OrbitConfig& c, double tau) {
  const double orbits = std::floor(tau / c.period_s);
  const double into = tau - orbits * c.period_s;
  return orbits * c.sun_duration_s + std::min(std::max(into, 0.0), c.sun_duration_s);
}

}  // namespace

void OrbitConfig::validate() const {
  if (!(period_s > 0.0)) throw ConfigError("orbit period must be > 0");
  if (!(sun_duration_s > 0.0 && sun_duration_s <= period_s)) {
    throw ConfigError("sun duration must satisfy 0 < sun_duration <= period");
  }
  if (!(altitude_m > 0.0)) throw ConfigError("altitude must be > 0");
  if (!(inclination_rad >= 0.0 && inclination_rad <= kPi)) {
    throw ConfigError("inclination must lie in [0, pi]");
  }
}

double OrbitConfig::anchor_s() const noexcept { return phase_offset_rad / kTwoPi * period_s; }

OrbitConfig node_orbit(const OrbitConfig& base, std::size_t index, std::size_t count) {
  OrbitConfig out = base;
  if (count > 0) {
    out.phase_offset_rad = base.phase_offset_rad + kTwoPi * static_cast<double>(index) /
                                                       static_cast<double>(count);
  }
  return out;
}

void GroundStation::validate() const {
  if (!(std::abs(latitude_rad) <= kPi / 2.0)) throw ConfigError("station latitude must lie in [-pi/2, pi/2]");
  if (!(min_elevation_rad >= 0.0 && min_elevation_rad < kPi / 2.0)) {
    throw ConfigError("station minimum elevation must lie in [0, pi/2)");
  }
}

Phase phase_at(const OrbitConfig& c, double t) {
  double tau = std::fmod(t + c.anchor_s(), c.period_s);
  if (tau < 0.0) tau += c.period_s;
  return tau < c.sun_duration_s ? Phase::Sun : Phase::Eclipse;
}

double sun_seconds_between(const OrbitConfig& c, double t0, double t1) {
  if (t1 <= t0) return 0.0;
  const double a = c.anchor_s();
  return cumulative_sun(c, t1 + a) - cumulative_sun(c, t0 + a);
}

std::vector<PhaseInterval> phase_timeline(const OrbitConfig& c, double t0, double t1) {
  std::vector<PhaseInterval> out;
  if (t1 <= t0) return out;
  const double a = c.anchor_s();
  double k = std::floor((t0 + a) / c.period_s);
  while (true) {
    const double orbit_start = k * c.period_s - a;
    const double sunset = orbit_start + c.sun_duration_s;
    const double next = orbit_start + c.period_s;
    const double s0 = std::max(orbit_start, t0);
    const double s1 = std::min(sunset, t1);
    if (s1 > s0) out.push_back({s0, s1, Phase::Sun});
    const double e0 = std::max(sunset, t0);
    const double e1 = std::min(next, t1);
    if (e1 > e0) out.push_back({e0, e1, Phase::Eclipse});
    if (next >= t1) break;
    k += 1.0;
  }
  return out;
}

double next_sunrise(const OrbitConfig& c, double t) {
  const double a = c.anchor_s();
  double r = (std::floor((t + a) / c.period_s) + 1.0) * c.period_s - a;
  while (r <= t) r += c.period_s;
  return r;
}

GroundPoint subsatellite_point(const OrbitConfig& c, double t) {
  const double u = kTwoPi * t / c.period_s + c.phase_offset_rad;
  const double lat = std::asin(std::sin(c.inclination_rad) * std::sin(u));
  double lon = c.raan_rad + std::atan2(std::cos(c.inclination_rad) * std::sin(u), std::cos(u)) -
               kEarthRotationRadPerS * t;
  lon = std::remainder(lon, kTwoPi);
  if (lon <= -kPi) lon += kTwoPi;
  return {lat, lon};
}

double central_angle(const GroundPoint& a, const GroundPoint& b) {
  const double dlat = std::sin((b.latitude_rad - a.latitude_rad) / 2.0);
  const double dlon = std::sin((b.longitude_rad - a.longitude_rad) / 2.0);
  const double h = dlat * dlat + std::cos(a.latitude_rad) * std::cos(b.latitude_rad) * dlon * dlon;
  return 2.0 * std::asin(std::min(1.0, std::sqrt(h)));
}

double max_central_angle(double altitude_m, double min_elevation_rad) {
  const double ratio = kEarthRadiusM / (kEarthRadiusM + altitude_m);
  return std::acos(ratio * std::cos(min_elevation_rad)) - min_elevation_rad;
}

std::vector<ForecastWindow> visibility_windows(const OrbitConfig& c, const GroundStation& station,
                                               double t0, double t1, double step) {
  if (!(t1 > t0)) throw std::domain_error("visibility_windows: t1 must be greater than t0");
  if (!(step > 0.0)) throw std::domain_error("visibility_windows: step must be > 0");

  const double lambda_max = max_central_angle(c.altitude_m, station.min_elevation_rad);
  const GroundPoint site{station.latitude_rad, station.longitude_rad};
  // Upper bound on how fast the subsatellite point moves over the sphere.
  const double max_rate = kTwoPi / c.period_s + kEarthRotationRadPerS;
  const auto last_index = static_cast<std::int64_t>(std::floor((t1 - t0) / step + 1e-9));

  std::vector<ForecastWindow> out;
  std::int64_t run_first = -1;
  std::int64_t run_last = -1;
  auto flush = [&] {
    if (run_first < 0) return;
    const double first = t0 + static_cast<double>(run_first) * step;
    const double last = t0 + static_cast<double>(run_last) * step;
    run_first = run_last = -1;
    if (last - first < 2.0 * step) return;  // numerical sliver
    ForecastWindow w;
    w.start = first;
    w.end = std::min(last, first + kMaxWindowS);
    w.phase = phase_at(c, 0.5 * (w.start + w.end));
    w.target = station.id;
    out.push_back(std::move(w));
  };

  std::int64_t k = 0;
  while (k <= last_index) {
    const double t = t0 + static_cast<double>(k) * step;
    const double angle = central_angle(subsatellite_point(c, t), site);
    if (angle <= lambda_max) {
      if (run_first < 0) run_first = k;
      run_last = k;
      ++k;
      continue;
    }
    flush();
    // No sample can become visible before the margin is eaten up at max_rate.
    const double margin_steps = (angle - lambda_max) / (max_rate * step) * (1.0 - 1e-9);
    k += std::max<std::int64_t>(1, static_cast<std::int64_t>(margin_steps));
  }
  flush();
  return out;
}

NodeSchedule make_node_schedule(std::vector<ForecastWindow> windows) {
  std::sort(windows.begin(), windows.end(), [](const ForecastWindow& a, const ForecastWindow& b) {
    return std::tie(a.start, a.target, a.end) < std::tie(b.start, b.target, b.end);
  });
  NodeSchedule s;
  s.windows = std::move(windows);
  for (std::uint32_t i = 0; i < s.windows.size(); ++i) {
    s.windows[i].window_id = i;
    (s.windows[i].phase == Phase::Sun ? s.sun_ids : s.eclipse_ids).push_back(i);
  }
  return s;
}

NodeSchedule build_schedule(const OrbitConfig& c, std::span<const GroundStation> stations, double horizon,
                            double step) {
  if (!(horizon > 0.0)) throw std::domain_error("build_schedule: horizon must be > 0");
  std::vector<ForecastWindow> all;
  for (const auto& station : stations) {
    auto ws = visibility_windows(c, station, 0.0, horizon, step);
    all.insert(all.end(), std::make_move_iterator(ws.begin()), std::make_move_iterator(ws.end()));
  }
  return make_node_schedule(std::move(all));
}

std::vector<std::string> check_windows(std::span<const ForecastWindow> windows) {
  std::vector<std::string> issues;
  std::map<std::string, std::vector<const ForecastWindow*>> by_target;
  for (const auto& w : windows) {
    const std::string tag = "window " + std::to_string(w.window_id) + " (" + w.target + ")";
    if (!(w.start < w.end)) issues.push_back(tag + ": start must be before end");
    if (w.end - w.start > kMaxWindowS + 1e-9) issues.push_back(tag + ": longer than 1800 s");
    by_target[w.target].push_back(&w);
  }
  for (auto& [target, list] : by_target) {
    std::sort(list.begin(), list.end(), [](auto* a, auto* b) { return a->start < b->start; });
    for (std::size_t i = 1; i < list.size(); ++i) {
      if (list[i]->start < list[i - 1]->end) {
        issues.push_back("windows " + std::to_string(list[i - 1]->window_id) + " and " +
                         std::to_string(list[i]->window_id) + " for target " + target + " overlap");
      }
    }
  }
  return issues;
}

}  // namespace leolora::orbit
