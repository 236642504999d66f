#pragma once

// Forecast-window schedules as JSON, in a form the scenario loader can read
// back as a schedule override.

#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"
#include "leolora/orbit_schedule.hpp"

namespace leolora::io {

/// {"horizon_s", "nodes": [{node, t_sun, t_eclipse, window_count}], "windows": [...]}.
nlohmann::ordered_json schedule_to_json(std::span<const orbit::NodeSchedule> nodes, double horizon_s);

/// Accepts the document produced above, or a bare array of window records.
/// Every malformed record is reported in one ValidationError.
std::vector<orbit::NodeSchedule> schedule_from_json(const nlohmann::json& doc, std::uint32_t node_count);

}  // namespace leolora::io
