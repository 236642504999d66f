#include "leolora/schedule_io.hpp"

#include <string>

#include "leolora/errors.hpp"

namespace leolora::io {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json schedule_to_json(std::span<const orbit::NodeSchedule> nodes, double horizon_s) {
  ordered_json doc;
  doc["horizon_s"] = horizon_s;
  ordered_json summary = ordered_json::array();
  ordered_json windows = ordered_json::array();
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    const auto& s = nodes[n];
    summary.push_back({{"node", n},
                       {"window_count", s.windows.size()},
                       {"t_sun", s.sun_ids},
                       {"t_eclipse", s.eclipse_ids}});
    for (const auto& w : s.windows) {
      windows.push_back({{"node", n},
                         {"window_id", w.window_id},
                         {"target", w.target},
                         {"start_s", w.start},
                         {"end_s", w.end},
                         {"phase", std::string(to_string(w.phase))}});
    }
  }
  doc["nodes"] = std::move(summary);
  doc["windows"] = std::move(windows);
  return doc;
}

std::vector<orbit::NodeSchedule> schedule_from_json(const json& doc, std::uint32_t node_count) {
  const json* records = nullptr;
  if (doc.is_array()) {
    records = &doc;
  } else if (doc.is_object() && doc.contains("windows") && doc["windows"].is_array()) {
    records = &doc["windows"];
  } else {
    throw ValidationError({"schedule: expected an array of windows or an object with a \"windows\" array"});
  }

  std::vector<std::string> issues;
  std::vector<std::vector<orbit::ForecastWindow>> per_node(node_count);
  for (std::size_t i = 0; i < records->size(); ++i) {
    const json& r = (*records)[i];
    const std::string path = "windows[" + std::to_string(i) + "]";
    if (!r.is_object()) {
      issues.push_back(path + ": expected an object");
      continue;
    }
    const std::size_t before = issues.size();
    auto num = [&](const char* key) -> double {
      auto it = r.find(key);
      if (it == r.end() || !it->is_number()) {
        issues.push_back(path + "." + key + ": missing or not a number");
        return 0.0;
      }
      return it->get<double>();
    };
    orbit::ForecastWindow w;
    std::uint32_t node = 0;
    if (auto it = r.find("node"); it != r.end()) {
      if (!it->is_number_integer() || it->get<std::int64_t>() < 0) {
        issues.push_back(path + ".node: expected a non-negative integer");
      } else if (it->get<std::uint64_t>() >= node_count) {
        issues.push_back(path + ".node: " + it->dump() + " is not below the node count " + std::to_string(node_count));
      } else {
        node = it->get<std::uint32_t>();
      }
    } else if (node_count != 1) {
      issues.push_back(path + ".node: required when the scenario has " + std::to_string(node_count) + " nodes");
    }
    w.start = num("start_s");
    w.end = num("end_s");
    if (auto it = r.find("target"); it != r.end() && it->is_string()) {
      w.target = it->get<std::string>();
    } else {
      issues.push_back(path + ".target: missing or not a string");
    }
    auto ph = r.find("phase");
    if (ph != r.end() && *ph == "sun") {
      w.phase = Phase::Sun;
    } else if (ph != r.end() && *ph == "eclipse") {
      w.phase = Phase::Eclipse;
    } else {
      issues.push_back(path + ".phase: expected \"sun\" or \"eclipse\"");
    }
    if (issues.size() == before) per_node[node].push_back(std::move(w));
  }

  std::vector<orbit::NodeSchedule> out;
  out.reserve(node_count);
  for (std::uint32_t n = 0; n < node_count; ++n) {
    for (const auto& msg : orbit::check_windows(per_node[n])) {
      issues.push_back("node " + std::to_string(n) + ": " + msg);
    }
    out.push_back(orbit::make_node_schedule(std::move(per_node[n])));
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return out;
}

}  // namespace leolora::io
