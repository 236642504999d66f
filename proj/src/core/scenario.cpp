#include "leolora/scenario.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "leolora/errors.hpp"
#include "leolora/schedule_io.hpp"

namespace leolora {

using nlohmann::json;

std::string_view to_string(Protocol p) noexcept {
  return p == Protocol::BatteryAware ? "battery_aware" : "aloha";
}

namespace {

constexpr double kDeg = kPi / 180.0;

struct Diagnostics {
  std::vector<std::string> issues;
  std::vector<std::string> warnings;
};

// Reads one JSON object, remembering which keys were consumed so leftovers can
// be reported as unknown.
class Section {
 public:
  Section(const json* node, std::string path, Diagnostics& diag) : node_(node), path_(std::move(path)), diag_(diag) {
    if (node_ && !node_->is_object()) {
      diag_.issues.push_back(path_ + ": expected an object");
      node_ = nullptr;
    }
  }

  ~Section() {
    if (!node_) return;
    for (const auto& [key, value] : node_->items()) {
      if (!key.empty() && key.front() == '_') continue;
      if (!seen_.contains(key)) diag_.warnings.push_back(at(key) + ": unknown key ignored");
    }
  }

  Section(const Section&) = delete;
  Section& operator=(const Section&) = delete;

  std::string at(std::string_view key) const { return path_.empty() ? std::string(key) : path_ + "." + std::string(key); }

  const json* find(std::string_view key) {
    seen_.insert(std::string(key));
    if (!node_) return nullptr;
    auto it = node_->find(key);
    return it == node_->end() ? nullptr : &*it;
  }

  bool has(std::string_view key) const { return node_ && node_->contains(key); }

  std::optional<double> number(std::string_view key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_number()) {
      diag_.issues.push_back(at(key) + ": expected a number");
      return std::nullopt;
    }
    const double d = v->get<double>();
    if (!std::isfinite(d)) {
      diag_.issues.push_back(at(key) + ": must be finite");
      return std::nullopt;
    }
    return d;
  }

  double number(std::string_view key, double fallback) { return number(key).value_or(fallback); }

  double required_number(std::string_view key) {
    if (!has(key)) {
      find(key);
      diag_.issues.push_back(at(key) + ": missing mandatory field");
      return std::numeric_limits<double>::quiet_NaN();
    }
    return number(key).value_or(std::numeric_limits<double>::quiet_NaN());
  }

  std::optional<std::int64_t> integer(std::string_view key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_number_integer()) {
      diag_.issues.push_back(at(key) + ": expected an integer");
      return std::nullopt;
    }
    return v->get<std::int64_t>();
  }

  std::optional<bool> boolean(std::string_view key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_boolean()) {
      diag_.issues.push_back(at(key) + ": expected true or false");
      return std::nullopt;
    }
    return v->get<bool>();
  }

  std::optional<std::string> string(std::string_view key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_string()) {
      diag_.issues.push_back(at(key) + ": expected a string");
      return std::nullopt;
    }
    return v->get<std::string>();
  }

  Diagnostics& diag() { return diag_; }

 private:
  const json* node_;
  std::string path_;
  Diagnostics& diag_;
  std::set<std::string, std::less<>> seen_;
};

template <class F>
void check(Diagnostics& d, const std::string& path, F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    d.issues.push_back(path + ": " + e.what());
  }
}

int to_int(std::optional<std::int64_t> v, int fallback) {
  if (!v) return fallback;
  if (*v < std::numeric_limits<int>::min() || *v > std::numeric_limits<int>::max()) return fallback;
  return static_cast<int>(*v);
}

std::vector<orbit::GroundStation> default_stations() {
  struct Site {
    const char* id;
    double lat, lon;
  };
  static constexpr Site sites[] = {
      {"columbus", 39.96, -83.00}, {"reykjavik", 64.15, -21.94}, {"santiago", -33.45, -70.67},
      {"perth", -31.95, 115.86},   {"nairobi", -1.29, 36.82},    {"tokyo", 35.68, 139.69},
      {"madrid", 40.42, -3.70},    {"honolulu", 21.31, -157.86},
  };
  std::vector<orbit::GroundStation> out;
  for (const auto& s : sites) out.push_back({s.id, s.lat * kDeg, s.lon * kDeg, 10.0 * kDeg});
  return out;
}

void parse_orbit(Section s, orbit::OrbitConfig& o) {
  o.period_s = s.number("period_s", o.period_s);
  o.sun_duration_s = s.number("sun_duration_s", o.sun_duration_s);
  o.altitude_m = s.number("altitude_m", o.altitude_m);
  o.inclination_rad = s.number("inclination_deg", o.inclination_rad / kDeg) * kDeg;
  o.phase_offset_rad = s.number("phase_offset_deg", 0.0) * kDeg;
  o.raan_rad = s.number("raan_deg", 0.0) * kDeg;
  check(s.diag(), "orbit", [&] { o.validate(); });
}

void parse_stations(const json* node, Diagnostics& diag, std::vector<orbit::GroundStation>& out) {
  if (!node) {
    out = default_stations();
    return;
  }
  if (!node->is_array()) {
    diag.issues.push_back("stations: expected an array");
    return;
  }
  std::set<std::string> ids;
  for (std::size_t i = 0; i < node->size(); ++i) {
    const std::string path = "stations[" + std::to_string(i) + "]";
    Section s(&(*node)[i], path, diag);
    orbit::GroundStation g;
    g.id = s.string("id").value_or("station-" + std::to_string(i));
    g.latitude_rad = s.required_number("latitude_deg") * kDeg;
    g.longitude_rad = s.required_number("longitude_deg") * kDeg;
    g.min_elevation_rad = s.number("min_elevation_deg", 10.0) * kDeg;
    if (!ids.insert(g.id).second) diag.issues.push_back(path + ".id: duplicate station id '" + g.id + "'");
    if (!std::isnan(g.latitude_rad) && !std::isnan(g.longitude_rad)) {
      check(diag, path, [&] { g.validate(); });
    }
    out.push_back(std::move(g));
  }
}

void parse_battery(Section s, BatteryConfig& b) {
  auto& p = b.degradation;
  b.capacity_ah = s.number("capacity_ah", b.capacity_ah);
  b.voltage_v = s.number("voltage_v", b.voltage_v);
  b.soc_initial = s.number("soc_initial", b.soc_initial);
  b.dod = s.number("dod", b.dod);

  const auto c_rate = s.number("c_rate");
  const auto current = s.number("discharge_current_a");
  if (c_rate && current) {
    s.diag().issues.push_back(s.at("c_rate") + ": give either c_rate or discharge_current_a, not both");
  } else if (current) {
    b.c_rate = *current / b.capacity_ah;
  } else if (c_rate) {
    b.c_rate = *c_rate;
  }
  if (!(b.c_rate > 0.0)) s.diag().issues.push_back(s.at("c_rate") + ": must be > 0");

  p.k1 = s.number("k1", p.k1);
  p.k2 = s.number("k2", p.k2);
  p.activation_energy = s.number("ea_j_per_mol", p.activation_energy);
  p.gas_constant = s.number("gas_constant_j_per_mol_k", p.gas_constant);
  p.soc_exponent = s.number("soc_exponent_b", p.soc_exponent);
  p.c_rate_exponent = s.number("c_rate_exponent_c", p.c_rate_exponent);
  p.dod_exponent = s.number("dod_exponent_d", p.dod_exponent);
  p.alpha_sei = s.required_number("alpha_sei");
  p.k_sei = s.required_number("k_sei");
  b.thermal.sun_k = s.number("t_sun_k", b.thermal.sun_k);
  b.thermal.eclipse_k = s.number("t_eclipse_k", b.thermal.eclipse_k);

  if (const json* w = s.find("soc_window")) {
    if (w->is_array() && w->size() == 2 && (*w)[0].is_number() && (*w)[1].is_number()) {
      b.soc_window_low = (*w)[0].get<double>();
      b.soc_window_high = (*w)[1].get<double>();
    } else {
      s.diag().issues.push_back(s.at("soc_window") + ": expected [low, high]");
    }
  }

  auto& d = s.diag();
  if (!(b.capacity_ah > 0.0)) d.issues.push_back(s.at("capacity_ah") + ": must be > 0");
  if (!(b.voltage_v > 0.0)) d.issues.push_back(s.at("voltage_v") + ": must be > 0");
  if (!(b.soc_initial >= 0.0 && b.soc_initial <= 1.0)) d.issues.push_back(s.at("soc_initial") + ": must lie in [0, 1]");
  if (!(b.dod > 0.0 && b.dod <= 1.0)) d.issues.push_back(s.at("dod") + ": must lie in (0, 1]");
  if (!(0.0 <= b.soc_window_low && b.soc_window_low <= b.soc_window_high && b.soc_window_high <= 1.0)) {
    d.issues.push_back(s.at("soc_window") + ": need 0 <= low <= high <= 1");
  }
  if (!std::isnan(p.alpha_sei) && !std::isnan(p.k_sei)) check(d, "battery", [&] { p.validate(); });
  check(d, "battery", [&] { b.thermal.validate(); });
  for (const auto& w : b.thermal.warnings()) d.warnings.push_back("battery: " + w);
}

void parse_energy(Section s, EnergyConfig& e) {
  e.e_sleep_j = s.number("e_sleep_j");
  e.e_g_sun_j = s.number("e_g_sun_j");
  e.e_critical_j = s.number("e_critical_j");
  e.charge_rate_limit_j = s.number("charge_rate_limit_j");
  e.harvest_margin = s.number("harvest_margin", e.harvest_margin);
  e.psi_min_fraction = s.number("psi_min_fraction", e.psi_min_fraction);

  auto& d = s.diag();
  auto non_negative = [&](const std::optional<double>& v, const char* key) {
    if (v && !(*v >= 0.0)) d.issues.push_back(s.at(key) + ": must be >= 0");
  };
  non_negative(e.e_sleep_j, "e_sleep_j");
  non_negative(e.e_g_sun_j, "e_g_sun_j");
  non_negative(e.e_critical_j, "e_critical_j");
  non_negative(e.charge_rate_limit_j, "charge_rate_limit_j");
  if (!(e.harvest_margin >= 0.0)) d.issues.push_back(s.at("harvest_margin") + ": must be >= 0");
  if (!(e.psi_min_fraction >= 0.0 && e.psi_min_fraction < 1.0)) {
    d.issues.push_back(s.at("psi_min_fraction") + ": must lie in [0, 1)");
  }
}

void parse_radio(Section s, radio::RadioConfig& r) {
  r.spreading_factor = to_int(s.integer("spreading_factor"), r.spreading_factor);
  r.bandwidth_hz = s.number("bandwidth_hz", r.bandwidth_hz);
  r.coding_rate_denominator = to_int(s.integer("coding_rate_denominator"), r.coding_rate_denominator);
  r.preamble_symbols = to_int(s.integer("preamble_symbols"), r.preamble_symbols);
  r.explicit_header = s.boolean("explicit_header").value_or(r.explicit_header);
  r.crc_on = s.boolean("crc_on").value_or(r.crc_on);
  if (const json* v = s.find("low_data_rate_optimize")) {
    if (v->is_boolean()) {
      r.low_data_rate_optimize = v->get<bool>();
    } else if (!(v->is_string() && v->get<std::string>() == "auto")) {
      s.diag().issues.push_back(s.at("low_data_rate_optimize") + ": expected true, false or \"auto\"");
    }
  }
  r.payload_bytes = to_int(s.integer("payload_bytes"), r.payload_bytes);
  r.tx_power_w = s.required_number("tx_power_w");
  r.channels = to_int(s.integer("channels"), r.channels);
  if (!std::isnan(r.tx_power_w)) check(s.diag(), "radio", [&] { r.validate(); });
}

void parse_mac(Section s, mac::MacConfig& m, Protocol& protocol, bool& dif_ref_given) {
  if (auto p = s.string("protocol")) {
    if (*p == "battery_aware") {
      protocol = Protocol::BatteryAware;
    } else if (*p == "aloha") {
      protocol = Protocol::Aloha;
    } else {
      s.diag().issues.push_back(s.at("protocol") + ": expected \"battery_aware\" or \"aloha\"");
    }
  }
  m.beta = s.number("beta", m.beta);
  m.w_dif = s.number("w_dif", m.w_dif);
  m.w_energy = s.number("w_energy", m.w_energy);
  m.max_attempts = to_int(s.integer("max_attempts"), m.max_attempts);
  m.slot_budget_s = s.number("slot_budget_s", m.slot_budget_s);
  const auto dif_ref = s.number("dif_ref");
  dif_ref_given = dif_ref.has_value();
  if (dif_ref) m.dif_ref = *dif_ref;
  if (auto b0 = s.number("backoff_base_s")) m.backoff_base_s = *b0;
  m.deadline_orbits = s.number("deadline_orbits", m.deadline_orbits);
  check(s.diag(), "mac", [&] { m.validate(); });
}

void parse_sim(Section s, SimConfig& sim, std::optional<std::string>& schedule_file) {
  auto& d = s.diag();
  sim.duration_days = s.number("duration_days", sim.duration_days);
  sim.slot_s = s.number("slot_s", sim.slot_s);
  if (auto n = s.integer("nodes")) {
    if (*n < 0 || *n > 65535) {
      d.issues.push_back(s.at("nodes") + ": must lie in [0, 65535]");
    } else {
      sim.nodes = static_cast<std::uint32_t>(*n);
    }
  }
  if (const json* v = s.find("seed")) {
    if (v->is_number_unsigned() || (v->is_number_integer() && v->get<std::int64_t>() >= 0)) {
      sim.seed = v->get<std::uint64_t>();
    } else {
      d.issues.push_back(s.at("seed") + ": expected a non-negative integer");
    }
  }
  sim.visibility_step_s = s.number("visibility_step_s", sim.visibility_step_s);
  sim.metrics_interval_s = s.number("metrics_interval_s", sim.metrics_interval_s);
  schedule_file = s.string("schedule_file");

  {
    Section t(s.find("traffic"), s.at("traffic"), d);
    if (auto model = t.string("model")) {
      if (*model == "poisson") {
        sim.traffic.model = TrafficModel::Poisson;
      } else if (*model == "periodic") {
        sim.traffic.model = TrafficModel::Periodic;
      } else {
        d.issues.push_back(t.at("model") + ": expected \"poisson\" or \"periodic\"");
      }
    }
    sim.traffic.packets_per_hour = t.number("packets_per_hour", sim.traffic.packets_per_hour);
    if (!(sim.traffic.packets_per_hour >= 0.0)) d.issues.push_back(t.at("packets_per_hour") + ": must be >= 0");
  }

  if (!(sim.duration_days > 0.0)) d.issues.push_back(s.at("duration_days") + ": must be > 0");
  if (!(sim.slot_s > 0.0)) d.issues.push_back(s.at("slot_s") + ": must be > 0");
  if (!(sim.visibility_step_s > 0.0)) d.issues.push_back(s.at("visibility_step_s") + ": must be > 0");
  if (!(sim.metrics_interval_s > 0.0)) d.issues.push_back(s.at("metrics_interval_s") + ": must be > 0");
}

// Default dif_ref: DIF numerator for a full retransmission sequence at the
// warmest profile temperature, so DIF spans [0, 1] over realistic draws.
double default_dif_ref(const ScenarioConfig& c, double sequence_energy) {
  const double t_max = std::max(c.battery.thermal.sun_k, c.battery.thermal.eclipse_k);
  const battery::CycleStress idle{c.battery.dod, c.battery.c_rate, t_max};
  battery::CycleStress tx = idle;
  tx.dod = std::min(1.0, idle.dod + sequence_energy / c.battery.rated_energy_j());
  return battery::cycle_aging(c.battery.degradation, tx, 1.0) - battery::cycle_aging(c.battery.degradation, idle, 1.0);
}

}  // namespace

ResolvedEnergy resolve_energy(const ScenarioConfig& c) {
  ResolvedEnergy r;
  const double capacity = c.battery.rated_energy_j();
  const double slot = c.sim.slot_s;
  const double eclipse = c.orbit.period_s - c.orbit.sun_duration_s;

  double e_sleep = 0.0;
  if (c.energy.e_sleep_j) {
    e_sleep = *c.energy.e_sleep_j;
  } else if (eclipse > 0.0) {
    e_sleep = c.battery.dod * capacity / eclipse * slot;
  } else {
    throw ConfigError("energy.e_sleep_j is required when the orbit has no eclipse");
  }
  const double e_g_sun = c.energy.e_g_sun_j.value_or(e_sleep * c.orbit.period_s / c.orbit.sun_duration_s *
                                                     c.energy.harvest_margin);

  r.attempt_energy = radio::tx_energy(c.radio);
  r.sequence_energy = r.attempt_energy * c.mac.max_attempts;
  r.harvest.e_g_sun = e_g_sun;
  if (c.energy.charge_rate_limit_j) r.harvest.charge_rate_limit = *c.energy.charge_rate_limit_j;
  r.profile.e_sleep = e_sleep;
  r.profile.e_cons_tx = e_sleep + r.sequence_energy;
  r.phi_max = capacity;
  r.phi_initial = c.battery.soc_initial * capacity;
  r.phi_min = c.energy.psi_min_fraction * capacity;
  r.e_critical = c.energy.e_critical_j.value_or(e_sleep / slot * eclipse);
  return r;
}

ScenarioConfig parse_scenario(const json& doc, const std::filesystem::path& base_dir) {
  Diagnostics diag;
  ScenarioConfig c;
  if (!doc.is_object()) throw ValidationError({"scenario: top level must be a JSON object"});

  bool dif_ref_given = false;
  std::optional<std::string> schedule_file;
  {
    Section root(&doc, "", diag);
    parse_orbit(Section(root.find("orbit"), "orbit", diag), c.orbit);
    parse_stations(root.find("stations"), diag, c.stations);
    parse_battery(Section(root.find("battery"), "battery", diag), c.battery);
    parse_energy(Section(root.find("energy"), "energy", diag), c.energy);
    parse_radio(Section(root.find("radio"), "radio", diag), c.radio);
    parse_mac(Section(root.find("mac"), "mac", diag), c.mac, c.sim.protocol, dif_ref_given);
    parse_sim(Section(root.find("sim"), "sim", diag), c.sim, schedule_file);
  }

  if (diag.issues.empty()) {
    check(diag, "sim.slot_s", [&] {
      const double toa = radio::time_on_air(c.radio);
      if (c.sim.slot_s < toa) {
        throw ConfigError("slot length " + std::to_string(c.sim.slot_s) + " s is shorter than time on air " +
                          std::to_string(toa) + " s");
      }
    });
    check(diag, "mac.backoff_base_s", [&] { mac::resolve_backoff_base(c.mac, c.radio); });
    check(diag, "energy", [&] {
      const auto r = resolve_energy(c);
      r.harvest.validate();
      if (!(r.phi_min < r.phi_max)) throw ConfigError("psi_min must be below the pack capacity");
      if (!dif_ref_given) {
        c.mac.dif_ref = default_dif_ref(c, r.sequence_energy);
        if (!(c.mac.dif_ref > 0.0)) throw ConfigError("derived dif_ref is not positive; set mac.dif_ref");
      }
    });
  }

  if (schedule_file && diag.issues.empty()) {
    std::filesystem::path p(*schedule_file);
    if (p.is_relative()) p = base_dir / p;
    try {
      std::ifstream in(p);
      if (!in) throw ValidationError({"cannot open " + p.string()});
      json sched = json::parse(in);
      c.schedule_override = ScheduleOverride{p, io::schedule_from_json(sched, c.sim.nodes)};
    } catch (const ValidationError& e) {
      for (const auto& i : e.issues()) diag.issues.push_back("sim.schedule_file: " + i);
    } catch (const json::exception& e) {
      diag.issues.push_back("sim.schedule_file: " + std::string(e.what()));
    }
  }

  if (!diag.issues.empty()) throw ValidationError(std::move(diag.issues));
  c.warnings = std::move(diag.warnings);
  return c;
}

ScenarioConfig load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError({path.string() + ": cannot open file"});
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError({path.string() + ": " + e.what()});
  }
  return parse_scenario(doc, path.parent_path());
}

}  // namespace leolora
