#include "leolora/leolora.h"

#include <cmath>
#include <exception>
#include <filesystem>
#include <new>
#include <string>

#include "leolora/degradation_curve.hpp"
#include "leolora/errors.hpp"
#include "leolora/scenario.hpp"
#include "leolora/schedule_io.hpp"
#include "leolora/sim_engine.hpp"

struct leolora_scenario {
  leolora::ScenarioConfig config;
};

struct leolora_run {
  leolora::sim::RunArtifacts artifacts;
};

struct leolora_buffer {
  std::string bytes;
};

namespace {

thread_local std::string g_last_error;

leolora_status fail(leolora_status s, std::string message) {
  g_last_error = std::move(message);
  return s;
}

// Maps the core's exception types onto status codes.
template <class F>
leolora_status guarded(F&& f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const leolora::ValidationError& e) {
    return fail(LEOLORA_VALIDATION, e.what());
  } catch (const leolora::ConfigError& e) {
    return fail(LEOLORA_VALIDATION, e.what());
  } catch (const std::domain_error& e) {
    return fail(LEOLORA_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(LEOLORA_RUNTIME, "out of memory");
  } catch (const std::exception& e) {
    return fail(LEOLORA_RUNTIME, e.what());
  } catch (...) {
    return fail(LEOLORA_RUNTIME, "unknown error");
  }
}

leolora_status emit(std::string bytes, leolora_buffer** out) {
  *out = new leolora_buffer{std::move(bytes)};
  return LEOLORA_OK;
}

leolora::radio::RadioConfig to_config(const leolora_radio_params& p) {
  leolora::radio::RadioConfig r;
  r.spreading_factor = p.spreading_factor;
  r.bandwidth_hz = p.bandwidth_hz;
  r.coding_rate_denominator = p.coding_rate_denominator;
  r.preamble_symbols = p.preamble_symbols;
  r.explicit_header = p.explicit_header != 0;
  r.crc_on = p.crc_on != 0;
  if (p.low_data_rate_optimize >= 0) r.low_data_rate_optimize = p.low_data_rate_optimize != 0;
  r.payload_bytes = p.payload_bytes;
  r.tx_power_w = p.tx_power_w;
  return r;
}

}  // namespace

extern "C" {

const char* leolora_version(void) { return "0.1.0"; }

const char* leolora_last_error(void) { return g_last_error.c_str(); }

const char* leolora_buffer_data(const leolora_buffer* b) { return b ? b->bytes.data() : nullptr; }
size_t leolora_buffer_size(const leolora_buffer* b) { return b ? b->bytes.size() : 0; }
void leolora_buffer_free(leolora_buffer* b) { delete b; }

leolora_status leolora_scenario_from_file(const char* path, leolora_scenario** out) {
  if (!path || !out) return fail(LEOLORA_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  if (!std::filesystem::exists(path)) return fail(LEOLORA_IO, std::string(path) + ": no such file");
  return guarded([&] {
    *out = new leolora_scenario{leolora::load_scenario_file(path)};
    return LEOLORA_OK;
  });
}

leolora_status leolora_scenario_from_json(const char* json, size_t length, const char* base_dir,
                                          leolora_scenario** out) {
  if (!json || !out) return fail(LEOLORA_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(json, json + length);
    } catch (const nlohmann::json::parse_error& e) {
      return fail(LEOLORA_VALIDATION, e.what());
    }
    *out = new leolora_scenario{leolora::parse_scenario(doc, base_dir ? base_dir : "")};
    return LEOLORA_OK;
  });
}

void leolora_scenario_free(leolora_scenario* s) { delete s; }

leolora_status leolora_scenario_warnings(const leolora_scenario* s, leolora_buffer** out) {
  if (!s || !out) return fail(LEOLORA_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::string text;
    for (const auto& w : s->config.warnings) text += w + '\n';
    return emit(std::move(text), out);
  });
}

leolora_status leolora_scenario_seed(const leolora_scenario* s, uint64_t* out) {
  if (!s || !out) return fail(LEOLORA_INVALID_ARGUMENT, "null argument");
  *out = s->config.sim.seed;
  return LEOLORA_OK;
}

leolora_status leolora_scenario_radio(const leolora_scenario* s, leolora_radio_params* out) {
  if (!s || !out) return fail(LEOLORA_INVALID_ARGUMENT, "null argument");
  const auto& r = s->config.radio;
  out->spreading_factor = r.spreading_factor;
  out->bandwidth_hz = r.bandwidth_hz;
  out->coding_rate_denominator = r.coding_rate_denominator;
  out->preamble_symbols = r.preamble_symbols;
  out->explicit_header = r.explicit_header;
  out->crc_on = r.crc_on;
  out->low_data_rate_optimize = r.low_data_rate_optimize ? (*r.low_data_rate_optimize ? 1 : 0) : -1;
  out->payload_bytes = r.payload_bytes;
  out->tx_power_w = r.tx_power_w;
  return LEOLORA_OK;
}

leolora_status leolora_simulate(const leolora_scenario* s, uint64_t seed, leolora_protocol protocol,
                                leolora_run** out) {
  if (!s || !out) return fail(LEOLORA_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  leolora::Protocol p = s->config.sim.protocol;
  switch (protocol) {
    case LEOLORA_PROTOCOL_DEFAULT: break;
    case LEOLORA_PROTOCOL_BATTERY_AWARE: p = leolora::Protocol::BatteryAware; break;
    case LEOLORA_PROTOCOL_ALOHA: p = leolora::Protocol::Aloha; break;
    default: return fail(LEOLORA_INVALID_ARGUMENT, "unknown protocol");
  }
  return guarded([&] {
    const auto schedules = leolora::sim::prepare_schedules(s->config);
    *out = new leolora_run{leolora::sim::run(s->config, schedules, seed, p)};
    return LEOLORA_OK;
  });
}

void leolora_run_free(leolora_run* r) { delete r; }

leolora_status leolora_run_metrics(const leolora_run* r, leolora_format format, leolora_buffer** out) {
  if (!r || !out) return fail(LEOLORA_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto& m = r->artifacts.metrics;
    if (format == LEOLORA_FORMAT_JSON) return emit(leolora::sim::metrics_json(m).dump(2) + '\n', out);
    if (format != LEOLORA_FORMAT_CSV) return fail(LEOLORA_INVALID_ARGUMENT, "unknown format");
    return emit(leolora::sim::metrics_csv(m), out);
  });
}

leolora_status leolora_run_summary_json(const leolora_run* r, leolora_buffer** out) {
  if (!r || !out) return fail(LEOLORA_INVALID_ARGUMENT, "null argument");
  return guarded([&] { return emit(leolora::sim::summary_json(r->artifacts.summary).dump(2) + '\n', out); });
}

leolora_status leolora_run_totals(const leolora_run* r, uint64_t* generated, uint64_t* delivered,
                                  double* total_cycle_aging) {
  if (!r) return fail(LEOLORA_INVALID_ARGUMENT, "null argument");
  const auto& s = r->artifacts.summary;
  if (generated) *generated = s.totals.generated;
  if (delivered) *delivered = s.totals.delivered;
  if (total_cycle_aging) *total_cycle_aging = s.total_cycle_aging;
  return LEOLORA_OK;
}

leolora_status leolora_degradation_curve(const leolora_scenario* s, double years, double resolution_days,
                                         leolora_buffer** out) {
  if (!s || !out) return fail(LEOLORA_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    return emit(leolora::curve_csv(leolora::degradation_curve(s->config, years, resolution_days)), out);
  });
}

leolora_status leolora_schedule_json(const leolora_scenario* s, double horizon_s, leolora_buffer** out) {
  if (!s || !out) return fail(LEOLORA_INVALID_ARGUMENT, "null argument");
  if (!(horizon_s > 0.0) || !std::isfinite(horizon_s)) {
    return fail(LEOLORA_INVALID_ARGUMENT, "horizon must be a finite value > 0 s");
  }
  return guarded([&] {
    auto config = s->config;
    config.sim.duration_days = horizon_s / leolora::kSecondsPerDay;
    config.schedule_override.reset();
    const auto schedules = leolora::sim::prepare_schedules(config);
    return emit(leolora::io::schedule_to_json(schedules, horizon_s).dump(2) + '\n', out);
  });
}

void leolora_radio_defaults(leolora_radio_params* out) {
  if (!out) return;
  const leolora::radio::RadioConfig r;
  *out = leolora_radio_params{r.spreading_factor, r.bandwidth_hz, r.coding_rate_denominator, r.preamble_symbols,
                              r.explicit_header, r.crc_on, -1, r.payload_bytes, r.tx_power_w};
}

leolora_status leolora_airtime(const leolora_radio_params* params, leolora_airtime_result* out) {
  if (!params || !out) return fail(LEOLORA_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto r = to_config(*params);
    r.validate();
    out->symbol_duration_s = leolora::radio::symbol_duration(r);
    out->symbol_count = leolora::radio::payload_symbol_count(r);
    out->time_on_air_s = leolora::radio::time_on_air(r);
    out->tx_energy_j = leolora::radio::tx_energy(r);
    out->low_data_rate_optimize = r.ldro() ? 1 : 0;
    return LEOLORA_OK;
  });
}

}  // extern "C"
