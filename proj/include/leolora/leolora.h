#ifndef LEOLORA_H
#define LEOLORA_H

/* C interface to the leolora simulator. All handles are opaque; every call
 * returns a status code, and on failure leolora_last_error() describes it
 * (valid until the next call on the same thread). */

#include <stddef.h>
#include <stdint.h>

#if defined(LEOLORA_BUILDING_LIBRARY)
#define LEOLORA_API __attribute__((visibility("default")))
#else
#define LEOLORA_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  LEOLORA_OK = 0,
  LEOLORA_INVALID_ARGUMENT = 1,
  LEOLORA_VALIDATION = 2,
  LEOLORA_RUNTIME = 3,
  LEOLORA_IO = 4
} leolora_status;

typedef enum { LEOLORA_PROTOCOL_DEFAULT = 0, LEOLORA_PROTOCOL_BATTERY_AWARE = 1, LEOLORA_PROTOCOL_ALOHA = 2 } leolora_protocol;

typedef enum { LEOLORA_FORMAT_CSV = 0, LEOLORA_FORMAT_JSON = 1 } leolora_format;

typedef struct leolora_scenario leolora_scenario;
typedef struct leolora_run leolora_run;
typedef struct leolora_buffer leolora_buffer;

typedef struct {
  int spreading_factor;
  double bandwidth_hz;
  int coding_rate_denominator;
  int preamble_symbols;
  int explicit_header;
  int crc_on;
  int low_data_rate_optimize; /* -1 automatic, 0 off, 1 on */
  int payload_bytes;
  double tx_power_w;
} leolora_radio_params;

typedef struct {
  double symbol_duration_s;
  int symbol_count;
  double time_on_air_s;
  double tx_energy_j;
  int low_data_rate_optimize;
} leolora_airtime_result;

LEOLORA_API const char* leolora_version(void);
LEOLORA_API const char* leolora_last_error(void);

/* Buffers own bytes produced by the library (CSV, JSON, encoded reports). */
LEOLORA_API const char* leolora_buffer_data(const leolora_buffer* buffer);
LEOLORA_API size_t leolora_buffer_size(const leolora_buffer* buffer);
LEOLORA_API void leolora_buffer_free(leolora_buffer* buffer);

LEOLORA_API leolora_status leolora_scenario_from_file(const char* path, leolora_scenario** out);
LEOLORA_API leolora_status leolora_scenario_from_json(const char* json, size_t length, const char* base_dir,
                                                      leolora_scenario** out);
LEOLORA_API void leolora_scenario_free(leolora_scenario* scenario);
/* Newline-separated non-fatal findings, e.g. unknown keys. */
LEOLORA_API leolora_status leolora_scenario_warnings(const leolora_scenario* scenario, leolora_buffer** out);
LEOLORA_API leolora_status leolora_scenario_seed(const leolora_scenario* scenario, uint64_t* out);
LEOLORA_API leolora_status leolora_scenario_radio(const leolora_scenario* scenario, leolora_radio_params* out);

LEOLORA_API leolora_status leolora_simulate(const leolora_scenario* scenario, uint64_t seed,
                                            leolora_protocol protocol, leolora_run** out);
LEOLORA_API void leolora_run_free(leolora_run* run);
LEOLORA_API leolora_status leolora_run_metrics(const leolora_run* run, leolora_format format, leolora_buffer** out);
LEOLORA_API leolora_status leolora_run_summary_json(const leolora_run* run, leolora_buffer** out);
LEOLORA_API leolora_status leolora_run_totals(const leolora_run* run, uint64_t* generated, uint64_t* delivered,
                                              double* total_cycle_aging);

LEOLORA_API leolora_status leolora_degradation_curve(const leolora_scenario* scenario, double years,
                                                     double resolution_days, leolora_buffer** out);
LEOLORA_API leolora_status leolora_schedule_json(const leolora_scenario* scenario, double horizon_s,
                                                 leolora_buffer** out);

LEOLORA_API void leolora_radio_defaults(leolora_radio_params* out);
LEOLORA_API leolora_status leolora_airtime(const leolora_radio_params* params, leolora_airtime_result* out);

#ifdef __cplusplus
}
#endif

#endif
