// leolora command-line front end. Talks to the simulator only through the C API.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "leolora/leolora.h"

namespace {

std::string shortest(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

struct BufferDeleter {
  void operator()(leolora_buffer* b) const { leolora_buffer_free(b); }
};
struct ScenarioDeleter {
  void operator()(leolora_scenario* s) const { leolora_scenario_free(s); }
};
struct RunDeleter {
  void operator()(leolora_run* r) const { leolora_run_free(r); }
};
using Buffer = std::unique_ptr<leolora_buffer, BufferDeleter>;
using Scenario = std::unique_ptr<leolora_scenario, ScenarioDeleter>;
using Run = std::unique_ptr<leolora_run, RunDeleter>;

class Failure : public std::runtime_error {
 public:
  Failure(int code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

void check(leolora_status s, const std::string& context) {
  if (s == LEOLORA_OK) return;
  const int code = s == LEOLORA_RUNTIME ? kExitRuntime : kExitValidation;
  throw Failure(code, context + ":\n" + leolora_last_error());
}

std::string text(const Buffer& b) { return std::string(leolora_buffer_data(b.get()), leolora_buffer_size(b.get())); }

Scenario load(const std::string& path) {
  leolora_scenario* raw = nullptr;
  check(leolora_scenario_from_file(path.c_str(), &raw), "invalid scenario " + path);
  Scenario s(raw);
  leolora_buffer* w = nullptr;
  check(leolora_scenario_warnings(s.get(), &w), "scenario warnings");
  const std::string warnings = text(Buffer(w));
  std::istringstream lines(warnings);
  for (std::string line; std::getline(lines, line);) std::cerr << "warning: " << line << '\n';
  return s;
}

void write_output(const std::string& path, const std::string& data) {
  if (path.empty() || path == "-") {
    std::cout << data;
    std::cout.flush();
    if (!std::cout) throw Failure(kExitRuntime, "failed writing standard output");
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << data;
  if (!out) throw Failure(kExitRuntime, "cannot write " + path);
}

std::string summary_path_for(const std::string& out) {
  if (out.empty() || out == "-") return {};
  const auto dot = out.find_last_of('.');
  const auto slash = out.find_last_of('/');
  const std::string stem = (dot != std::string::npos && (slash == std::string::npos || dot > slash)) ? out.substr(0, dot) : out;
  return stem + ".summary.json";
}

leolora_protocol parse_protocol(const std::string& p) {
  if (p.empty()) return LEOLORA_PROTOCOL_DEFAULT;
  if (p == "battery_aware") return LEOLORA_PROTOCOL_BATTERY_AWARE;
  return LEOLORA_PROTOCOL_ALOHA;
}

struct RunOutput {
  std::string metrics;
  std::string summary;
  leolora_status status = LEOLORA_OK;
  std::string error;
};

RunOutput run_once(const leolora_scenario* s, std::uint64_t seed, leolora_protocol protocol, leolora_format format) {
  RunOutput out;
  leolora_run* raw = nullptr;
  out.status = leolora_simulate(s, seed, protocol, &raw);
  if (out.status != LEOLORA_OK) {
    out.error = leolora_last_error();
    return out;
  }
  Run run(raw);
  leolora_buffer* m = nullptr;
  leolora_buffer* j = nullptr;
  out.status = leolora_run_metrics(run.get(), format, &m);
  if (out.status == LEOLORA_OK) out.status = leolora_run_summary_json(run.get(), &j);
  if (out.status != LEOLORA_OK) {
    out.error = leolora_last_error();
    return out;
  }
  out.metrics = text(Buffer(m));
  out.summary = text(Buffer(j));
  return out;
}

struct SimulateArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string summary;
  std::string format = "csv";
  std::string protocol;
  unsigned sweep = 0;
  unsigned threads = 0;
};

int cmd_simulate(const SimulateArgs& a) {
  Scenario s = load(a.config);
  std::uint64_t seed = 0;
  check(leolora_scenario_seed(s.get(), &seed), "scenario");
  if (a.seed) seed = *a.seed;
  const auto format = a.format == "json" ? LEOLORA_FORMAT_JSON : LEOLORA_FORMAT_CSV;
  const auto protocol = parse_protocol(a.protocol);
  const std::string summary_path = a.summary.empty() ? summary_path_for(a.out) : a.summary;

  if (a.sweep == 0) {
    RunOutput r = run_once(s.get(), seed, protocol, format);
    check(r.status, "simulation failed");
    write_output(a.out, r.metrics);
    if (!summary_path.empty()) {
      write_output(summary_path, r.summary);
    } else {
      std::cerr << r.summary;
    }
    return 0;
  }

  // Independent runs on worker threads; results land in their run-index slot.
  std::vector<RunOutput> results(a.sweep);
  const unsigned workers = std::max(1u, std::min(a.sweep, a.threads ? a.threads : std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (unsigned i = w; i < a.sweep; i += workers) results[i] = run_once(s.get(), seed + i, protocol, format);
    });
  }
  for (auto& t : pool) t.join();

  std::string metrics;
  nlohmann::ordered_json summaries = nlohmann::ordered_json::array();
  for (unsigned i = 0; i < a.sweep; ++i) {
    auto& r = results[i];
    if (r.status != LEOLORA_OK) {
      throw Failure(r.status == LEOLORA_RUNTIME ? kExitRuntime : kExitValidation,
                    "run " + std::to_string(i) + " failed:\n" + r.error);
    }
    if (format == LEOLORA_FORMAT_CSV) {
      std::istringstream lines(r.metrics);
      std::string line;
      std::getline(lines, line);
      if (i == 0) metrics += "run,seed," + line + '\n';
      while (std::getline(lines, line)) metrics += std::to_string(i) + ',' + std::to_string(seed + i) + ',' + line + '\n';
    }
    nlohmann::ordered_json entry;
    entry["run"] = i;
    entry["seed"] = seed + i;
    if (format == LEOLORA_FORMAT_JSON) entry["metrics"] = nlohmann::ordered_json::parse(r.metrics);
    entry["summary"] = nlohmann::ordered_json::parse(r.summary);
    summaries.push_back(std::move(entry));
  }
  if (format == LEOLORA_FORMAT_JSON) {
    write_output(a.out, summaries.dump(2) + '\n');
  } else {
    write_output(a.out, metrics);
    nlohmann::ordered_json only = nlohmann::ordered_json::array();
    for (auto& e : summaries) only.push_back({{"run", e["run"]}, {"seed", e["seed"]}, {"summary", e["summary"]}});
    if (!summary_path.empty()) {
      write_output(summary_path, only.dump(2) + '\n');
    } else {
      std::cerr << only.dump(2) << '\n';
    }
  }
  return 0;
}

int cmd_degradation(const std::string& config, double years, double resolution, const std::string& out,
                    const std::string& format) {
  Scenario s = load(config);
  leolora_buffer* raw = nullptr;
  check(leolora_degradation_curve(s.get(), years, resolution, &raw), "degradation curve");
  std::string csv = text(Buffer(raw));
  if (format == "json") {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    while (std::getline(lines, line)) {
      std::istringstream cells(line);
      std::string day, d, fade;
      std::getline(cells, day, ',');
      std::getline(cells, d, ',');
      std::getline(cells, fade, ',');
      rows.push_back({{"day", std::stod(day)}, {"d_linear", std::stod(d)}, {"fade_fraction", std::stod(fade)}});
    }
    csv = rows.dump(2) + '\n';
  }
  write_output(out, csv);
  return 0;
}

struct AirtimeArgs {
  std::string config;
  std::optional<int> sf, cr, payload, preamble;
  std::optional<double> bw, power;
  bool implicit_header = false;
  bool no_crc = false;
  std::string ldro;
  std::string format = "csv";
  std::string out;
};

int cmd_airtime(const AirtimeArgs& a) {
  leolora_radio_params p;
  leolora_radio_defaults(&p);
  if (!a.config.empty()) {
    Scenario s = load(a.config);
    check(leolora_scenario_radio(s.get(), &p), "scenario radio");
  }
  if (a.sf) p.spreading_factor = *a.sf;
  if (a.bw) p.bandwidth_hz = *a.bw;
  if (a.cr) p.coding_rate_denominator = *a.cr;
  if (a.payload) p.payload_bytes = *a.payload;
  if (a.preamble) p.preamble_symbols = *a.preamble;
  if (a.power) p.tx_power_w = *a.power;
  if (a.implicit_header) p.explicit_header = 0;
  if (a.no_crc) p.crc_on = 0;
  if (a.ldro == "on") p.low_data_rate_optimize = 1;
  if (a.ldro == "off") p.low_data_rate_optimize = 0;
  if (a.ldro == "auto") p.low_data_rate_optimize = -1;

  leolora_airtime_result r{};
  check(leolora_airtime(&p, &r), "invalid radio parameters");
  std::ostringstream os;
  if (a.format == "json") {
    nlohmann::ordered_json doc{{"spreading_factor", p.spreading_factor},
                               {"bandwidth_hz", p.bandwidth_hz},
                               {"coding_rate", "4/" + std::to_string(p.coding_rate_denominator)},
                               {"payload_bytes", p.payload_bytes},
                               {"low_data_rate_optimize", r.low_data_rate_optimize != 0},
                               {"symbol_duration_s", r.symbol_duration_s},
                               {"symbol_count", r.symbol_count},
                               {"time_on_air_s", r.time_on_air_s},
                               {"tx_energy_j", r.tx_energy_j}};
    os << doc.dump(2) << '\n';
  } else {
    os << "quantity,value\n"
       << "spreading_factor," << p.spreading_factor << '\n'
       << "bandwidth_hz," << shortest(p.bandwidth_hz) << '\n'
       << "coding_rate,4/" << p.coding_rate_denominator << '\n'
       << "payload_bytes," << p.payload_bytes << '\n'
       << "low_data_rate_optimize," << r.low_data_rate_optimize << '\n'
       << "symbol_duration_s," << shortest(r.symbol_duration_s) << '\n'
       << "symbol_count," << r.symbol_count << '\n'
       << "time_on_air_s," << shortest(r.time_on_air_s) << '\n'
       << "tx_energy_j," << shortest(r.tx_energy_j) << '\n';
  }
  write_output(a.out, os.str());
  return 0;
}

int cmd_schedule(const std::string& config, double horizon, const std::string& out) {
  Scenario s = load(config);
  leolora_buffer* raw = nullptr;
  check(leolora_schedule_json(s.get(), horizon, &raw), "schedule");
  write_output(out, text(Buffer(raw)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LEO satellite LoRaWAN simulator with battery-aware MAC"};
  app.set_version_flag("--version", std::string(leolora_version()));
  app.require_subcommand(1);

  const std::vector<std::string> formats{"csv", "json"};

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run the discrete-event simulation");
  simulate->add_option("--config", sim.config, "Scenario JSON")->required()->check(CLI::ExistingFile);
  simulate->add_option("--seed", sim.seed, "Override the scenario seed");
  simulate->add_option("--out", sim.out, "Metrics output path (default stdout)");
  simulate->add_option("--summary", sim.summary, "Summary JSON path (default <out>.summary.json)");
  simulate->add_option("--format", sim.format, "Metrics format")->check(CLI::IsMember(formats));
  simulate->add_option("--protocol", sim.protocol, "Override the MAC protocol")
      ->check(CLI::IsMember({"battery_aware", "aloha"}));
  simulate->add_option("--sweep", sim.sweep, "Run N seeds (seed, seed+1, ...) in parallel");
  simulate->add_option("--threads", sim.threads, "Worker threads for --sweep (default: all cores)");

  std::string deg_config, deg_out, deg_format = "csv";
  double years = 1.0, resolution = 1.0;
  auto* degradation = app.add_subcommand("degradation", "Traffic-free capacity-fade curve");
  degradation->add_option("--config", deg_config, "Scenario JSON")->required()->check(CLI::ExistingFile);
  degradation->add_option("--years", years, "Length of the curve in years");
  degradation->add_option("--resolution-days", resolution, "Row spacing in days");
  degradation->add_option("--out", deg_out, "Output path (default stdout)");
  degradation->add_option("--format", deg_format, "Output format")->check(CLI::IsMember(formats));
  degradation->add_option("--seed", sim.seed, "Accepted for symmetry; the curve is deterministic");

  AirtimeArgs air;
  auto* airtime = app.add_subcommand("airtime", "LoRa time-on-air and transmit energy");
  airtime->add_option("--config", air.config, "Take radio parameters from a scenario")->check(CLI::ExistingFile);
  airtime->add_option("--sf", air.sf, "Spreading factor (6-12)");
  airtime->add_option("--bw", air.bw, "Bandwidth in Hz");
  airtime->add_option("--cr", air.cr, "Coding-rate denominator (5-8, CR = 4/x)");
  airtime->add_option("--payload", air.payload, "Payload bytes");
  airtime->add_option("--preamble", air.preamble, "Preamble symbols");
  airtime->add_option("--tx-power", air.power, "Transmit power in W");
  airtime->add_flag("--implicit-header", air.implicit_header, "Implicit header mode");
  airtime->add_flag("--no-crc", air.no_crc, "Disable payload CRC");
  airtime->add_option("--ldro", air.ldro, "Low data rate optimisation")->check(CLI::IsMember({"on", "off", "auto"}));
  airtime->add_option("--format", air.format, "Output format")->check(CLI::IsMember(formats));
  airtime->add_option("--out", air.out, "Output path (default stdout)");

  std::string sched_config, sched_out;
  double horizon = 86400.0;
  auto* schedule = app.add_subcommand("schedule", "Forecast-window list as JSON");
  schedule->add_option("--config", sched_config, "Scenario JSON")->required()->check(CLI::ExistingFile);
  schedule->add_option("--horizon", horizon, "Horizon in seconds");
  schedule->add_option("--out", sched_out, "Output path (default stdout)");
  std::string sched_format = "json";
  schedule->add_option("--format", sched_format, "Output format")->check(CLI::IsMember({"json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  try {
    if (*simulate) return cmd_simulate(sim);
    if (*degradation) return cmd_degradation(deg_config, years, resolution, deg_out, deg_format);
    if (*airtime) return cmd_airtime(air);
    if (*schedule) return cmd_schedule(sched_config, horizon, sched_out);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.what() << '\n';
    return f.code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
