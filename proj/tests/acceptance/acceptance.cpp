#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "leolora/battery_accounting.hpp"
#include "leolora/battery_model.hpp"
#include "leolora/energy_model.hpp"
#include "leolora/errors.hpp"
#include "leolora/mac_protocol.hpp"
#include "leolora/orbit_schedule.hpp"
#include "leolora/radio_airtime.hpp"
#include "leolora/sim_engine.hpp"
#include "oracles.hpp"
#include "test_scenarios.hpp"

using namespace leolora;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

long double rel_err(long double a, long double b) {
  const long double scale = std::max(fabsl(a), fabsl(b));
  return scale == 0.0L ? 0.0L : fabsl(a - b) / scale;
}

// 1. degradation formulas against the straight-line oracle
Outcome degradation_oracle() {
  Rng rng(101);
  long double worst = 0.0L;
  for (int i = 0; i < 1000; ++i) {
    battery::DegradationParams p;
    p.activation_energy = rng.uniform(35000.0, 40000.0);
    p.alpha_sei = rng.uniform(0.0, 0.2);
    p.k_sei = rng.uniform(1.0, 200.0);
    const double t = rng.uniform(253.0, 313.0);
    const double soc = rng.uniform(0.75, 0.9);
    const double days = rng.uniform(0.0, 365.0);
    const battery::CycleStress s{rng.uniform(0.01, 0.4), rng.uniform(0.5, 12.5), t};
    const double n = rng.uniform(0.0, 5840.0);

    const double cal = battery::calendar_aging(p, t, soc, days);
    const double cyc = battery::cycle_aging(p, s, n);
    const double fade = battery::sei_capacity_fade(p, cal + cyc);
    worst = std::max(worst, rel_err(cal, oracle::calendar(p.k1, p.activation_energy, t, soc, p.soc_exponent, days)));
    worst = std::max(worst, rel_err(cyc, oracle::cycle(p.k2, p.activation_energy, t, s.dod, p.dod_exponent,
                                                       s.c_rate, p.c_rate_exponent, n)));
    worst = std::max(worst, rel_err(fade, oracle::sei_fade(p.alpha_sei, p.k_sei, (long double)cal + cyc)));
  }
  return {worst <= 1e-12L, fmt("1000 points, worst relative error %.2Le", worst)};
}

// 2. equivalent cycles over a year of the default scenario
Outcome cycle_count() {
  const auto c = testing_support::default_scenario();
  const auto a = sim::run(c, c.sim.seed);
  bool ok = !a.summary.nodes.empty();
  std::string cycles;
  for (const auto& n : a.summary.nodes) {
    ok = ok && std::abs(n.battery.cycles_completed - 5840.0) <= 16.0;
    cycles += fmt(" %.2f", n.battery.cycles_completed);
  }
  return {ok, "cycles per node:" + cycles + " (target 5840 +/- 16)"};
}

// Rebuilds each node's stored energy from phi_initial, the slot deltas and the
// clamp log, and checks it against the engine at every slot. Residuals are
// relative to the pack's rated energy, since phi itself may sit at zero.
bool ledger_closes(const ScenarioConfig& c, const sim::RunArtifacts& a, long double& worst, std::size_t& clamps) {
  const long double scale = c.battery.rated_energy_j();
  bool ok = true;
  for (const auto& audit : a.energy_audit) {
    std::vector<const sim::SlotRecord*> slots;
    for (const auto& s : a.slot_trace)
      if (s.node_id == audit.node_id) slots.push_back(&s);
    std::multimap<double, double> fade_clamps;
    std::size_t logged = 0;
    long double logged_sum = 0.0L;
    for (const auto& e : a.clamps) {
      if (e.node_id != audit.node_id) continue;
      ++logged;
      logged_sum += e.adjustment;
      if (e.kind == sim::ClampKind::CapacityFade) fade_clamps.emplace(e.time, e.adjustment);
    }
    std::size_t slot_clamps = 0;
    long double phi = audit.phi_initial;
    auto next_fade = fade_clamps.begin();
    for (const auto* s : slots) {
      while (next_fade != fade_clamps.end() && next_fade->first <= s->start) phi += (next_fade++)->second;
      const double delta = s->y * s->e_g - s->x * s->e_cons - (1 - s->x) * s->e_sleep;
      phi += delta + s->clamp;
      if (s->clamp != 0.0) ++slot_clamps;
      worst = std::max(worst, fabsl(phi - s->phi_after) / scale);
    }
    while (next_fade != fade_clamps.end()) phi += (next_fade++)->second;
    worst = std::max(worst, fabsl(phi - audit.phi_final) / scale);
    const long double telescoped = (long double)audit.phi_initial + audit.sum_delta + audit.sum_clamp;
    worst = std::max(worst, fabsl(telescoped - audit.phi_final) / scale);
    worst = std::max(worst, fabsl(logged_sum - audit.sum_clamp) / scale);
    ok = ok && slots.size() == audit.slots && logged == audit.clamp_events &&
         slot_clamps + fade_clamps.size() == logged;
    clamps += logged;
  }
  return ok && worst <= 1e-9L;
}

// 3. energy ledger closure with every clamp logged
Outcome energy_conservation() {
  std::vector<ScenarioConfig> configs;
  auto base = testing_support::default_scenario();
  base.sim.duration_days = 30.0;
  configs.push_back(base);
  auto starved = base;  // brownouts
  starved.battery.soc_initial = 0.02;
  starved.energy.e_g_sun_j = 0.0;
  starved.sim.duration_days = 2.0;
  configs.push_back(starved);
  auto flooded = base;  // overflow
  flooded.energy.e_g_sun_j = 60000.0;
  flooded.sim.duration_days = 2.0;
  configs.push_back(flooded);

  sim::RunOptions opt;
  opt.slot_trace = true;
  bool ok = true;
  long double worst = 0.0L;
  std::string counts;
  for (const auto& c : configs) {
    const auto a = sim::run(c, sim::prepare_schedules(c), c.sim.seed, c.sim.protocol, opt);
    std::size_t clamps = 0;
    ok = ledger_closes(c, a, worst, clamps) && ok;
    counts += fmt(" %zu", clamps);
  }
  return {ok, fmt("worst relative residual %.2Le; clamps logged (default/starved/flooded):", worst) + counts};
}

// 4. sun fraction over whole orbits
Outcome sun_fraction() {
  const auto base = testing_support::default_scenario().orbit;
  Rng rng(404);
  int checked = 0;
  bool ok = true;
  for (std::size_t count : {1u, 2u, 3u, 4u, 5u, 6u, 8u, 9u, 10u}) {
    for (std::size_t i = 0; i < count; ++i) {
      const auto o = orbit::node_orbit(base, i, count);
      for (int k = 0; k < 10; ++k) {
        const double t0 = std::floor(rng.uniform(0.0, 1e6));
        const double orbits = 1 + rng.below(1000);
        const double t1 = t0 + orbits * o.period_s;
        double sun = 0.0;
        for (const auto& iv : orbit::phase_timeline(o, t0, t1))
          if (iv.phase == Phase::Sun) sun += iv.end - iv.start;
        ok = ok && sun * 90.0 == (t1 - t0) * 55.0 && orbit::sun_seconds_between(o, t0, t1) * 90.0 == (t1 - t0) * 55.0;
        ++checked;
      }
    }
  }
  return {ok, fmt("%d spans of whole orbits, sun fraction exactly 55/90", checked)};
}

std::vector<orbit::NodeSchedule> random_schedules(const ScenarioConfig& c, Rng& rng) {
  std::vector<orbit::NodeSchedule> out;
  const char* targets[] = {"gs-a", "gs-b", "gs-c"};
  for (std::uint32_t i = 0; i < c.sim.nodes; ++i) {
    const auto o = orbit::node_orbit(c.orbit, i, c.sim.nodes);
    std::vector<orbit::ForecastWindow> ws;
    double t = rng.uniform(0.0, 600.0);
    while (t < c.sim.horizon_s()) {
      const double len = rng.uniform(60.0, 1800.0);
      ws.push_back({0, t, t + len, orbit::phase_at(o, t), targets[rng.below(3)]});
      t += len + rng.uniform(0.0, 900.0);
    }
    out.push_back(orbit::make_node_schedule(std::move(ws)));
  }
  return out;
}

// 5. MAC safety on randomized, energy-stressed scenarios
Outcome mac_safety() {
  Rng rng(505);
  std::uint64_t transmissions = 0, packets = 0, violations = 0, unsettled = 0;
  std::map<std::string, std::uint64_t> drops;
  for (int trial = 0; trial < 100; ++trial) {
    auto c = testing_support::default_scenario();
    c.sim.nodes = 1 + rng.below(5);
    c.sim.duration_days = 1000.0 * c.sim.slot_s / kSecondsPerDay;
    c.sim.traffic.packets_per_hour = rng.uniform(0.5, 60.0);
    c.battery.soc_initial = rng.uniform(0.05, 1.0);
    const double e_sleep = rng.uniform(2000.0, 40000.0);
    c.energy.e_sleep_j = e_sleep;
    c.energy.e_g_sun_j = e_sleep * rng.uniform(0.0, 3.0);
    c.energy.e_critical_j = rng.uniform(0.0, 0.6) * c.battery.rated_energy_j();
    c.mac.dif_ref = 1e-9;
    const auto schedules = random_schedules(c, rng);
    const auto a = sim::run(c, schedules, 1000 + trial, Protocol::BatteryAware);
    for (const auto& tx : a.tx_audit) {
      ++transmissions;
      const bool bad = tx.phase == Phase::Eclipse ? tx.psi <= tx.psi_min : tx.estimate < tx.psi_min + tx.e_critical;
      violations += bad ? 1 : 0;
    }
    const auto& t = a.summary.totals;
    packets += t.generated;
    unsettled += std::count(a.packet_fates.begin(), a.packet_fates.end(), sim::PacketFate::Pending);
    if (t.generated != a.packet_fates.size() || t.generated != t.delivered + t.dropped_total()) ++unsettled;
    for (auto f : a.packet_fates) ++drops[std::string(sim::to_string(f))];
  }
  std::string mix;
  for (const auto& [k, v] : drops) mix += fmt(" %s=%llu", k.c_str(), (unsigned long long)v);
  return {violations == 0 && unsettled == 0 && transmissions > 0,
          fmt("100 scenarios, %llu sequences started, %llu unsafe, %llu unsettled;", (unsigned long long)transmissions,
              (unsigned long long)violations, (unsigned long long)unsettled) +
              mix};
}

// 6. EWMA error decay
Outcome ewma_convergence() {
  Rng rng(606);
  long double worst = 0.0L;
  int checked = 0, zero_checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const double beta = rng.uniform(0.05, 0.95);
    const double target = trial % 2 == 0 ? 0.0 : rng.uniform(0.01, 10.0);
    const double start = target + rng.uniform(-1.0, 1.0) * (target == 0.0 ? 5.0 : target);
    const double err0 = start - target;
    double e = start;
    for (int t = 1; t <= 100; ++t) {
      e = energy::ewma_update(beta, target, e);
      const long double expected = powl(1.0L - beta, t) * fabsl(err0);
      // Rounding leaves about ulp(E*)/beta of noise in e - E*, so 1e-12 is only
      // resolvable while the deviation stays above ~1e12 times that.
      const double ulp = std::nextafter(target, INFINITY) - target;
      if (target != 0.0 && expected < 4e12L * ulp / beta) break;
      worst = std::max(worst, rel_err(fabsl((long double)e - target), expected));
      ++checked;
      if (target == 0.0) ++zero_checked;
    }
  }
  return {worst <= 1e-12L, fmt("%d steps (%d with E*=0 through t=100), worst relative error %.2Le", checked,
                               zero_checked, worst)};
}

// 7. airtime oracle and mean sequence duration
Outcome airtime() {
  double worst = 0.0;
  int points = 0;
  for (int sf = 7; sf <= 12; ++sf)
    for (double bw : {125000.0, 250000.0, 500000.0})
      for (int cr = 5; cr <= 8; ++cr)
        for (int payload = 1; payload <= 255; ++payload) {
          radio::RadioConfig r;
          r.spreading_factor = sf;
          r.bandwidth_hz = bw;
          r.coding_rate_denominator = cr;
          r.payload_bytes = payload;
          const double ref = oracle::lora_airtime(sf, bw, cr - 4, payload, 8, true, false, r.ldro());
          worst = std::max(worst, std::abs(radio::time_on_air(r) - ref) / ref);
          ++points;
        }

  const auto c = testing_support::default_scenario();
  const double toa = radio::time_on_air(c.radio);
  const orbit::ForecastWindow w{0, 0.0, 1800.0, Phase::Sun, "gs"};
  Rng rng(707);
  double total = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const auto starts = mac::run_transmission_sequence(mac::Transmit{0, 0.0}, w, 0.0, c.radio, c.mac, rng);
    total += starts.back() + toa;
  }
  const double mean = total / 10000.0;
  return {worst <= 0.005 && std::abs(mean - 40.0) <= 4.0,
          fmt("%d grid points, worst deviation %.2e; mean 8-attempt sequence %.3f s", points, worst, mean)};
}

// 8. pure ALOHA success under Poisson offered load
Outcome collision_sanity() {
  bool ok = true;
  std::string detail;
  for (double g : {0.1, 0.5, 1.0}) {
    Rng rng(808 + static_cast<std::uint64_t>(g * 100));
    sim::CollisionDomain d;
    const int n = 100000;
    std::vector<std::uint64_t> ids;
    ids.reserve(n);
    double t = 0.0;
    for (int i = 0; i < n; ++i) {
      t += rng.exponential(g);
      d.prune(t);
      ids.push_back(d.add({t, 1.0, 0, 0, 10}));
    }
    int ok_count = 0;
    for (auto id : ids) ok_count += d.collided(id) ? 0 : 1;
    const double p = std::exp(-2.0 * g);
    const double rate = static_cast<double>(ok_count) / n;
    const double se = std::sqrt(p * (1.0 - p) / n);
    const double z = (rate - p) / se;
    ok = ok && std::abs(z) <= 3.0;
    detail += fmt(" G=%.1f: %.4f vs %.4f (z=%+.2f);", g, rate, p, z);
  }
  return {ok, "100000 attempts each;" + detail};
}

// 9. gateway reassessment against node-local stepping
Outcome gateway_agreement() {
  Rng rng(909);
  long double worst = 0.0L;
  int reports = 0;
  for (int trial = 0; trial < 50; ++trial) {
    battery::DegradationParams p;
    p.activation_energy = rng.uniform(35000.0, 40000.0);
    p.alpha_sei = 0.0575;
    p.k_sei = 121.0;
    const std::uint32_t nodes = 1 + rng.below(6);
    std::vector<mac::NodeBatteryReport> all;
    std::vector<battery::BatteryState> local(nodes);
    for (std::uint32_t node = 0; node < nodes; ++node) {
      const battery::ThermalProfile th{rng.uniform(290.0, 313.0), rng.uniform(253.0, 275.0)};
      double t = 0.0;
      const int count = 1 + static_cast<int>(rng.below(60));
      for (int k = 0; k < count; ++k) {
        mac::NodeBatteryReport r;
        r.node_id = node;
        r.period_start = t;
        r.period_end = t + rng.uniform(100.0, 6000.0);
        t = r.period_end;
        r.mean_temperature_sun = th.sun_k;
        r.mean_temperature_eclipse = th.eclipse_k;
        r.mean_soc = rng.uniform(0.3, 1.0);
        r.sun_seconds = rng.uniform(0.0, r.period_end - r.period_start);
        r.c_rate = rng.uniform(0.1, 2.0);
        r.dod_nominal = rng.uniform(0.1, 0.8);
        r.n_slots = 1;
        const double dod = rng.uniform(0.0, 0.9);
        r.dod_observations.push_back(dod);
        auto& s = local[node];
        s = sim::step_battery_per_orbit(s, p, th,
                                            {r.period_end - r.period_start, r.sun_seconds, r.mean_soc,
                                             dod * s.effective_energy_j(), r.c_rate, r.dod_nominal});
        all.push_back(r);
        ++reports;
      }
    }
    // Interleave nodes as a gateway would receive them.
    std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.period_end < b.period_end; });
    const auto g = sim::gateway_compute_fleet_degradation(all, p);
    if (g.size() != nodes) return {false, "wrong number of assessments"};
    for (std::uint32_t node = 0; node < nodes; ++node) {
      worst = std::max(worst, rel_err(g[node].d_linear, local[node].d_linear));
      worst = std::max(worst, rel_err(g[node].fade_fraction, local[node].fade_fraction));
    }
  }

  auto c = testing_support::default_scenario();
  c.sim.duration_days = 10.0;
  const auto a = sim::run(c, 21);
  for (std::size_t i = 0; i < a.summary.nodes.size(); ++i) {
    worst = std::max(worst, rel_err(a.summary.gateway[i].d_linear, a.summary.nodes[i].battery.d_linear));
    worst = std::max(worst, rel_err(a.summary.gateway[i].fade_fraction, a.summary.nodes[i].battery.fade_fraction));
  }
  return {worst <= 1e-12L, fmt("%d random reports plus a 10-day run, worst relative error %.2Le", reports, worst)};
}

// 10. battery-aware vs ALOHA cycle aging over a seed set
Outcome protocol_comparison() {
  const auto c = testing_support::default_scenario();
  const auto schedules = sim::prepare_schedules(c);
  const int seeds = 20;
  int wins = 0;
  double pdr_ba = 0.0, pdr_al = 0.0, cyc_ba = 0.0, cyc_al = 0.0;
  double min_margin = INFINITY, max_margin = -INFINITY;
  for (int s = 1; s <= seeds; ++s) {
    const auto ba = sim::run(c, schedules, s, Protocol::BatteryAware);
    const auto al = sim::run(c, schedules, s, Protocol::Aloha);
    wins += ba.summary.total_cycle_aging <= al.summary.total_cycle_aging ? 1 : 0;
    const double margin = (al.summary.total_cycle_aging - ba.summary.total_cycle_aging) / al.summary.total_cycle_aging;
    min_margin = std::min(min_margin, margin);
    max_margin = std::max(max_margin, margin);
    pdr_ba += ba.summary.delivery_ratio();
    pdr_al += al.summary.delivery_ratio();
    cyc_ba += ba.summary.total_cycle_aging;
    cyc_al += al.summary.total_cycle_aging;
  }
  return {wins == seeds, fmt("battery-aware <= ALOHA on %d/%d seeds; mean cycle aging %.9e vs %.9e "
                             "(relative saving %.2e..%.2e); mean delivery ratio %.4f vs %.4f",
                             wins, seeds, cyc_ba / seeds, cyc_al / seeds, min_margin, max_margin, pdr_ba / seeds,
                             pdr_al / seeds)};
}

// 11. byte-identical outputs for identical inputs
Outcome determinism() {
  auto c = testing_support::default_scenario();
  c.sim.duration_days = 10.0;
  const auto schedules = sim::prepare_schedules(c);
  bool ok = true;
  std::size_t bytes = 0;
  for (auto protocol : {Protocol::BatteryAware, Protocol::Aloha}) {
    const auto a = sim::run(c, schedules, 42, protocol);
    const auto b = sim::run(c, sim::prepare_schedules(c), 42, protocol);
    const auto csv_a = sim::metrics_csv(a.metrics), csv_b = sim::metrics_csv(b.metrics);
    const auto json_a = sim::metrics_json(a.metrics).dump(2), json_b = sim::metrics_json(b.metrics).dump(2);
    const auto sum_a = sim::summary_json(a.summary).dump(2), sum_b = sim::summary_json(b.summary).dump(2);
    ok = ok && csv_a == csv_b && json_a == json_b && sum_a == sum_b;
    bytes += csv_a.size() + json_a.size() + sum_a.size();
  }
  return {ok, fmt("two protocols, %zu bytes compared", bytes)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"degradation oracle equivalence", degradation_oracle},
      {"cycle-count reproduction", cycle_count},
      {"energy conservation", energy_conservation},
      {"sun fraction", sun_fraction},
      {"MAC safety", mac_safety},
      {"EWMA convergence", ewma_convergence},
      {"airtime oracle", airtime},
      {"collision sanity", collision_sanity},
      {"gateway/node agreement", gateway_agreement},
      {"directional protocol claim", protocol_comparison},
      {"determinism", determinism},
  };
  const double limits[] = {1, 30, 30, 0, 0, 0, 0, 60, 0, 300, 0};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (limits[i] > 0 && secs > limits[i]) {
      o.pass = false;
      o.detail += fmt(" [over the %.0f s budget]", limits[i]);
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s  %2zu %-32s %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str(),
                secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
