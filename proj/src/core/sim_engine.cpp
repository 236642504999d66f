#include "leolora/sim_engine.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <optional>

#include "leolora/errors.hpp"
#include "leolora/text_format.hpp"

namespace leolora::sim {

using nlohmann::ordered_json;

void EventQueue::schedule(double time, EventKind kind, std::uint32_t node, std::uint64_t payload) {
  if (!(time >= now_)) throw ContractError("EventQueue: event scheduled in the past");
  heap_.push(SimEvent{time, next_sequence_++, kind, node, payload});
}

SimEvent EventQueue::pop() {
  if (heap_.empty()) throw ContractError("EventQueue: pop on empty queue");
  SimEvent e = heap_.top();
  heap_.pop();
  now_ = e.time;
  ++processed_;
  return e;
}

PacketCounts& PacketCounts::operator+=(const PacketCounts& o) noexcept {
  generated += o.generated;
  delivered += o.delivered;
  dropped_insufficient_energy_sun += o.dropped_insufficient_energy_sun;
  dropped_below_reserve_eclipse += o.dropped_below_reserve_eclipse;
  dropped_brownout += o.dropped_brownout;
  dropped_collision_exhausted += o.dropped_collision_exhausted;
  dropped_no_window += o.dropped_no_window;
  return *this;
}

std::string_view to_string(PacketFate f) noexcept {
  switch (f) {
    case PacketFate::Pending: return "pending";
    case PacketFate::Delivered: return "delivered";
    case PacketFate::InsufficientEnergySun: return "insufficient_energy_sun";
    case PacketFate::BelowReserveEclipse: return "below_reserve_eclipse";
    case PacketFate::Brownout: return "brownout";
    case PacketFate::CollisionExhausted: return "collision_exhausted";
    case PacketFate::NoWindow: return "no_window";
  }
  return "unknown";
}

double RunSummary::delivery_ratio() const noexcept {
  return totals.generated ? static_cast<double>(totals.delivered) / static_cast<double>(totals.generated) : 0.0;
}

std::vector<orbit::NodeSchedule> prepare_schedules(const ScenarioConfig& c) {
  if (c.schedule_override) return c.schedule_override->nodes;
  std::vector<orbit::NodeSchedule> out;
  out.reserve(c.sim.nodes);
  for (std::uint32_t i = 0; i < c.sim.nodes; ++i) {
    out.push_back(orbit::build_schedule(orbit::node_orbit(c.orbit, i, c.sim.nodes), c.stations, c.sim.horizon_s(),
                                        c.sim.visibility_step_s));
  }
  return out;
}

namespace {

struct Packet {
  std::uint64_t id = 0;
  double deadline = 0.0;
  std::uint32_t window_id = 0;
  double reserved = 0.0;
  std::vector<double> attempt_starts;
  std::size_t next_attempt = 0;
  double radio_energy = 0.0;
  std::uint64_t attempt_id = 0;
};

PacketFate fate_of(mac::DropReason r) {
  switch (r) {
    case mac::DropReason::InsufficientEnergySun: return PacketFate::InsufficientEnergySun;
    case mac::DropReason::BelowReserveEclipse: return PacketFate::BelowReserveEclipse;
    case mac::DropReason::NoWindow: break;
  }
  return PacketFate::NoWindow;
}

struct Node {
  std::uint32_t id = 0;
  orbit::OrbitConfig orbit;
  const orbit::NodeSchedule* schedule = nullptr;
  std::vector<std::uint32_t> receivers;  // by window id
  Rng traffic_rng{0};
  Rng mac_rng{0};
  double slot_offset = 0.0;
  std::uint64_t next_grid = 0;
  double last_tick = 0.0;
  bool done = false;
  bool forced_sleep = false;
  energy::NodeEnergyState energy;
  battery::BatteryState battery;
  mac::PeriodLedger ledger;
  std::deque<Packet> undecided;
  std::vector<Packet> planned;
  std::optional<Packet> in_flight;
  double slot_radio_energy = 0.0;
  bool slot_tx = false;
  std::size_t window_cursor = 0;
  std::uint32_t next_window_event = 0;
  Phase phase = Phase::Sun;
  double phase_since = 0.0;
  NodeSummary summary;
  EnergyAudit audit;
};

double next_phase_change(const orbit::OrbitConfig& o, double t) {
  double tau = std::fmod(t + o.anchor_s(), o.period_s);
  if (tau < 0.0) tau += o.period_s;
  const double to_boundary = tau < o.sun_duration_s ? o.sun_duration_s - tau : o.period_s - tau;
  return t + to_boundary;
}

class Engine {
 public:
  Engine(const ScenarioConfig& c, std::span<const orbit::NodeSchedule> schedules, std::uint64_t seed,
         Protocol protocol, const RunOptions& options)
      : c_(c),
        resolved_(resolve_energy(c)),
        seed_(seed),
        protocol_(protocol),
        options_(options),
        horizon_(c.sim.horizon_s()),
        slot_(c.sim.slot_s),
        toa_(radio::time_on_air(c.radio)) {
    if (schedules.size() != c.sim.nodes) {
      throw ContractError("run: expected one schedule per node");
    }
    std::map<std::string, std::uint32_t> receiver_ids;
    for (const auto& s : schedules) {
      for (const auto& w : s.windows) receiver_ids.emplace(w.target, 0);
    }
    std::uint32_t next = 0;
    for (auto& [name, idx] : receiver_ids) idx = next++;

    const std::uint64_t base = mix_seed(seed);
    nodes_.resize(c.sim.nodes);
    for (std::uint32_t i = 0; i < c.sim.nodes; ++i) {
      Node& n = nodes_[i];
      n.id = i;
      n.orbit = orbit::node_orbit(c.orbit, i, c.sim.nodes);
      n.schedule = &schedules[i];
      if (auto issues = orbit::check_windows(n.schedule->windows); !issues.empty()) {
        throw ContractError("run: node " + std::to_string(i) + " schedule invalid: " + issues.front());
      }
      for (const auto& w : n.schedule->windows) n.receivers.push_back(receiver_ids.at(w.target));
      n.traffic_rng = Rng(mix_seed(base + 3 * i + 1));
      n.mac_rng = Rng(mix_seed(base + 3 * i + 2));
      Rng grid(mix_seed(base + 3 * i + 3));
      n.slot_offset = grid.uniform() * slot_;

      n.energy.phi = resolved_.phi_initial;
      n.energy.phi_max = resolved_.phi_max;
      n.energy.phi_min = resolved_.phi_min;
      n.energy.e_critical = resolved_.e_critical;
      n.energy.ewma_estimate = resolved_.sequence_energy;
      n.energy.validate();

      n.battery.soc = c.battery.soc_initial;
      n.battery.capacity_rated_ah = c.battery.capacity_ah;
      n.battery.voltage_nominal = c.battery.voltage_v;

      n.phase = orbit::phase_at(n.orbit, 0.0);
      n.summary.node_id = i;
      n.audit.node_id = i;
      n.audit.phi_initial = n.energy.phi;
    }
  }

  RunArtifacts run() {
    for (auto& n : nodes_) {
      q_.schedule(0.0, EventKind::SlotTick, n.id, 0);
      schedule_arrival(n, 0.0, true);
      if (double t = next_phase_change(n.orbit, 0.0); t < horizon_) q_.schedule(t, EventKind::PhaseChange, n.id);
      if (double t = orbit::next_sunrise(n.orbit, 0.0); t < horizon_) q_.schedule(t, EventKind::ReportDue, n.id);
      schedule_window_open(n);
    }
    if (!nodes_.empty() && c_.sim.metrics_interval_s < horizon_) {
      q_.schedule(c_.sim.metrics_interval_s, EventKind::MetricsSample, 0, 1);
    }

    while (!q_.empty()) {
      const SimEvent e = q_.pop();
      if (e.time > horizon_) break;
      dispatch(e);
    }

    for (auto& n : nodes_) {
      if (!n.done) throw ContractError("run: node did not reach the horizon");
      if (n.in_flight) settle(n, *n.in_flight, PacketFate::NoWindow);
      n.in_flight.reset();
      for (auto& p : n.planned) settle(n, p, PacketFate::NoWindow);
      n.planned.clear();
      for (auto& p : n.undecided) settle(n, p, PacketFate::NoWindow);
      n.undecided.clear();
      n.summary.sun_seconds += n.phase == Phase::Sun ? horizon_ - n.phase_since : 0.0;
    }
    sample_metrics(horizon_);
    return finish();
  }

 private:
  void dispatch(const SimEvent& e) {
    if (e.kind == EventKind::MetricsSample) {
      sample_metrics(e.time);
      const double next = e.time + c_.sim.metrics_interval_s;
      if (next < horizon_) q_.schedule(next, EventKind::MetricsSample, 0, e.payload + 1);
      return;
    }
    Node& n = nodes_[e.node];
    if (n.done) return;
    switch (e.kind) {
      case EventKind::SlotTick: on_tick(n, e.time, e.payload == 1); break;
      case EventKind::PacketArrival: on_arrival(n, e.time); break;
      case EventKind::TxAttemptStart: on_attempt_start(n, e.time, e.payload); break;
      case EventKind::TxAttemptEnd: on_attempt_end(n, e.time, e.payload); break;
      case EventKind::ReportDue:
        close_period(n, e.time);
        if (double t = orbit::next_sunrise(n.orbit, e.time); t < horizon_) q_.schedule(t, EventKind::ReportDue, n.id);
        break;
      case EventKind::PhaseChange:
        if (n.phase == Phase::Sun) n.summary.sun_seconds += e.time - n.phase_since;
        n.phase = n.phase == Phase::Sun ? Phase::Eclipse : Phase::Sun;
        n.phase_since = e.time;
        if (double t = next_phase_change(n.orbit, e.time); t < horizon_) {
          q_.schedule(t, EventKind::PhaseChange, n.id);
        }
        break;
      case EventKind::WindowOpen:
        ++n.summary.windows_opened;
        q_.schedule(std::min(n.schedule->windows[e.payload].end, horizon_), EventKind::WindowClose, n.id, e.payload);
        schedule_window_open(n);
        break;
      case EventKind::WindowClose: on_window_close(n, static_cast<std::uint32_t>(e.payload)); break;
      case EventKind::BrownoutRecovery: n.forced_sleep = false; break;
      case EventKind::MetricsSample: break;
    }
  }

  void schedule_window_open(Node& n) {
    const auto& ws = n.schedule->windows;
    if (n.next_window_event < ws.size() && ws[n.next_window_event].start < horizon_) {
      const double t = std::max(ws[n.next_window_event].start, q_.now());
      q_.schedule(t, EventKind::WindowOpen, n.id, n.next_window_event);
      ++n.next_window_event;
    }
  }

  void schedule_arrival(Node& n, double now, bool first) {
    const auto& traffic = c_.sim.traffic;
    if (!(traffic.packets_per_hour > 0.0)) return;
    const double interval = kSecondsPerHour / traffic.packets_per_hour;
    double gap = 0.0;
    if (traffic.model == TrafficModel::Poisson) {
      gap = n.traffic_rng.exponential(traffic.packets_per_hour / kSecondsPerHour);
    } else {
      gap = first ? n.traffic_rng.uniform() * interval : interval;
    }
    if (now + gap < horizon_) q_.schedule(now + gap, EventKind::PacketArrival, n.id);
  }

  double grid_time(const Node& n, std::uint64_t k) const { return n.slot_offset + static_cast<double>(k) * slot_; }

  // First slot boundary at or after t.
  double first_tick_at_or_after(const Node& n, double t) const {
    if (t <= n.slot_offset) return n.slot_offset;
    auto k = static_cast<std::uint64_t>(std::ceil((t - n.slot_offset) / slot_));
    if (k > 0 && grid_time(n, k - 1) >= t) --k;
    while (grid_time(n, k) < t) ++k;
    return grid_time(n, k);
  }

  bool usable(const Node& n, const orbit::ForecastWindow& w, double now) const {
    const double t = first_tick_at_or_after(n, std::max(w.start, now));
    return t < horizon_ && t + toa_ <= w.end;
  }

  mac::SelectionContext selection_context(const Node& n, double now) const {
    mac::SelectionContext ctx;
    ctx.now = now;
    ctx.slot_s = slot_;
    ctx.harvest = resolved_.harvest;
    ctx.profile = resolved_.profile;
    ctx.mac = c_.mac;
    ctx.degradation = c_.battery.degradation;
    ctx.stress.dod_nominal = c_.battery.dod;
    ctx.stress.c_rate = c_.battery.c_rate;
    ctx.stress.thermal = c_.battery.thermal;
    ctx.stress.effective_energy_j = n.battery.effective_energy_j();
    return ctx;
  }

  void on_arrival(Node& n, double now) {
    Packet p;
    p.id = fates_.size();
    p.deadline = now + c_.mac.deadline_orbits * n.orbit.period_s;
    fates_.push_back(PacketFate::Pending);
    ++n.summary.packets.generated;
    n.undecided.push_back(std::move(p));
    schedule_arrival(n, now, false);
  }

  void settle(Node& n, Packet& p, PacketFate fate) {
    if (fates_.at(p.id) != PacketFate::Pending) throw ContractError("packet settled twice");
    fates_[p.id] = fate;
    release(n, p);
    auto& k = n.summary.packets;
    switch (fate) {
      case PacketFate::Delivered: ++k.delivered; break;
      case PacketFate::InsufficientEnergySun: ++k.dropped_insufficient_energy_sun; break;
      case PacketFate::BelowReserveEclipse: ++k.dropped_below_reserve_eclipse; break;
      case PacketFate::Brownout: ++k.dropped_brownout; break;
      case PacketFate::CollisionExhausted: ++k.dropped_collision_exhausted; break;
      case PacketFate::NoWindow: ++k.dropped_no_window; break;
      case PacketFate::Pending: throw ContractError("packet settled as pending");
    }
  }

  void release(Node& n, Packet& p) {
    n.energy.reserved = std::max(0.0, n.energy.reserved - p.reserved);
    p.reserved = 0.0;
  }

  void on_tick(Node& n, double now, bool final) {
    finalize_slot(n, now);
    if (final) {
      close_period(n, now);
      n.done = true;
      return;
    }
    if (!n.forced_sleep) mac_step(n, now);

    double next = grid_time(n, n.next_grid);
    while (next <= now) next = grid_time(n, ++n.next_grid);
    ++n.next_grid;
    if (next >= horizon_) {
      q_.schedule(horizon_, EventKind::SlotTick, n.id, 1);
    } else {
      q_.schedule(next, EventKind::SlotTick, n.id, 0);
    }
  }

  void finalize_slot(Node& n, double now) {
    const double t0 = n.last_tick;
    const double dt = now - t0;
    if (!(dt > 0.0)) return;
    const double frac = dt / slot_;
    const double sun_s = orbit::sun_seconds_between(n.orbit, t0, now);
    const double e_g = resolved_.harvest.for_slot(sun_s, slot_);
    const int y = e_g > 0.0 ? 1 : 0;
    const int x = n.slot_tx ? 1 : 0;
    const double e_sleep = resolved_.profile.e_sleep * frac;
    const energy::PowerProfile profile{e_sleep + n.slot_radio_energy, e_sleep};
    const double consumption = x ? profile.e_cons_tx : profile.e_sleep;
    const double phi_before = n.energy.phi;

    const auto out = energy::energy_step(n.energy, x, y, e_g, profile, sun_s > 0.0 ? Phase::Sun : Phase::Eclipse);
    n.audit.sum_delta += out.delta;
    n.audit.sum_clamp += out.clamp_adjustment;
    ++n.audit.slots;
    if (out.brownout || out.overflow) {
      ++n.audit.clamp_events;
      clamps_.push_back({n.id, now, out.brownout ? ClampKind::Brownout : ClampKind::Overflow, out.clamp_adjustment});
    }

    // Battery-supplied energy: everything drawn in the eclipse part of the
    // slot, plus whatever the slot's harvest did not cover in the sun part.
    const double sun_part = consumption * (sun_s / dt);
    const double discharged =
        std::min(phi_before, consumption - sun_part + std::max(0.0, sun_part - y * e_g));

    auto& l = n.ledger;
    ++l.slots;
    l.transmissions += static_cast<std::uint32_t>(x);
    l.energy_consumed += consumption;
    l.energy_harvested += y * e_g;
    l.discharged += discharged;
    l.sun_seconds += sun_s;
    l.soc_time_integral += 0.5 * (phi_before + n.energy.phi) / n.energy.phi_max * dt;
    n.summary.energy_consumed += consumption;
    n.summary.energy_harvested += y * e_g;

    if (options_.slot_trace) {
      trace_.push_back({n.id, t0, now, x, y, e_g, profile.e_cons_tx, profile.e_sleep, sun_s, n.energy.phi,
                        out.clamp_adjustment});
    }

    n.slot_radio_energy = 0.0;
    n.slot_tx = false;
    n.last_tick = now;

    if (out.brownout) {
      ++n.audit.brownouts;
      if (n.in_flight) {
        settle(n, *n.in_flight, PacketFate::Brownout);
        n.in_flight.reset();
      }
      n.forced_sleep = true;
      if (now + slot_ < horizon_) q_.schedule(now + slot_, EventKind::BrownoutRecovery, n.id);
    }
  }

  void close_period(Node& n, double) {
    auto& l = n.ledger;
    l.end = n.last_tick;
    if (!(l.end > l.start)) return;
    const double capacity = n.battery.effective_energy_j();
    l.dod_observations.push_back(std::min(1.0, l.discharged / capacity));

    const OrbitLedger orbit_ledger{l.duration(), l.sun_seconds, l.mean_soc(), l.discharged, c_.battery.c_rate,
                                   c_.battery.dod};
    n.battery = step_battery_per_orbit(n.battery, c_.battery.degradation, c_.battery.thermal, orbit_ledger);
    reports_.push_back(mac::report_battery_summary(n.id, l, c_.battery.thermal, c_.battery.c_rate, c_.battery.dod));

    n.energy.phi_max = n.battery.effective_energy_j();
    n.energy.phi_min = c_.energy.psi_min_fraction * n.energy.phi_max;
    if (n.energy.phi > n.energy.phi_max) {
      const double adj = n.energy.phi_max - n.energy.phi;
      n.energy.phi = n.energy.phi_max;
      n.audit.sum_clamp += adj;
      ++n.audit.clamp_events;
      clamps_.push_back({n.id, n.last_tick, ClampKind::CapacityFade, adj});
    }
    n.battery.soc = n.energy.phi / n.energy.phi_max;
    l = mac::PeriodLedger{};
    l.start = l.end = n.last_tick;
  }

  std::vector<orbit::ForecastWindow> candidates(Node& n, double now, double deadline) {
    const auto& ws = n.schedule->windows;
    while (n.window_cursor < ws.size() && ws[n.window_cursor].start + orbit::kMaxWindowS < now) ++n.window_cursor;
    std::vector<orbit::ForecastWindow> out;
    for (std::size_t i = n.window_cursor; i < ws.size() && ws[i].start <= deadline; ++i) {
      if (usable(n, ws[i], now)) out.push_back(ws[i]);
    }
    return out;
  }

  void mac_step(Node& n, double now) {
    while (!n.undecided.empty()) {
      Packet p = std::move(n.undecided.front());
      n.undecided.pop_front();
      const auto cands = candidates(n, now, p.deadline);
      mac::TxDecision d = mac::Drop{mac::DropReason::NoWindow};
      if (protocol_ == Protocol::BatteryAware) {
        d = mac::select_forecast_window(cands, n.energy, selection_context(n, now));
      } else if (!cands.empty()) {
        d = mac::Transmit{cands.front().window_id, 0.0};
      }
      if (const auto* drop_decision = std::get_if<mac::Drop>(&d)) {
        settle(n, p, fate_of(drop_decision->reason));
        continue;
      }
      p.window_id = std::get<mac::Transmit>(d).window_id;
      if (protocol_ == Protocol::BatteryAware) {
        p.reserved = n.energy.ewma_estimate;
        n.energy.reserved += p.reserved;
      }
      n.planned.push_back(std::move(p));
    }

    if (n.in_flight) return;
    for (std::size_t i = 0; i < n.planned.size();) {
      Packet& p = n.planned[i];
      const auto& w = n.schedule->windows[p.window_id];
      if (!(w.start <= now && now + toa_ <= w.end)) {
        ++i;
        continue;
      }
      release(n, p);
      const auto ctx = selection_context(n, now);
      const auto ev = mac::evaluate_window(w, n.energy, ctx);
      if (protocol_ == Protocol::BatteryAware && !ev.feasible) {
        settle(n, p, fate_of(ev.failure));
        n.planned.erase(n.planned.begin() + static_cast<std::ptrdiff_t>(i));
        continue;
      }
      auto starts = mac::run_transmission_sequence(mac::Transmit{p.window_id, ev.objective}, w, now, c_.radio,
                                                   c_.mac, n.mac_rng);
      if (starts.empty()) {
        // Backoff overshot the window; try again next slot if there is one.
        if (!usable(n, w, now + slot_ * 0.5)) {
          settle(n, p, PacketFate::NoWindow);
          n.planned.erase(n.planned.begin() + static_cast<std::ptrdiff_t>(i));
        } else {
          if (protocol_ == Protocol::BatteryAware) {
            p.reserved = n.energy.ewma_estimate;
            n.energy.reserved += p.reserved;
          }
          ++i;
        }
        continue;
      }
      audit_.push_back({n.id, p.id, now, p.window_id, w.phase, n.energy.available(), ev.estimate, n.energy.phi_min,
                        n.energy.e_critical, protocol_});
      p.attempt_starts = std::move(starts);
      n.in_flight = std::move(p);
      n.planned.erase(n.planned.begin() + static_cast<std::ptrdiff_t>(i));
      q_.schedule(n.in_flight->attempt_starts.front(), EventKind::TxAttemptStart, n.id, n.in_flight->id);
      return;
    }
  }

  void on_window_close(Node& n, std::uint32_t window_id) {
    for (std::size_t i = 0; i < n.planned.size();) {
      if (n.planned[i].window_id == window_id) {
        settle(n, n.planned[i], PacketFate::NoWindow);
        n.planned.erase(n.planned.begin() + static_cast<std::ptrdiff_t>(i));
      } else {
        ++i;
      }
    }
  }

  void on_attempt_start(Node& n, double now, std::uint64_t packet_id) {
    if (!n.in_flight || n.in_flight->id != packet_id) return;
    Packet& p = *n.in_flight;
    const std::uint32_t channel =
        c_.radio.channels > 1 ? n.mac_rng.below(static_cast<std::uint32_t>(c_.radio.channels)) : 0;
    domain_.prune(now);
    p.attempt_id = domain_.add({now, toa_, n.receivers[p.window_id], channel, c_.radio.spreading_factor});
    ++p.next_attempt;
    p.radio_energy += resolved_.attempt_energy;
    n.slot_radio_energy += resolved_.attempt_energy;
    n.slot_tx = true;
    ++n.summary.attempts;
    q_.schedule(now + toa_, EventKind::TxAttemptEnd, n.id, packet_id);
  }

  void on_attempt_end(Node& n, double, std::uint64_t packet_id) {
    if (!n.in_flight || n.in_flight->id != packet_id) return;
    Packet& p = *n.in_flight;
    if (!domain_.collided(p.attempt_id)) {
      finish_sequence(n, PacketFate::Delivered);
    } else if (p.next_attempt < p.attempt_starts.size()) {
      q_.schedule(p.attempt_starts[p.next_attempt], EventKind::TxAttemptStart, n.id, packet_id);
    } else {
      finish_sequence(n, PacketFate::CollisionExhausted);
    }
  }

  void finish_sequence(Node& n, PacketFate fate) {
    n.energy.ewma_estimate = energy::ewma_update(c_.mac.beta, n.in_flight->radio_energy, n.energy.ewma_estimate);
    settle(n, *n.in_flight, fate);
    n.in_flight.reset();
  }

  void sample_metrics(double t) {
    for (const auto& n : nodes_) {
      const auto& k = n.summary.packets;
      metrics_.push_back({t, n.id, n.energy.phi / n.energy.phi_max, n.battery.fade_fraction, n.battery.d_linear,
                          k.delivered, k.dropped_energy(), k.dropped_collision_exhausted, k.dropped_no_window,
                          n.summary.energy_harvested, n.summary.energy_consumed});
    }
  }

  RunArtifacts finish() {
    RunArtifacts a;
    auto& s = a.summary;
    s.protocol = protocol_;
    s.seed = seed_;
    s.horizon_s = horizon_;
    s.events = q_.processed();
    for (auto& n : nodes_) {
      n.summary.battery = n.battery;
      n.summary.final_soc = n.energy.phi / n.energy.phi_max;
      s.totals += n.summary.packets;
      s.attempts += n.summary.attempts;
      s.total_cycle_aging += n.battery.cycle_loss;
      s.total_calendar_aging += n.battery.calendar_loss;
      n.audit.phi_final = n.energy.phi;
      s.nodes.push_back(n.summary);
      a.energy_audit.push_back(n.audit);
    }
    for (auto f : fates_) {
      if (f == PacketFate::Pending) throw ContractError("run: packet left pending at end of run");
    }
    if (s.totals.generated != s.totals.delivered + s.totals.dropped_total()) {
      throw ContractError("run: packet accounting does not balance");
    }
    s.gateway = gateway_compute_fleet_degradation(reports_, c_.battery.degradation);
    a.metrics = std::move(metrics_);
    a.tx_audit = std::move(audit_);
    a.clamps = std::move(clamps_);
    a.reports = std::move(reports_);
    a.packet_fates = std::move(fates_);
    a.slot_trace = std::move(trace_);
    return a;
  }

  const ScenarioConfig& c_;
  ResolvedEnergy resolved_;
  std::uint64_t seed_;
  Protocol protocol_;
  RunOptions options_;
  double horizon_;
  double slot_;
  double toa_;
  EventQueue q_;
  CollisionDomain domain_;
  std::vector<Node> nodes_;
  std::vector<PacketFate> fates_;
  std::vector<MetricsRecord> metrics_;
  std::vector<TxAudit> audit_;
  std::vector<ClampEvent> clamps_;
  std::vector<mac::NodeBatteryReport> reports_;
  std::vector<SlotRecord> trace_;
};

}  // namespace

RunArtifacts run(const ScenarioConfig& config, std::uint64_t seed) {
  const auto schedules = prepare_schedules(config);
  return run(config, schedules, seed, config.sim.protocol);
}

RunArtifacts run(const ScenarioConfig& config, std::span<const orbit::NodeSchedule> schedules, std::uint64_t seed,
                 Protocol protocol, const RunOptions& options) {
  return Engine(config, schedules, seed, protocol, options).run();
}

std::string metrics_csv(std::span<const MetricsRecord> records) {
  std::string out =
      "time,node_id,soc,fade_fraction,d_linear,packets_delivered,packets_dropped_energy,"
      "packets_dropped_collision_exhausted,packets_dropped_no_window,energy_harvested,energy_consumed\n";
  for (const auto& r : records) {
    out += format_double(r.time) + ',' + std::to_string(r.node_id) + ',' + format_double(r.soc) + ',' +
           format_double(r.fade_fraction) + ',' + format_double(r.d_linear) + ',' +
           std::to_string(r.packets_delivered) + ',' + std::to_string(r.packets_dropped_energy) + ',' +
           std::to_string(r.packets_dropped_collision_exhausted) + ',' + std::to_string(r.packets_dropped_no_window) +
           ',' + format_double(r.energy_harvested) + ',' + format_double(r.energy_consumed) + '\n';
  }
  return out;
}

ordered_json metrics_json(std::span<const MetricsRecord> records) {
  ordered_json rows = ordered_json::array();
  for (const auto& r : records) {
    rows.push_back({{"time", r.time},
                    {"node_id", r.node_id},
                    {"soc", r.soc},
                    {"fade_fraction", r.fade_fraction},
                    {"d_linear", r.d_linear},
                    {"packets_delivered", r.packets_delivered},
                    {"packets_dropped_energy", r.packets_dropped_energy},
                    {"packets_dropped_collision_exhausted", r.packets_dropped_collision_exhausted},
                    {"packets_dropped_no_window", r.packets_dropped_no_window},
                    {"energy_harvested", r.energy_harvested},
                    {"energy_consumed", r.energy_consumed}});
  }
  return rows;
}

namespace {

ordered_json counts_json(const PacketCounts& k) {
  return {{"generated", k.generated},
          {"delivered", k.delivered},
          {"dropped",
           {{"insufficient_energy_sun", k.dropped_insufficient_energy_sun},
            {"below_reserve_eclipse", k.dropped_below_reserve_eclipse},
            {"brownout", k.dropped_brownout},
            {"collision_exhausted", k.dropped_collision_exhausted},
            {"no_window", k.dropped_no_window}}}};
}

}  // namespace

ordered_json summary_json(const RunSummary& s) {
  ordered_json doc;
  doc["protocol"] = std::string(to_string(s.protocol));
  doc["seed"] = s.seed;
  doc["horizon_s"] = s.horizon_s;
  doc["events"] = s.events;
  doc["packets"] = counts_json(s.totals);
  doc["packet_delivery_ratio"] = s.delivery_ratio();
  doc["attempts"] = s.attempts;
  doc["total_cycle_aging"] = s.total_cycle_aging;
  doc["total_calendar_aging"] = s.total_calendar_aging;
  ordered_json nodes = ordered_json::array();
  for (const auto& n : s.nodes) {
    nodes.push_back({{"node_id", n.node_id},
                     {"fade_fraction", n.battery.fade_fraction},
                     {"d_linear", n.battery.d_linear},
                     {"cycles", n.battery.cycles_completed},
                     {"calendar_days", n.battery.calendar_days},
                     {"calendar_aging", n.battery.calendar_loss},
                     {"cycle_aging", n.battery.cycle_loss},
                     {"effective_capacity_ah", n.battery.effective_capacity_ah()},
                     {"final_soc", n.final_soc},
                     {"attempts", n.attempts},
                     {"windows_opened", n.windows_opened},
                     {"sun_seconds", n.sun_seconds},
                     {"energy_harvested_j", n.energy_harvested},
                     {"energy_consumed_j", n.energy_consumed},
                     {"packets", counts_json(n.packets)}});
  }
  doc["nodes"] = std::move(nodes);
  ordered_json gateway = ordered_json::array();
  for (const auto& g : s.gateway) {
    gateway.push_back({{"node_id", g.node_id},
                       {"reports", g.reports},
                       {"cycles", g.cycles},
                       {"calendar_aging", g.calendar_loss},
                       {"cycle_aging", g.cycle_loss},
                       {"d_linear", g.d_linear},
                       {"fade_fraction", g.fade_fraction}});
  }
  doc["gateway"] = std::move(gateway);
  return doc;
}

}  // namespace leolora::sim
