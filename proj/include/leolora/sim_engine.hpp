#pragma once

// Discrete-event simulation of a fleet of satellite nodes: per-slot energy
// balance, MAC decisions, retransmissions and collisions at the receivers, and
// per-orbit battery aging with gateway-side reassessment.

#include <cstdint>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "leolora/battery_accounting.hpp"
#include "leolora/battery_report.hpp"
#include "leolora/scenario.hpp"

namespace leolora::sim {

enum class EventKind : std::uint8_t {
  PhaseChange,
  WindowOpen,
  WindowClose,
  TxAttemptStart,
  TxAttemptEnd,
  SlotTick,
  ReportDue,
  BrownoutRecovery,
  PacketArrival,
  MetricsSample,
};

struct SimEvent {
  double time = 0.0;
  std::uint64_t sequence = 0;
  EventKind kind = EventKind::SlotTick;
  std::uint32_t node = 0;
  std::uint64_t payload = 0;
};

/// Min-queue on (time, sequence); sequence is assigned when the event is scheduled.
class EventQueue {
 public:
  /// Throws ContractError when `time` lies before the last popped event.
  void schedule(double time, EventKind kind, std::uint32_t node, std::uint64_t payload = 0);
  bool empty() const noexcept { return heap_.empty(); }
  SimEvent pop();
  double now() const noexcept { return now_; }
  std::uint64_t processed() const noexcept { return processed_; }

 private:
  struct Later {
    bool operator()(const SimEvent& a, const SimEvent& b) const noexcept {
      return a.time != b.time ? a.time > b.time : a.sequence > b.sequence;
    }
  };
  std::priority_queue<SimEvent, std::vector<SimEvent>, Later> heap_;
  std::uint64_t next_sequence_ = 0;
  std::uint64_t processed_ = 0;
  double now_ = 0.0;
};

struct Attempt {
  double start = 0.0;
  double airtime = 0.0;
  std::uint32_t receiver = 0;
  std::uint32_t channel = 0;
  int spreading_factor = 0;
};

/// Batch form: an attempt fails iff its [start, start + airtime) overlaps
/// another attempt at the same receiver, channel and SF. No capture.
std::vector<bool> resolve_collisions(std::span<const Attempt> attempts);

/// Incremental form used by the engine. Attempts are added in start order; the
/// verdict for an attempt is final once the clock passes its end.
class CollisionDomain {
 public:
  std::uint64_t add(const Attempt& a);
  bool collided(std::uint64_t id) const;
  /// Forgets attempts that ended before `t` and can no longer overlap new ones.
  void prune(double t);

 private:
  struct Entry {
    Attempt attempt;
    std::uint64_t id;
  };
  std::vector<Entry> live_;
  std::vector<std::uint8_t> collided_;  // by id
};

struct PacketCounts {
  std::uint64_t generated = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped_insufficient_energy_sun = 0;
  std::uint64_t dropped_below_reserve_eclipse = 0;
  std::uint64_t dropped_brownout = 0;
  std::uint64_t dropped_collision_exhausted = 0;
  std::uint64_t dropped_no_window = 0;

  std::uint64_t dropped_energy() const noexcept {
    return dropped_insufficient_energy_sun + dropped_below_reserve_eclipse + dropped_brownout;
  }
  std::uint64_t dropped_total() const noexcept {
    return dropped_energy() + dropped_collision_exhausted + dropped_no_window;
  }
  PacketCounts& operator+=(const PacketCounts& o) noexcept;
};

enum class PacketFate : std::uint8_t {
  Pending,
  Delivered,
  InsufficientEnergySun,
  BelowReserveEclipse,
  Brownout,
  CollisionExhausted,
  NoWindow,
};

std::string_view to_string(PacketFate f) noexcept;

struct MetricsRecord {
  double time = 0.0;
  std::uint32_t node_id = 0;
  double soc = 0.0;
  double fade_fraction = 0.0;
  double d_linear = 0.0;
  std::uint64_t packets_delivered = 0;
  std::uint64_t packets_dropped_energy = 0;
  std::uint64_t packets_dropped_collision_exhausted = 0;
  std::uint64_t packets_dropped_no_window = 0;
  double energy_harvested = 0.0;
  double energy_consumed = 0.0;
};

/// Energy state at the moment a transmission sequence was started.
struct TxAudit {
  std::uint32_t node_id = 0;
  std::uint64_t packet_id = 0;
  double time = 0.0;
  std::uint32_t window_id = 0;
  Phase phase = Phase::Sun;
  double psi = 0.0;       ///< stored energy less other packets' reservations
  double estimate = 0.0;  ///< projected energy over the window
  double psi_min = 0.0;
  double e_critical = 0.0;
  Protocol protocol = Protocol::BatteryAware;
};

enum class ClampKind : std::uint8_t { Overflow, Brownout, CapacityFade };

struct ClampEvent {
  std::uint32_t node_id = 0;
  double time = 0.0;
  ClampKind kind = ClampKind::Overflow;
  double adjustment = 0.0;
};

/// One slot of the energy balance, kept when RunOptions::slot_trace is set.
struct SlotRecord {
  std::uint32_t node_id = 0;
  double start = 0.0;
  double end = 0.0;
  int x = 0;
  int y = 0;
  double e_g = 0.0;
  double e_cons = 0.0;
  double e_sleep = 0.0;
  double sun_seconds = 0.0;
  double phi_after = 0.0;
  double clamp = 0.0;
};

struct EnergyAudit {
  std::uint32_t node_id = 0;
  double phi_initial = 0.0;
  double phi_final = 0.0;
  double sum_delta = 0.0;
  double sum_clamp = 0.0;
  std::uint64_t clamp_events = 0;
  std::uint64_t brownouts = 0;
  std::uint64_t slots = 0;
};

struct NodeSummary {
  std::uint32_t node_id = 0;
  battery::BatteryState battery;
  double final_soc = 0.0;
  PacketCounts packets;
  std::uint64_t attempts = 0;
  std::uint64_t windows_opened = 0;
  double sun_seconds = 0.0;  ///< accumulated from phase-change events
  double energy_harvested = 0.0;
  double energy_consumed = 0.0;
};

struct RunSummary {
  Protocol protocol = Protocol::BatteryAware;
  std::uint64_t seed = 0;
  double horizon_s = 0.0;
  std::uint64_t events = 0;
  PacketCounts totals;
  std::uint64_t attempts = 0;
  double total_cycle_aging = 0.0;
  double total_calendar_aging = 0.0;
  std::vector<NodeSummary> nodes;
  std::vector<NodeAssessment> gateway;

  double delivery_ratio() const noexcept;
};

struct RunOptions {
  bool slot_trace = false;
};

struct RunArtifacts {
  std::vector<MetricsRecord> metrics;
  RunSummary summary;
  std::vector<TxAudit> tx_audit;
  std::vector<ClampEvent> clamps;
  std::vector<EnergyAudit> energy_audit;
  std::vector<mac::NodeBatteryReport> reports;
  std::vector<PacketFate> packet_fates;  ///< indexed by packet id
  std::vector<SlotRecord> slot_trace;
};

/// Node schedules for a scenario: the override file if one was given,
/// otherwise generated from the orbit and stations.
std::vector<orbit::NodeSchedule> prepare_schedules(const ScenarioConfig& config);

RunArtifacts run(const ScenarioConfig& config, std::uint64_t seed);
RunArtifacts run(const ScenarioConfig& config, std::span<const orbit::NodeSchedule> schedules, std::uint64_t seed,
                 Protocol protocol, const RunOptions& options = {});

std::string metrics_csv(std::span<const MetricsRecord> records);
nlohmann::ordered_json metrics_json(std::span<const MetricsRecord> records);
nlohmann::ordered_json summary_json(const RunSummary& summary);

}  // namespace leolora::sim
