#include "leolora/battery_report.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "leolora/errors.hpp"

namespace leolora::mac {

namespace {

class Writer {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u16(std::uint32_t v) {
    for (int i = 0; i < 2; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(double v) { u32(std::bit_cast<std::uint32_t>(static_cast<float>(v))); }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : bytes_(b) {}
  std::uint32_t u8() { return take(1); }
  std::uint32_t u16() { return take(2); }
  std::uint32_t u32() { return take(4); }
  double f32() { return std::bit_cast<float>(u32()); }

 private:
  std::uint32_t take(std::size_t n) {
    if (pos_ + n > bytes_.size()) throw ContractError("decode_report: truncated report");
    std::uint32_t v = 0;
    for (std::size_t i = 0; i < n; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += n;
    return v;
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::uint32_t quantize(double value, double scale) {
  const double q = std::round(value * scale);
  return static_cast<std::uint32_t>(std::clamp(q, 0.0, 65535.0));
}

std::uint32_t checked_u16(std::uint32_t v, const char* what) {
  if (v > 0xFFFFu) throw ContractError(std::string("encode_report: ") + what + " exceeds 16 bits");
  return v;
}

}  // namespace

double PeriodLedger::mean_soc() const noexcept {
  const double d = duration();
  return d > 0.0 ? soc_time_integral / d : 0.0;
}

void NodeBatteryReport::validate() const {
  if (!(period_start < period_end)) throw ContractError("battery report: period_start must precede period_end");
  if (!(energy_consumed >= 0.0)) throw ContractError("battery report: energy_consumed must be >= 0");
  for (double d : dod_observations) {
    if (!(d >= 0.0 && d <= 1.0)) throw ContractError("battery report: DoD observation outside [0, 1]");
  }
}

NodeBatteryReport report_battery_summary(std::uint32_t node_id, const PeriodLedger& ledger,
                                         const battery::ThermalProfile& thermal, double c_rate,
                                         double dod_nominal) {
  NodeBatteryReport r;
  r.node_id = node_id;
  r.period_start = ledger.start;
  r.period_end = ledger.end;
  r.n_slots = ledger.slots;
  r.n_transmissions = ledger.transmissions;
  r.energy_consumed = ledger.energy_consumed;
  r.dod_observations = ledger.dod_observations;
  r.mean_temperature_sun = thermal.sun_k;
  r.mean_temperature_eclipse = thermal.eclipse_k;
  r.mean_soc = ledger.mean_soc();
  r.sun_seconds = ledger.sun_seconds;
  r.c_rate = c_rate;
  r.dod_nominal = dod_nominal;
  return r;
}

std::vector<std::uint8_t> encode_report(const NodeBatteryReport& r) {
  if (r.dod_observations.size() > kMaxDodObservations) {
    throw ContractError("encode_report: more than 9 DoD observations");
  }
  Writer w;
  w.u16(checked_u16(r.node_id, "node_id"));
  w.u32(static_cast<std::uint32_t>(std::llround(r.period_start)));
  w.f32(r.period_end - r.period_start);
  w.u16(checked_u16(r.n_slots, "slot count"));
  w.u16(checked_u16(r.n_transmissions, "transmission count"));
  w.f32(r.energy_consumed);
  w.u16(quantize(r.mean_soc, 65535.0));
  w.f32(r.sun_seconds);
  w.u16(quantize(r.mean_temperature_sun, 100.0));
  w.u16(quantize(r.mean_temperature_eclipse, 100.0));
  w.u16(quantize(r.c_rate, 1000.0));
  w.u16(quantize(r.dod_nominal, 65535.0));
  w.u8(static_cast<std::uint8_t>(r.dod_observations.size()));
  for (double d : r.dod_observations) w.u16(quantize(d, 65535.0));
  return w.take();
}

NodeBatteryReport decode_report(std::span<const std::uint8_t> bytes) {
  if (bytes.size() > kMaxReportBytes) throw ContractError("decode_report: report longer than 51 bytes");
  Reader in(bytes);
  NodeBatteryReport r;
  r.node_id = in.u16();
  r.period_start = in.u32();
  r.period_end = r.period_start + in.f32();
  r.n_slots = in.u16();
  r.n_transmissions = in.u16();
  r.energy_consumed = in.f32();
  r.mean_soc = in.u16() / 65535.0;
  r.sun_seconds = in.f32();
  r.mean_temperature_sun = in.u16() / 100.0;
  r.mean_temperature_eclipse = in.u16() / 100.0;
  r.c_rate = in.u16() / 1000.0;
  r.dod_nominal = in.u16() / 65535.0;
  const std::uint32_t n = in.u8();
  if (n > kMaxDodObservations) throw ContractError("decode_report: more than 9 DoD observations");
  for (std::uint32_t i = 0; i < n; ++i) r.dod_observations.push_back(in.u16() / 65535.0);
  return r;
}

}  // namespace leolora::mac
