#include "leolora/radio_airtime.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "leolora/errors.hpp"

namespace leolora::radio {

bool RadioConfig::ldro() const noexcept {
  if (low_data_rate_optimize) return *low_data_rate_optimize;
  return spreading_factor >= 11 && bandwidth_hz == 125000.0;
}

void RadioConfig::validate() const {
  if (spreading_factor < 7 || spreading_factor > 12) {
    throw ConfigError("spreading factor must lie in 7..12, got " + std::to_string(spreading_factor));
  }
  if (bandwidth_hz != 125000.0 && bandwidth_hz != 250000.0 && bandwidth_hz != 500000.0) {
    throw ConfigError("bandwidth must be 125000, 250000 or 500000 Hz");
  }
  if (coding_rate_denominator < 5 || coding_rate_denominator > 8) {
    throw ConfigError("coding rate denominator must lie in 5..8");
  }
  if (preamble_symbols < 0) throw ConfigError("preamble symbols must be >= 0");
  if (payload_bytes < 1) throw ConfigError("payload must be at least 1 byte");
  if (!(tx_power_w > 0.0)) throw ConfigError("tx_power_w must be > 0");
  if (channels < 1) throw ConfigError("channel count must be >= 1");
  if (spreading_factor - 2 * (ldro() ? 1 : 0) <= 0) {
    throw ConfigError("spreading factor too small for low data rate optimisation");
  }
}

double symbol_duration(const RadioConfig& c) { return std::ldexp(1.0, c.spreading_factor) / c.bandwidth_hz; }

int payload_symbol_count(const RadioConfig& c) {
  const int de = c.ldro() ? 1 : 0;
  const int ih = c.explicit_header ? 0 : 1;
  const int crc = c.crc_on ? 1 : 0;
  const int denom = 4 * (c.spreading_factor - 2 * de);
  if (denom <= 0) throw ConfigError("spreading factor too small for low data rate optimisation");
  const int numer = 8 * c.payload_bytes - 4 * c.spreading_factor + 28 + 16 * crc - 20 * ih;
  // Integer ceiling that also handles negative numerators.
  const int blocks = numer > 0 ? (numer + denom - 1) / denom : -((-numer) / denom);
  return 8 + std::max(blocks * c.coding_rate_denominator, 0);
}

double time_on_air(const RadioConfig& c) {
  return (c.preamble_symbols + 4.25 + payload_symbol_count(c)) * symbol_duration(c);
}

double tx_energy(const RadioConfig& c) { return time_on_air(c) * c.tx_power_w; }

}  // namespace leolora::radio
