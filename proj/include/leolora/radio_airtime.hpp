#pragma once

// LoRa time-on-air following the Semtech modem formula.

#include <optional>

namespace leolora::radio {

struct RadioConfig {
  int spreading_factor = 10;
  double bandwidth_hz = 125000.0;
  int coding_rate_denominator = 5;  ///< CR = 4/x
  int preamble_symbols = 8;
  bool explicit_header = true;
  bool crc_on = true;
  /// Unset means automatic: on for SF11/SF12 at 125 kHz.
  std::optional<bool> low_data_rate_optimize;
  int payload_bytes = 10;
  double tx_power_w = 0.4;
  int channels = 1;

  bool ldro() const noexcept;
  void validate() const;
};

/// 2^SF / BW, seconds.
double symbol_duration(const RadioConfig& config);

/// Header + payload symbols after the preamble (the "8 + max(...)" term).
int payload_symbol_count(const RadioConfig& config);

double time_on_air(const RadioConfig& config);

/// Energy of one transmission attempt, J.
double tx_energy(const RadioConfig& config);

}  // namespace leolora::radio
