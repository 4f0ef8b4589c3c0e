#pragma once

#include <cstdint>
#include <optional>

#include "flowsim/topology.hpp"

namespace flowsim {

// Link-level constants. Defaults are the paper's simulation parameter set.
// tx_range_override_m pins the transmission range regardless of power; clear
// it to derive the range from power and receiver sensitivity. The
// interference range falls back to the effective transmission range when its
// override is cleared.
struct RadioParams {
  double tx_power_dbm = -10.45;
  double path_gain_db = -0.04;  // at the 1 m reference distance
  double propagation_constant = 4.0;
  double receiver_sensitivity_dbm = -80.5;
  double required_snr_db = 4.0;  // reported only; no noise process modeled
  std::optional<double> tx_range_override_m = 10.0;
  std::optional<double> interference_range_m = 10.0;
  double data_rate_bps = 250000.0;
  double tx_energy_j_per_bit = 30e-9;
  double rx_energy_j_per_bit = 20e-9;
  std::uint32_t packet_size_bytes = 125;
  double antenna_gain_tx_dbi = 0.0;
  double antenna_gain_rx_dbi = 0.0;
  std::uint32_t max_retransmissions = 15;
  double channel_check_rate_hz = 8.0;  // reported only

  bool operator==(const RadioParams&) const = default;
};

/// Log-distance received power in dBm at distance d (meters, > 0):
/// tx + path_gain + antenna gains - 10 * n * log10(d).
double received_power_dbm(const RadioParams& params, double d);

/// Transmission range in meters. The override wins when set; otherwise the
/// closed-form distance where received power meets receiver sensitivity.
/// Returns 0 when the signal is already below sensitivity at 1 m.
double transmission_range_m(const RadioParams& params);

/// Interference range: the override, or the effective transmission range.
double effective_interference_range_m(const RadioParams& params);

struct LinkVerdict {
  bool connected = false;
  double rx_power_dbm = 0.0;
  double range_m = 0.0;
};

/// Link predicate: connected iff distance(a, b) <= transmission range
/// (inclusive). Symmetric in a and b.
LinkVerdict link_exists(const RadioParams& params, const Node& a, const Node& b);

enum class RadioRole { Tx, Rx };

/// Energy to transmit or receive size_bytes: 8 * size * per-bit energy.
double packet_energy_j(const RadioParams& params, RadioRole role,
                       std::uint64_t size_bytes);

}  // namespace flowsim
