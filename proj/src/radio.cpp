#include "flowsim/radio.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace flowsim {

double received_power_dbm(const RadioParams& params, double d) {
  if (!(d > 0.0))
    throw std::invalid_argument("received_power: distance must be > 0");
  return params.tx_power_dbm + params.path_gain_db + params.antenna_gain_tx_dbi +
         params.antenna_gain_rx_dbi -
         10.0 * params.propagation_constant * std::log10(d);
}

double transmission_range_m(const RadioParams& params) {
  if (params.tx_range_override_m) return *params.tx_range_override_m;
  const double margin_db = params.tx_power_dbm + params.path_gain_db +
                           params.antenna_gain_tx_dbi + params.antenna_gain_rx_dbi -
                           params.receiver_sensitivity_dbm;
  if (margin_db < 0.0) return 0.0;  // below sensitivity at the 1 m reference
  return std::pow(10.0, margin_db / (10.0 * params.propagation_constant));
}

double effective_interference_range_m(const RadioParams& params) {
  if (params.interference_range_m) return *params.interference_range_m;
  return transmission_range_m(params);
}

LinkVerdict link_exists(const RadioParams& params, const Node& a, const Node& b) {
  if (a.id == b.id)
    throw std::invalid_argument("link_exists: nodes must be distinct");
  const double d = distance(a, b);
  LinkVerdict v;
  v.range_m = transmission_range_m(params);
  v.connected = d <= v.range_m;
  v.rx_power_dbm = d > 0.0 ? received_power_dbm(params, d)
                           : std::numeric_limits<double>::infinity();
  return v;
}

double packet_energy_j(const RadioParams& params, RadioRole role,
                       std::uint64_t size_bytes) {
  const double bits = 8.0 * static_cast<double>(size_bytes);
  const double per_bit = role == RadioRole::Tx ? params.tx_energy_j_per_bit
                                               : params.rx_energy_j_per_bit;
  return bits * per_bit;
}

}  // namespace flowsim
