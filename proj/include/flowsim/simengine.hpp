#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "flowsim/flowcore.hpp"
#include "flowsim/radio.hpp"
#include "flowsim/topology.hpp"

namespace flowsim {

enum class SimScenarioKind { InterNetwork, IntraDomain, InterDomain };

const char* to_string(SimScenarioKind k);

struct SimScenario {
  SimScenarioKind kind = SimScenarioKind::InterNetwork;
  int merge_count = 1;  // Net/AP (inter-network) or MG (domain scenarios)
};

struct SimConfig {
  std::int64_t nodes_total = 100;  // gateways + sensors
  std::int64_t gateways = 1;       // access points or sinks
  double side_m = 100.0;
  int networks = 4;  // physical networks in the inter-network scenario
  SimScenario scenario;
  RadioParams radio;
  double slot_s = 0.004;  // one 125 B packet at 250 kbit/s
  bool acks_enabled = false;
  bool destructive_collisions = false;
  std::uint64_t seed = 1;
};

struct Metrics {
  double reachability = 0.0;
  std::uint64_t total_packets = 0;  // data transmit events
  double avg_packets_per_sensor = 0.0;
  double sim_time_s = 0.0;
  double throughput_bps = 0.0;
  double energy_j = 0.0;
  std::uint64_t collisions = 0;
};

struct TransmitEvent {
  std::uint32_t slot = 0;  // 1-based
  NodeId sender = 0;
  NodeId receiver = 0;
  std::uint32_t size_bytes = 0;
  PacketKind kind = PacketKind::Data;
};

struct RunResult {
  Metrics metrics;
  std::vector<double> node_energy_j;
  std::vector<TransmitEvent> events;
  std::vector<Packet> delivered;  // data packets that reached their gateway
  std::vector<std::vector<NodeId>> slot_transmitters;
  std::uint64_t ack_packets = 0;   // ack transmit events (acks_enabled)
  std::uint64_t table_drops = 0;
  std::uint64_t loop_drops = 0;
  std::uint64_t collision_drops = 0;
  std::uint32_t rounds = 0;
};

/// Mapped sensors over all sensors. Gateways are excluded from both counts.
double compute_reachability(const ControllerMap& map, const Topology& topo);

/// Delivered bits per simulated second.
double compute_throughput(std::uint64_t delivered_packets,
                          std::uint32_t packet_size_bytes, double sim_time_s);

/// Unordered pairs of same-slot transmitters that share a third node within
/// interference range. A statistic only; packets are not destroyed unless
/// destructive_collisions is set on the run.
std::uint64_t count_collisions(const std::vector<std::vector<NodeId>>& slot_transmitters,
                               const RadioParams& radio, const Topology& topo);

// Slotted execution of the transmission/reception algorithm. Every mapped
// sensor injects one data packet toward its gateway. Per slot each node
// holding a packet looks up its flow table and forwards one hop; a receiver
// accepts at most one packet per slot (later senders in id order defer).
// A transmission charges tx energy to the sender and rx energy to the
// receiver and to every other node within interference range.
RunResult run_transmission(const SimConfig& config, const ControllerMap& map);

/// Recompute total energy from the event log and node positions.
double audit_energy_j(const std::vector<TransmitEvent>& events,
                      const RadioParams& radio, const Topology& topo);

Topology build_topology(const SimConfig& config);
std::set<int> merge_set_for(const SimConfig& config);

/// Topology + controller map + transmission run in one step.
RunResult run_scenario(const SimConfig& config);

std::string metrics_csv_header();
std::string metrics_csv_row(const SimConfig& config, const Metrics& m);

}  // namespace flowsim
