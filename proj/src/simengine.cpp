#include "flowsim/simengine.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <map>
#include <stdexcept>
#include <utility>

namespace flowsim {

const char* to_string(SimScenarioKind k) {
  switch (k) {
    case SimScenarioKind::InterNetwork: return "inter_network";
    case SimScenarioKind::IntraDomain: return "intra_domain";
    case SimScenarioKind::InterDomain: return "inter_domain";
  }
  return "?";
}

double compute_reachability(const ControllerMap& map, const Topology& topo) {
  if (map.topo.nodes.size() != topo.nodes.size())
    throw std::invalid_argument("compute_reachability: map does not match topology");
  std::size_t sensors = 0;
  std::size_t mapped = 0;
  for (const Node& node : topo.nodes) {
    if (!is_sensor(node.kind)) continue;
    ++sensors;
    if (map.mapped[node.id]) ++mapped;
  }
  if (sensors == 0)
    throw std::invalid_argument("compute_reachability: undefined ratio, no sensors");
  return static_cast<double>(mapped) / static_cast<double>(sensors);
}

double compute_throughput(std::uint64_t delivered_packets,
                          std::uint32_t packet_size_bytes, double sim_time_s) {
  if (!(sim_time_s > 0.0))
    throw std::invalid_argument("compute_throughput: undefined ratio, zero sim time");
  return static_cast<double>(delivered_packets) * 8.0 *
         static_cast<double>(packet_size_bytes) / sim_time_s;
}

namespace {

// Fixed-size bit rows for neighbor queries.
struct BitMatrix {
  std::size_t n = 0;
  std::size_t words = 0;
  std::vector<std::uint64_t> bits;

  explicit BitMatrix(std::size_t size)
      : n(size), words((size + 63) / 64), bits(words * size, 0) {}

  void set(std::size_t row, std::size_t col) {
    bits[row * words + col / 64] |= std::uint64_t{1} << (col % 64);
  }
  bool common_neighbor(std::size_t a, std::size_t b) const {
    // Any third node set in both rows, excluding a and b themselves.
    for (std::size_t w = 0; w < words; ++w) {
      std::uint64_t v = bits[a * words + w] & bits[b * words + w];
      if (a / 64 == w) v &= ~(std::uint64_t{1} << (a % 64));
      if (b / 64 == w) v &= ~(std::uint64_t{1} << (b % 64));
      if (v) return true;
    }
    return false;
  }
};

BitMatrix interference_neighbors(const Topology& topo, double range) {
  const std::size_t n = topo.nodes.size();
  BitMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (distance(topo.nodes[i], topo.nodes[j]) <= range) {
        m.set(i, j);
        m.set(j, i);
      }
  return m;
}

struct InFlight {
  Packet pkt;
  std::uint32_t retries = 0;
};

}  // namespace

std::uint64_t count_collisions(const std::vector<std::vector<NodeId>>& slot_transmitters,
                               const RadioParams& radio, const Topology& topo) {
  const BitMatrix nbr =
      interference_neighbors(topo, effective_interference_range_m(radio));
  std::uint64_t total = 0;
  for (const auto& txs : slot_transmitters) {
    for (std::size_t i = 0; i < txs.size(); ++i)
      for (std::size_t j = i + 1; j < txs.size(); ++j)
        if (nbr.common_neighbor(txs[i], txs[j])) ++total;
  }
  return total;
}

RunResult run_transmission(const SimConfig& config, const ControllerMap& map) {
  const Topology& topo = map.topo;
  const std::size_t n = topo.nodes.size();
  if (!(config.slot_s > 0.0))
    throw std::invalid_argument("run_transmission: slot_s must be > 0");
  if (map.merge_set != merge_set_for(config))
    throw std::invalid_argument("run_transmission: map merge set does not match config");
  if (topo.sensor_count() == 0)
    throw std::invalid_argument("run_transmission: topology has no sensors");

  const RadioParams& radio = config.radio;
  const double ir = effective_interference_range_m(radio);
  const double tx_e = packet_energy_j(radio, RadioRole::Tx, radio.packet_size_bytes);
  const double rx_e = packet_energy_j(radio, RadioRole::Rx, radio.packet_size_bytes);

  std::vector<FlowTable> tables(n);
  for (const Node& node : topo.nodes)
    if (map.member_anywhere(node.id)) tables[node.id] = def_ft(map, node.id);

  RunResult res;
  res.node_energy_j.assign(n, 0.0);

  std::vector<std::deque<InFlight>> queue(n);
  std::size_t in_flight = 0;
  for (const Node& node : topo.nodes) {
    if (!is_sensor(node.kind) || !map.mapped[node.id]) continue;
    Packet pkt;
    pkt.kind = PacketKind::Data;
    pkt.src = node.id;
    pkt.dst = static_cast<NodeId>(map.home_root[node.id]);
    pkt.size_bytes = radio.packet_size_bytes;
    pkt.network_id = node.network_id;
    pkt.hop_trace = {node.id};
    queue[node.id].push_back({std::move(pkt), 0});
    ++in_flight;
  }

  // Per-node record of acknowledged (src, dst) flows; duplicates are ignored.
  std::vector<std::set<std::pair<NodeId, NodeId>>> seen_acks(n);

  std::uint32_t slot = 0;
  while (in_flight > 0) {
    ++slot;

    struct Planned {
      NodeId sender;
      NodeId receiver;
    };
    std::vector<Planned> planned;
    std::vector<bool> reserved(n, false);
    bool progressed = false;

    for (std::size_t u = 0; u < n; ++u) {
      if (queue[u].empty()) continue;
      InFlight& f = queue[u].front();
      const auto& trace = f.pkt.hop_trace;
      const NodeId from = trace.size() >= 2 ? trace[trace.size() - 2] : f.pkt.src;
      const FlowEntry* hit = match_entry(tables[u], f.pkt);
      const FlowAction act = hit ? hit->action : FlowAction::drop();
      if (act.type == FlowAction::Type::Drop) {
        chk_ft(tables[u], f.pkt, from);  // commit the lookup
        queue[u].pop_front();
        --in_flight;
        ++res.table_drops;
        progressed = true;
      } else if (act.type == FlowAction::Type::Flood) {
        throw std::logic_error("run_transmission: flood actions are not used by "
                               "controller-installed tables");
      } else {
        const NodeId v = act.next_hop;
        if (reserved[v]) continue;  // receiver busy this slot; retry next slot
        reserved[v] = true;
        planned.push_back({static_cast<NodeId>(u), v});
      }
    }

    if (planned.empty() && !progressed && in_flight > 0)
      throw std::logic_error("run_transmission: stalled slot");

    std::vector<NodeId> transmitters;
    transmitters.reserve(planned.size());
    for (const Planned& p : planned) transmitters.push_back(p.sender);
    res.slot_transmitters.push_back(transmitters);

    for (const Planned& p : planned) {
      InFlight& f = queue[p.sender].front();
      const auto& trace = f.pkt.hop_trace;
      const NodeId from = trace.size() >= 2 ? trace[trace.size() - 2] : f.pkt.src;
      chk_ft(tables[p.sender], f.pkt, from);  // commit the lookup on transmit
      res.events.push_back({slot, p.sender, p.receiver, f.pkt.size_bytes, f.pkt.kind});
      if (f.pkt.kind == PacketKind::Ack) ++res.ack_packets;

      res.node_energy_j[p.sender] += tx_e;
      res.node_energy_j[p.receiver] += rx_e;
      for (std::size_t w = 0; w < n; ++w) {
        if (w == p.sender || w == p.receiver) continue;
        if (distance(topo.nodes[w], topo.nodes[p.sender]) <= ir)
          res.node_energy_j[w] += rx_e;  // overhearing
      }

      bool corrupted = false;
      if (config.destructive_collisions) {
        for (NodeId t : transmitters) {
          if (t == p.sender) continue;
          if (distance(topo.nodes[t], topo.nodes[p.receiver]) <= ir) {
            corrupted = true;
            break;
          }
        }
      }

      if (corrupted) {
        if (++f.retries > radio.max_retransmissions) {
          queue[p.sender].pop_front();
          --in_flight;
          ++res.collision_drops;
        }
        continue;  // sender keeps the packet and retries next slot
      }

      InFlight moved = std::move(queue[p.sender].front());
      queue[p.sender].pop_front();
      --in_flight;

      if (p.receiver == moved.pkt.dst) {
        moved.pkt.hop_trace.push_back(p.receiver);
        if (moved.pkt.kind == PacketKind::Data) {
          if (config.acks_enabled) {
            Packet ack;
            ack.kind = PacketKind::Ack;
            ack.src = p.receiver;
            ack.dst = moved.pkt.src;
            ack.size_bytes = moved.pkt.size_bytes;
            ack.network_id = moved.pkt.network_id;
            ack.hop_trace = {p.receiver};
            queue[p.receiver].push_back({std::move(ack), 0});
            ++in_flight;
          }
          res.delivered.push_back(std::move(moved.pkt));
        }
        // delivered acks need no further action
      } else if (std::find(moved.pkt.hop_trace.begin(), moved.pkt.hop_trace.end(),
                           p.receiver) != moved.pkt.hop_trace.end()) {
        ++res.loop_drops;
      } else if (moved.pkt.kind == PacketKind::Ack &&
                 !seen_acks[p.receiver]
                      .insert({moved.pkt.src, moved.pkt.dst})
                      .second) {
        // duplicate ack already relayed through this node
      } else {
        moved.pkt.hop_trace.push_back(p.receiver);
        queue[p.receiver].push_back(std::move(moved));
        ++in_flight;
      }
    }
  }

  res.rounds = slot;

  Metrics& m = res.metrics;
  m.reachability = compute_reachability(map, topo);
  for (const TransmitEvent& e : res.events)
    if (e.kind == PacketKind::Data) ++m.total_packets;
  m.avg_packets_per_sensor =
      static_cast<double>(m.total_packets) / static_cast<double>(topo.sensor_count());
  m.sim_time_s = static_cast<double>(res.rounds) * config.slot_s;
  m.throughput_bps =
      res.rounds == 0 ? 0.0
                      : compute_throughput(res.delivered.size(),
                                           radio.packet_size_bytes, m.sim_time_s);
  for (double e : res.node_energy_j) m.energy_j += e;
  m.collisions = count_collisions(res.slot_transmitters, radio, topo);
  return res;
}

double audit_energy_j(const std::vector<TransmitEvent>& events,
                      const RadioParams& radio, const Topology& topo) {
  const double ir = effective_interference_range_m(radio);
  double total = 0.0;
  for (const TransmitEvent& e : events) {
    total += packet_energy_j(radio, RadioRole::Tx, e.size_bytes);
    total += packet_energy_j(radio, RadioRole::Rx, e.size_bytes);
    for (const Node& w : topo.nodes) {
      if (w.id == e.sender || w.id == e.receiver) continue;
      if (distance(w, topo.nodes[e.sender]) <= ir)
        total += packet_energy_j(radio, RadioRole::Rx, e.size_bytes);
    }
  }
  return total;
}

Topology build_topology(const SimConfig& config) {
  if (config.nodes_total < config.gateways)
    throw std::invalid_argument("build_topology: fewer nodes than gateways");
  ScenarioTag tag;
  if (config.scenario.kind == SimScenarioKind::InterNetwork) {
    tag.kind = ScenarioTag::Kind::InterNetwork;
    tag.networks = config.networks;
  } else {
    tag.kind = ScenarioTag::Kind::Multicast;
  }
  return place_random(config.nodes_total - config.gateways, config.gateways,
                      config.side_m, config.seed, tag);
}

std::set<int> merge_set_for(const SimConfig& config) {
  const int limit = config.scenario.kind == SimScenarioKind::InterNetwork
                        ? config.networks
                        : static_cast<int>(config.gateways);
  const int k = config.scenario.merge_count;
  if (k < 1 || k > limit)
    throw std::invalid_argument("merge_set_for: merge count out of range");
  std::set<int> merged;
  for (int i = 0; i < k; ++i) merged.insert(i);
  return merged;
}

RunResult run_scenario(const SimConfig& config) {
  const Topology topo = build_topology(config);
  const ControllerMap map = map_network(topo, config.radio, merge_set_for(config));
  return run_transmission(config, map);
}

namespace {

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::string metrics_csv_header() {
  return "scenario,k_or_mg,n_nodes,side_m,tx_power_dbm,seed,reachability,"
         "avg_packets,sim_time_s,throughput_bps,energy_j,collisions";
}

std::string metrics_csv_row(const SimConfig& config, const Metrics& m) {
  std::string row;
  row += to_string(config.scenario.kind);
  row += ',';
  row += std::to_string(config.scenario.merge_count);
  row += ',';
  row += std::to_string(config.nodes_total);
  row += ',';
  row += fmt_g(config.side_m);
  row += ',';
  row += fmt_g(config.radio.tx_power_dbm);
  row += ',';
  row += std::to_string(config.seed);
  row += ',';
  row += fmt_g(m.reachability);
  row += ',';
  row += fmt_g(m.avg_packets_per_sensor);
  row += ',';
  row += fmt_g(m.sim_time_s);
  row += ',';
  row += fmt_g(m.throughput_bps);
  row += ',';
  row += fmt_g(m.energy_j);
  row += ',';
  row += std::to_string(m.collisions);
  return row;
}

}  // namespace flowsim
