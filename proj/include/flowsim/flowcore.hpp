#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "flowsim/radio.hpp"
#include "flowsim/topology.hpp"

namespace flowsim {

enum class PacketKind { Data, Control, Ack };

const char* to_string(PacketKind k);

struct Packet {
  PacketKind kind = PacketKind::Data;
  NodeId src = 0;
  NodeId dst = 0;
  std::uint32_t size_bytes = 125;
  int network_id = 0;  // originating sensor's network, matched by scoped rules
  std::vector<NodeId> hop_trace;  // starts at src; loop-free by invariant
};

// Wildcard header: a disengaged field matches everything.
struct FlowHeader {
  std::optional<NodeId> src;
  std::optional<NodeId> dst;
  std::optional<int> network_scope;

  int specificity() const;  // number of concrete fields
  bool matches(const Packet& pkt) const;
};

struct FlowAction {
  enum class Type { Forward, Flood, Drop };
  Type type = Type::Drop;
  NodeId next_hop = 0;  // Forward only

  static FlowAction forward(NodeId next_hop) { return {Type::Forward, next_hop}; }
  static FlowAction flood() { return {Type::Flood, 0}; }
  static FlowAction drop() { return {Type::Drop, 0}; }

  bool operator==(const FlowAction&) const = default;
};

struct FlowCounters {
  std::uint64_t control_pkts = 0;
  std::uint64_t data_pkts = 0;
};

struct FlowEntry {
  FlowHeader header;
  FlowAction action;
  FlowCounters counters;
  int priority = 0;
};

struct FlowTable {
  NodeId owner = 0;
  std::vector<FlowEntry> entries;  // install order
};

/// Entry that would handle pkt (priority, then specificity, then install
/// order), or nullptr on a table miss. Does not touch counters.
const FlowEntry* match_entry(const FlowTable& table, const Packet& pkt);

/// Select the matching entry (priority, then specificity, then install
/// order), bump its counter by packet kind, and return its action. A miss
/// drops the packet.
FlowAction chk_ft(FlowTable& table, const Packet& pkt, NodeId from);

// One routing tree per gateway. A tree spans every sensor the gateway can
// reach through relays permitted by the merge policy, including sensors
// homed at other gateways.
struct RootTree {
  NodeId root = 0;
  std::vector<int> parent;  // -1 outside the tree / at the root
  std::vector<std::vector<NodeId>> children;
  std::vector<int> depth;  // -1 outside the tree
  std::vector<bool> member;
};

struct ControllerMap {
  Topology topo;
  RadioParams radio;
  std::set<int> merge_set;
  std::vector<RootTree> trees;  // ascending root id
  std::vector<int> home_root;   // per node: serving gateway, -1 if none
  std::vector<bool> mapped;     // sensor reaches its own gateway

  const RootTree* tree_of(NodeId root) const;
  bool member_anywhere(NodeId node) const;
  std::size_t mapped_sensor_count() const;
};

// Controller-side mapping: a breadth-first tree per gateway over links the
// merge policy permits. A typical sensor relays only its own network;
// a flow-sensor whose network is in merge_set relays every merged network.
// Unreached sensors stay unmapped; that is a result, not an error.
ControllerMap map_network(const Topology& topo, const RadioParams& radio,
                          const std::set<int>& merge_set);

/// Flow table of node y: one upstream entry per tree membership, downstream
/// entries covering each child subtree, and a final catch-all drop.
/// Counters start at zero. Throws a no-route error when y is in no tree.
FlowTable def_ft(const ControllerMap& map, NodeId y);

/// Union the merge sets of two maps over the same topology and remap.
ControllerMap merge_networks(const ControllerMap& a, const ControllerMap& b);

/// Line-oriented dump: "priority src dst scope action control data" per
/// entry, '*' for wildcards, actions forward:<id> | flood | drop.
std::string dump_flow_table(const FlowTable& table);

/// Sensors mapped to their own gateway, ascending.
std::vector<NodeId> reachable_sensors(const ControllerMap& map);

/// Nodes of the subtree rooted at `node` within `tree` (inclusive), ascending.
std::vector<NodeId> subtree_nodes(const RootTree& tree, NodeId node);

}  // namespace flowsim
