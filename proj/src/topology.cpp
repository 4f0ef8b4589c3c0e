#include "flowsim/topology.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "flowsim/rng.hpp"

namespace flowsim {

bool is_sensor(NodeKind k) {
  return k == NodeKind::FlowSensor || k == NodeKind::TypicalSensor;
}

bool is_root(NodeKind k) {
  return k == NodeKind::SinkNode || k == NodeKind::AccessPoint;
}

const char* to_string(NodeKind k) {
  switch (k) {
    case NodeKind::FlowSensor: return "flow_sensor";
    case NodeKind::TypicalSensor: return "typical_sensor";
    case NodeKind::SinkNode: return "sink";
    case NodeKind::AccessPoint: return "access_point";
  }
  return "?";
}

double distance(const Position& a, const Position& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

double distance(const Node& a, const Node& b) { return distance(a.pos, b.pos); }

double Topology::density() const {
  return static_cast<double>(nodes.size()) / (side * side);
}

std::size_t Topology::sensor_count() const {
  std::size_t n = 0;
  for (const Node& node : nodes) n += is_sensor(node.kind) ? 1 : 0;
  return n;
}

std::vector<NodeId> Topology::roots() const {
  std::vector<NodeId> out;
  for (const Node& node : nodes)
    if (is_root(node.kind)) out.push_back(node.id);
  return out;
}

Topology place_random(std::int64_t n_sensors, std::int64_t n_aps, double side,
                      std::uint64_t seed, const ScenarioTag& scenario) {
  if (!(side > 0.0))
    throw std::invalid_argument("place_random: side must be > 0");
  if (n_sensors < 0)
    throw std::invalid_argument("place_random: sensor count must be >= 0");
  if (n_aps < 1)
    throw std::invalid_argument("place_random: need at least one gateway");
  if (scenario.kind == ScenarioTag::Kind::InterNetwork && scenario.networks < 1)
    throw std::invalid_argument("place_random: need at least one network");

  Topology topo;
  topo.side = side;
  topo.seed = seed;
  topo.scenario = scenario;
  topo.nodes.reserve(static_cast<std::size_t>(n_sensors + n_aps));

  SplitMix64 rng(seed);
  const bool inter = scenario.kind == ScenarioTag::Kind::InterNetwork;

  for (std::int64_t i = 0; i < n_aps; ++i) {
    Node n;
    n.id = static_cast<NodeId>(i);
    n.kind = inter ? NodeKind::AccessPoint : NodeKind::SinkNode;
    if (inter) {
      // "somehow in the middle": uniform over the central quarter.
      n.pos.x = rng.uniform(side / 4.0, 3.0 * side / 4.0);
      n.pos.y = rng.uniform(side / 4.0, 3.0 * side / 4.0);
    } else {
      n.pos.x = rng.uniform(0.0, side);
      n.pos.y = rng.uniform(0.0, side);
    }
    n.network_id = static_cast<int>(i);
    topo.nodes.push_back(n);
  }

  for (std::int64_t i = 0; i < n_sensors; ++i) {
    Node n;
    n.id = static_cast<NodeId>(n_aps + i);
    n.kind = NodeKind::FlowSensor;
    n.pos.x = rng.uniform(0.0, side);
    n.pos.y = rng.uniform(0.0, side);
    n.network_id = inter ? static_cast<int>(n.id % static_cast<NodeId>(scenario.networks)) : 0;
    topo.nodes.push_back(n);
  }

  if (!inter) {
    // Multicast-domain label: nearest sink by distance, ties to lower id.
    for (Node& n : topo.nodes) {
      if (!is_sensor(n.kind)) continue;
      double best = std::numeric_limits<double>::infinity();
      int label = 0;
      for (std::int64_t i = 0; i < n_aps; ++i) {
        const double d = distance(n, topo.nodes[static_cast<std::size_t>(i)]);
        if (d < best) {
          best = d;
          label = static_cast<int>(i);
        }
      }
      n.network_id = label;
    }
  }

  return topo;
}

bool root_serves(const Node& root, int network_id) {
  if (root.kind == NodeKind::AccessPoint) return true;
  if (root.kind == NodeKind::SinkNode) return root.network_id == network_id;
  return false;
}

std::optional<NodeId> find_serving_root(const Topology& topo, NodeId x) {
  const Node& s = topo.nodes.at(x);
  std::optional<NodeId> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (const Node& r : topo.nodes) {
    if (!is_root(r.kind) || !root_serves(r, s.network_id)) continue;
    const double d = distance(r, s);
    if (d < best_d) {  // strict: ties keep the lower id (ascending scan)
      best_d = d;
      best = r.id;
    }
  }
  return best;
}

NodeId ap_of(const Topology& topo, NodeId x) {
  const Node& s = topo.nodes.at(x);
  if (!is_sensor(s.kind))
    throw std::invalid_argument("ap_of: node " + std::to_string(x) +
                                " is not a sensor");
  std::optional<NodeId> root = find_serving_root(topo, x);
  if (!root)
    throw std::runtime_error("no-gateway: no access point or sink serves network " +
                             std::to_string(s.network_id));
  return *root;
}

}  // namespace flowsim
