#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace flowsim {

using NodeId = std::uint32_t;

enum class NodeKind { FlowSensor, TypicalSensor, SinkNode, AccessPoint };

bool is_sensor(NodeKind k);
bool is_root(NodeKind k);
const char* to_string(NodeKind k);

struct Position {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Position&) const = default;
};

double distance(const Position& a, const Position& b);

struct Node {
  NodeId id = 0;
  NodeKind kind = NodeKind::FlowSensor;
  Position pos;
  // Physical network (inter-network scenario) or multicast-domain label
  // (sink scenarios). Sinks carry their own domain label; access points
  // serve every network and ignore the field.
  int network_id = 0;
  double energy_j = 0.0;  // consumed so far; never decreases during a run
  bool operator==(const Node&) const = default;
};

double distance(const Node& a, const Node& b);

struct ScenarioTag {
  enum class Kind { InterNetwork, Multicast };
  Kind kind = Kind::InterNetwork;
  int networks = 4;  // InterNetwork only: number of physical networks
  bool operator==(const ScenarioTag&) const = default;
};

struct Topology {
  double side = 0.0;  // square side, meters
  std::uint64_t seed = 0;
  ScenarioTag scenario;
  std::vector<Node> nodes;  // ids are dense 0..n-1, roots first

  double density() const;  // nodes per square meter
  std::size_t sensor_count() const;
  std::vector<NodeId> roots() const;  // sink/access-point ids, ascending

  bool operator==(const Topology&) const = default;
};

// Random 2-D placement. Ids 0..n_aps-1 are the gateways (access points for
// InterNetwork, sinks for Multicast), sensors follow. InterNetwork draws the
// access points from the central quarter of the square and assigns sensors
// round-robin (id mod networks); Multicast places sinks uniformly and labels
// each sensor with its distance-nearest sink's domain (ties to lower id).
Topology place_random(std::int64_t n_sensors, std::int64_t n_aps, double side,
                      std::uint64_t seed, const ScenarioTag& scenario);

bool root_serves(const Node& root, int network_id);

/// Nearest serving gateway of a sensor, or nullopt when no root serves its
/// network. Ties break toward the lower node id.
std::optional<NodeId> find_serving_root(const Topology& topo, NodeId x);

/// Same as find_serving_root but throws a no-gateway error instead.
NodeId ap_of(const Topology& topo, NodeId x);

}  // namespace flowsim
