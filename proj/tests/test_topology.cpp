#include <map>

#include <stdexcept>

#include "doctest.h"
#include "flowsim/rng.hpp"
#include "flowsim/topology.hpp"
#include "test_helpers.hpp"

using namespace flowsim;
using test::make_node;
using test::make_topology;

namespace {
const ScenarioTag kInter4{ScenarioTag::Kind::InterNetwork, 4};
const ScenarioTag kMulticast{ScenarioTag::Kind::Multicast, 4};
}  // namespace

TEST_CASE("empty sensor set places just the access point") {
  const Topology t = place_random(0, 1, 100.0, 1, kInter4);
  REQUIRE(t.nodes.size() == 1);
  CHECK(t.nodes[0].kind == NodeKind::AccessPoint);
  CHECK(t.nodes[0].id == 0);
}

TEST_CASE("forty sensors split into four networks of ten") {
  const Topology t = place_random(40, 1, 100.0, 7, kInter4);
  REQUIRE(t.nodes.size() == 41);
  std::map<int, int> sizes;
  for (const Node& n : t.nodes)
    if (is_sensor(n.kind)) ++sizes[n.network_id];
  REQUIRE(sizes.size() == 4);
  for (const auto& [net, count] : sizes) CHECK(count == 10);
}

TEST_CASE("multicast placement yields 24 nodes with 4 sinks") {
  const Topology t = place_random(20, 4, 100.0, 3, kMulticast);
  REQUIRE(t.nodes.size() == 24);
  int sinks = 0;
  for (const Node& n : t.nodes) sinks += n.kind == NodeKind::SinkNode ? 1 : 0;
  CHECK(sinks == 4);
  CHECK(t.roots() == std::vector<NodeId>{0, 1, 2, 3});
  // every sensor is labeled with the domain of its nearest sink
  for (const Node& n : t.nodes) {
    if (!is_sensor(n.kind)) continue;
    for (int s = 0; s < 4; ++s)
      CHECK(distance(n, t.nodes[n.network_id]) <= distance(n, t.nodes[s]));
  }
}

TEST_CASE("invalid placement parameters are rejected") {
  CHECK_THROWS_AS(place_random(10, 1, 0.0, 1, kInter4), std::invalid_argument);
  CHECK_THROWS_AS(place_random(10, 1, -5.0, 1, kInter4), std::invalid_argument);
  CHECK_THROWS_AS(place_random(-1, 1, 100.0, 1, kInter4), std::invalid_argument);
  CHECK_THROWS_AS(place_random(10, 0, 100.0, 1, kInter4), std::invalid_argument);
}

TEST_CASE("distance basics") {
  const Node a = make_node(0, NodeKind::FlowSensor, 0, 0, 0);
  const Node b = make_node(1, NodeKind::FlowSensor, 3, 4, 0);
  const Node c = make_node(2, NodeKind::FlowSensor, 0, 0, 0);
  const Node d = make_node(3, NodeKind::FlowSensor, 10, 0, 0);
  CHECK(distance(a, c) == 0.0);
  CHECK(distance(a, b) == doctest::Approx(5.0));
  CHECK(distance(a, d) == distance(d, a));
}

TEST_CASE("placement is deterministic and stays inside the square") {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const Topology a = place_random(12, 2, 73.0, seed, kInter4);
    const Topology b = place_random(12, 2, 73.0, seed, kInter4);
    REQUIRE(a == b);
    for (const Node& n : a.nodes) {
      CHECK(n.pos.x >= 0.0);
      CHECK(n.pos.x <= 73.0);
      CHECK(n.pos.y >= 0.0);
      CHECK(n.pos.y <= 73.0);
    }
  }
}

TEST_CASE("inter-network access points sit in the central quarter") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Topology t = place_random(5, 3, 80.0, seed, kInter4);
    for (const Node& n : t.nodes) {
      if (n.kind != NodeKind::AccessPoint) continue;
      CHECK(n.pos.x >= 20.0);
      CHECK(n.pos.x <= 60.0);
      CHECK(n.pos.y >= 20.0);
      CHECK(n.pos.y <= 60.0);
    }
  }
}

TEST_CASE("equal partition whenever the sensor count divides") {
  SplitMix64 rng(99);
  for (int rep = 0; rep < 50; ++rep) {
    const int k = 1 + static_cast<int>(rng.next_below(6));
    const int per = 1 + static_cast<int>(rng.next_below(9));
    const ScenarioTag tag{ScenarioTag::Kind::InterNetwork, k};
    const Topology t =
        place_random(static_cast<std::int64_t>(k) * per, 1, 50.0, rng.next(), tag);
    std::map<int, int> sizes;
    for (const Node& n : t.nodes)
      if (is_sensor(n.kind)) ++sizes[n.network_id];
    for (const auto& [net, count] : sizes) CHECK(count == per);
  }
}

TEST_CASE("ap_of returns the only access point when there is one") {
  const Topology t = place_random(15, 1, 100.0, 5, kInter4);
  for (const Node& n : t.nodes)
    if (is_sensor(n.kind)) CHECK(ap_of(t, n.id) == 0);
}

TEST_CASE("ap_of breaks distance ties toward the lower sink id") {
  // sensor 4 sits exactly between sinks 1 and 3, all in one domain
  const Topology t = make_topology(
      100, {make_node(0, NodeKind::SinkNode, 10, 90, 7),
            make_node(1, NodeKind::SinkNode, 40, 50, 7),
            make_node(2, NodeKind::SinkNode, 10, 10, 7),
            make_node(3, NodeKind::SinkNode, 60, 50, 7),
            make_node(4, NodeKind::FlowSensor, 50, 50, 7)});
  CHECK(distance(t.nodes[4], t.nodes[1]) == distance(t.nodes[4], t.nodes[3]));
  CHECK(ap_of(t, 4) == 1);
}

TEST_CASE("ap_of rejects non-sensors and reports missing gateways") {
  const Topology t = make_topology(
      100, {make_node(0, NodeKind::SinkNode, 10, 10, 0),
            make_node(1, NodeKind::FlowSensor, 20, 10, 3)});
  CHECK_THROWS_AS(ap_of(t, 0), std::invalid_argument);
  CHECK_THROWS_WITH_AS(ap_of(t, 1), doctest::Contains("no-gateway"),
                       std::runtime_error);
}

TEST_CASE("topology density counts all nodes") {
  const Topology t = place_random(8, 2, 50.0, 11, kInter4);
  CHECK(t.density() == doctest::Approx(10.0 / 2500.0));
  CHECK(t.sensor_count() == 8);
}
