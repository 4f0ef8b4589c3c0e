#include <set>

#include <stdexcept>

#include "doctest.h"
#include "flowsim/rng.hpp"
#include "flowsim/simengine.hpp"
#include "test_helpers.hpp"

using namespace flowsim;
using test::make_node;
using test::make_topology;

namespace {

RadioParams short_range() {
  RadioParams p;
  p.tx_range_override_m = 10.0;
  p.interference_range_m = 10.0;
  return p;
}

SimConfig config_for_map(const ControllerMap& map, int merge_count, int networks) {
  SimConfig cfg;
  cfg.nodes_total = static_cast<std::int64_t>(map.topo.nodes.size());
  cfg.gateways = static_cast<std::int64_t>(map.topo.roots().size());
  cfg.side_m = map.topo.side;
  cfg.networks = networks;
  cfg.scenario.kind = SimScenarioKind::InterNetwork;
  cfg.scenario.merge_count = merge_count;
  cfg.radio = map.radio;
  return cfg;
}

}  // namespace

TEST_CASE("single hop to the gateway: one packet, one slot") {
  const Topology topo =
      make_topology(100, {make_node(0, NodeKind::AccessPoint, 20, 20, 0),
                          make_node(1, NodeKind::FlowSensor, 28, 20, 0)});
  const ControllerMap map = map_network(topo, short_range(), {0});
  const SimConfig cfg = config_for_map(map, 1, 1);
  const RunResult res = run_transmission(cfg, map);

  CHECK(res.metrics.total_packets == 1);
  CHECK(res.rounds == 1);
  CHECK(res.metrics.sim_time_s == doctest::Approx(0.004));
  const double expected = packet_energy_j(cfg.radio, RadioRole::Tx, 125) +
                          packet_energy_j(cfg.radio, RadioRole::Rx, 125);
  CHECK(res.metrics.energy_j == expected);
  CHECK(res.metrics.energy_j == doctest::Approx(5.0e-5).epsilon(1e-12));
  REQUIRE(res.delivered.size() == 1);
  CHECK(res.delivered[0].hop_trace == std::vector<NodeId>{1, 0});
}

TEST_CASE("unmapped sensors contribute no packets and no energy") {
  const Topology topo =
      make_topology(100, {make_node(0, NodeKind::AccessPoint, 20, 20, 0),
                          make_node(1, NodeKind::FlowSensor, 28, 20, 0),
                          make_node(2, NodeKind::FlowSensor, 90, 90, 0)});
  const ControllerMap map = map_network(topo, short_range(), {0});
  const SimConfig cfg = config_for_map(map, 1, 1);
  const RunResult res = run_transmission(cfg, map);
  CHECK(res.metrics.total_packets == 1);
  CHECK(res.metrics.reachability == doctest::Approx(0.5));
  CHECK(res.node_energy_j[2] == 0.0);
  for (const TransmitEvent& e : res.events) CHECK(e.sender != 2);
}

TEST_CASE("three-hop chain: trace length four, three hops for that packet") {
  const Topology topo =
      make_topology(100, {make_node(0, NodeKind::AccessPoint, 10, 20, 0),
                          make_node(1, NodeKind::FlowSensor, 19, 20, 0),
                          make_node(2, NodeKind::FlowSensor, 28, 20, 0),
                          make_node(3, NodeKind::FlowSensor, 37, 20, 0)});
  const ControllerMap map = map_network(topo, short_range(), {0});
  const SimConfig cfg = config_for_map(map, 1, 1);
  const RunResult res = run_transmission(cfg, map);

  const Packet* far = nullptr;
  for (const Packet& p : res.delivered)
    if (p.src == 3) far = &p;
  REQUIRE(far);
  CHECK(far->hop_trace == std::vector<NodeId>{3, 2, 1, 0});
  CHECK(far->hop_trace.size() - 1 == 3);  // three transmit events for it

  // the whole run: every sensor injects, hop counts 1 + 2 + 3
  CHECK(res.metrics.total_packets == 6);
  CHECK(res.delivered.size() == 3);
  CHECK(res.rounds == 3);  // the pipeline drains one delivery per slot
}

TEST_CASE("counter conservation along a delivered trace") {
  const Topology topo =
      make_topology(100, {make_node(0, NodeKind::AccessPoint, 10, 20, 0),
                          make_node(1, NodeKind::FlowSensor, 19, 20, 0),
                          make_node(2, NodeKind::FlowSensor, 28, 20, 0),
                          make_node(3, NodeKind::FlowSensor, 37, 20, 0)});
  const ControllerMap map = map_network(topo, short_range(), {0});
  const SimConfig cfg = config_for_map(map, 1, 1);
  const RunResult res = run_transmission(cfg, map);
  std::uint64_t total_hops = 0;
  for (const Packet& p : res.delivered) total_hops += p.hop_trace.size() - 1;
  CHECK(total_hops == res.metrics.total_packets);
}

TEST_CASE("receiver capacity: two adjacent senders take two slots") {
  const Topology topo =
      make_topology(100, {make_node(0, NodeKind::AccessPoint, 20, 20, 0),
                          make_node(1, NodeKind::FlowSensor, 26, 20, 0),
                          make_node(2, NodeKind::FlowSensor, 20, 26, 0)});
  const ControllerMap map = map_network(topo, short_range(), {0});
  const SimConfig cfg = config_for_map(map, 1, 1);
  const RunResult res = run_transmission(cfg, map);
  CHECK(res.rounds == 2);
  CHECK(res.delivered.size() == 2);
  // throughput saturates at exactly the data rate of the single gateway
  CHECK(res.metrics.throughput_bps == doctest::Approx(250000.0));
}

TEST_CASE("compute_reachability fractions") {
  // ten sensors in network 0; a chain of 9 reaches the gateway, the rest do not
  std::vector<Node> nodes{make_node(0, NodeKind::AccessPoint, 5, 50, 0)};
  for (int i = 0; i < 9; ++i)
    nodes.push_back(make_node(static_cast<NodeId>(1 + i), NodeKind::FlowSensor,
                              5.0 + 9.0 * (i + 1), 50, 0));
  nodes.push_back(make_node(10, NodeKind::FlowSensor, 5, 95, 0));  // isolated
  Topology topo = make_topology(100, nodes);
  const ControllerMap map = map_network(topo, short_range(), {0});
  CHECK(compute_reachability(map, topo) == doctest::Approx(0.9));

  // push two more out of range: 7 of 10 remain
  topo.nodes[8].pos = {90, 95};
  topo.nodes[9].pos = {95, 90};
  const ControllerMap map2 = map_network(topo, short_range(), {0});
  CHECK(compute_reachability(map2, topo) == doctest::Approx(0.7));

  const Topology empty =
      make_topology(100, {make_node(0, NodeKind::AccessPoint, 5, 5, 0)});
  const ControllerMap map3 = map_network(empty, short_range(), {0});
  CHECK_THROWS_AS(compute_reachability(map3, empty), std::invalid_argument);
}

TEST_CASE("all sensors mapped means reachability 1 and full delivery") {
  const Topology topo = place_random(12, 1, 25.0, 77, {ScenarioTag::Kind::InterNetwork, 4});
  const ControllerMap map = map_network(topo, short_range(), {0, 1, 2, 3});
  if (compute_reachability(map, topo) == 1.0) {
    SimConfig cfg = config_for_map(map, 4, 4);
    const RunResult res = run_transmission(cfg, map);
    CHECK(res.delivered.size() == topo.sensor_count());
  }
}

TEST_CASE("compute_throughput arithmetic") {
  CHECK(compute_throughput(10, 125, 0.1) == doctest::Approx(100000.0));
  CHECK(compute_throughput(0, 125, 0.1) == 0.0);
  CHECK(compute_throughput(10, 125, 0.2) == doctest::Approx(50000.0));
  CHECK_THROWS_AS(compute_throughput(1, 125, 0.0), std::invalid_argument);
}

TEST_CASE("collision counting") {
  const RadioParams radio = short_range();

  SUBCASE("single transmitter per slot never collides") {
    const Topology topo =
        make_topology(100, {make_node(0, NodeKind::AccessPoint, 20, 20, 0),
                            make_node(1, NodeKind::FlowSensor, 26, 20, 0)});
    CHECK(count_collisions({{1}, {1}}, radio, topo) == 0);
  }

  SUBCASE("two same-slot transmitters with a common neighbor") {
    const Topology topo =
        make_topology(100, {make_node(0, NodeKind::AccessPoint, 20, 20, 0),
                            make_node(1, NodeKind::AccessPoint, 30, 20, 0),
                            make_node(2, NodeKind::FlowSensor, 24, 20, 0),
                            make_node(3, NodeKind::FlowSensor, 26, 20, 0)});
    CHECK(count_collisions({{2, 3}}, radio, topo) == 1);
    // in separate slots they do not interact
    CHECK(count_collisions({{2}, {3}}, radio, topo) == 0);
  }

  SUBCASE("k mutually interfering transmitters make k(k-1)/2 pairs") {
    std::vector<Node> nodes;
    for (int i = 0; i < 4; ++i)
      nodes.push_back(make_node(static_cast<NodeId>(i), NodeKind::AccessPoint,
                                40 + 4 * (i % 2), 40 + 4 * (i / 2), i));
    nodes.push_back(make_node(4, NodeKind::FlowSensor, 38, 40, 0));
    nodes.push_back(make_node(5, NodeKind::FlowSensor, 46, 40, 0));
    nodes.push_back(make_node(6, NodeKind::FlowSensor, 38, 44, 0));
    nodes.push_back(make_node(7, NodeKind::FlowSensor, 46, 44, 0));
    const Topology topo = make_topology(100, nodes);
    CHECK(count_collisions({{4, 5, 6, 7}}, radio, topo) == 6);
  }
}

TEST_CASE("identical configs give bit-identical runs") {
  SimConfig cfg;
  cfg.nodes_total = 40;
  cfg.gateways = 1;
  cfg.side_m = 60.0;
  cfg.scenario = {SimScenarioKind::InterNetwork, 3};
  cfg.radio = short_range();
  cfg.seed = 20240807;

  const RunResult a = run_scenario(cfg);
  const RunResult b = run_scenario(cfg);
  CHECK(a.metrics.reachability == b.metrics.reachability);
  CHECK(a.metrics.total_packets == b.metrics.total_packets);
  CHECK(a.metrics.sim_time_s == b.metrics.sim_time_s);
  CHECK(a.metrics.throughput_bps == b.metrics.throughput_bps);
  CHECK(a.metrics.energy_j == b.metrics.energy_j);
  CHECK(a.metrics.collisions == b.metrics.collisions);
  REQUIRE(a.events.size() == b.events.size());
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    CHECK(a.events[i].slot == b.events[i].slot);
    CHECK(a.events[i].sender == b.events[i].sender);
    CHECK(a.events[i].receiver == b.events[i].receiver);
  }
}

TEST_CASE("energy ledger is non-negative and audit matches") {
  SplitMix64 rng(31337);
  for (int rep = 0; rep < 10; ++rep) {
    SimConfig cfg;
    cfg.nodes_total = 15 + static_cast<std::int64_t>(rng.next_below(40));
    cfg.gateways = 1 + static_cast<std::int64_t>(rng.next_below(3));
    cfg.side_m = 40.0 + rng.uniform(0.0, 40.0);
    cfg.scenario = {SimScenarioKind::InterNetwork,
                    1 + static_cast<int>(rng.next_below(4))};
    cfg.radio = short_range();
    cfg.seed = rng.next();

    const Topology topo = build_topology(cfg);
    const ControllerMap map = map_network(topo, cfg.radio, merge_set_for(cfg));
    if (topo.sensor_count() == 0) continue;
    const RunResult res = run_transmission(cfg, map);
    for (double e : res.node_energy_j) CHECK(e >= 0.0);
    const double audited = audit_energy_j(res.events, cfg.radio, topo);
    CHECK(std::abs(audited - res.metrics.energy_j) <= 1e-12);
  }
}

TEST_CASE("delivered packets equal the brute-force reachability oracle") {
  SplitMix64 rng(808);
  for (int rep = 0; rep < 60; ++rep) {
    SimConfig cfg;
    cfg.nodes_total = 3 + static_cast<std::int64_t>(rng.next_below(10));  // <= 12
    const bool multicast = rng.next_below(2) == 1;
    cfg.gateways = multicast ? 1 + static_cast<std::int64_t>(
                                       rng.next_below(std::min<std::uint64_t>(
                                           3, static_cast<std::uint64_t>(cfg.nodes_total - 1))))
                             : 1;
    cfg.scenario.kind =
        multicast ? SimScenarioKind::IntraDomain : SimScenarioKind::InterNetwork;
    cfg.scenario.merge_count =
        1 + static_cast<int>(rng.next_below(
                multicast ? static_cast<std::uint64_t>(cfg.gateways) : 4));
    cfg.side_m = 20.0 + rng.uniform(0.0, 25.0);
    cfg.radio = short_range();
    cfg.seed = rng.next();

    const Topology topo = build_topology(cfg);
    if (topo.sensor_count() == 0) continue;
    const ControllerMap map = map_network(topo, cfg.radio, merge_set_for(cfg));
    const RunResult res = run_transmission(cfg, map);

    std::set<NodeId> engine;
    for (const Packet& p : res.delivered) engine.insert(p.src);
    const std::set<NodeId> oracle =
        test::oracle_delivered(topo, cfg.radio, merge_set_for(cfg));
    CHECK(engine == oracle);

    // delivered is always a subset of injected
    CHECK(res.delivered.size() <= topo.sensor_count());
  }
}

TEST_CASE("acks retrace the path and double the airtime bookkeeping") {
  const Topology topo =
      make_topology(100, {make_node(0, NodeKind::AccessPoint, 10, 20, 0),
                          make_node(1, NodeKind::FlowSensor, 19, 20, 0),
                          make_node(2, NodeKind::FlowSensor, 28, 20, 0)});
  const ControllerMap map = map_network(topo, short_range(), {0});
  SimConfig cfg = config_for_map(map, 1, 1);
  cfg.acks_enabled = true;
  const RunResult res = run_transmission(cfg, map);
  CHECK(res.delivered.size() == 2);
  CHECK(res.metrics.total_packets == 3);  // data events only
  CHECK(res.ack_packets == 3);            // ack events mirror the data hops
}

TEST_CASE("destructive collisions retransmit and still deliver") {
  // sensor 3 interferes at gateway 0 but not vice versa: sensor 2 loses the
  // first slot, retransmits alone and succeeds
  const Topology topo =
      make_topology(100, {make_node(0, NodeKind::AccessPoint, 20, 20, 0),
                          make_node(1, NodeKind::AccessPoint, 37, 20, 0),
                          make_node(2, NodeKind::FlowSensor, 26, 20, 0),
                          make_node(3, NodeKind::FlowSensor, 29, 21, 0)});
  const ControllerMap map = map_network(topo, short_range(), {0});
  SimConfig cfg = config_for_map(map, 1, 1);
  cfg.destructive_collisions = true;
  const RunResult res = run_transmission(cfg, map);
  CHECK(res.delivered.size() == 2);
  CHECK(res.rounds == 2);
  CHECK(res.metrics.total_packets == 3);  // one retransmission
  CHECK(res.collision_drops == 0);
}

TEST_CASE("destructive collisions honor the retransmission cap") {
  // mutually interfering senders corrupt each other every slot and give up
  // after the 15 allowed retries
  const Topology topo =
      make_topology(100, {make_node(0, NodeKind::AccessPoint, 20, 20, 0),
                          make_node(1, NodeKind::AccessPoint, 30, 20, 0),
                          make_node(2, NodeKind::FlowSensor, 24, 20, 0),
                          make_node(3, NodeKind::FlowSensor, 26, 20, 0)});
  const ControllerMap map = map_network(topo, short_range(), {0});
  SimConfig cfg = config_for_map(map, 1, 1);
  cfg.destructive_collisions = true;
  const RunResult res = run_transmission(cfg, map);
  CHECK(res.delivered.empty());
  CHECK(res.collision_drops == 2);
  CHECK(res.metrics.total_packets == 2 * (1 + 15));  // first try + 15 retries
  CHECK(res.metrics.collisions == 16);  // one interfering pair per slot
}

TEST_CASE("run_transmission validates its inputs") {
  const Topology topo =
      make_topology(100, {make_node(0, NodeKind::AccessPoint, 20, 20, 0),
                          make_node(1, NodeKind::FlowSensor, 28, 20, 0)});
  const ControllerMap map = map_network(topo, short_range(), {0});
  SimConfig cfg = config_for_map(map, 1, 1);
  cfg.slot_s = 0.0;
  CHECK_THROWS_AS(run_transmission(cfg, map), std::invalid_argument);
  cfg.slot_s = 0.004;
  cfg.scenario.merge_count = 3;  // map was built for merge set {0}
  CHECK_THROWS_AS(run_transmission(cfg, map), std::invalid_argument);
}

TEST_CASE("per-run metrics csv has the documented shape") {
  SimConfig cfg;
  cfg.nodes_total = 30;
  cfg.side_m = 50.0;
  cfg.scenario = {SimScenarioKind::InterNetwork, 2};
  cfg.radio = short_range();
  cfg.seed = 5;
  const RunResult res = run_scenario(cfg);
  const std::string header = metrics_csv_header();
  const std::string row = metrics_csv_row(cfg, res.metrics);
  const auto commas = [](const std::string& s) {
    return std::count(s.begin(), s.end(), ',');
  };
  CHECK(commas(header) == 11);
  CHECK(commas(row) == 11);
  CHECK(row.find("inter_network,2,30,50,") == 0);
}
