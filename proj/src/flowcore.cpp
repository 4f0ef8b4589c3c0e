#include "flowsim/flowcore.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace flowsim {

const char* to_string(PacketKind k) {
  switch (k) {
    case PacketKind::Data: return "data";
    case PacketKind::Control: return "control";
    case PacketKind::Ack: return "ack";
  }
  return "?";
}

int FlowHeader::specificity() const {
  return static_cast<int>(src.has_value()) + static_cast<int>(dst.has_value()) +
         static_cast<int>(network_scope.has_value());
}

bool FlowHeader::matches(const Packet& pkt) const {
  if (src && *src != pkt.src) return false;
  if (dst && *dst != pkt.dst) return false;
  if (network_scope && *network_scope != pkt.network_id) return false;
  return true;
}

const FlowEntry* match_entry(const FlowTable& table, const Packet& pkt) {
  const FlowEntry* best = nullptr;
  for (const FlowEntry& e : table.entries) {
    if (!e.header.matches(pkt)) continue;
    if (!best || e.priority > best->priority ||
        (e.priority == best->priority &&
         e.header.specificity() > best->header.specificity())) {
      best = &e;
    }
  }
  return best;
}

FlowAction chk_ft(FlowTable& table, const Packet& pkt, NodeId from) {
  (void)from;  // the transmitting node does not influence matching
  const FlowEntry* best = match_entry(table, pkt);
  if (!best) return FlowAction::drop();  // table miss: ignore the packet
  FlowEntry& hit = table.entries[static_cast<std::size_t>(best - table.entries.data())];
  if (pkt.kind == PacketKind::Control)
    ++hit.counters.control_pkts;
  else
    ++hit.counters.data_pkts;
  return best->action;
}

namespace {

// Set of network ids a subtree may carry; access points carry everything.
struct NetScope {
  bool all = false;
  std::set<int> ids;

  bool contains(int net) const { return all || ids.count(net) != 0; }

  NetScope intersect(const NetScope& other) const {
    if (all) return other;
    if (other.all) return *this;
    NetScope out;
    for (int id : ids)
      if (other.ids.count(id)) out.ids.insert(id);
    return out;
  }
};

NetScope carry_scope(const Node& n, const std::set<int>& merge_set) {
  NetScope s;
  s.ids.insert(n.network_id);
  if (n.kind == NodeKind::FlowSensor && merge_set.count(n.network_id))
    s.ids.insert(merge_set.begin(), merge_set.end());
  return s;
}

NetScope serve_scope(const Node& root, const std::set<int>& merge_set) {
  NetScope s;
  if (root.kind == NodeKind::AccessPoint) {
    s.all = true;
    return s;
  }
  s.ids.insert(root.network_id);
  if (merge_set.count(root.network_id))
    s.ids.insert(merge_set.begin(), merge_set.end());
  return s;
}

std::vector<std::vector<NodeId>> build_adjacency(const Topology& topo,
                                                 const RadioParams& radio) {
  const std::size_t n = topo.nodes.size();
  const double range = transmission_range_m(radio);
  std::vector<std::vector<NodeId>> adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (distance(topo.nodes[i], topo.nodes[j]) <= range) {
        adj[i].push_back(static_cast<NodeId>(j));
        adj[j].push_back(static_cast<NodeId>(i));
      }
    }
  }
  return adj;
}

}  // namespace

const RootTree* ControllerMap::tree_of(NodeId root) const {
  for (const RootTree& t : trees)
    if (t.root == root) return &t;
  return nullptr;
}

bool ControllerMap::member_anywhere(NodeId node) const {
  for (const RootTree& t : trees)
    if (node < t.member.size() && t.member[node]) return true;
  return false;
}

std::size_t ControllerMap::mapped_sensor_count() const {
  std::size_t n = 0;
  for (bool m : mapped) n += m ? 1 : 0;
  return n;
}

ControllerMap map_network(const Topology& topo, const RadioParams& radio,
                          const std::set<int>& merge_set) {
  if (merge_set.empty())
    throw std::invalid_argument("map_network: merge_set must be non-empty");

  ControllerMap map;
  map.topo = topo;
  map.radio = radio;
  map.merge_set = merge_set;

  const std::size_t n = topo.nodes.size();
  map.home_root.assign(n, -1);
  map.mapped.assign(n, false);

  const auto adj = build_adjacency(topo, radio);

  for (const Node& node : topo.nodes) {
    if (!is_sensor(node.kind)) continue;
    if (auto root = find_serving_root(topo, node.id))
      map.home_root[node.id] = static_cast<int>(*root);
  }

  for (NodeId root : topo.roots()) {
    RootTree tree;
    tree.root = root;
    tree.parent.assign(n, -1);
    tree.children.assign(n, {});
    tree.depth.assign(n, -1);
    tree.member.assign(n, false);

    std::vector<NetScope> scope(n);
    tree.member[root] = true;
    tree.depth[root] = 0;
    scope[root] = serve_scope(topo.nodes[root], merge_set);

    std::deque<NodeId> queue{root};
    while (!queue.empty()) {
      const NodeId u = queue.front();
      queue.pop_front();
      for (NodeId v : adj[u]) {  // ascending by construction
        if (tree.member[v] || !is_sensor(topo.nodes[v].kind)) continue;
        if (!scope[u].contains(topo.nodes[v].network_id)) continue;
        scope[v] = scope[u].intersect(carry_scope(topo.nodes[v], merge_set));
        tree.member[v] = true;
        tree.parent[v] = static_cast<int>(u);
        tree.depth[v] = tree.depth[u] + 1;
        tree.children[u].push_back(v);
        queue.push_back(v);
      }
    }
    map.trees.push_back(std::move(tree));
  }

  for (const Node& node : topo.nodes) {
    if (!is_sensor(node.kind) || map.home_root[node.id] < 0) continue;
    const RootTree* home = map.tree_of(static_cast<NodeId>(map.home_root[node.id]));
    map.mapped[node.id] = home && home->member[node.id];
  }

  return map;
}

std::vector<NodeId> subtree_nodes(const RootTree& tree, NodeId node) {
  std::vector<NodeId> out;
  std::deque<NodeId> queue{node};
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    out.push_back(u);
    for (NodeId c : tree.children[u]) queue.push_back(c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

FlowTable def_ft(const ControllerMap& map, NodeId y) {
  if (y >= map.topo.nodes.size())
    throw std::invalid_argument("def_ft: unknown node id");
  if (!map.member_anywhere(y))
    throw std::runtime_error("no-route: node " + std::to_string(y) +
                             " is not mapped by any gateway tree");

  FlowTable table;
  table.owner = y;

  for (const RootTree& tree : map.trees) {
    if (!tree.member[y] || tree.parent[y] < 0) continue;
    FlowEntry up;
    up.header.dst = tree.root;
    up.action = FlowAction::forward(static_cast<NodeId>(tree.parent[y]));
    up.priority = 100;
    table.entries.push_back(up);
  }

  for (const RootTree& tree : map.trees) {
    if (!tree.member[y]) continue;
    for (NodeId child : tree.children[y]) {
      for (NodeId dst : subtree_nodes(tree, child)) {
        FlowEntry down;
        down.header.dst = dst;
        down.action = FlowAction::forward(child);
        down.priority = 50;
        table.entries.push_back(down);
      }
    }
  }

  FlowEntry miss;
  miss.action = FlowAction::drop();
  miss.priority = 0;
  table.entries.push_back(miss);
  return table;
}

ControllerMap merge_networks(const ControllerMap& a, const ControllerMap& b) {
  if (!(a.topo == b.topo))
    throw std::invalid_argument("merge_networks: maps cover different topologies");
  if (!(a.radio == b.radio))
    throw std::invalid_argument("merge_networks: maps use different radio parameters");
  std::set<int> merged = a.merge_set;
  merged.insert(b.merge_set.begin(), b.merge_set.end());
  return map_network(a.topo, a.radio, merged);
}

std::string dump_flow_table(const FlowTable& table) {
  std::string out;
  auto field = [](const std::optional<NodeId>& v) {
    return v ? std::to_string(*v) : std::string("*");
  };
  for (const FlowEntry& e : table.entries) {
    out += std::to_string(e.priority);
    out += ' ';
    out += field(e.header.src);
    out += ' ';
    out += field(e.header.dst);
    out += ' ';
    out += e.header.network_scope ? std::to_string(*e.header.network_scope)
                                  : std::string("*");
    out += ' ';
    switch (e.action.type) {
      case FlowAction::Type::Forward:
        out += "forward:" + std::to_string(e.action.next_hop);
        break;
      case FlowAction::Type::Flood: out += "flood"; break;
      case FlowAction::Type::Drop: out += "drop"; break;
    }
    out += ' ';
    out += std::to_string(e.counters.control_pkts);
    out += ' ';
    out += std::to_string(e.counters.data_pkts);
    out += '\n';
  }
  return out;
}

std::vector<NodeId> reachable_sensors(const ControllerMap& map) {
  std::vector<NodeId> out;
  for (const Node& node : map.topo.nodes)
    if (is_sensor(node.kind) && map.mapped[node.id]) out.push_back(node.id);
  return out;
}

}  // namespace flowsim
