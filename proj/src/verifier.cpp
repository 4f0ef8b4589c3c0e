#include "flowsim/verifier.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <stdexcept>

namespace flowsim {

std::string to_string(const WfState& s) {
  switch (s.kind) {
    case WfState::Kind::ReceivePkt: return "Receive_pkt";
    case WfState::Kind::MatchPkt: return "Match_pkt";
    case WfState::Kind::Drop: return "Drop";
    case WfState::Kind::Translation: return "Translation";
    case WfState::Kind::TaskAlloc: return "TaskAlloc(" + std::to_string(s.task) + ")";
    case WfState::Kind::SendPkt: return "Send_pkt";
    case WfState::Kind::AddCache: return "Add_cache";
  }
  return "?";
}

bool WfModel::complete() const {
  for (const WfState& s : states) {
    bool out = false;
    for (const WfTransition& t : transitions)
      if (t.from == s) {
        out = true;
        break;
      }
    if (!out) return false;
  }
  return true;
}

WfModel build_reference_model(int n_tasks) {
  if (n_tasks < 1)
    throw std::invalid_argument("build_reference_model: invalid model, n_tasks must "
                                "be >= 1");
  using K = WfState::Kind;
  const WfState receive{K::ReceivePkt, 0};
  const WfState match{K::MatchPkt, 0};
  const WfState drop{K::Drop, 0};
  const WfState translation{K::Translation, 0};
  const WfState send{K::SendPkt, 0};
  const WfState cache{K::AddCache, 0};

  WfModel m;
  m.n_tasks = n_tasks;
  m.states = {receive, match, drop, translation};
  for (int i = 1; i <= n_tasks; ++i) m.states.push_back({K::TaskAlloc, i});
  m.states.push_back(send);
  m.states.push_back(cache);

  m.transitions.push_back({receive, "keep", match});
  m.transitions.push_back({receive, "drop", drop});
  m.transitions.push_back({match, "map", translation});
  for (int i = 1; i <= n_tasks; ++i)
    m.transitions.push_back({translation, "alloc:" + std::to_string(i),
                             {K::TaskAlloc, i}});
  for (int i = 1; i <= n_tasks; ++i)
    m.transitions.push_back({{K::TaskAlloc, i}, "send", send});
  m.transitions.push_back({send, "ack", cache});
  m.transitions.push_back({send, "data", translation});
  m.transitions.push_back({drop, "reset", receive});
  m.transitions.push_back({cache, "next", receive});
  return m;
}

std::vector<std::string> mutant_names() {
  return {"skip-match", "drop-translation-edge", "send-self-loop", "no-drop-choice"};
}

WfModel build_mutant(const std::string& name, int n_tasks) {
  using K = WfState::Kind;
  WfModel m = build_reference_model(n_tasks);
  auto erase_if = [&m](auto pred) {
    m.transitions.erase(
        std::remove_if(m.transitions.begin(), m.transitions.end(), pred),
        m.transitions.end());
  };
  if (name == "skip-match") {
    // The keep choice bypasses matching entirely.
    for (WfTransition& t : m.transitions)
      if (t.from.kind == K::ReceivePkt && t.label == "keep")
        t.to = {K::Translation, 0};
  } else if (name == "drop-translation-edge") {
    erase_if([](const WfTransition& t) {
      return t.from.kind == K::Translation && t.to.kind == K::TaskAlloc;
    });
    m.transitions.push_back({{K::Translation, 0}, "stall", {K::Translation, 0}});
  } else if (name == "send-self-loop") {
    erase_if([](const WfTransition& t) { return t.from.kind == K::SendPkt; });
    m.transitions.push_back({{K::SendPkt, 0}, "stall", {K::SendPkt, 0}});
  } else if (name == "no-drop-choice") {
    erase_if([](const WfTransition& t) {
      return t.from.kind == K::ReceivePkt && t.label == "drop";
    });
  } else {
    std::string known;
    for (const std::string& n : mutant_names()) known += " " + n;
    throw std::invalid_argument("build_mutant: unknown mutant '" + name +
                                "'; known:" + known);
  }
  return m;
}

std::string LtlResponse::describe() const {
  auto kinds_text = [](const StatePredicate& p) {
    std::string out;
    for (WfState::Kind k : p.kinds) {
      if (!out.empty()) out += " | ";
      out += to_string(WfState{k, 0});
      if (k == WfState::Kind::TaskAlloc) out = out.substr(0, out.size() - 3);  // strip (0)
    }
    return out;
  };
  std::string p = kinds_text(trigger_state);
  if (trigger_label) p += " & " + *trigger_label;
  return "G(" + p + " -> F " + kinds_text(response) + ")";
}

LtlResponse ltl1() {
  return {"LTL1", {{WfState::Kind::ReceivePkt}}, "keep", {{WfState::Kind::MatchPkt}}};
}

LtlResponse ltl2() {
  return {"LTL2", {{WfState::Kind::Translation}}, std::nullopt,
          {{WfState::Kind::TaskAlloc}}};
}

LtlResponse ltl3() {
  return {"LTL3", {{WfState::Kind::SendPkt}}, std::nullopt,
          {{WfState::Kind::AddCache, WfState::Kind::Translation}}};
}

std::vector<LtlResponse> all_properties() { return {ltl1(), ltl2(), ltl3()}; }

namespace {

std::map<WfState, int> index_states(const WfModel& m) {
  std::map<WfState, int> idx;
  for (const WfState& s : m.states) idx.emplace(s, static_cast<int>(idx.size()));
  return idx;
}

std::vector<bool> reachable_from_initial(const WfModel& m,
                                         const std::map<WfState, int>& idx) {
  std::vector<bool> seen(idx.size(), false);
  std::deque<WfState> queue{m.initial};
  seen[idx.at(m.initial)] = true;
  while (!queue.empty()) {
    const WfState u = queue.front();
    queue.pop_front();
    for (const WfTransition& t : m.transitions) {
      if (!(t.from == u)) continue;
      const int v = idx.at(t.to);
      if (!seen[v]) {
        seen[v] = true;
        queue.push_back(t.to);
      }
    }
  }
  return seen;
}

// States from which some infinite run never satisfies q: the greatest
// fixpoint of "not q and has a successor still in the set".
std::vector<bool> doomed_states(const WfModel& m, const std::map<WfState, int>& idx,
                                const StatePredicate& q) {
  std::vector<bool> doomed(idx.size(), false);
  for (const WfState& s : m.states) doomed[idx.at(s)] = !q.matches(s);
  for (bool changed = true; changed;) {
    changed = false;
    for (const WfState& s : m.states) {
      const int i = idx.at(s);
      if (!doomed[i]) continue;
      bool survives = false;
      for (const WfTransition& t : m.transitions)
        if (t.from == s && doomed[idx.at(t.to)]) {
          survives = true;
          break;
        }
      if (!survives) {
        doomed[i] = false;
        changed = true;
      }
    }
  }
  return doomed;
}

std::vector<WfState> shortest_path(const WfModel& m, const WfState& from,
                                   const WfState& to) {
  std::map<WfState, WfState> parent;
  std::deque<WfState> queue{from};
  std::set<WfState> seen{from};
  while (!queue.empty()) {
    const WfState u = queue.front();
    queue.pop_front();
    if (u == to) break;
    for (const WfTransition& t : m.transitions) {
      if (!(t.from == u) || seen.count(t.to)) continue;
      seen.insert(t.to);
      parent.emplace(t.to, u);
      queue.push_back(t.to);
    }
  }
  std::vector<WfState> path;
  WfState cur = to;
  path.push_back(cur);
  while (!(cur == from)) {
    cur = parent.at(cur);
    path.push_back(cur);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

CheckResult check_response(const WfModel& model, const LtlResponse& prop) {
  if (!model.complete())
    throw std::invalid_argument("check_response: model has a state without "
                                "outgoing transitions");
  const auto idx = index_states(model);
  const auto reachable = reachable_from_initial(model, idx);
  const auto doomed = doomed_states(model, idx, prop.response);

  for (const WfTransition& t : model.transitions) {
    if (!reachable[idx.at(t.from)]) continue;
    if (!prop.triggers(t.from, t.label)) continue;
    if (!doomed[idx.at(t.to)]) continue;

    // Lasso: initial ... trigger state, then a walk inside the doomed set
    // until a state repeats; the repeated tail is the cycle.
    Counterexample cex;
    cex.prefix = shortest_path(model, model.initial, t.from);

    std::vector<WfState> walk{t.to};
    std::map<WfState, std::size_t> first_seen{{t.to, 0}};
    for (;;) {
      const WfState& cur = walk.back();
      const WfTransition* next = nullptr;
      for (const WfTransition& cand : model.transitions)
        if (cand.from == cur && doomed[idx.at(cand.to)]) {
          next = &cand;
          break;
        }
      if (!next)
        throw std::logic_error("check_response: doomed state without doomed successor");
      const auto seen_it = first_seen.find(next->to);
      if (seen_it != first_seen.end()) {
        const std::size_t start = seen_it->second;
        cex.prefix.insert(cex.prefix.end(), walk.begin(),
                          walk.begin() + static_cast<std::ptrdiff_t>(start));
        cex.cycle.assign(walk.begin() + static_cast<std::ptrdiff_t>(start),
                         walk.end());
        break;
      }
      first_seen.emplace(next->to, walk.size());
      walk.push_back(next->to);
    }

    if (!replay_counterexample(model, prop, cex))
      throw std::logic_error("check_response: produced an invalid lasso");
    return {false, cex};
  }
  return {true, std::nullopt};
}

std::set<WfState> enumerate_states(const WfModel& model) {
  const auto idx = index_states(model);
  const auto reachable = reachable_from_initial(model, idx);
  std::set<WfState> out;
  for (const WfState& s : model.states)
    if (reachable[idx.at(s)]) out.insert(s);
  return out;
}

std::string format_counterexample(const Counterexample& cex) {
  std::string out = "prefix:\n";
  for (const WfState& s : cex.prefix) out += to_string(s) + "\n";
  out += "cycle:\n";
  for (const WfState& s : cex.cycle) out += to_string(s) + "\n";
  return out;
}

bool replay_counterexample(const WfModel& model, const LtlResponse& prop,
                           const Counterexample& cex) {
  if (cex.cycle.empty()) return false;
  std::vector<WfState> seq = cex.prefix;
  seq.insert(seq.end(), cex.cycle.begin(), cex.cycle.end());
  if (seq.front() != model.initial) return false;

  auto has_edge = [&model](const WfState& a, const WfState& b) {
    for (const WfTransition& t : model.transitions)
      if (t.from == a && t.to == b) return true;
    return false;
  };
  for (std::size_t i = 0; i + 1 < seq.size(); ++i)
    if (!has_edge(seq[i], seq[i + 1])) return false;
  if (!has_edge(seq.back(), cex.cycle.front())) return false;

  for (const WfState& s : cex.cycle)
    if (prop.response.matches(s)) return false;

  // A trigger step with no response state anywhere after it. Cycle states
  // were checked above, so only the prefix tail needs scanning.
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const WfState& next = i + 1 < seq.size() ? seq[i + 1] : cex.cycle.front();
    bool fires = false;
    for (const WfTransition& t : model.transitions)
      if (t.from == seq[i] && t.to == next && prop.triggers(seq[i], t.label)) {
        fires = true;
        break;
      }
    if (!fires) continue;
    bool clean = true;
    for (std::size_t j = i + 1; j < cex.prefix.size(); ++j)
      if (prop.response.matches(seq[j])) {
        clean = false;
        break;
      }
    if (clean) return true;
  }
  return false;
}

}  // namespace flowsim
