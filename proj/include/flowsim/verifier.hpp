#pragma once

#include <compare>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace flowsim {

// Workflow state machine of the control plane: a received packet is matched,
// translated, allocated to one of n task networks and sent; acknowledged
// packets are cached, data packets loop back through translation.
struct WfState {
  enum class Kind {
    ReceivePkt,
    MatchPkt,
    Drop,
    Translation,
    TaskAlloc,
    SendPkt,
    AddCache,
  };
  Kind kind = Kind::ReceivePkt;
  int task = 0;  // TaskAlloc only: 1..n_tasks

  auto operator<=>(const WfState&) const = default;
};

std::string to_string(const WfState& s);

struct WfTransition {
  WfState from;
  std::string label;  // nondeterministic choice taken (drop/keep/alloc:i/...)
  WfState to;
};

struct WfModel {
  int n_tasks = 1;
  std::vector<WfState> states;
  std::vector<WfTransition> transitions;
  WfState initial{WfState::Kind::ReceivePkt, 0};

  bool complete() const;  // every state has at least one outgoing transition
};

/// The reference workflow. Throws on n_tasks < 1.
WfModel build_reference_model(int n_tasks);

std::vector<std::string> mutant_names();

/// Named single-defect variants of the reference model, one per property:
/// skip-match (LTL1), drop-translation-edge (LTL2), send-self-loop (LTL3).
WfModel build_mutant(const std::string& name, int n_tasks);

struct StatePredicate {
  std::set<WfState::Kind> kinds;
  bool matches(const WfState& s) const { return kinds.count(s.kind) != 0; }
};

// Response property G(p -> F q). The trigger p is evaluated on a step
// (state, chosen transition label); the response q on later states.
struct LtlResponse {
  std::string name;
  StatePredicate trigger_state;
  std::optional<std::string> trigger_label;
  StatePredicate response;

  bool triggers(const WfState& s, const std::string& label) const {
    return trigger_state.matches(s) && (!trigger_label || *trigger_label == label);
  }
  std::string describe() const;
};

LtlResponse ltl1();
LtlResponse ltl2();
LtlResponse ltl3();
std::vector<LtlResponse> all_properties();

// Infinite-run witness: run the prefix, then repeat the cycle forever.
struct Counterexample {
  std::vector<WfState> prefix;
  std::vector<WfState> cycle;
};

struct CheckResult {
  bool holds = true;
  std::optional<Counterexample> counterexample;
};

/// Exhaustive response check over all infinite runs of a finite model.
/// Returns a replay-validated lasso witness when the property fails.
CheckResult check_response(const WfModel& model, const LtlResponse& prop);

/// States reachable from the initial state.
std::set<WfState> enumerate_states(const WfModel& model);

/// Two-section trace: "prefix:" then one state per line, "cycle:" likewise.
std::string format_counterexample(const Counterexample& cex);

/// True iff the lasso is a run of the model and actually violates prop.
bool replay_counterexample(const WfModel& model, const LtlResponse& prop,
                           const Counterexample& cex);

}  // namespace flowsim
