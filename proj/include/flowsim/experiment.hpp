#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "flowsim/simengine.hpp"
#include "flowsim/verifier.hpp"

namespace flowsim {

/// Spec-file problem: message carries file, line and field context.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class SweepKind { TxPower, TopologySide, NodeCount, NodeDensity };

const char* to_string(SweepKind k);

struct ExperimentSpec {
  SimConfig base;
  SweepKind sweep = SweepKind::TxPower;
  std::vector<double> sweep_values;  // strictly increasing
  std::vector<int> groups;           // Net/AP or MG values to compare
  int runs = 70;
  std::uint64_t base_seed = 1;
};

// Line-oriented "key = value" file with [scenario], [radio], [sweep] and
// [runs] sections. Unknown sections or keys are errors.
ExperimentSpec parse_spec_text(const std::string& text, const std::string& filename);
ExperimentSpec parse_spec_file(const std::string& path);

struct ResultRow {
  double sweep_value = 0.0;
  int group = 0;
  int runs = 0;
  double reachability_mean = 0.0, reachability_std = 0.0;
  double packets_mean = 0.0, packets_std = 0.0;
  double simtime_mean = 0.0, simtime_std = 0.0;
  double throughput_mean = 0.0, throughput_std = 0.0;
  double energy_mean = 0.0, energy_std = 0.0;
  double collisions_mean = 0.0;
};

// Seed of run r. Sweep value and group are deliberately not mixed in: every
// (sweep value, group) cell of an experiment replays the same per-run
// topologies, so comparisons across cells are paired, and adding sweep
// points never perturbs existing runs.
std::uint64_t run_seed(std::uint64_t base_seed, int run_index);

/// Concrete simulation config of one (sweep value, group, run) cell.
SimConfig config_for(const ExperimentSpec& spec, double sweep_value, int group,
                     int run_index);

/// All cells of the experiment, aggregated over runs, sorted by
/// (group, sweep value). jobs > 1 runs simulations on worker threads;
/// aggregation order is canonical, so output never depends on jobs.
std::vector<ResultRow> run_experiment(const ExperimentSpec& spec, int jobs = 1);

std::string results_csv(const std::vector<ResultRow>& rows,
                        const ExperimentSpec& spec);
std::string results_table(const std::vector<ResultRow>& rows,
                          const ExperimentSpec& spec);

/// Write results.csv and results.txt under out_dir (created if needed).
void emit_results(const std::vector<ResultRow>& rows, const ExperimentSpec& spec,
                  const std::string& out_dir);

struct WorkflowReport {
  int n_tasks = 0;
  std::string mutant;  // empty for the reference model
  struct Item {
    std::string property;
    std::string formula;
    bool holds = false;
    std::string counterexample;  // formatted trace when !holds
  };
  std::vector<Item> items;
  std::vector<int> tasks_covered;  // reachable TaskAlloc indices

  bool all_hold() const;
  std::string to_text() const;
};

/// Check LTL1-3 on the reference model (or a named mutant).
WorkflowReport verify_workflow(int n_tasks, const std::string& mutant = "");

}  // namespace flowsim
