// flowsim: seeded experiment harness for the flow-sensor network simulator.
//
//   flowsim run    --spec <file> --out <dir> [--jobs N] [--per-run]
//   flowsim verify --tasks N [--mutate <name>]
//   flowsim topo   --seed S --scenario inter_network|multicast --nodes N
//                  [--side M] [--networks K] [--gateways G]
//
// FLOWSIM_JOBS overrides --jobs.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "flowsim/experiment.hpp"

namespace {

int resolve_jobs(int cli_jobs) {
  if (const char* env = std::getenv("FLOWSIM_JOBS")) {
    try {
      return std::max(1, std::stoi(env));
    } catch (const std::exception&) {
      std::cerr << "flowsim: ignoring malformed FLOWSIM_JOBS='" << env << "'\n";
    }
  }
  return std::max(1, cli_jobs);
}

int cmd_run(const std::string& spec_path, const std::string& out_dir, int jobs,
            bool per_run) {
  const flowsim::ExperimentSpec spec = flowsim::parse_spec_file(spec_path);
  const auto rows = flowsim::run_experiment(spec, resolve_jobs(jobs));
  flowsim::emit_results(rows, spec, out_dir);

  if (per_run) {
    std::ofstream out(std::filesystem::path(out_dir) / "runs.csv", std::ios::binary);
    out << flowsim::metrics_csv_header() << '\n';
    for (int group : spec.groups)
      for (double v : spec.sweep_values)
        for (int r = 0; r < spec.runs; ++r) {
          const flowsim::SimConfig cfg = flowsim::config_for(spec, v, group, r);
          out << flowsim::metrics_csv_row(cfg, flowsim::run_scenario(cfg).metrics)
              << '\n';
        }
    if (!out) throw std::runtime_error("I/O error: cannot write runs.csv");
  }

  std::cout << flowsim::results_table(rows, spec);
  std::cout << "wrote " << out_dir << "/results.csv\n";
  return 0;
}

int cmd_verify(int tasks, const std::string& mutant) {
  const flowsim::WorkflowReport report = flowsim::verify_workflow(tasks, mutant);
  std::cout << report.to_text();
  return report.all_hold() ? 0 : 1;
}

int cmd_topo(std::uint64_t seed, const std::string& scenario, std::int64_t nodes,
             double side, int networks, std::int64_t gateways) {
  flowsim::ScenarioTag tag;
  if (scenario == "inter_network") {
    tag.kind = flowsim::ScenarioTag::Kind::InterNetwork;
    tag.networks = networks;
  } else if (scenario == "multicast") {
    tag.kind = flowsim::ScenarioTag::Kind::Multicast;
  } else {
    std::cerr << "flowsim topo: unknown scenario '" << scenario << "'\n";
    return 2;
  }
  const flowsim::Topology topo =
      flowsim::place_random(nodes - gateways, gateways, side, seed, tag);
  std::printf("id,kind,x,y,network_id\n");
  for (const flowsim::Node& n : topo.nodes)
    std::printf("%u,%s,%.10g,%.10g,%d\n", n.id, flowsim::to_string(n.kind), n.pos.x,
                n.pos.y, n.network_id);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flow-sensor network experiment harness"};
  app.require_subcommand(1);

  std::string spec_path;
  std::string out_dir;
  int jobs = 1;
  bool per_run = false;
  auto* run = app.add_subcommand("run", "run a sweep experiment from a spec file");
  run->add_option("--spec", spec_path, "experiment spec file")->required();
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_option("--jobs", jobs, "worker threads (FLOWSIM_JOBS overrides)");
  run->add_flag("--per-run", per_run, "also write per-run metrics to runs.csv");

  int tasks = 3;
  std::string mutant;
  auto* verify = app.add_subcommand("verify", "check the workflow LTL properties");
  verify->add_option("--tasks", tasks, "task allocation count")->required();
  verify->add_option("--mutate", mutant, "check a named defect variant");

  std::uint64_t seed = 1;
  std::string scenario = "inter_network";
  std::int64_t nodes = 100;
  double side = 100.0;
  int networks = 4;
  std::int64_t gateways = -1;
  auto* topo = app.add_subcommand("topo", "dump a random topology as CSV");
  topo->add_option("--seed", seed, "placement seed")->required();
  topo->add_option("--scenario", scenario, "inter_network | multicast");
  topo->add_option("--nodes", nodes, "total node count incl. gateways");
  topo->add_option("--side", side, "square side, meters");
  topo->add_option("--networks", networks, "physical networks (inter_network)");
  topo->add_option("--gateways", gateways, "gateway count (default 1 or 4)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(spec_path, out_dir, jobs, per_run);
    if (verify->parsed()) return cmd_verify(tasks, mutant);
    if (topo->parsed()) {
      if (gateways < 0) gateways = scenario == "multicast" ? 4 : 1;
      return cmd_topo(seed, scenario, nodes, side, networks, gateways);
    }
  } catch (const flowsim::ConfigError& e) {
    std::cerr << "flowsim: config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "flowsim: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
