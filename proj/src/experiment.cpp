#include "flowsim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "flowsim/rng.hpp"

namespace flowsim {

const char* to_string(SweepKind k) {
  switch (k) {
    case SweepKind::TxPower: return "tx_power";
    case SweepKind::TopologySide: return "side";
    case SweepKind::NodeCount: return "nodes";
    case SweepKind::NodeDensity: return "density";
  }
  return "?";
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct ParseCtx {
  const std::string& filename;
  int line = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError(filename + ":" + std::to_string(line) + ": " + what);
  }
};

double parse_double(const ParseCtx& ctx, const std::string& key,
                    const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    ctx.fail("key '" + key + "': expected a number, got '" + value + "'");
  }
}

std::int64_t parse_int(const ParseCtx& ctx, const std::string& key,
                       const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    ctx.fail("key '" + key + "': expected an integer, got '" + value + "'");
  }
}

std::uint64_t parse_u64(const ParseCtx& ctx, const std::string& key,
                        const std::string& value) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    ctx.fail("key '" + key + "': expected an unsigned integer, got '" + value + "'");
  }
}

bool parse_onoff(const ParseCtx& ctx, const std::string& key,
                 const std::string& value) {
  if (value == "on") return true;
  if (value == "off") return false;
  ctx.fail("key '" + key + "': expected on|off, got '" + value + "'");
}

std::optional<double> parse_optional_m(const ParseCtx& ctx, const std::string& key,
                                       const std::string& value) {
  if (value == "none") return std::nullopt;
  return parse_double(ctx, key, value);
}

std::vector<std::string> split_csv(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

}  // namespace

ExperimentSpec parse_spec_text(const std::string& text, const std::string& filename) {
  ExperimentSpec spec;
  spec.base.scenario.merge_count = 1;  // groups drive the merge count per cell

  ParseCtx ctx{filename};
  std::string section;
  bool saw_sweep_values = false;

  std::stringstream stream(text);
  std::string raw;
  while (std::getline(stream, raw)) {
    ++ctx.line;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;

    if (line.front() == '[') {
      if (line.back() != ']') ctx.fail("malformed section header '" + line + "'");
      section = line.substr(1, line.size() - 2);
      if (section != "scenario" && section != "radio" && section != "sweep" &&
          section != "runs")
        ctx.fail("unknown section [" + section + "]");
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) ctx.fail("expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) ctx.fail("empty key");
    if (section.empty()) ctx.fail("key '" + key + "' outside any section");

    SimConfig& base = spec.base;
    RadioParams& radio = base.radio;

    if (section == "scenario") {
      if (key == "kind") {
        if (value == "inter_network")
          base.scenario.kind = SimScenarioKind::InterNetwork;
        else if (value == "intra_domain")
          base.scenario.kind = SimScenarioKind::IntraDomain;
        else if (value == "inter_domain")
          base.scenario.kind = SimScenarioKind::InterDomain;
        else
          ctx.fail("key 'kind': unknown scenario '" + value + "'");
      } else if (key == "nodes") {
        base.nodes_total = parse_int(ctx, key, value);
      } else if (key == "gateways") {
        base.gateways = parse_int(ctx, key, value);
      } else if (key == "side_m") {
        base.side_m = parse_double(ctx, key, value);
      } else if (key == "networks") {
        base.networks = static_cast<int>(parse_int(ctx, key, value));
      } else if (key == "groups") {
        spec.groups.clear();
        for (const std::string& g : split_csv(value))
          spec.groups.push_back(static_cast<int>(parse_int(ctx, key, g)));
      } else if (key == "slot_s") {
        base.slot_s = parse_double(ctx, key, value);
      } else if (key == "acks") {
        base.acks_enabled = parse_onoff(ctx, key, value);
      } else if (key == "destructive_collisions") {
        base.destructive_collisions = parse_onoff(ctx, key, value);
      } else {
        ctx.fail("unknown key '" + key + "' in [scenario]");
      }
    } else if (section == "radio") {
      if (key == "tx_power_dbm") radio.tx_power_dbm = parse_double(ctx, key, value);
      else if (key == "path_gain_db") radio.path_gain_db = parse_double(ctx, key, value);
      else if (key == "propagation_constant")
        radio.propagation_constant = parse_double(ctx, key, value);
      else if (key == "receiver_sensitivity_dbm")
        radio.receiver_sensitivity_dbm = parse_double(ctx, key, value);
      else if (key == "required_snr_db")
        radio.required_snr_db = parse_double(ctx, key, value);
      else if (key == "tx_range_m")
        radio.tx_range_override_m = parse_optional_m(ctx, key, value);
      else if (key == "interference_range_m")
        radio.interference_range_m = parse_optional_m(ctx, key, value);
      else if (key == "data_rate_bps") radio.data_rate_bps = parse_double(ctx, key, value);
      else if (key == "tx_energy_j_per_bit")
        radio.tx_energy_j_per_bit = parse_double(ctx, key, value);
      else if (key == "rx_energy_j_per_bit")
        radio.rx_energy_j_per_bit = parse_double(ctx, key, value);
      else if (key == "packet_size_bytes")
        radio.packet_size_bytes = static_cast<std::uint32_t>(parse_int(ctx, key, value));
      else if (key == "antenna_gain_tx_dbi")
        radio.antenna_gain_tx_dbi = parse_double(ctx, key, value);
      else if (key == "antenna_gain_rx_dbi")
        radio.antenna_gain_rx_dbi = parse_double(ctx, key, value);
      else if (key == "max_retransmissions")
        radio.max_retransmissions = static_cast<std::uint32_t>(parse_int(ctx, key, value));
      else if (key == "channel_check_rate_hz")
        radio.channel_check_rate_hz = parse_double(ctx, key, value);
      else
        ctx.fail("unknown key '" + key + "' in [radio]");
    } else if (section == "sweep") {
      if (key == "name") {
        if (value == "tx_power") spec.sweep = SweepKind::TxPower;
        else if (value == "side") spec.sweep = SweepKind::TopologySide;
        else if (value == "nodes") spec.sweep = SweepKind::NodeCount;
        else if (value == "density") spec.sweep = SweepKind::NodeDensity;
        else ctx.fail("key 'name': unknown sweep '" + value + "'");
      } else if (key == "values") {
        spec.sweep_values.clear();
        for (const std::string& v : split_csv(value))
          spec.sweep_values.push_back(parse_double(ctx, key, v));
        saw_sweep_values = true;
      } else {
        ctx.fail("unknown key '" + key + "' in [sweep]");
      }
    } else if (section == "runs") {
      if (key == "runs") {
        spec.runs = static_cast<int>(parse_int(ctx, key, value));
      } else if (key == "base_seed") {
        spec.base_seed = parse_u64(ctx, key, value);
      } else {
        ctx.fail("unknown key '" + key + "' in [runs]");
      }
    }
  }

  ctx.line = 0;  // whole-file diagnostics below
  if (spec.groups.empty()) spec.groups = {1};
  if (!saw_sweep_values)
    throw ConfigError(filename + ": missing [sweep] values");
  if (spec.sweep_values.empty())
    throw ConfigError(filename + ": sweep values must be non-empty");
  for (std::size_t i = 1; i < spec.sweep_values.size(); ++i)
    if (!(spec.sweep_values[i] > spec.sweep_values[i - 1]))
      throw ConfigError(filename + ": sweep values must be strictly increasing");
  if (spec.runs < 1) throw ConfigError(filename + ": runs must be >= 1");
  for (int g : spec.groups)
    if (g < 1) throw ConfigError(filename + ": groups must be >= 1");
  return spec;
}

ExperimentSpec parse_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open spec file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_spec_text(buf.str(), path);
}

std::uint64_t run_seed(std::uint64_t base_seed, int run_index) {
  return mix64(mix64(base_seed) ^ (static_cast<std::uint64_t>(run_index) + 1));
}

SimConfig config_for(const ExperimentSpec& spec, double sweep_value, int group,
                     int run_index) {
  SimConfig cfg = spec.base;
  cfg.scenario.merge_count = group;
  switch (spec.sweep) {
    case SweepKind::TxPower:
      cfg.radio.tx_power_dbm = sweep_value;
      break;
    case SweepKind::TopologySide:
      cfg.side_m = sweep_value;
      break;
    case SweepKind::NodeCount:
      cfg.nodes_total = std::llround(sweep_value);
      break;
    case SweepKind::NodeDensity:
      cfg.nodes_total = std::llround(sweep_value * cfg.side_m * cfg.side_m);
      break;
  }
  cfg.seed = run_seed(spec.base_seed, run_index);
  return cfg;
}

namespace {

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd out;
  if (xs.empty()) return out;
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return out;
}

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec, int jobs) {
  // Runtime guard against derived-seed collisions across run indices.
  {
    std::set<std::uint64_t> seeds;
    for (int r = 0; r < spec.runs; ++r) seeds.insert(run_seed(spec.base_seed, r));
    if (seeds.size() != static_cast<std::size_t>(spec.runs))
      throw std::runtime_error("run_experiment: derived run seeds collide");
  }

  struct Cell {
    double sweep_value;
    int group;
  };
  std::vector<Cell> cells;
  for (int group : spec.groups)
    for (double v : spec.sweep_values) cells.push_back({v, group});

  const std::size_t total = cells.size() * static_cast<std::size_t>(spec.runs);
  std::vector<Metrics> metrics(total);

  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= total) return;
      {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (first_error) return;
      }
      const Cell& cell = cells[i / static_cast<std::size_t>(spec.runs)];
      const int run = static_cast<int>(i % static_cast<std::size_t>(spec.runs));
      try {
        const SimConfig cfg = config_for(spec, cell.sweep_value, cell.group, run);
        metrics[i] = run_scenario(cfg).metrics;
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  const int n_threads = std::max(1, jobs);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  std::vector<ResultRow> rows;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    std::vector<double> reach, packets, simtime, tput, energy, collisions;
    for (int r = 0; r < spec.runs; ++r) {
      const Metrics& m = metrics[c * static_cast<std::size_t>(spec.runs) +
                                 static_cast<std::size_t>(r)];
      reach.push_back(m.reachability);
      packets.push_back(m.avg_packets_per_sensor);
      simtime.push_back(m.sim_time_s);
      tput.push_back(m.throughput_bps);
      energy.push_back(m.energy_j);
      collisions.push_back(static_cast<double>(m.collisions));
    }
    ResultRow row;
    row.sweep_value = cells[c].sweep_value;
    row.group = cells[c].group;
    row.runs = spec.runs;
    const MeanStd r1 = mean_std(reach), r2 = mean_std(packets),
                  r3 = mean_std(simtime), r4 = mean_std(tput),
                  r5 = mean_std(energy), r6 = mean_std(collisions);
    row.reachability_mean = r1.mean;
    row.reachability_std = r1.std;
    row.packets_mean = r2.mean;
    row.packets_std = r2.std;
    row.simtime_mean = r3.mean;
    row.simtime_std = r3.std;
    row.throughput_mean = r4.mean;
    row.throughput_std = r4.std;
    row.energy_mean = r5.mean;
    row.energy_std = r5.std;
    row.collisions_mean = r6.mean;
    rows.push_back(row);
  }

  std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    if (a.group != b.group) return a.group < b.group;
    return a.sweep_value < b.sweep_value;
  });
  return rows;
}

std::string results_csv(const std::vector<ResultRow>& rows,
                        const ExperimentSpec& spec) {
  std::string out =
      "scenario,group,sweep_name,sweep_value,runs,reachability_mean,"
      "reachability_std,packets_mean,packets_std,simtime_mean,simtime_std,"
      "throughput_mean,throughput_std,energy_mean,energy_std,collisions_mean\n";
  for (const ResultRow& r : rows) {
    out += to_string(spec.base.scenario.kind);
    out += ',' + std::to_string(r.group);
    out += ',';
    out += to_string(spec.sweep);
    out += ',' + fmt_g(r.sweep_value);
    out += ',' + std::to_string(r.runs);
    out += ',' + fmt_g(r.reachability_mean) + ',' + fmt_g(r.reachability_std);
    out += ',' + fmt_g(r.packets_mean) + ',' + fmt_g(r.packets_std);
    out += ',' + fmt_g(r.simtime_mean) + ',' + fmt_g(r.simtime_std);
    out += ',' + fmt_g(r.throughput_mean) + ',' + fmt_g(r.throughput_std);
    out += ',' + fmt_g(r.energy_mean) + ',' + fmt_g(r.energy_std);
    out += ',' + fmt_g(r.collisions_mean);
    out += '\n';
  }
  return out;
}

std::string results_table(const std::vector<ResultRow>& rows,
                          const ExperimentSpec& spec) {
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof buf, "%-14s %-6s %10s %6s %12s %12s %12s %14s %12s %12s\n",
                "scenario", "group", to_string(spec.sweep), "runs", "reach", "packets",
                "simtime_s", "tput_bps", "energy_j", "collisions");
  out += buf;
  for (const ResultRow& r : rows) {
    std::snprintf(buf, sizeof buf,
                  "%-14s %-6d %10.4g %6d %12.4f %12.3f %12.4f %14.1f %12.5g %12.2f\n",
                  to_string(spec.base.scenario.kind), r.group, r.sweep_value, r.runs,
                  r.reachability_mean, r.packets_mean, r.simtime_mean,
                  r.throughput_mean, r.energy_mean, r.collisions_mean);
    out += buf;
  }
  return out;
}

void emit_results(const std::vector<ResultRow>& rows, const ExperimentSpec& spec,
                  const std::string& out_dir) {
  if (rows.empty()) throw std::invalid_argument("emit_results: no rows");
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  const fs::path dir(out_dir);

  for (const auto& [name, text] :
       {std::pair<std::string, std::string>{"results.csv", results_csv(rows, spec)},
        {"results.txt", results_table(rows, spec)}}) {
    std::ofstream out(dir / name, std::ios::binary);
    out << text;
    if (!out)
      throw std::runtime_error("I/O error: cannot write " + (dir / name).string());
  }
}

bool WorkflowReport::all_hold() const {
  for (const Item& item : items)
    if (!item.holds) return false;
  return true;
}

std::string WorkflowReport::to_text() const {
  std::string out = "workflow model: n_tasks=" + std::to_string(n_tasks) +
                    ", variant=" + (mutant.empty() ? "reference" : mutant) + "\n";
  for (const Item& item : items) {
    out += item.property + " " + item.formula + ": ";
    out += item.holds ? "holds\n" : "violated\n";
    if (!item.holds) out += item.counterexample;
  }
  out += "task allocation coverage:";
  for (int t : tasks_covered) out += " F" + std::to_string(t);
  if (tasks_covered.empty()) out += " none";
  out += '\n';
  return out;
}

WorkflowReport verify_workflow(int n_tasks, const std::string& mutant) {
  const WfModel model = mutant.empty() ? build_reference_model(n_tasks)
                                       : build_mutant(mutant, n_tasks);
  WorkflowReport report;
  report.n_tasks = n_tasks;
  report.mutant = mutant;
  for (const LtlResponse& prop : all_properties()) {
    const CheckResult res = check_response(model, prop);
    WorkflowReport::Item item;
    item.property = prop.name;
    item.formula = prop.describe();
    item.holds = res.holds;
    if (res.counterexample)
      item.counterexample = format_counterexample(*res.counterexample);
    report.items.push_back(std::move(item));
  }
  for (const WfState& s : enumerate_states(model))
    if (s.kind == WfState::Kind::TaskAlloc) report.tasks_covered.push_back(s.task);
  std::sort(report.tasks_covered.begin(), report.tasks_covered.end());
  return report;
}

}  // namespace flowsim
