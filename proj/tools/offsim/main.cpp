// offsim: generate instances, run single simulations, sweep loads and schemes.
//
// Exit status: 0 ok, 1 usage error, 2 runtime or I/O error, 3 LP infeasible.

#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "offload/experiment.hpp"

namespace {

using namespace offload;

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kRuntime = 2;
constexpr int kInfeasible = 3;

struct SpecFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> networks;
  std::optional<int> instances;
  std::optional<std::string> scenario;
  std::optional<std::string> out;
  std::optional<int> horizon;
  std::optional<int> nodes;
  std::vector<double> loads;
  std::vector<std::string> schemes;

  void add(CLI::App* cmd, bool sweep) {
    cmd->add_option("-c,--config", config, "JSON experiment config; flags override its keys")
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", seed, "master seed");
    cmd->add_option("--networks", networks, "number of random networks");
    cmd->add_option("--instances", instances, "traffic instances per network");
    cmd->add_option("--scenario", scenario, "two_type | single_type");
    cmd->add_option("-o,--out", out, "output directory");
    cmd->add_option("--horizon", horizon, "slots per run");
    cmd->add_option("--nodes", nodes, "nodes per network");
    if (sweep) {
      cmd->add_option("--loads", loads, "traffic loads")->delimiter(',');
      cmd->add_option("--schemes", schemes, "joint_spbp, spbp_spbp, bp_spbp, joint_lp")->delimiter(',');
    }
  }

  ExperimentSpec resolve() const {
    ExperimentSpec s;
    if (!config.empty()) {
      std::ifstream in(config);
      if (!in) throw std::runtime_error(fmt::format("cannot read {}", config));
      s = read_spec(in);
    }
    if (seed) s.master_seed = *seed;
    if (networks) s.n_networks = *networks;
    if (instances) s.n_traffic_instances = *instances;
    if (scenario) s.scenario = parse_scenario(*scenario);
    if (out) s.output_dir = *out;
    if (horizon) s.horizon = *horizon;
    if (nodes) s.topology.total_nodes = *nodes;
    if (!loads.empty()) s.loads = loads;
    if (!schemes.empty()) {
      s.schemes.clear();
      for (const auto& n : schemes) s.schemes.push_back(parse_scheme(n));
    }
    s.validate();
    return s;
  }
};

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path));
  return out;
}

int real_main(int argc, char** argv) {
  CLI::App app{"Joint offloading and routing simulator"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate", "write topology and task files plus a manifest");
  SpecFlags gen_flags;
  gen_flags.add(gen, false);

  auto* run = app.add_subcommand("run", "simulate one instance under one scheme and load");
  std::string topo_file;
  std::string tasks_file;
  std::string scheme_name = "joint_spbp";
  RunOptions ro;
  std::string results_file = "results.csv";
  std::string summary_file;
  std::string backlog_file;
  std::string trace_file;
  run->add_option("--topology", topo_file, "topology JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--tasks", tasks_file, "task JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--scheme", scheme_name, "joint_spbp | spbp_spbp | bp_spbp | joint_lp")->capture_default_str();
  run->add_option("--load", ro.load, "traffic load")->capture_default_str();
  run->add_option("--seed", ro.seed, "simulation seed")->capture_default_str();
  run->add_option("--horizon", ro.horizon, "slots")->capture_default_str();
  run->add_option("--processors", ro.processors, "processors per computing node")->capture_default_str();
  run->add_option("--fading-sd", ro.fading.sd, "sd of the link-rate fading factor")->capture_default_str();
  run->add_option("-o,--out", results_file, "results CSV")->capture_default_str();
  run->add_option("--summary", summary_file, "summary CSV");
  run->add_option("--backlog", backlog_file, "per-slot backlog CSV");
  run->add_option("--trace", trace_file, "per-slot transfer CSV");

  auto* sweep = app.add_subcommand("sweep", "run every network x instance x scheme x load cell");
  SpecFlags sweep_flags;
  sweep_flags.add(sweep, true);
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  sweep->add_option("-j,--threads", threads, "parallel cells")->capture_default_str();

  auto* sum = app.add_subcommand("summarize", "percentile summary of results CSVs or a sweep cell directory");
  std::vector<std::string> inputs;
  std::string sum_out;
  sum->add_option("inputs", inputs, "results CSV files or a cells directory")->required();
  sum->add_option("-o,--out", sum_out, "summary CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  if (gen->parsed()) {
    const ExperimentSpec spec = gen_flags.resolve();
    const GeneratedFiles f = cmd_generate(spec);
    fmt::print("wrote {} topologies, {} task files, {}\n", f.topologies.size(), f.tasks.size(), f.manifest.string());
    return kOk;
  }

  if (run->parsed()) {
    ro.scheme = parse_scheme(scheme_name);
    const Instance inst = load_instance(topo_file, tasks_file);
    std::ofstream trace;
    if (!trace_file.empty()) trace = open_out(trace_file);
    RunResult r;
    if (trace.is_open()) {
      if (ro.scheme == SchemeKind::kJointLp && inst.num_types != 1) {
        throw UsageError("joint_lp requires single task type");
      }
      SimConfig cfg{ro.horizon, ro.scheme, ro.load, ro.seed, ro.processors, ro.fading};
      try {
        Simulator sim(inst, cfg);
        trace << "slot,link,from,to,commodity,quota,moved\n";
        sim.set_schedule_trace(&trace);
        r = sim.finish();
      } catch (const LpInfeasibleError&) {
        r.lp_infeasible = true;
      }
    } else {
      r = cmd_run(inst, ro);
    }
    {
      std::ofstream m = open_out(results_file + ".manifest.json");
      m << fmt::format(
          "{{\n \"topology\": \"{}\",\n \"tasks\": \"{}\",\n \"scheme\": \"{}\",\n \"load\": {},\n \"seed\": {},\n"
          " \"horizon\": {},\n \"processors\": {},\n \"fading\": {{\"sd\": {}, \"lo\": {}, \"hi\": {}}}\n}}\n",
          topo_file, tasks_file, scheme_name, format_double(ro.load), ro.seed, ro.horizon, ro.processors,
          format_double(ro.fading.sd), format_double(ro.fading.lo), format_double(ro.fading.hi));
    }
    if (r.lp_infeasible) {
      std::cerr << fmt::format("offsim: static LP infeasible at load {}\n", format_double(ro.load));
      return kInfeasible;
    }
    {
      std::ofstream out = open_out(results_file);
      write_results(out, r);
    }
    if (!summary_file.empty()) {
      std::ofstream out = open_out(summary_file);
      const std::vector<RunResult> runs{r};
      write_summary(out, summarize(runs));
    }
    if (!backlog_file.empty()) {
      std::ofstream out = open_out(backlog_file);
      write_backlog(out, r.backlog);
    }
    fmt::print("{} jobs, {} completed, {} censored\n", r.jobs.size(), r.completed, r.censored);
    return kOk;
  }

  if (sweep->parsed()) {
    const ExperimentSpec spec = sweep_flags.resolve();
    const SweepReport rep = cmd_sweep(spec, threads);
    fmt::print("{} cells ({} reused, {} LP-infeasible); {} and {}\n", rep.cells, rep.reused, rep.infeasible,
               rep.results.string(), rep.summary.string());
    return kOk;
  }

  std::vector<SummaryRow> rows;
  if (inputs.size() == 1 && fs::is_directory(inputs[0])) {
    rows = summarize_cells(inputs[0]);
  } else {
    std::vector<RunResult> runs;
    for (const auto& p : inputs) {
      std::ifstream in(p, std::ios::binary);
      if (!in) throw std::runtime_error(fmt::format("cannot read {}", p));
      for (auto& r : read_results(in)) runs.push_back(std::move(r));
    }
    rows = summarize(runs);
  }
  if (sum_out.empty()) {
    write_summary(std::cout, rows);
  } else {
    std::ofstream out = open_out(sum_out);
    write_summary(out, rows);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return real_main(argc, argv);
  } catch (const offload::FormatError& e) {
    std::cerr << "offsim: " << e.what() << '\n';
    return kRuntime;
  } catch (const std::invalid_argument& e) {
    std::cerr << "offsim: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "offsim: " << e.what() << '\n';
    return kRuntime;
  }
}
