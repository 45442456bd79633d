#include "offload/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <fmt/core.h>
#include <json.hpp>

#include "offload/rng.hpp"

namespace offload {

using nlohmann::json;

std::string_view to_string(Scenario s) { return s == Scenario::kTwoType ? "two_type" : "single_type"; }

Scenario parse_scenario(std::string_view name) {
  if (name == "two_type") return Scenario::kTwoType;
  if (name == "single_type") return Scenario::kSingleType;
  throw UsageError(fmt::format("unknown scenario '{}'", name));
}

ServiceScheme service_scheme(Scenario s) {
  return s == Scenario::kTwoType ? ServiceScheme::two_type() : ServiceScheme::single_type();
}

void ExperimentSpec::validate() const {
  if (n_networks < 1) throw UsageError("n_networks must be >= 1");
  if (n_traffic_instances < 1) throw UsageError("n_traffic_instances must be >= 1");
  if (loads.empty()) throw UsageError("at least one load is required");
  for (double l : loads) {
    if (!(l > 0.0)) throw UsageError(fmt::format("load {} must be > 0", l));
  }
  if (schemes.empty()) throw UsageError("at least one scheme is required");
  if (horizon <= 0) throw UsageError("horizon must be > 0");
  if (processors < 1) throw UsageError("processors must be >= 1");
  if (scenario == Scenario::kTwoType &&
      std::find(schemes.begin(), schemes.end(), SchemeKind::kJointLp) != schemes.end()) {
    throw UsageError("joint_lp requires single task type");
  }
  try {
    topology.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

namespace {

void check_keys(const json& j, std::initializer_list<std::string_view> allowed, std::string_view where) {
  if (!j.is_object()) throw UsageError(fmt::format("'{}' must be an object", where));
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw UsageError(fmt::format("unknown config key '{}{}'", where.empty() ? "" : fmt::format("{}.", where), key));
    }
  }
}

template <typename T>
void read_key(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void read_interval(const json& j, const char* key, Interval& out) {
  if (!j.contains(key)) return;
  const auto v = j.at(key).get<std::vector<double>>();
  if (v.size() != 2) throw UsageError(fmt::format("'{}' must be [lo, hi]", key));
  out = {v[0], v[1]};
}

json interval_json(const Interval& i) { return json::array({i.lo, i.hi}); }

json spec_json(const ExperimentSpec& s) {
  json j;
  j["master_seed"] = s.master_seed;
  j["n_networks"] = s.n_networks;
  j["n_traffic_instances"] = s.n_traffic_instances;
  j["loads"] = s.loads;
  j["schemes"] = json::array();
  for (SchemeKind k : s.schemes) j["schemes"].push_back(std::string(to_string(k)));
  j["scenario"] = std::string(to_string(s.scenario));
  j["output_dir"] = s.output_dir.string();
  j["horizon"] = s.horizon;
  j["processors"] = s.processors;
  const GenParams& g = s.topology;
  j["topology"] = {{"k_choices", g.k_choices},
                   {"tier2_per_core", g.tier2_per_core},
                   {"edge_server_frac", g.edge_server_frac},
                   {"intra_group_edge_prob", g.intra_group_edge_prob},
                   {"second_link_prob", g.second_link_prob},
                   {"edge_server_weight", g.edge_server_weight},
                   {"core_server_weight", g.core_server_weight},
                   {"total_nodes", g.total_nodes},
                   {"pareto_shape", g.pareto_shape},
                   {"pareto_scale", g.pareto_scale},
                   {"client_mu", interval_json(g.client_mu_range)},
                   {"max_retries", g.max_retries}};
  j["link_rate"] = interval_json(s.link_rate);
  const TrafficParams& t = s.traffic;
  j["traffic"] = {{"client_fraction", interval_json(t.client_fraction)},
                  {"base_rate", interval_json(t.base_rate)},
                  {"bursty_prob", t.bursty_prob},
                  {"burst_length", t.burst_length},
                  {"burst_margin", t.burst_margin},
                  {"allow_bursty", t.allow_bursty}};
  j["fading"] = {{"sd", s.fading.sd}, {"lo", s.fading.lo}, {"hi", s.fading.hi}};
  return j;
}

ExperimentSpec spec_from_json(const json& j) {
  ExperimentSpec s;
  check_keys(j,
             {"master_seed", "n_networks", "n_traffic_instances", "loads", "schemes", "scenario", "output_dir",
              "horizon", "processors", "topology", "link_rate", "traffic", "fading"},
             "");
  read_key(j, "master_seed", s.master_seed);
  read_key(j, "n_networks", s.n_networks);
  read_key(j, "n_traffic_instances", s.n_traffic_instances);
  read_key(j, "loads", s.loads);
  if (j.contains("schemes")) {
    s.schemes.clear();
    for (const auto& name : j.at("schemes")) {
      try {
        s.schemes.push_back(parse_scheme(name.get<std::string>()));
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
    }
  }
  if (j.contains("scenario")) s.scenario = parse_scenario(j.at("scenario").get<std::string>());
  if (j.contains("output_dir")) s.output_dir = j.at("output_dir").get<std::string>();
  read_key(j, "horizon", s.horizon);
  read_key(j, "processors", s.processors);
  if (j.contains("topology")) {
    const json& g = j.at("topology");
    check_keys(g,
               {"k_choices", "tier2_per_core", "edge_server_frac", "intra_group_edge_prob", "second_link_prob",
                "edge_server_weight", "core_server_weight", "total_nodes", "pareto_shape", "pareto_scale",
                "client_mu", "max_retries"},
               "topology");
    GenParams& p = s.topology;
    read_key(g, "k_choices", p.k_choices);
    read_key(g, "tier2_per_core", p.tier2_per_core);
    read_key(g, "edge_server_frac", p.edge_server_frac);
    read_key(g, "intra_group_edge_prob", p.intra_group_edge_prob);
    read_key(g, "second_link_prob", p.second_link_prob);
    read_key(g, "edge_server_weight", p.edge_server_weight);
    read_key(g, "core_server_weight", p.core_server_weight);
    read_key(g, "total_nodes", p.total_nodes);
    read_key(g, "pareto_shape", p.pareto_shape);
    read_key(g, "pareto_scale", p.pareto_scale);
    read_interval(g, "client_mu", p.client_mu_range);
    read_key(g, "max_retries", p.max_retries);
  }
  read_interval(j, "link_rate", s.link_rate);
  if (j.contains("traffic")) {
    const json& t = j.at("traffic");
    check_keys(t, {"client_fraction", "base_rate", "bursty_prob", "burst_length", "burst_margin", "allow_bursty"},
               "traffic");
    read_interval(t, "client_fraction", s.traffic.client_fraction);
    read_interval(t, "base_rate", s.traffic.base_rate);
    read_key(t, "bursty_prob", s.traffic.bursty_prob);
    read_key(t, "burst_length", s.traffic.burst_length);
    read_key(t, "burst_margin", s.traffic.burst_margin);
    read_key(t, "allow_bursty", s.traffic.allow_bursty);
  }
  if (j.contains("fading")) {
    const json& f = j.at("fading");
    check_keys(f, {"sd", "lo", "hi"}, "fading");
    read_key(f, "sd", s.fading.sd);
    read_key(f, "lo", s.fading.lo);
    read_key(f, "hi", s.fading.hi);
  }
  return s;
}

void write_file(const fs::path& path, const std::string& content) {
  // Write-then-rename keeps a crashed run from leaving a truncated file.
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error(fmt::format("cannot write {}", tmp.string()));
    out << content;
    if (!out) throw std::runtime_error(fmt::format("write failed: {}", tmp.string()));
  }
  fs::rename(tmp, path);
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot read {}", path.string()));
  return in;
}

fs::path topology_path(const fs::path& dir, int net) { return dir / fmt::format("net{:03}.topology.json", net); }
fs::path tasks_path(const fs::path& dir, int net, int inst) {
  return dir / fmt::format("net{:03}.tasks{:03}.json", net, inst);
}

std::string cell_stem(int net, int inst, SchemeKind scheme, double load) {
  return fmt::format("net{:03}_inst{:03}_{}_load{}", net, inst, to_string(scheme), format_double(load));
}

}  // namespace

ExperimentSpec read_spec(std::istream& in) {
  try {
    return spec_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw UsageError(fmt::format("bad config: {}", e.what()));
  }
}

void write_spec(std::ostream& out, const ExperimentSpec& spec) { out << spec_json(spec).dump(1) << '\n'; }

Topology make_network(const ExperimentSpec& spec, int net) {
  const auto k = static_cast<std::uint64_t>(net);
  Topology topo = generate_topology(derive_seed(spec.master_seed, Stream::kTopology, {k}), spec.topology);
  return sample_long_term_rates(derive_seed(spec.master_seed, Stream::kLinkRates, {k}), std::move(topo),
                                spec.link_rate);
}

Instance make_instance(const ExperimentSpec& spec, int net, int inst) {
  Instance i;
  i.topology = make_network(spec, net);
  i.mu = derive_typed_service_rates(i.topology, service_scheme(spec.scenario));
  i.num_types = i.mu.num_types();
  TrafficParams tp = spec.traffic;
  tp.horizon = spec.horizon;
  if (spec.scenario == Scenario::kSingleType) tp.allow_bursty = false;
  i.tasks = generate_tasks(
      derive_seed(spec.master_seed, Stream::kTraffic, {static_cast<std::uint64_t>(net), static_cast<std::uint64_t>(inst)}),
      i.topology, i.num_types, 1.0, tp);
  i.task_load = 1.0;
  return i;
}

std::uint64_t cell_seed(const ExperimentSpec& spec, int net, int inst) {
  return derive_seed(spec.master_seed, Stream::kSimulation,
                     {static_cast<std::uint64_t>(net), static_cast<std::uint64_t>(inst)});
}

Instance load_instance(const fs::path& topology, const fs::path& tasks) {
  auto tin = open_in(topology);
  auto kin = open_in(tasks);
  Instance i;
  i.topology = read_topology(tin);
  const TaskFile tf = read_tasks(kin);
  const Scenario sc = parse_scenario(tf.scenario);
  i.mu = derive_typed_service_rates(i.topology, service_scheme(sc));
  if (i.mu.num_types() != tf.num_types) {
    throw FormatError(fmt::format("{}: num_types {} does not match scenario {}", tasks.string(), tf.num_types, tf.scenario));
  }
  i.num_types = tf.num_types;
  i.tasks = tf.tasks;
  i.task_load = tf.task_load;
  return i;
}

GeneratedFiles cmd_generate(const ExperimentSpec& spec) {
  spec.validate();
  const fs::path dir = spec.output_dir / "instances";
  fs::create_directories(dir);
  GeneratedFiles files;
  json manifest;
  manifest["spec"] = spec_json(spec);
  manifest["instances"] = json::array();
  for (int net = 0; net < spec.n_networks; ++net) {
    const Instance first = make_instance(spec, net, 0);
    const ExtendedGraph eg = build_extended_graph(first.topology, first.mu, first.num_types);
    std::ostringstream topo;
    write_topology(topo, first.topology, &eg);
    files.topologies.push_back(topology_path(dir, net));
    write_file(files.topologies.back(), topo.str());
    for (int inst = 0; inst < spec.n_traffic_instances; ++inst) {
      const Instance i = inst == 0 ? first : make_instance(spec, net, inst);
      std::ostringstream tasks;
      write_tasks(tasks, TaskFile{std::string(to_string(spec.scenario)), i.num_types, i.task_load, i.tasks});
      files.tasks.push_back(tasks_path(dir, net, inst));
      write_file(files.tasks.back(), tasks.str());
      manifest["instances"].push_back({{"network", net},
                                       {"instance", inst},
                                       {"topology", files.topologies.back().filename().string()},
                                       {"tasks", files.tasks.back().filename().string()},
                                       {"seed", cell_seed(spec, net, inst)}});
    }
  }
  files.manifest = spec.output_dir / "manifest.json";
  write_file(files.manifest, manifest.dump(1) + "\n");
  return files;
}

RunResult cmd_run(const Instance& instance, const RunOptions& o) {
  if (o.scheme == SchemeKind::kJointLp && instance.num_types != 1) {
    throw UsageError("joint_lp requires single task type");
  }
  SimConfig cfg;
  cfg.horizon = o.horizon;
  cfg.scheme = o.scheme;
  cfg.load = o.load;
  cfg.seed = o.seed;
  cfg.processors = o.processors;
  cfg.fading = o.fading;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return run(instance, cfg);
}

SweepReport cmd_sweep(const ExperimentSpec& spec, int threads) {
  spec.validate();
  const fs::path cells_dir = spec.output_dir / "cells";
  fs::create_directories(cells_dir);
  {
    std::ostringstream m;
    write_spec(m, spec);
    write_file(spec.output_dir / "sweep_manifest.json", m.str());
  }

  struct Cell {
    int net;
    int inst;
    SchemeKind scheme;
    double load;
  };
  std::vector<Cell> cells;
  for (int net = 0; net < spec.n_networks; ++net) {
    for (int inst = 0; inst < spec.n_traffic_instances; ++inst) {
      for (SchemeKind s : spec.schemes) {
        for (double l : spec.loads) cells.push_back({net, inst, s, l});
      }
    }
  }

  SweepReport report;
  report.cells = cells.size();
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> reused{0};
  std::mutex error_mu;
  std::exception_ptr error;

  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= cells.size()) return;
      const Cell& c = cells[k];
      const std::string stem = cell_stem(c.net, c.inst, c.scheme, c.load);
      const fs::path csv = cells_dir / (stem + ".csv");
      const fs::path marker = cells_dir / (stem + ".infeasible");
      if (fs::exists(csv) || fs::exists(marker)) {
        ++reused;
        continue;
      }
      try {
        const Instance inst = make_instance(spec, c.net, c.inst);
        RunOptions o;
        o.scheme = c.scheme;
        o.load = c.load;
        o.seed = cell_seed(spec, c.net, c.inst);
        o.horizon = spec.horizon;
        o.processors = spec.processors;
        o.fading = spec.fading;
        const RunResult r = cmd_run(inst, o);
        if (r.lp_infeasible) {
          write_file(marker, fmt::format("{},{}\n", to_string(c.scheme), format_double(c.load)));
        } else {
          std::ostringstream out;
          write_results(out, r);
          write_file(csv, out.str());
        }
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
        next = cells.size();
        return;
      }
    }
  };

  const int n = std::max(1, threads);
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  report.reused = reused;

  // Deterministic merge in cell order.
  std::ostringstream merged;
  merged << kResultsHeader << '\n';
  for (const Cell& c : cells) {
    const std::string stem = cell_stem(c.net, c.inst, c.scheme, c.load);
    const fs::path csv = cells_dir / (stem + ".csv");
    if (!fs::exists(csv)) {
      ++report.infeasible;
      continue;
    }
    auto in = open_in(csv);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) merged << line << '\n';
  }
  report.results = spec.output_dir / "results.csv";
  write_file(report.results, merged.str());

  const auto rows = summarize_cells(cells_dir);
  std::ostringstream summary;
  write_summary(summary, rows);
  report.summary = spec.output_dir / "summary.csv";
  write_file(report.summary, summary.str());
  return report;
}

std::vector<SummaryRow> summarize_cells(const fs::path& cells_dir) {
  if (!fs::is_directory(cells_dir)) throw std::runtime_error(fmt::format("not a directory: {}", cells_dir.string()));
  std::set<fs::path> files;
  for (const auto& e : fs::directory_iterator(cells_dir)) files.insert(e.path());
  std::vector<RunResult> runs;
  for (const fs::path& p : files) {
    if (p.extension() == ".csv") {
      auto in = open_in(p);
      try {
        auto rs = read_results(in);
        for (auto& r : rs) runs.push_back(std::move(r));
      } catch (const FormatError& e) {
        throw FormatError(fmt::format("{}: {}", p.string(), e.what()));
      }
    } else if (p.extension() == ".infeasible") {
      auto in = open_in(p);
      std::string line;
      std::getline(in, line);
      const auto comma = line.find(',');
      if (comma == std::string::npos) throw FormatError(fmt::format("{}: bad marker", p.string()));
      RunResult r;
      r.scheme = parse_scheme(std::string_view(line).substr(0, comma));
      r.load = std::stod(line.substr(comma + 1));
      r.lp_infeasible = true;
      runs.push_back(std::move(r));
    }
  }
  return summarize(runs);
}

}  // namespace offload
