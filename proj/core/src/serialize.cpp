#include "offload/serialize.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/core.h>
#include <fmt/ostream.h>
#include <json.hpp>

namespace offload {

using nlohmann::json;

namespace {

json parse_json(std::istream& in, std::string_view what) {
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(fmt::format("malformed {} file: {}", what, e.what()));
  }
}

template <typename F>
auto guarded(std::string_view what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw FormatError(fmt::format("bad {} file: {}", what, e.what()));
  }
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
T parse_num(std::string_view s, std::string_view column) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw FormatError(fmt::format("bad value '{}' in column {}", s, column));
  }
  return v;
}

std::optional<double> parse_opt(std::string_view s, std::string_view column) {
  if (s.empty()) return std::nullopt;
  return parse_num<double>(s, column);
}

std::string opt_str(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

void expect_header(std::istream& in, std::string_view header) {
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw FormatError(fmt::format("expected CSV header '{}'", header));
  }
}

}  // namespace

std::string format_double(double v) { return fmt::format("{}", v); }

void write_topology(std::ostream& out, const Topology& topo, const ExtendedGraph* eg) {
  json j;
  j["nodes"] = json::array();
  for (const Node& n : topo.nodes()) {
    j["nodes"].push_back({{"id", n.id}, {"role", std::string(to_string(n.role))}, {"mu", n.base_mu}});
  }
  j["links"] = json::array();
  for (const Link& l : topo.links()) {
    j["links"].push_back({{"id", l.id}, {"a", l.a}, {"b", l.b}, {"rate", l.rate}});
  }
  if (eg) {
    json d;
    d["num_types"] = eg->num_types();
    d["sinks"] = json::array();
    for (TypeId c = 0; c < eg->num_types(); ++c) d["sinks"].push_back(eg->sink(c));
    d["virtual_links"] = json::array();
    for (const VirtualLink& v : eg->virtual_links()) {
      d["virtual_links"].push_back({{"node", v.node}, {"type", v.type}, {"rate", v.rate}});
    }
    j["derived"] = std::move(d);
  }
  out << j.dump(1) << '\n';
}

Topology read_topology(std::istream& in) {
  const json j = parse_json(in, "topology");
  return guarded("topology", [&] {
    Topology topo;
    for (const json& n : j.at("nodes")) {
      const NodeId id = topo.add_node(parse_role(n.at("role").get<std::string>()), n.at("mu").get<double>());
      if (id != n.at("id").get<int>()) throw FormatError("topology node ids must be 0..n-1 in order");
    }
    for (const json& l : j.at("links")) {
      const LinkId id = topo.add_link(l.at("a").get<int>(), l.at("b").get<int>(), l.at("rate").get<double>());
      if (id != l.at("id").get<int>()) throw FormatError("topology link ids must be 0..m-1 in order");
    }
    return topo;
  });
}

void write_tasks(std::ostream& out, const TaskFile& file) {
  json j;
  j["scenario"] = file.scenario;
  j["num_types"] = file.num_types;
  j["task_load"] = file.task_load;
  j["tasks"] = json::array();
  for (const TaskSpec& t : file.tasks) {
    json e{{"source", t.source}, {"type", t.type}, {"rate", t.rate}};
    if (t.burst) {
      e["burst"] = {{"start", t.burst->start}, {"end", t.burst->end}};
    } else {
      e["burst"] = nullptr;
    }
    j["tasks"].push_back(std::move(e));
  }
  out << j.dump(1) << '\n';
}

TaskFile read_tasks(std::istream& in) {
  const json j = parse_json(in, "tasks");
  return guarded("tasks", [&] {
    TaskFile f;
    f.scenario = j.at("scenario").get<std::string>();
    f.num_types = j.at("num_types").get<int>();
    f.task_load = j.at("task_load").get<double>();
    for (const json& e : j.at("tasks")) {
      TaskSpec t;
      t.source = e.at("source").get<int>();
      t.type = e.at("type").get<int>();
      t.rate = e.at("rate").get<double>();
      if (e.contains("burst") && !e["burst"].is_null()) {
        t.burst = BurstWindow{e["burst"].at("start").get<int>(), e["burst"].at("end").get<int>()};
      }
      f.tasks.push_back(t);
    }
    return f;
  });
}

void write_results(std::ostream& out, const RunResult& result, bool header) {
  if (header) out << kResultsHeader << '\n';
  const std::string scheme(to_string(result.scheme));
  const std::string load = format_double(result.load);
  for (const Job& j : result.jobs) {
    const bool censored = !j.completion_time.has_value();
    fmt::print(out, "{},{},{},{},{},{},{},{},{},{},{}\n", result.seed, scheme, load, j.id, j.type, j.source,
               j.arrival_slot, censored ? std::string() : format_double(*j.completion_time), j.hops,
               censored ? std::string() : std::to_string(j.processed_at), censored ? 1 : 0);
  }
}

std::vector<RunResult> read_results(std::istream& in) {
  expect_header(in, kResultsHeader);
  std::vector<RunResult> runs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 11) throw FormatError(fmt::format("results row has {} fields: '{}'", f.size(), line));
    const auto seed = parse_num<std::uint64_t>(f[0], "seed");
    const SchemeKind scheme = parse_scheme(f[1]);
    const auto load = parse_num<double>(f[2], "load");
    if (runs.empty() || runs.back().seed != seed || runs.back().scheme != scheme || runs.back().load != load) {
      RunResult r;
      r.seed = seed;
      r.scheme = scheme;
      r.load = load;
      runs.push_back(std::move(r));
    }
    RunResult& r = runs.back();
    Job j;
    j.id = parse_num<JobId>(f[3], "job_id");
    j.type = parse_num<int>(f[4], "task_type");
    j.source = parse_num<int>(f[5], "source");
    j.arrival_slot = parse_num<int>(f[6], "arrival_slot");
    j.completion_time = parse_opt(f[7], "completion_time");
    j.hops = parse_num<int>(f[8], "hops");
    if (!f[9].empty()) j.processed_at = parse_num<int>(f[9], "processed_at");
    const int censored = parse_num<int>(f[10], "censored");
    if (censored != (j.completion_time ? 0 : 1)) throw FormatError("censored flag disagrees with completion_time");
    (censored ? r.censored : r.completed) += 1;
    r.jobs.push_back(j);
  }
  return runs;
}

void write_summary(std::ostream& out, std::span<const SummaryRow> rows) {
  out << kSummaryHeader << '\n';
  for (const SummaryRow& r : rows) {
    fmt::print(out, "{},{},{},{},{},{},{},{}\n", to_string(r.scheme), format_double(r.load), to_string(r.metric),
               opt_str(r.p25), opt_str(r.median), opt_str(r.p75), r.n_jobs, r.n_censored);
  }
}

std::vector<SummaryRow> read_summary(std::istream& in) {
  expect_header(in, kSummaryHeader);
  std::vector<SummaryRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 8) throw FormatError(fmt::format("summary row has {} fields: '{}'", f.size(), line));
    SummaryRow r;
    r.scheme = parse_scheme(f[0]);
    r.load = parse_num<double>(f[1], "load");
    if (f[2] == "makespan") {
      r.metric = Metric::kMakespan;
    } else if (f[2] == "hops") {
      r.metric = Metric::kHops;
    } else {
      throw FormatError(fmt::format("unknown metric '{}'", f[2]));
    }
    r.p25 = parse_opt(f[3], "p25");
    r.median = parse_opt(f[4], "median");
    r.p75 = parse_opt(f[5], "p75");
    r.n_jobs = parse_num<long long>(f[6], "n_jobs");
    r.n_censored = parse_num<long long>(f[7], "n_censored");
    rows.push_back(r);
  }
  return rows;
}

void write_backlog(std::ostream& out, std::span<const long long> backlog) {
  out << "slot,backlog\n";
  for (std::size_t t = 0; t < backlog.size(); ++t) fmt::print(out, "{},{}\n", t, backlog[t]);
}

void write_lp(std::ostream& out, const FlowProblem& p, const FlowSolution& s) {
  json j;
  j["status"] = std::string(to_string(s.status));
  j["objective"] = s.objective;
  j["num_nodes"] = p.num_nodes;
  j["node_capacity"] = p.node_capacity;
  j["node_cost"] = p.node_cost;
  j["arcs"] = json::array();
  for (const FlowArc& a : p.arcs) {
    j["arcs"].push_back({{"tail", a.tail}, {"head", a.head}, {"link", a.link}, {"capacity", a.capacity}, {"cost", a.cost}});
  }
  j["tasks"] = json::array();
  for (std::size_t m = 0; m < p.tasks.size(); ++m) {
    json t{{"source", p.tasks[m].source}, {"rate", p.tasks[m].rate}};
    if (s.status == LpStatus::kOptimal) {
      t["makespan"] = s.makespan[m];
      t["arc_flow"] = s.arc_flow[m];
      t["node_flow"] = s.node_flow[m];
    }
    j["tasks"].push_back(std::move(t));
  }
  out << j.dump(1) << '\n';
}

}  // namespace offload
