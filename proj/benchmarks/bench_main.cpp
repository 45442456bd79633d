#include <benchmark/benchmark.h>

#include "offload/experiment.hpp"

namespace {

using namespace offload;

ExperimentSpec bench_spec(int nodes) {
  ExperimentSpec s;
  s.topology.total_nodes = nodes;
  return s;
}

void BM_BiasTable(benchmark::State& state) {
  const Instance inst = make_instance(bench_spec(static_cast<int>(state.range(0))), 0, 0);
  const ExtendedGraph eg = build_extended_graph(inst.topology, inst.mu, inst.num_types);
  for (auto _ : state) benchmark::DoNotOptimize(compute_bias_table(eg));
}
BENCHMARK(BM_BiasTable)->Arg(50)->Arg(100)->Arg(200);

void BM_Lgs(benchmark::State& state) {
  const Instance inst = make_instance(bench_spec(static_cast<int>(state.range(0))), 0, 0);
  const ConflictGraph cg = build_conflict_graph(inst.topology);
  Rng rng(7);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  std::vector<double> util(inst.topology.num_links());
  for (double& x : util) x = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(lgs_schedule(cg, util));
}
BENCHMARK(BM_Lgs)->Arg(100)->Arg(200);

void BM_EngineSlots(benchmark::State& state) {
  const Instance inst = make_instance(bench_spec(100), 0, 0);
  const auto scheme = static_cast<SchemeKind>(state.range(0));
  for (auto _ : state) {
    SimConfig cfg;
    cfg.horizon = 100;
    cfg.scheme = scheme;
    cfg.load = 1.0;
    benchmark::DoNotOptimize(run(inst, cfg));
  }
  state.SetItemsProcessed(state.iterations() * 100);
  state.SetLabel(std::string(to_string(scheme)));
}
BENCHMARK(BM_EngineSlots)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

void BM_SolveLp(benchmark::State& state) {
  ExperimentSpec s = bench_spec(static_cast<int>(state.range(0)));
  s.scenario = Scenario::kSingleType;
  const Instance inst = make_instance(s, 0, 0);
  const ConflictGraph cg = build_conflict_graph(inst.topology);
  std::vector<TaskSpec> tasks = inst.tasks;
  for (auto& t : tasks) t.rate *= 0.5;
  const FlowProblem p = build_lp(inst.topology, tasks, inst.mu, cg);
  for (auto _ : state) benchmark::DoNotOptimize(solve_lp(p));
}
BENCHMARK(BM_SolveLp)->Arg(50)->Arg(100)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
