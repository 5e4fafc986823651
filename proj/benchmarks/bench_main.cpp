// Copyright 2026 The MotePy Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <random>

#include "motepy/arena.hpp"
#include "motepy/driver.hpp"
#include "motepy/interp.hpp"

using namespace motepy;

namespace {

std::vector<AllocRequest> random_requests(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<AllocRequest> rs;
  for (int i = 0; i < n; ++i) {
    AllocRequest r;
    r.id = i;
    r.alignment = 4;
    r.size = 4 * (1 + rng() % 256);
    LiveInterval v;
    v.object = v.instance = i;
    v.start = static_cast<int>(rng() % static_cast<unsigned>(4 * n));
    v.end = v.start + static_cast<int>(rng() % 16);
    v.persistent = rng() % 16 == 0;
    r.intervals.push_back(v);
    rs.push_back(r);
  }
  return rs;
}

std::unique_ptr<Compilation> compile_corpus(const char* name) {
  std::filesystem::path pipeline = std::filesystem::path(MOTEPY_BENCH_CORPUS_DIR) / name / "pipeline.py";
  return compile_program(pipeline.string(), read_file(pipeline), directory_loader(pipeline, {}), {});
}

void BM_PlanArena(benchmark::State& state) {
  auto rs = random_requests(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(plan_arena(rs));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PlanArena)->RangeMultiplier(4)->Range(16, 4096)->Complexity();

void BM_OptimalBruteforce(benchmark::State& state) {
  auto rs = random_requests(static_cast<int>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(optimal_arena_bruteforce(rs));
}
BENCHMARK(BM_OptimalBruteforce)->DenseRange(2, 8, 2);

void BM_CompileCorpus(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(compile_corpus("model_pipeline"));
}
BENCHMARK(BM_CompileCorpus);

void BM_InterpretModelPipeline(benchmark::State& state) {
  auto c = compile_corpus("model_pipeline");
  InterpOptions o;
  o.iterations = static_cast<std::uint64_t>(state.range(0));
  o.layout = &c->layout;
  o.record_trace = false;
  for (auto _ : state) benchmark::DoNotOptimize(interpret(c->program, c->lifetimes.lin, o, default_stubs()));
}
BENCHMARK(BM_InterpretModelPipeline)->Arg(1)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
