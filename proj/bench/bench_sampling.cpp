/*
 * Copyright (c) 2026, the csaw contributors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Throughput of the serial reference, the OpenMP kernel and the out-of-memory engine.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "csaw/algorithms.hpp"
#include "csaw/framework.hpp"
#include "csaw/graph.hpp"
#include "csaw/ooc.hpp"

namespace {

const csaw::CsrGraph& bench_graph() {
  static const csaw::CsrGraph g = [] {
    const std::size_t n = 50000;
    std::mt19937_64 gen(42);
    std::uniform_int_distribution<csaw::VertexId> pick(0, n - 1);
    std::vector<csaw::CsrGraph::Edge> e;
    for (csaw::VertexId v = 0; v < n; ++v) {
      const auto u = static_cast<csaw::VertexId>((v + 1) % n);
      e.push_back({v, u});
      e.push_back({u, v});
    }
    for (int i = 0; i < 200000; ++i) {
      const auto a = pick(gen), b = pick(gen);
      if (a == b) continue;
      e.push_back({a, b});
      e.push_back({b, a});
    }
    return csaw::CsrGraph::from_edges(n, e, false);
  }();
  return g;
}

csaw::SamplingConfig config_for(const csaw::AlgorithmDescriptor& a, std::size_t instances) {
  csaw::SamplingConfig c;
  c.instances = instances;
  c.depth = a.family == csaw::AlgorithmFamily::RandomWalk ? 100 : 2;
  c.neighbor_size = 2;
  c.seed = 7;
  return a.configure(c);
}

void in_memory(benchmark::State& state, const char* name, bool parallel) {
  const auto& g = bench_graph();
  const auto algo = csaw::make_algorithm(name);
  const auto config = config_for(algo, 2000);
  const auto seeds = csaw::random_seeds(g, 2000, 1, 7);
  std::size_t edges = 0;
  for (auto _ : state) {
    const auto out = parallel ? csaw::run(g, config, algo.spec, seeds) : csaw::run_serial(g, config, algo.spec, seeds);
    for (const auto& o : out) edges += o.edge_count();
    benchmark::DoNotOptimize(out.data());
  }
  state.counters["SEPS"] = benchmark::Counter(static_cast<double>(edges), benchmark::Counter::kIsRate);
}

void BM_Serial(benchmark::State& state, const char* name) { in_memory(state, name, false); }
void BM_OpenMP(benchmark::State& state, const char* name) { in_memory(state, name, true); }

void BM_OutOfMemory(benchmark::State& state, const char* name) {
  const auto& g = bench_graph();
  const auto algo = csaw::make_algorithm(name);
  const auto config = config_for(algo, 2000);
  const auto seeds = csaw::random_seeds(g, 2000, 1, 7);
  const auto parts = csaw::partition(g, 4);
  csaw::OocOptions options;
  options.budget = static_cast<std::size_t>(state.range(0));
  std::size_t edges = 0, transfers = 0;
  for (auto _ : state) {
    const auto r = csaw::run_out_of_memory(g, parts, config, algo.spec, seeds, options);
    for (const auto& o : r.outputs) edges += o.edge_count();
    transfers = r.residency.transfer_count;
  }
  state.counters["SEPS"] = benchmark::Counter(static_cast<double>(edges), benchmark::Counter::kIsRate);
  state.counters["transfers"] = static_cast<double>(transfers);
}

}  // namespace

BENCHMARK_CAPTURE(BM_Serial, serial_biased_rw, "biased-rw")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_OpenMP, omp_biased_rw, "biased-rw")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Serial, serial_neighbor_biased, "neighbor-biased")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_OpenMP, omp_neighbor_biased, "neighbor-biased")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_OutOfMemory, biased_rw, "biased-rw")->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
