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

#include <gtest/gtest.h>

#include <omp.h>

#include <set>

#include "csaw/algorithms.hpp"
#include "csaw/error.hpp"
#include "csaw/framework.hpp"
#include "support.hpp"

using namespace csaw;

namespace {

SamplingConfig traversal_config(std::size_t depth, std::size_t neighbors, std::size_t instances = 1) {
  SamplingConfig c;
  c.depth = depth;
  c.neighbor_size = neighbors;
  c.instances = instances;
  c.seed = 42;
  return c;
}

std::vector<std::vector<VertexId>> single_seeds(const CsrGraph& g, std::size_t instances, std::uint64_t seed) {
  return random_seeds(g, instances, 1, seed);
}

}  // namespace

TEST(Run, PathMiddleExhaustsPool) {
  auto g = fixture::path3();
  auto out = run(g, traversal_config(1, 2), {}, std::vector<std::vector<VertexId>>{{1}});
  ASSERT_EQ(out.size(), 1u);
  std::set<std::pair<VertexId, VertexId>> edges;
  for (const auto& r : out[0].records) {
    EXPECT_EQ(r.kind, EventKind::Edge);
    EXPECT_EQ(r.depth, 1u);
    edges.insert({r.source, r.target});
  }
  EXPECT_EQ(edges, (std::set<std::pair<VertexId, VertexId>>{{1, 0}, {1, 2}}));
}

TEST(Run, SingleNeighborGivesOneEdge) {
  auto g = fixture::path3();
  auto out = run(g, traversal_config(1, 1), {}, std::vector<std::vector<VertexId>>{{0}});
  ASSERT_EQ(out[0].records.size(), 1u);
  EXPECT_EQ(out[0].records[0], (SampledRecord{0, 1, 1, EventKind::Edge}));
}

TEST(Run, StopsWhenFrontierEmpties) {
  auto g = fixture::path3();
  auto out = run(g, traversal_config(10, 2), {}, std::vector<std::vector<VertexId>>{{0}});
  EXPECT_EQ(out[0].edge_count(), 2u);
}

TEST(Run, SeedValidation) {
  auto g = fixture::path3();
  auto c = traversal_config(1, 1);
  EXPECT_THROW(run(g, c, {}, std::vector<std::vector<VertexId>>{{}}), ValidationError);
  EXPECT_THROW(run(g, c, {}, std::vector<std::vector<VertexId>>{{3}}), BoundsError);
  EXPECT_THROW(run(g, c, {}, std::vector<std::vector<VertexId>>{{0}, {1}}), ValidationError);
  c.depth = 0;
  EXPECT_THROW(run(g, c, {}, std::vector<std::vector<VertexId>>{{0}}), ValidationError);
}

TEST(Config, Validate) {
  SamplingConfig c;
  EXPECT_NO_THROW(c.validate());
  c.frontier_size = 0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.instances = 0;
  EXPECT_THROW(c.validate(), ValidationError);
}

TEST(Gather, ToyNeighborhood) {
  auto g = fixture::toy_graph();
  VisitedSet none;
  const std::vector<VertexId> eight = {8};
  EXPECT_EQ(gather_neighbors(g, eight, none, true).size(), 5u);
  EXPECT_TRUE(gather_neighbors(g, {}, none, true).empty());
  VisitedSet all = {7, 9, 10, 11, 5};
  EXPECT_TRUE(gather_neighbors(g, eight, all, true).empty());
  EXPECT_EQ(gather_neighbors(g, eight, all, false).size(), 5u);
  const auto pool = gather_neighbors(g, eight, none, true);
  EXPECT_EQ(pool[1].target, 7u);
  EXPECT_EQ(pool[1].target_degree, 6u);
  EXPECT_EQ(pool[1].source_degree, 5u);
}

TEST(Commit, ReplaceSemanticsOfPoolWalk) {
  // Pool {8, 0, 3}: 8 is chosen by degree and moves to 7; 0 and 3 are carried ahead of it.
  auto g = fixture::toy_graph();
  SamplingConfig c;
  c.filter_visited = false;
  c.mode = Replacement::With;
  auto state = make_instance(c, 0, std::vector<VertexId>{8, 0, 3});

  auto vertex_ctps = Ctps::build(std::vector<double>{5, 1, 2});
  EXPECT_EQ(its_select(vertex_ctps, 0.3), 0u);  // v8
  const auto adj = g.neighbors(8);
  auto edge_ctps = Ctps::build(std::vector<double>(adj.size(), 1.0));
  const auto pick = its_select(edge_ctps, 0.3);
  ASSERT_EQ(adj.target(pick), 7u);

  std::vector<PendingRecord> level = {{{8, 7, 1, EventKind::Edge}, VertexId{7}}};
  commit_level(state, c, std::move(level), {0, 3});
  EXPECT_EQ(state.frontier_pool, (std::vector<VertexId>{0, 3, 7}));
  EXPECT_EQ(state.previous, VertexId{8});
  EXPECT_EQ(state.sampled.records.size(), 1u);
}

TEST(Commit, DuplicateTargetsKeepSmallestSource) {
  SamplingConfig c;
  auto state = make_instance(c, 0, std::vector<VertexId>{1, 2});
  std::vector<PendingRecord> level = {{{2, 5, 1, EventKind::Edge}, VertexId{5}},
                                      {{1, 5, 1, EventKind::Edge}, VertexId{5}},
                                      {{2, 6, 1, EventKind::Edge}, VertexId{6}}};
  commit_level(state, c, std::move(level), {});
  ASSERT_EQ(state.sampled.records.size(), 2u);
  EXPECT_EQ(state.sampled.records[0], (SampledRecord{1, 5, 1, EventKind::Edge}));
  EXPECT_EQ(state.sampled.records[1], (SampledRecord{2, 6, 1, EventKind::Edge}));
  EXPECT_EQ(state.frontier_pool, (std::vector<VertexId>{5, 6}));
  EXPECT_FALSE(state.previous.has_value());
}

TEST(Commit, UpdateWithoutNextEmitsEdgeOnly) {
  auto g = fixture::path3();
  BiasSpec spec;
  spec.update = [](const CsrGraph&, const EdgeContext&, const InstanceView&,
                   UniformSource&) -> std::optional<Transition> { return std::nullopt; };
  auto out = run(g, traversal_config(5, 1), spec, std::vector<std::vector<VertexId>>{{0}});
  ASSERT_EQ(out[0].records.size(), 1u);
  EXPECT_EQ(out[0].records[0].kind, EventKind::Edge);
}

TEST(Slots, DomainsDoNotCollide) {
  std::set<std::uint64_t> s;
  for (auto d : {SlotDomain::Seed, SlotDomain::Neighbor, SlotDomain::Update, SlotDomain::Frontier})
    for (VertexId v : {0u, 1u, 0xFFFFFFFFu})
      for (std::uint32_t copy : {0u, 1u, 7u}) EXPECT_TRUE(s.insert(stream_slot(d, v, copy)).second);
}

TEST(FrontierEntries, CopiesNumberedPerVertex) {
  SamplingConfig c;
  c.filter_visited = false;
  auto state = make_instance(c, 4, std::vector<VertexId>{3, 5, 3});
  const auto e = frontier_entries(state, 2);
  ASSERT_EQ(e.size(), 3u);
  EXPECT_EQ(e[0], (FrontierEntry{3, 4, 2, 0}));
  EXPECT_EQ(e[1], (FrontierEntry{5, 4, 2, 0}));
  EXPECT_EQ(e[2], (FrontierEntry{3, 4, 2, 1}));
}

TEST(Invariants, TraversalAlgorithms) {
  auto g = fixture::random_graph(300, 900, 21);
  for (const std::string name : {"neighbor-unbiased", "neighbor-biased", "forest-fire", "snowball", "layer"}) {
    auto algo = make_algorithm(name);
    auto config = algo.configure(traversal_config(3, 2, 50));
    const auto seeds = single_seeds(g, 50, 1);
    auto out = run(g, config, algo.spec, seeds);
    for (std::size_t i = 0; i < out.size(); ++i) {
      std::set<VertexId> targets;
      for (const auto& r : out[i].records) {
        ASSERT_EQ(r.kind, EventKind::Edge) << name;
        EXPECT_TRUE(g.has_edge(r.source, r.target)) << name;
        EXPECT_GE(r.depth, 1u);
        EXPECT_LE(r.depth, config.depth);
        EXPECT_TRUE(targets.insert(r.target).second) << name << " revisits " << r.target;
        EXPECT_NE(r.target, seeds[i][0]) << name;
      }
    }
  }
}

TEST(Invariants, WalksFormPaths) {
  auto g = fixture::random_graph(200, 500, 8);
  for (const std::string name : {"simple-rw", "biased-rw", "mh-rw", "rw-jump", "rw-restart", "node2vec"}) {
    auto algo = make_algorithm(name);
    auto config = algo.configure(traversal_config(40, 1, 20));
    const auto seeds = single_seeds(g, 20, 3);
    auto out = run(g, config, algo.spec, seeds);
    for (std::size_t i = 0; i < out.size(); ++i) {
      VertexId at = seeds[i][0];
      std::uint32_t expected_depth = 1;
      EXPECT_EQ(out[i].records.size(), 40u) << name;
      for (const auto& r : out[i].records) {
        EXPECT_EQ(r.source, at) << name;
        EXPECT_EQ(r.depth, expected_depth++) << name;
        if (r.kind == EventKind::Edge) EXPECT_TRUE(g.has_edge(r.source, r.target)) << name;
        if (r.kind == EventKind::Stay) EXPECT_EQ(r.target, r.source);
        at = r.target;
      }
    }
  }
}

TEST(Determinism, ParallelMatchesSerialAcrossThreadCounts) {
  auto g = fixture::random_graph(500, 2000, 2);
  auto algo = make_algorithm("forest-fire");
  auto config = algo.configure(traversal_config(3, 2, 64));
  const auto seeds = single_seeds(g, 64, 9);
  const auto reference = run_serial(g, config, algo.spec, seeds);
  for (int threads : {1, 3, 8}) {
    omp_set_num_threads(threads);
    EXPECT_EQ(run(g, config, algo.spec, seeds), reference);
  }
}

TEST(Determinism, InstanceOffsetsSliceTheSameRun) {
  auto g = fixture::random_graph(100, 300, 2);
  auto algo = make_algorithm("simple-rw");
  auto config = algo.configure(traversal_config(20, 1, 10));
  const auto seeds = single_seeds(g, 10, 9);
  const auto all = run(g, config, algo.spec, seeds);
  const auto tail = run(g, config, algo.spec, std::span(seeds).subspan(6), 6);
  for (std::size_t i = 0; i < tail.size(); ++i) EXPECT_EQ(tail[i], all[6 + i]);
}

TEST(Determinism, DifferentMasterSeedsDiffer) {
  auto g = fixture::random_graph(100, 300, 2);
  auto algo = make_algorithm("simple-rw");
  auto c1 = algo.configure(traversal_config(20, 1, 4));
  auto c2 = c1;
  c2.seed = 43;
  const auto seeds = single_seeds(g, 4, 9);
  EXPECT_NE(run(g, c1, algo.spec, seeds), run(g, c2, algo.spec, seeds));
}

TEST(Seeds, DefaultSeedsAvoidIsolatedVertices) {
  std::vector<CsrGraph::Edge> edges = {{0, 1}, {1, 0}};
  auto g = CsrGraph::from_edges(5, edges, false);
  const auto s = random_seeds(g, 100, 1, 7);
  for (const auto& v : s) {
    ASSERT_EQ(v.size(), 1u);
    EXPECT_LT(v[0], 2u);
  }
  EXPECT_EQ(random_seeds(g, 3, 5, 7)[0].size(), 2u);
  EXPECT_EQ(random_seeds(g, 3, 1, 7), random_seeds(g, 3, 1, 7));
  auto empty = CsrGraph::from_edges(3, std::vector<CsrGraph::Edge>{}, false);
  EXPECT_THROW(random_seeds(empty, 1, 1, 0), ValidationError);
}
