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

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <unordered_set>
#include <vector>

#include "csaw/graph.hpp"
#include "csaw/random.hpp"
#include "csaw/select.hpp"

namespace csaw {

using InstanceId = std::uint32_t;

enum class EventKind : std::uint8_t {
  Edge,      // a sampled graph edge (source, target)
  Stay,      // rejected move; the walker stays at source (target == source)
  Teleport,  // jump/restart from source to target; not a graph edge
};

/// One entry of a sampled output. Only Edge records are graph edges.
struct SampledRecord {
  VertexId source = 0;
  VertexId target = 0;
  std::uint32_t depth = 0;
  EventKind kind = EventKind::Edge;

  friend bool operator==(const SampledRecord&, const SampledRecord&) = default;
  friend auto operator<=>(const SampledRecord&, const SampledRecord&) = default;
};

struct SampleOutput {
  std::vector<SampledRecord> records;
  std::size_t retries = 0;

  std::size_t edge_count() const noexcept;
  std::size_t event_count() const noexcept { return records.size() - edge_count(); }

  friend bool operator==(const SampleOutput&, const SampleOutput&) = default;
};

/// Everything a bias or update callback may know about one candidate edge e = (source, target).
struct EdgeContext {
  VertexId source = 0;
  VertexId target = 0;
  double weight = 1.0;
  EdgeIndex edge = 0;
  std::size_t source_degree = 0;
  std::size_t target_degree = 0;
  std::optional<VertexId> previous;  // vertex the instance visited before `source`, if any
  InstanceId instance = 0;
  std::uint32_t depth = 0;
};

using VisitedSet = std::unordered_set<VertexId>;

/// Read-only view of the owning instance handed to callbacks.
struct InstanceView {
  InstanceId id = 0;
  std::span<const VertexId> seeds;
  std::optional<VertexId> previous;
  const VisitedSet* visited = nullptr;
};

/// What Update decided for one selected neighbor.
struct Transition {
  VertexId next = 0;
  EventKind kind = EventKind::Edge;
};

/// The three user callbacks. Empty callbacks mean: unit vertex bias, unit edge bias, and an
/// update that follows the sampled edge.
struct BiasSpec {
  std::function<double(const CsrGraph&, VertexId)> vertex_bias;
  std::function<double(const CsrGraph&, const EdgeContext&)> edge_bias;
  std::function<std::optional<Transition>(const CsrGraph&, const EdgeContext&, const InstanceView&, UniformSource&)>
      update;
  /// Set when edge_bias reads only graph fields of the context (source, target, weight, edge,
  /// degrees), never previous/instance/depth. The engine may then reuse a vertex's CTPS.
  bool static_edge_bias = false;
};

enum class PoolScope {
  PerVertex,  // every frontier vertex selects from its own neighbors
  PerLayer,   // the whole frontier shares one neighbor pool
};

/// Per-vertex neighbor quota; receives the filtered pool size.
using NeighborRule = std::function<std::size_t(const CsrGraph&, VertexId, std::size_t pool_size, UniformSource&)>;

struct SamplingConfig {
  std::size_t frontier_size = 1;    // FrontierSize: seeds per instance for pool-driven algorithms
  std::size_t frontier_select = 0;  // frontier picks per iteration; 0 passes the pool through
  std::size_t neighbor_size = 1;    // NeighborSize
  NeighborRule neighbor_rule;       // overrides neighbor_size when set
  std::size_t depth = 1;
  std::size_t instances = 1;
  Replacement mode = Replacement::Without;
  PoolScope scope = PoolScope::PerVertex;
  bool filter_visited = true;
  std::uint64_t seed = 0;

  /// Throws ValidationError.
  void validate() const;
};

/// Unit of work of the batched queues: (VertexID, InstanceID, CurrDepth). `copy` tells apart
/// repeated occurrences of one vertex in an instance's frontier.
struct FrontierEntry {
  VertexId vertex = 0;
  InstanceId instance = 0;
  std::uint32_t depth = 0;
  std::uint32_t copy = 0;

  friend bool operator==(const FrontierEntry&, const FrontierEntry&) = default;
};

/// One selected neighbor waiting for its level to commit.
struct PendingRecord {
  SampledRecord record;
  std::optional<VertexId> next;
};

struct InstanceState {
  InstanceId id = 0;
  std::vector<VertexId> seeds;
  std::vector<VertexId> frontier_pool;
  VisitedSet visited;
  std::optional<VertexId> previous;
  SampleOutput sampled;

  InstanceView view() const { return {id, seeds, previous, &visited}; }
};

/// Random stream slots. Slot values never collide across domains.
enum class SlotDomain : std::uint64_t { Seed = 0, Neighbor = 1, Update = 2, Frontier = 3 };
std::uint64_t stream_slot(SlotDomain domain, VertexId vertex, std::uint32_t copy) noexcept;

InstanceState make_instance(const SamplingConfig& config, InstanceId id, std::span<const VertexId> seeds);

/// Candidate contexts of the given frontier, dropping targets in `visited` when `filter` is set.
std::vector<EdgeContext> gather_neighbors(const CsrGraph& g, std::span<const VertexId> frontier,
                                          const VisitedSet& visited, bool filter);

/// Per-vertex CTPS memo for static edge biases over unfiltered pools. Entries are built on first
/// use and never change; concurrent callers are safe.
class CtpsCache {
 public:
  explicit CtpsCache(std::size_t vertex_count);
  ~CtpsCache();
  CtpsCache(const CtpsCache&) = delete;
  CtpsCache& operator=(const CtpsCache&) = delete;

  /// Whether runs of `spec` under `config` may use a cache at all.
  static bool applies(const SamplingConfig& config, const BiasSpec& spec);

  /// The CTPS of v's full neighbor run; empty when no neighbor has positive bias.
  const Ctps& get(const CsrGraph& g, const BiasSpec& spec, const NeighborSpan& adjacency, VertexId v);

 private:
  struct Slot;
  std::unique_ptr<Slot[]> slots_;
};

struct Expansion {
  std::vector<PendingRecord> records;
  std::size_t retries = 0;
};

/// Expands one frontier vertex at `depth` against the instance's level snapshot. `adjacency` is
/// the neighbor run of `entry.vertex` (from the full graph or a resident partition slice).
Expansion expand_vertex(const CsrGraph& g, const NeighborSpan& adjacency, const SamplingConfig& config,
                        const BiasSpec& spec, const InstanceState& state, const FrontierEntry& entry,
                        CtpsCache* cache = nullptr);

/// Applies one finished level: canonical ordering, duplicate-target resolution (smallest source
/// wins) when visited filtering is on, visited/frontier update. `carried` are pool members not
/// chosen this iteration; they stay ahead of the new additions.
void commit_level(InstanceState& state, const SamplingConfig& config, std::vector<PendingRecord> level,
                  std::vector<VertexId> carried);

/// Frontier entries of the instance's current pool at `depth`, copies numbered in pool order.
std::vector<FrontierEntry> frontier_entries(const InstanceState& state, std::uint32_t depth);

/// Runs one instance to completion in memory.
SampleOutput run_instance(const CsrGraph& g, const SamplingConfig& config, const BiasSpec& spec, InstanceId id,
                          std::span<const VertexId> seeds, CtpsCache* cache = nullptr);

/// Runs instances [first_instance, first_instance + seeds.size()), OpenMP-parallel over instances.
std::vector<SampleOutput> run(const CsrGraph& g, const SamplingConfig& config, const BiasSpec& spec,
                              std::span<const std::vector<VertexId>> seeds, InstanceId first_instance = 0);

/// Sequential reference of `run`; identical output. Rebuilds every CTPS, no cache.
std::vector<SampleOutput> run_serial(const CsrGraph& g, const SamplingConfig& config, const BiasSpec& spec,
                                     std::span<const std::vector<VertexId>> seeds, InstanceId first_instance = 0);

/// Throws ValidationError/BoundsError for empty or out-of-range seed sets.
void validate_seeds(const CsrGraph& g, const SamplingConfig& config, std::span<const std::vector<VertexId>> seeds,
                    InstanceId first_instance);

}  // namespace csaw

namespace csaw {

/// Default seeding: instance i draws `per_instance` distinct vertices (fewer when the graph has
/// fewer) uniformly among vertices of degree >= 1, from the instance's Seed stream.
/// Throws ValidationError when no vertex has an out-edge.
std::vector<std::vector<VertexId>> random_seeds(const CsrGraph& g, std::size_t instances, std::size_t per_instance,
                                                std::uint64_t master_seed);

}  // namespace csaw
