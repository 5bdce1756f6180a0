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

#include "csaw/framework.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <numeric>
#include <string>
#include <unordered_map>

#include "csaw/error.hpp"

namespace csaw {

std::size_t SampleOutput::edge_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const SampledRecord& r) { return r.kind == EventKind::Edge; }));
}

void SamplingConfig::validate() const {
  if (frontier_size < 1) throw ValidationError("frontier_size must be >= 1");
  if (depth < 1) throw ValidationError("depth must be >= 1");
  if (instances < 1) throw ValidationError("instances must be >= 1");
}

std::uint64_t stream_slot(SlotDomain domain, VertexId vertex, std::uint32_t copy) noexcept {
  return (static_cast<std::uint64_t>(domain) << 61) | (static_cast<std::uint64_t>(copy & 0x1FFFFFFFu) << 32) | vertex;
}

namespace {

constexpr auto kQuotaDomain = static_cast<SlotDomain>(4);
constexpr auto kLayerDomain = static_cast<SlotDomain>(5);

CounterStream stream_for(const SamplingConfig& config, InstanceId id, std::uint32_t depth, SlotDomain domain,
                         VertexId vertex, std::uint32_t copy) {
  return instance_rng(config.seed, id, depth, stream_slot(domain, vertex, copy));
}

EdgeContext make_context(const CsrGraph& g, VertexId source, std::size_t source_degree, const NeighborSpan& adj,
                         std::size_t i, const InstanceState& state, std::uint32_t depth) {
  EdgeContext ctx;
  ctx.source = source;
  ctx.target = adj.target(i);
  ctx.weight = adj.weight(i);
  ctx.edge = adj.edge_index(i);
  ctx.source_degree = source_degree;
  ctx.target_degree = g.degree(ctx.target);
  ctx.previous = state.previous;
  ctx.instance = state.id;
  ctx.depth = depth;
  return ctx;
}

double edge_bias_of(const CsrGraph& g, const BiasSpec& spec, const EdgeContext& ctx) {
  return spec.edge_bias ? spec.edge_bias(g, ctx) : 1.0;
}

// Number of picks for a pool of `pool` candidates of which `selectable` have positive bias.
std::size_t clamp_quota(std::size_t quota, std::size_t pool, std::size_t selectable, Replacement mode) {
  if (mode == Replacement::With) return selectable == 0 ? 0 : quota;
  const std::size_t k = std::min(quota, pool);
  return k == pool ? k : std::min(k, selectable);
}

PendingRecord apply_update(const CsrGraph& g, const BiasSpec& spec, const EdgeContext& ctx, const InstanceState& state,
                           UniformSource& update_stream) {
  const auto record_depth = ctx.depth + 1;
  if (!spec.update) return {{ctx.source, ctx.target, record_depth, EventKind::Edge}, ctx.target};
  const auto t = spec.update(g, ctx, state.view(), update_stream);
  if (!t) return {{ctx.source, ctx.target, record_depth, EventKind::Edge}, std::nullopt};
  switch (t->kind) {
    case EventKind::Stay:
      return {{ctx.source, ctx.source, record_depth, EventKind::Stay}, t->next};
    case EventKind::Teleport:
      return {{ctx.source, t->next, record_depth, EventKind::Teleport}, t->next};
    case EventKind::Edge:
      break;
  }
  return {{ctx.source, ctx.target, record_depth, EventKind::Edge}, t->next};
}

Expansion pick(const CsrGraph& g, const SamplingConfig& config, const BiasSpec& spec, const InstanceState& state,
               const Ctps& ctps, std::size_t quota, UniformSource& select_stream, UniformSource& update_stream,
               const std::function<EdgeContext(std::size_t)>& context_of) {
  Expansion out;
  const std::size_t k = clamp_quota(quota, ctps.size(), ctps.selectable(), config.mode);
  const auto picked = select(ctps, k, select_stream, config.mode);
  out.retries = picked.retries;
  out.records.reserve(picked.chosen.size());
  for (auto idx : picked.chosen) out.records.push_back(apply_update(g, spec, context_of(idx), state, update_stream));
  return out;
}

// Biases of a pool; false when nothing is selectable (Ctps::build still rejects bad values).
bool pool_biases(const CsrGraph& g, const BiasSpec& spec, std::size_t n,
                 const std::function<EdgeContext(std::size_t)>& context_of, std::vector<double>& biases) {
  biases.resize(n);
  double total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    biases[i] = edge_bias_of(g, spec, context_of(i));
    total += biases[i];
  }
  return total > 0;
}

Expansion select_from_pool(const CsrGraph& g, const SamplingConfig& config, const BiasSpec& spec,
                           const InstanceState& state, const std::vector<EdgeContext>& pool, std::size_t quota,
                           UniformSource& select_stream, UniformSource& update_stream) {
  if (pool.empty()) return {};
  auto context_of = [&](std::size_t i) { return pool[i]; };
  std::vector<double> biases;
  if (!pool_biases(g, spec, pool.size(), context_of, biases)) return {};
  const auto ctps = Ctps::build(biases);
  return pick(g, config, spec, state, ctps, quota, select_stream, update_stream, context_of);
}

}  // namespace

InstanceState make_instance(const SamplingConfig& config, InstanceId id, std::span<const VertexId> seeds) {
  InstanceState s;
  s.id = id;
  s.seeds.assign(seeds.begin(), seeds.end());
  s.frontier_pool = s.seeds;
  if (config.filter_visited) s.visited.insert(seeds.begin(), seeds.end());
  return s;
}

std::vector<EdgeContext> gather_neighbors(const CsrGraph& g, std::span<const VertexId> frontier,
                                          const VisitedSet& visited, bool filter) {
  InstanceState probe;
  std::vector<EdgeContext> pool;
  for (auto v : frontier) {
    const auto adj = g.neighbors(v);
    for (std::size_t i = 0; i < adj.size(); ++i) {
      if (filter && visited.contains(adj.target(i))) continue;
      pool.push_back(make_context(g, v, adj.size(), adj, i, probe, 0));
    }
  }
  return pool;
}

struct CtpsCache::Slot {
  std::once_flag once;
  std::unique_ptr<Ctps> ctps;
};

CtpsCache::CtpsCache(std::size_t vertex_count) : slots_(std::make_unique<Slot[]>(vertex_count)) {}
CtpsCache::~CtpsCache() = default;

bool CtpsCache::applies(const SamplingConfig& config, const BiasSpec& spec) {
  return !config.filter_visited && config.scope == PoolScope::PerVertex && (spec.static_edge_bias || !spec.edge_bias);
}

const Ctps& CtpsCache::get(const CsrGraph& g, const BiasSpec& spec, const NeighborSpan& adjacency, VertexId v) {
  auto& slot = slots_[v];
  std::call_once(slot.once, [&] {
    auto ctps = std::make_unique<Ctps>();
    const InstanceState blank;
    std::vector<double> biases;
    auto context_of = [&](std::size_t i) { return make_context(g, v, adjacency.size(), adjacency, i, blank, 0); };
    if (!adjacency.empty() && pool_biases(g, spec, adjacency.size(), context_of, biases)) *ctps = Ctps::build(biases);
    slot.ctps = std::move(ctps);
  });
  return *slot.ctps;
}

Expansion expand_vertex(const CsrGraph& g, const NeighborSpan& adjacency, const SamplingConfig& config,
                        const BiasSpec& spec, const InstanceState& state, const FrontierEntry& entry,
                        CtpsCache* cache) {
  const bool cached = cache != nullptr && CtpsCache::applies(config, spec);
  std::vector<EdgeContext> pool;
  std::size_t pool_size = adjacency.size();
  if (!cached) {
    pool.reserve(adjacency.size());
    for (std::size_t i = 0; i < adjacency.size(); ++i) {
      if (config.filter_visited && state.visited.contains(adjacency.target(i))) continue;
      pool.push_back(make_context(g, entry.vertex, adjacency.size(), adjacency, i, state, entry.depth));
    }
    pool_size = pool.size();
  }
  if (pool_size == 0) return {};

  std::size_t quota = config.neighbor_size;
  if (config.neighbor_rule) {
    auto quota_stream = stream_for(config, state.id, entry.depth, kQuotaDomain, entry.vertex, entry.copy);
    quota = config.neighbor_rule(g, entry.vertex, pool_size, quota_stream);
  }
  auto select_stream = stream_for(config, state.id, entry.depth, SlotDomain::Neighbor, entry.vertex, entry.copy);
  auto update_stream = stream_for(config, state.id, entry.depth, SlotDomain::Update, entry.vertex, entry.copy);
  if (!cached) return select_from_pool(g, config, spec, state, pool, quota, select_stream, update_stream);

  const auto& ctps = cache->get(g, spec, adjacency, entry.vertex);
  if (ctps.size() == 0) return {};
  return pick(g, config, spec, state, ctps, quota, select_stream, update_stream, [&](std::size_t i) {
    return make_context(g, entry.vertex, adjacency.size(), adjacency, i, state, entry.depth);
  });
}

namespace {

Expansion expand_layer(const CsrGraph& g, const SamplingConfig& config, const BiasSpec& spec,
                       const InstanceState& state, std::span<const VertexId> frontier, std::uint32_t depth) {
  auto pool = gather_neighbors(g, frontier, state.visited, config.filter_visited);
  for (auto& ctx : pool) {
    ctx.previous = state.previous;
    ctx.instance = state.id;
    ctx.depth = depth;
  }
  auto select_stream = stream_for(config, state.id, depth, kLayerDomain, 0, 0);
  auto update_stream = stream_for(config, state.id, depth, kLayerDomain, 1, 0);
  return select_from_pool(g, config, spec, state, pool, config.neighbor_size, select_stream, update_stream);
}

bool record_less(const PendingRecord& a, const PendingRecord& b) {
  if (a.record != b.record) return a.record < b.record;
  return a.next < b.next;
}

}  // namespace

void commit_level(InstanceState& state, const SamplingConfig& config, std::vector<PendingRecord> level,
                  std::vector<VertexId> carried) {
  if (config.filter_visited) {
    // Among Edge records reaching the same target, the smallest source wins.
    std::sort(level.begin(), level.end(), [](const PendingRecord& a, const PendingRecord& b) {
      const bool ea = a.record.kind == EventKind::Edge;
      const bool eb = b.record.kind == EventKind::Edge;
      if (ea != eb) return ea;
      if (a.record.target != b.record.target) return a.record.target < b.record.target;
      return record_less(a, b);
    });
    auto first_other = std::find_if(level.begin(), level.end(),
                                    [](const PendingRecord& p) { return p.record.kind != EventKind::Edge; });
    auto last_edge = std::unique(level.begin(), first_other, [](const PendingRecord& a, const PendingRecord& b) {
      return a.record.target == b.record.target;
    });
    level.erase(last_edge, first_other);
  }
  std::sort(level.begin(), level.end(), record_less);

  std::vector<VertexId> pool = std::move(carried);
  for (const auto& p : level) {
    state.sampled.records.push_back(p.record);
    if (!p.next) continue;
    if (config.filter_visited && !state.visited.insert(*p.next).second) continue;
    pool.push_back(*p.next);
  }
  if (level.size() == 1) {
    const auto& r = level.front().record;
    if (r.kind == EventKind::Edge) state.previous = r.source;
    else if (r.kind == EventKind::Teleport) state.previous.reset();
  } else {
    state.previous.reset();
  }
  state.frontier_pool = std::move(pool);
}

namespace {

std::vector<FrontierEntry> entries_of(std::span<const VertexId> vertices, InstanceId id, std::uint32_t depth) {
  std::vector<FrontierEntry> entries;
  entries.reserve(vertices.size());
  std::unordered_map<VertexId, std::uint32_t> seen;
  for (auto v : vertices) entries.push_back({v, id, depth, seen[v]++});
  return entries;
}

}  // namespace

std::vector<FrontierEntry> frontier_entries(const InstanceState& state, std::uint32_t depth) {
  return entries_of(state.frontier_pool, state.id, depth);
}

SampleOutput run_instance(const CsrGraph& g, const SamplingConfig& config, const BiasSpec& spec, InstanceId id,
                          std::span<const VertexId> seeds, CtpsCache* cache) {
  auto state = make_instance(config, id, seeds);
  for (std::uint32_t depth = 0; depth < config.depth; ++depth) {
    if (state.frontier_pool.empty()) break;

    std::vector<VertexId> chosen = state.frontier_pool;
    std::vector<VertexId> carried;
    const auto& pool = state.frontier_pool;
    if (config.frontier_select > 0 && config.frontier_select < pool.size()) {
      std::vector<double> biases(pool.size());
      double total = 0;
      for (std::size_t i = 0; i < pool.size(); ++i) {
        biases[i] = spec.vertex_bias ? spec.vertex_bias(g, pool[i]) : 1.0;
        total += biases[i];
      }
      if (!(total > 0)) break;
      const auto ctps = Ctps::build(biases);
      auto frontier_stream = stream_for(config, id, depth, SlotDomain::Frontier, 0, 0);
      const auto k = std::min(config.frontier_select, ctps.selectable());
      const auto picked = select(ctps, k, frontier_stream, Replacement::Without);
      state.sampled.retries += picked.retries;
      std::vector<char> is_chosen(pool.size(), 0);
      chosen.clear();
      for (auto idx : picked.chosen) {
        is_chosen[idx] = 1;
        chosen.push_back(pool[idx]);
      }
      for (std::size_t i = 0; i < pool.size(); ++i)
        if (!is_chosen[i]) carried.push_back(pool[i]);
    }

    std::vector<PendingRecord> level;
    if (config.scope == PoolScope::PerLayer) {
      auto e = expand_layer(g, config, spec, state, chosen, depth);
      state.sampled.retries += e.retries;
      level = std::move(e.records);
    } else {
      for (const auto& entry : entries_of(chosen, id, depth)) {
        auto e = expand_vertex(g, g.neighbors(entry.vertex), config, spec, state, entry, cache);
        state.sampled.retries += e.retries;
        level.insert(level.end(), std::make_move_iterator(e.records.begin()), std::make_move_iterator(e.records.end()));
      }
    }
    commit_level(state, config, std::move(level), std::move(carried));
  }
  return std::move(state.sampled);
}

void validate_seeds(const CsrGraph& g, const SamplingConfig& config, std::span<const std::vector<VertexId>> seeds,
                    InstanceId first_instance) {
  config.validate();
  if (static_cast<std::size_t>(first_instance) + seeds.size() > config.instances)
    throw ValidationError("instance range exceeds config.instances");
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (seeds[i].empty()) throw ValidationError("instance " + std::to_string(first_instance + i) + " has no seeds");
    for (auto v : seeds[i])
      if (v >= g.vertex_count()) throw BoundsError("seed vertex " + std::to_string(v) + " out of range");
  }
}

std::vector<SampleOutput> run_serial(const CsrGraph& g, const SamplingConfig& config, const BiasSpec& spec,
                                     std::span<const std::vector<VertexId>> seeds, InstanceId first_instance) {
  validate_seeds(g, config, seeds, first_instance);
  std::vector<SampleOutput> out;
  out.reserve(seeds.size());
  for (std::size_t i = 0; i < seeds.size(); ++i)
    out.push_back(run_instance(g, config, spec, static_cast<InstanceId>(first_instance + i), seeds[i]));
  return out;
}

std::vector<SampleOutput> run(const CsrGraph& g, const SamplingConfig& config, const BiasSpec& spec,
                              std::span<const std::vector<VertexId>> seeds, InstanceId first_instance) {
  validate_seeds(g, config, seeds, first_instance);
  std::vector<SampleOutput> out(seeds.size());
  std::unique_ptr<CtpsCache> cache;
  if (CtpsCache::applies(config, spec)) cache = std::make_unique<CtpsCache>(g.vertex_count());
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto count = static_cast<std::int64_t>(seeds.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      out[i] = run_instance(g, config, spec, static_cast<InstanceId>(first_instance + i), seeds[i], cache.get());
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<std::vector<VertexId>> random_seeds(const CsrGraph& g, std::size_t instances, std::size_t per_instance,
                                                std::uint64_t master_seed) {
  std::vector<VertexId> eligible;
  for (VertexId v = 0; v < g.vertex_count(); ++v)
    if (g.degree(v) > 0) eligible.push_back(v);
  if (eligible.empty()) throw ValidationError("graph has no vertex with an out-edge to seed from");
  const std::size_t k = std::min(per_instance, eligible.size());
  std::vector<std::vector<VertexId>> seeds(instances);
  for (std::size_t i = 0; i < instances; ++i) {
    auto rng = instance_rng(master_seed, static_cast<std::uint32_t>(i), 0, stream_slot(SlotDomain::Seed, 0, 0));
    auto& s = seeds[i];
    while (s.size() < k) {
      const auto v = eligible[rng.next_below(eligible.size())];
      if (std::find(s.begin(), s.end(), v) == s.end()) s.push_back(v);
    }
  }
  return seeds;
}

}  // namespace csaw
