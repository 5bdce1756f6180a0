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

#include "csaw/ooc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <numeric>
#include <string>

#include <omp.h>

#include "csaw/error.hpp"

namespace csaw {

PartitionFrontierQueue::PartitionFrontierQueue(PartitionFrontierQueue&& other) noexcept
    : partition_(other.partition_), entries_(std::move(other.entries_)) {}

void PartitionFrontierQueue::push(const FrontierEntry& e) {
  std::lock_guard lock(mutex_);
  entries_.push_back(e);
}

void PartitionFrontierQueue::push(std::span<const FrontierEntry> entries) {
  std::lock_guard lock(mutex_);
  entries_.insert(entries_.end(), entries.begin(), entries.end());
}

std::vector<FrontierEntry> PartitionFrontierQueue::take_all() {
  std::lock_guard lock(mutex_);
  return std::exchange(entries_, {});
}

std::size_t PartitionFrontierQueue::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::vector<FrontierEntry> PartitionFrontierQueue::snapshot() const {
  std::lock_guard lock(mutex_);
  return entries_;
}

bool ResidencyState::is_resident(std::size_t p) const {
  return std::find(resident.begin(), resident.end(), p) != resident.end();
}

WorkerAllocation allocate_workers(std::span<const std::size_t> partitions, std::span<const std::size_t> counts,
                                  std::size_t units) {
  WorkerAllocation out;
  std::size_t total = 0;
  std::size_t smallest = 0;
  for (auto p : partitions) {
    total += counts[p];
    if (counts[p] > 0 && (smallest == 0 || counts[p] < smallest)) smallest = counts[p];
  }
  for (auto p : partitions)
    if (counts[p] == 0) out.shares[p] = 1;
  if (total == 0) return out;
  // Enough units that the smallest exact quota is at least 1, so the floor of one share never
  // has to borrow from anyone and rounding stays within one share.
  const std::size_t effective = std::max(units, (total + smallest - 1) / smallest);
  if (total <= effective) {
    for (auto p : partitions)
      if (counts[p] > 0) out.shares[p] = counts[p];
    return out;
  }
  struct Quota {
    std::size_t partition;
    std::size_t whole;
    double fraction;
  };
  std::vector<Quota> quotas;
  std::size_t assigned = 0;
  for (auto p : partitions) {
    if (counts[p] == 0) continue;
    const double q = static_cast<double>(effective) * static_cast<double>(counts[p]) / static_cast<double>(total);
    const auto whole = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(q)));
    quotas.push_back({p, whole, q - std::floor(q)});
    assigned += whole;
  }
  std::vector<std::size_t> order(quotas.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return quotas[a].fraction > quotas[b].fraction; });
  for (std::size_t i = 0; assigned < effective; ++i, ++assigned) ++quotas[order[i % order.size()]].whole;
  for (const auto& q : quotas) out.shares[q.partition] = q.whole;
  return out;
}

namespace {

std::vector<std::size_t> by_workload(std::vector<std::size_t> parts, std::span<const std::size_t> counts) {
  std::sort(parts.begin(), parts.end(), [&](std::size_t a, std::size_t b) {
    if (counts[a] != counts[b]) return counts[a] > counts[b];
    return a < b;
  });
  return parts;
}

void touch(ResidencyState& state, std::span<const std::size_t> activated) {
  for (auto p : activated) {
    auto it = std::find(state.resident.begin(), state.resident.end(), p);
    if (it != state.resident.end()) state.resident.erase(it);
    state.resident.push_back(p);
  }
}

void make_resident(ResidencyState& state, std::size_t p, std::span<const std::size_t> pinned,
                   std::span<const std::size_t> counts, bool evict_nonempty, ScheduleDecision& d) {
  if (state.is_resident(p)) return;
  if (state.resident.size() >= state.budget) {
    auto victim = std::find_if(state.resident.begin(), state.resident.end(), [&](std::size_t r) {
      const bool is_pinned = std::find(pinned.begin(), pinned.end(), r) != pinned.end();
      return !is_pinned && (evict_nonempty || counts[r] == 0);
    });
    if (victim == state.resident.end()) throw Error("no evictable partition; residency budget exhausted");
    d.evicted.push_back(*victim);
    state.resident.erase(victim);
  }
  state.resident.push_back(p);
  ++state.transfer_count;
  d.loaded.push_back(p);
  if (state.resident.size() > state.budget) throw Error("residency budget exceeded");
}

}  // namespace

ScheduleDecision schedule_step(std::span<const std::size_t> queue_counts, ResidencyState& state,
                               std::size_t worker_units) {
  if (state.budget == 0) throw ValidationError("residency budget must be >= 1");
  ScheduleDecision d;
  std::vector<std::size_t> keep;
  for (auto r : state.resident)
    if (queue_counts[r] > 0) keep.push_back(r);
  std::vector<std::size_t> others;
  for (std::size_t p = 0; p < queue_counts.size(); ++p)
    if (queue_counts[p] > 0 && !state.is_resident(p)) others.push_back(p);
  if (keep.empty() && others.empty()) {
    d.complete = true;
    return d;
  }

  d.activate = by_workload(keep, queue_counts);
  if (d.activate.size() > state.budget) d.activate.resize(state.budget);
  for (auto p : by_workload(others, queue_counts)) {
    if (d.activate.size() >= state.budget) break;
    make_resident(state, p, d.activate, queue_counts, false, d);
    d.activate.push_back(p);
  }
  d.activate = by_workload(d.activate, queue_counts);
  touch(state, d.activate);
  d.allocation = allocate_workers(d.activate, queue_counts, worker_units);
  return d;
}

ScheduleDecision schedule_round_robin(std::span<const std::size_t> queue_counts, ResidencyState& state,
                                      std::size_t& cursor, std::size_t worker_units) {
  if (state.budget == 0) throw ValidationError("residency budget must be >= 1");
  ScheduleDecision d;
  const std::size_t parts = queue_counts.size();
  for (std::size_t step = 0; step < parts && d.activate.size() < state.budget; ++step) {
    const std::size_t p = (cursor + step) % parts;
    if (queue_counts[p] > 0) d.activate.push_back(p);
  }
  if (d.activate.empty()) {
    d.complete = true;
    return d;
  }
  cursor = (d.activate.back() + 1) % parts;
  for (auto p : d.activate) make_resident(state, p, d.activate, queue_counts, true, d);
  touch(state, d.activate);
  d.allocation = allocate_workers(d.activate, queue_counts, worker_units);
  return d;
}

PartitionSlice::PartitionSlice(const CsrGraph& g, VertexId begin, VertexId end) : begin_(begin), end_(end) {
  const auto offsets = g.row_offsets();
  base_ = offsets[begin];
  const auto last = offsets[end];
  offsets_.assign(offsets.begin() + begin, offsets.begin() + end + 1);
  const auto cols = g.col_indices();
  cols_.assign(cols.begin() + static_cast<std::ptrdiff_t>(base_), cols.begin() + static_cast<std::ptrdiff_t>(last));
  if (g.has_weights()) {
    const auto w = g.weights();
    weights_.assign(w.begin() + static_cast<std::ptrdiff_t>(base_), w.begin() + static_cast<std::ptrdiff_t>(last));
  }
}

NeighborSpan PartitionSlice::neighbors(VertexId v) const {
  if (v < begin_ || v >= end_) throw BoundsError("vertex " + std::to_string(v) + " is not in this partition");
  const auto lo = offsets_[v - begin_] - base_;
  const auto len = static_cast<std::size_t>(offsets_[v - begin_ + 1] - offsets_[v - begin_]);
  std::span<const float> w;
  if (!weights_.empty()) w = std::span<const float>(weights_.data() + lo, len);
  return NeighborSpan(std::span<const VertexId>(cols_.data() + lo, len), w, base_ + lo);
}

std::size_t PartitionSlice::bytes() const noexcept {
  return offsets_.size() * sizeof(EdgeIndex) + cols_.size() * sizeof(VertexId) + weights_.size() * sizeof(float);
}

struct OocEngine::Instance {
  std::mutex mutex;
  InstanceState state;
  std::vector<PendingRecord> level;
  std::size_t pending = 0;
};

OocEngine::OocEngine(const CsrGraph& g, const PartitionSet& partitions, SamplingConfig config, BiasSpec spec,
                     std::span<const std::vector<VertexId>> seeds, InstanceId first_instance, OocOptions options)
    : graph_(g),
      partitions_(partitions),
      config_(std::move(config)),
      spec_(std::move(spec)),
      first_instance_(first_instance),
      options_(options) {
  if (config_.scope != PoolScope::PerVertex || config_.frontier_select != 0)
    throw ValidationError("out-of-memory mode supports per-vertex selection algorithms only");
  if (options_.budget == 0) throw ValidationError("memory budget must be >= 1");
  if (options_.streams == 0) throw ValidationError("stream count must be >= 1");
  if (partitions_.boundaries().back() != g.vertex_count())
    throw ValidationError("partition set does not cover the graph");
  validate_seeds(g, config_, seeds, first_instance);
  residency_.budget = options_.budget;
  if (CtpsCache::applies(config_, spec_)) cache_ = std::make_unique<CtpsCache>(g.vertex_count());
  omp_set_max_active_levels(2);

  queues_.reserve(partitions_.partition_count());
  for (std::size_t p = 0; p < partitions_.partition_count(); ++p) queues_.emplace_back(p);
  instances_.reserve(seeds.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    auto inst = std::make_unique<Instance>();
    inst->state = make_instance(config_, static_cast<InstanceId>(first_instance + i), seeds[i]);
    instances_.push_back(std::move(inst));
  }
  for (auto& inst : instances_) {
    inst->pending = inst->state.frontier_pool.size();
    route(inst->state, 0);
  }
}

OocEngine::~OocEngine() = default;

void OocEngine::route(const InstanceState& state, std::uint32_t depth) {
  for (const auto& e : frontier_entries(state, depth)) queues_[partitions_.owner(e.vertex)].push(e);
}

std::vector<std::size_t> OocEngine::queue_counts() const {
  std::vector<std::size_t> counts(queues_.size());
  for (std::size_t p = 0; p < queues_.size(); ++p) counts[p] = queues_[p].size();
  return counts;
}

void OocEngine::load(std::size_t p) {
  const auto t0 = std::chrono::steady_clock::now();
  arena_.insert_or_assign(p, PartitionSlice(graph_, partitions_.begin(p), partitions_.end(p)));
  stats_.transfer_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ScheduleDecision OocEngine::schedule() {
  const auto counts = queue_counts();
  auto d = options_.policy == SchedulePolicy::WorkloadAware
               ? schedule_step(counts, residency_, options_.worker_units)
               : schedule_round_robin(counts, residency_, rr_cursor_, options_.worker_units);
  for (auto p : d.evicted) arena_.erase(p);
  for (auto p : d.loaded) load(p);
  return d;
}

void OocEngine::process(std::size_t p, const FrontierEntry& e) {
  auto& inst = *instances_.at(e.instance - first_instance_);
  // The level snapshot (visited, previous) cannot change until this entry is accounted for.
  auto expansion = expand_vertex(graph_, arena_.at(p).neighbors(e.vertex), config_, spec_, inst.state, e, cache_.get());

  std::lock_guard lock(inst.mutex);
  inst.state.sampled.retries += expansion.retries;
  inst.level.insert(inst.level.end(), std::make_move_iterator(expansion.records.begin()),
                    std::make_move_iterator(expansion.records.end()));
  if (--inst.pending > 0) return;
  commit_level(inst.state, config_, std::exchange(inst.level, {}), {});
  const auto next_depth = e.depth + 1;
  if (next_depth >= config_.depth || inst.state.frontier_pool.empty()) {
    inst.state.frontier_pool.clear();
    return;
  }
  inst.pending = inst.state.frontier_pool.size();
  route(inst.state, next_depth);
}

void OocEngine::drain_round(std::size_t p, std::size_t threads) {
  if (!arena_.contains(p)) throw Error("partition " + std::to_string(p) + " is not resident");
  const auto batch = queues_[p].take_all();
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto count = static_cast<std::int64_t>(batch.size());
#pragma omp parallel for num_threads(static_cast<int>(std::max<std::size_t>(1, threads))) schedule(dynamic, 64)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      process(p, batch[static_cast<std::size_t>(i)]);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
#pragma omp atomic
  stats_.entries_processed += batch.size();
}

void OocEngine::drain_partition(std::size_t p, std::size_t threads) {
  while (!queues_[p].empty()) drain_round(p, threads);
}

bool OocEngine::run_round(const ScheduleDecision& decision) {
  std::size_t share_total = 0;
  for (const auto& [p, s] : decision.allocation.shares) share_total += s;
  const auto max_threads = static_cast<std::size_t>(omp_get_max_threads());
  auto threads_for = [&](std::size_t p) -> std::size_t {
    auto it = decision.allocation.shares.find(p);
    if (it == decision.allocation.shares.end() || share_total == 0) return 1;
    return std::max<std::size_t>(1, (it->second * max_threads + share_total / 2) / share_total);
  };

  // Partitions already in the arena are drained too when work reaches them; that costs no transfer.
  std::vector<std::size_t> active;
  for (auto p : decision.activate)
    if (!queues_[p].empty()) active.push_back(p);
  for (auto p : residency_.resident)
    if (!queues_[p].empty() && std::find(active.begin(), active.end(), p) == active.end()) active.push_back(p);
  if (active.empty()) return false;
  ++stats_.rounds;
  // Snapshot sizes first so every partition in the round processes what was queued before it.
  std::vector<std::vector<FrontierEntry>> batches(active.size());
  for (std::size_t i = 0; i < active.size(); ++i) batches[i] = queues_[active[i]].take_all();

  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto streams = static_cast<int>(std::min(options_.streams, active.size()));
#pragma omp parallel for num_threads(streams) schedule(static, 1)
  for (std::size_t i = 0; i < active.size(); ++i) {
    const auto p = active[i];
    const auto& batch = batches[i];
    const auto count = static_cast<std::int64_t>(batch.size());
#pragma omp parallel for num_threads(static_cast<int>(threads_for(p))) schedule(dynamic, 64)
    for (std::int64_t j = 0; j < count; ++j) {
      try {
        process(p, batch[static_cast<std::size_t>(j)]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  }
  if (failure) std::rethrow_exception(failure);
  for (const auto& b : batches) stats_.entries_processed += b.size();
  return true;
}

void OocEngine::run_wave(const ScheduleDecision& decision) {
  while (run_round(decision)) {
  }
}

void OocEngine::run_to_completion() {
  for (;;) {
    const auto d = schedule();
    if (d.complete) break;
    ++stats_.waves;
    // Workload-aware: a slot is refilled as soon as its partition runs dry. The baseline drains
    // its whole selection first.
    if (options_.policy == SchedulePolicy::WorkloadAware) run_round(d);
    else run_wave(d);
  }
}

std::vector<SampleOutput> OocEngine::take_outputs() {
  std::vector<SampleOutput> out;
  out.reserve(instances_.size());
  for (auto& inst : instances_) out.push_back(std::move(inst->state.sampled));
  return out;
}

OocResult run_out_of_memory(const CsrGraph& g, const PartitionSet& partitions, const SamplingConfig& config,
                            const BiasSpec& spec, std::span<const std::vector<VertexId>> seeds,
                            const OocOptions& options, InstanceId first_instance) {
  OocEngine engine(g, partitions, config, spec, seeds, first_instance, options);
  engine.run_to_completion();
  OocResult result;
  result.residency = engine.residency();
  result.stats = engine.stats();
  result.outputs = engine.take_outputs();
  return result;
}

std::vector<std::pair<InstanceId, InstanceId>> split_instances(std::size_t instances, std::size_t workers) {
  if (workers == 0) throw ValidationError("worker count must be >= 1");
  std::vector<std::pair<InstanceId, InstanceId>> ranges;
  ranges.reserve(workers);
  const std::size_t base = instances / workers;
  const std::size_t extra = instances % workers;
  std::size_t begin = 0;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t size = base + (w < extra ? 1 : 0);
    ranges.emplace_back(static_cast<InstanceId>(begin), static_cast<InstanceId>(begin + size));
    begin += size;
  }
  return ranges;
}

GroupedResult run_worker_groups(const CsrGraph& g, const PartitionSet& partitions, const SamplingConfig& config,
                                const BiasSpec& spec, std::span<const std::vector<VertexId>> seeds,
                                const OocOptions& options, std::size_t workers) {
  const auto ranges = split_instances(seeds.size(), workers);
  GroupedResult result;
  result.outputs.resize(seeds.size());
  result.residencies.resize(ranges.size());
  result.stats.resize(ranges.size());
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto groups = static_cast<std::int64_t>(ranges.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t w = 0; w < groups; ++w) {
    const auto [begin, end] = ranges[static_cast<std::size_t>(w)];
    if (begin == end) continue;
    try {
      auto r = run_out_of_memory(g, partitions, config, spec, seeds.subspan(begin, end - begin), options, begin);
      for (std::size_t i = 0; i < r.outputs.size(); ++i) result.outputs[begin + i] = std::move(r.outputs[i]);
      result.residencies[static_cast<std::size_t>(w)] = r.residency;
      result.stats[static_cast<std::size_t>(w)] = r.stats;
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return result;
}

}  // namespace csaw
