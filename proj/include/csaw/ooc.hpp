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
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "csaw/framework.hpp"
#include "csaw/graph.hpp"

namespace csaw {

/// Frontier entries whose vertex is owned by one partition. Entries of many instances interleave.
/// push is safe under concurrent producers.
class PartitionFrontierQueue {
 public:
  explicit PartitionFrontierQueue(std::size_t partition = 0) : partition_(partition) {}
  PartitionFrontierQueue(PartitionFrontierQueue&& other) noexcept;

  std::size_t partition() const noexcept { return partition_; }
  void push(const FrontierEntry& e);
  void push(std::span<const FrontierEntry> entries);
  std::vector<FrontierEntry> take_all();
  std::size_t size() const;
  bool empty() const { return size() == 0; }
  std::vector<FrontierEntry> snapshot() const;

 private:
  std::size_t partition_;
  mutable std::mutex mutex_;
  std::vector<FrontierEntry> entries_;
};

/// Which partitions occupy the bounded device arena, and how many loads happened.
struct ResidencyState {
  std::size_t budget = 1;
  std::vector<std::size_t> resident;  // least recently activated first
  std::size_t transfer_count = 0;

  bool is_resident(std::size_t p) const;
};

struct WorkerAllocation {
  std::map<std::size_t, std::size_t> shares;  // partition -> worker units
};

struct ScheduleDecision {
  bool complete = false;               // every queue is empty
  std::vector<std::size_t> activate;   // partitions drained in this wave
  std::vector<std::size_t> loaded;     // became resident (one transfer each)
  std::vector<std::size_t> evicted;
  WorkerAllocation allocation;
};

inline constexpr std::size_t kDefaultWorkerUnits = 1024;

/// Shares proportional to counts: the counts themselves when they sum to at most `units`,
/// otherwise a largest-remainder apportionment. The unit total grows past `units` when needed so
/// that the smallest partition's exact quota is at least one share; every share is then >= 1 and
/// within one share of exact proportion. Empty partitions get 1.
WorkerAllocation allocate_workers(std::span<const std::size_t> partitions, std::span<const std::size_t> counts,
                                  std::size_t units = kDefaultWorkerUnits);

/// Workload-aware step: activates up to `budget` partitions with the most queued entries (ties
/// to the lower id). Resident partitions with non-empty queues are never evicted; among
/// empty-queue residents the least recently activated goes first.
ScheduleDecision schedule_step(std::span<const std::size_t> queue_counts, ResidencyState& state,
                               std::size_t worker_units = kDefaultWorkerUnits);

/// Baseline for comparison: activates the next `budget` non-empty partitions in cyclic order
/// starting at `cursor`, evicting whatever is not selected.
ScheduleDecision schedule_round_robin(std::span<const std::size_t> queue_counts, ResidencyState& state,
                                      std::size_t& cursor, std::size_t worker_units = kDefaultWorkerUnits);

enum class SchedulePolicy { WorkloadAware, RoundRobin };

struct OocOptions {
  std::size_t budget = 2;
  std::size_t streams = 2;
  SchedulePolicy policy = SchedulePolicy::WorkloadAware;
  std::size_t worker_units = kDefaultWorkerUnits;
};

/// CSR slice of one partition copied into the arena.
class PartitionSlice {
 public:
  PartitionSlice(const CsrGraph& g, VertexId begin, VertexId end);
  NeighborSpan neighbors(VertexId v) const;
  VertexId begin() const noexcept { return begin_; }
  VertexId end() const noexcept { return end_; }
  std::size_t bytes() const noexcept;

 private:
  VertexId begin_;
  VertexId end_;
  EdgeIndex base_;
  std::vector<EdgeIndex> offsets_;
  std::vector<VertexId> cols_;
  std::vector<float> weights_;
};

struct OocStats {
  std::size_t waves = 0;
  std::size_t rounds = 0;
  std::size_t entries_processed = 0;
  double transfer_seconds = 0;
};

/// Batched multi-instance sampling over partitions with bounded residency. Produces exactly the
/// output of the in-memory `run` for per-vertex algorithms.
class OocEngine {
 public:
  OocEngine(const CsrGraph& g, const PartitionSet& partitions, SamplingConfig config, BiasSpec spec,
            std::span<const std::vector<VertexId>> seeds, InstanceId first_instance, OocOptions options);
  ~OocEngine();
  OocEngine(const OocEngine&) = delete;
  OocEngine& operator=(const OocEngine&) = delete;

  std::vector<std::size_t> queue_counts() const;
  const PartitionFrontierQueue& queue(std::size_t p) const { return queues_[p]; }
  const ResidencyState& residency() const noexcept { return residency_; }
  const OocStats& stats() const noexcept { return stats_; }

  /// One schedule_step plus arena loads/evictions. Returns the decision.
  ScheduleDecision schedule();

  /// Processes every entry currently queued for resident partition p (one round). New entries
  /// are routed to their owner queues, including p's own.
  void drain_round(std::size_t p, std::size_t threads);

  /// Rounds on p until its queue is empty.
  void drain_partition(std::size_t p, std::size_t threads);

  /// One lock-step round over the activated partitions plus any other resident partition with
  /// queued work. False when there was nothing to do.
  bool run_round(const ScheduleDecision& decision);

  /// Lock-step rounds until the activated partitions, and any other resident partition that
  /// receives work meanwhile, have empty queues.
  void run_wave(const ScheduleDecision& decision);

  /// schedule/run_wave until every queue is empty.
  void run_to_completion();

  std::vector<SampleOutput> take_outputs();

 private:
  struct Instance;
  void process(std::size_t p, const FrontierEntry& e);
  void route(const InstanceState& state, std::uint32_t depth);
  void load(std::size_t p);

  const CsrGraph& graph_;
  const PartitionSet& partitions_;
  SamplingConfig config_;
  BiasSpec spec_;
  InstanceId first_instance_;
  OocOptions options_;
  std::vector<PartitionFrontierQueue> queues_;
  std::vector<std::unique_ptr<Instance>> instances_;
  std::unique_ptr<CtpsCache> cache_;
  std::map<std::size_t, PartitionSlice> arena_;
  ResidencyState residency_;
  std::size_t rr_cursor_ = 0;
  OocStats stats_;
};

struct OocResult {
  std::vector<SampleOutput> outputs;
  ResidencyState residency;
  OocStats stats;
};

/// Runs instances [first_instance, first_instance + seeds.size()) out of memory.
OocResult run_out_of_memory(const CsrGraph& g, const PartitionSet& partitions, const SamplingConfig& config,
                            const BiasSpec& spec, std::span<const std::vector<VertexId>> seeds,
                            const OocOptions& options, InstanceId first_instance = 0);

/// Disjoint contiguous instance ranges [begin, end), sizes differ by at most one, earlier groups
/// larger. Groups beyond the instance count are empty.
std::vector<std::pair<InstanceId, InstanceId>> split_instances(std::size_t instances, std::size_t workers);

struct GroupedResult {
  std::vector<SampleOutput> outputs;        // all instances, in instance order
  std::vector<ResidencyState> residencies;  // one per worker group
  std::vector<OocStats> stats;
};

/// Each worker group runs its own out-of-memory engine over its instance range; no exchange
/// between groups.
GroupedResult run_worker_groups(const CsrGraph& g, const PartitionSet& partitions, const SamplingConfig& config,
                                const BiasSpec& spec, std::span<const std::vector<VertexId>> seeds,
                                const OocOptions& options, std::size_t workers);

}  // namespace csaw
