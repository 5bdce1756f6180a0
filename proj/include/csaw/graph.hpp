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
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace csaw {

using VertexId = std::uint32_t;
using EdgeIndex = std::uint64_t;

/// Neighbor run of one vertex. Weights default to 1 when the graph is unweighted.
class NeighborSpan {
 public:
  NeighborSpan() = default;
  NeighborSpan(std::span<const VertexId> targets, std::span<const float> weights, EdgeIndex first_edge)
      : targets_(targets), weights_(weights), first_edge_(first_edge) {}

  std::size_t size() const noexcept { return targets_.size(); }
  bool empty() const noexcept { return targets_.empty(); }
  VertexId target(std::size_t i) const { return targets_[i]; }
  double weight(std::size_t i) const { return weights_.empty() ? 1.0 : static_cast<double>(weights_[i]); }
  EdgeIndex edge_index(std::size_t i) const noexcept { return first_edge_ + i; }
  std::span<const VertexId> targets() const noexcept { return targets_; }

 private:
  std::span<const VertexId> targets_;
  std::span<const float> weights_;
  EdgeIndex first_edge_ = 0;
};

/// Compressed sparse row adjacency. Immutable once constructed.
class CsrGraph {
 public:
  CsrGraph() : row_offsets_{0} {}

  /// Validates every CSR invariant; throws ValidationError on violation.
  CsrGraph(std::vector<EdgeIndex> row_offsets, std::vector<VertexId> col_indices,
           std::optional<std::vector<float>> weights = std::nullopt);

  /// Builds a CSR from an (unsorted) edge list. Neighbor runs come out sorted by target.
  struct Edge {
    VertexId source;
    VertexId target;
    float weight = 1.0f;
  };
  static CsrGraph from_edges(std::size_t vertex_count, std::span<const Edge> edges, bool weighted);

  std::size_t vertex_count() const noexcept { return row_offsets_.size() - 1; }
  std::size_t edge_count() const noexcept { return col_indices_.size(); }
  bool has_weights() const noexcept { return weights_.has_value(); }

  std::span<const EdgeIndex> row_offsets() const noexcept { return row_offsets_; }
  std::span<const VertexId> col_indices() const noexcept { return col_indices_; }
  std::span<const float> weights() const noexcept {
    return weights_ ? std::span<const float>(*weights_) : std::span<const float>{};
  }

  /// Throws BoundsError when v is out of range.
  NeighborSpan neighbors(VertexId v) const;

  std::size_t degree(VertexId v) const {
    check_vertex(v);
    return static_cast<std::size_t>(row_offsets_[v + 1] - row_offsets_[v]);
  }

  /// Binary search over the sorted neighbor run of `from`.
  bool has_edge(VertexId from, VertexId to) const;

  /// Original input label of a compacted vertex id (identity unless loaded from text).
  std::uint64_t label(VertexId v) const { return labels_.empty() ? v : labels_[v]; }
  std::optional<VertexId> find_label(std::uint64_t label) const;
  void set_labels(std::vector<std::uint64_t> labels);

  friend bool operator==(const CsrGraph& a, const CsrGraph& b) {
    return a.row_offsets_ == b.row_offsets_ && a.col_indices_ == b.col_indices_ && a.weights_ == b.weights_;
  }

 private:
  void check_vertex(VertexId v) const;

  std::vector<EdgeIndex> row_offsets_;
  std::vector<VertexId> col_indices_;
  std::optional<std::vector<float>> weights_;
  std::vector<std::uint64_t> labels_;  // sorted ascending, empty = identity
};

/// Reads a whitespace separated "u v [w]" edge list. '#' and '%' start comment lines.
/// Vertex ids are compacted (order preserving) into [0, vertex_count).
CsrGraph load_edge_list(const std::filesystem::path& path, bool directed);
CsrGraph parse_edge_list(std::string_view text, bool directed);

/// Writes every CSR entry as one "u v [w]" line, compacted ids.
void write_edge_list(const CsrGraph& g, const std::filesystem::path& path);

/// Binary cache: "CSAW" magic, u32 version, u64 vertex count, u64 edge count, u8 weight flag,
/// then u64 row offsets, u32 column indices and f32 weights, all little endian.
inline constexpr std::uint32_t kBinaryCacheVersion = 1;
void write_binary_cache(const CsrGraph& g, const std::filesystem::path& path);
CsrGraph read_binary_cache(const std::filesystem::path& path);
bool is_binary_cache(const std::filesystem::path& path);

/// Loads either format, detected by the cache magic.
CsrGraph load_graph(const std::filesystem::path& path, bool directed);

/// Contiguous vertex ranges; partition p owns [boundary(p), boundary(p+1)).
class PartitionSet {
 public:
  PartitionSet(std::size_t vertex_count, std::size_t partition_count);

  std::size_t partition_count() const noexcept { return boundaries_.size() - 1; }
  std::span<const VertexId> boundaries() const noexcept { return boundaries_; }
  VertexId begin(std::size_t p) const { return boundaries_[p]; }
  VertexId end(std::size_t p) const { return boundaries_[p + 1]; }

  /// O(1): the first `remainder` partitions hold one extra vertex.
  std::size_t owner(VertexId v) const;

 private:
  std::vector<VertexId> boundaries_;
  std::size_t base_size_;
  std::size_t remainder_;
};

/// Throws ValidationError unless 1 <= p <= vertex_count.
PartitionSet partition(const CsrGraph& g, std::size_t p);

}  // namespace csaw
