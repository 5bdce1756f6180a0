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

#include "csaw/graph.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "csaw/error.hpp"

namespace csaw {

static_assert(std::endian::native == std::endian::little, "binary cache I/O assumes a little-endian host");

CsrGraph::CsrGraph(std::vector<EdgeIndex> row_offsets, std::vector<VertexId> col_indices,
                   std::optional<std::vector<float>> weights)
    : row_offsets_(std::move(row_offsets)), col_indices_(std::move(col_indices)), weights_(std::move(weights)) {
  if (row_offsets_.empty()) throw ValidationError("row_offsets must hold vertex_count + 1 entries");
  if (row_offsets_.front() != 0) throw ValidationError("row_offsets[0] must be 0");
  if (row_offsets_.back() != col_indices_.size()) throw ValidationError("row_offsets[n] must equal edge_count");
  if (!std::is_sorted(row_offsets_.begin(), row_offsets_.end()))
    throw ValidationError("row_offsets must be non-decreasing");
  const auto n = vertex_count();
  for (auto c : col_indices_)
    if (c >= n) throw ValidationError("column index " + std::to_string(c) + " out of range");
  if (weights_) {
    if (weights_->size() != col_indices_.size()) throw ValidationError("weights length must equal edge_count");
    for (auto w : *weights_)
      if (!std::isfinite(w) || w < 0) throw ValidationError("edge weights must be finite and non-negative");
  }
}

CsrGraph CsrGraph::from_edges(std::size_t vertex_count, std::span<const Edge> edges, bool weighted) {
  std::vector<EdgeIndex> offsets(vertex_count + 1, 0);
  for (const auto& e : edges) {
    if (e.source >= vertex_count || e.target >= vertex_count) throw ValidationError("edge endpoint out of range");
    ++offsets[e.source + 1];
  }
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());

  std::vector<std::pair<VertexId, float>> slots(edges.size());
  std::vector<EdgeIndex> cursor(offsets.begin(), offsets.end() - 1);
  for (const auto& e : edges) slots[cursor[e.source]++] = {e.target, e.weight};
  for (std::size_t v = 0; v < vertex_count; ++v)
    std::sort(slots.begin() + static_cast<std::ptrdiff_t>(offsets[v]),
              slots.begin() + static_cast<std::ptrdiff_t>(offsets[v + 1]));

  std::vector<VertexId> cols(edges.size());
  std::optional<std::vector<float>> weights;
  if (weighted) weights.emplace(edges.size());
  for (std::size_t i = 0; i < slots.size(); ++i) {
    cols[i] = slots[i].first;
    if (weighted) (*weights)[i] = slots[i].second;
  }
  return CsrGraph(std::move(offsets), std::move(cols), std::move(weights));
}

void CsrGraph::check_vertex(VertexId v) const {
  if (v >= vertex_count())
    throw BoundsError("vertex " + std::to_string(v) + " out of range [0, " + std::to_string(vertex_count()) + ")");
}

NeighborSpan CsrGraph::neighbors(VertexId v) const {
  check_vertex(v);
  const auto lo = row_offsets_[v];
  const auto len = static_cast<std::size_t>(row_offsets_[v + 1] - lo);
  std::span<const VertexId> targets(col_indices_.data() + lo, len);
  std::span<const float> w;
  if (weights_) w = std::span<const float>(weights_->data() + lo, len);
  return NeighborSpan(targets, w, lo);
}

bool CsrGraph::has_edge(VertexId from, VertexId to) const {
  const auto run = neighbors(from).targets();
  return std::binary_search(run.begin(), run.end(), to);
}

std::optional<VertexId> CsrGraph::find_label(std::uint64_t label) const {
  if (labels_.empty()) {
    if (label < vertex_count()) return static_cast<VertexId>(label);
    return std::nullopt;
  }
  auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
  if (it == labels_.end() || *it != label) return std::nullopt;
  return static_cast<VertexId>(it - labels_.begin());
}

void CsrGraph::set_labels(std::vector<std::uint64_t> labels) {
  if (!labels.empty() && labels.size() != vertex_count()) throw ValidationError("label count must equal vertex_count");
  if (!std::is_sorted(labels.begin(), labels.end())) throw ValidationError("labels must be sorted");
  labels_ = std::move(labels);
}

namespace {

struct RawEdge {
  std::uint64_t u;
  std::uint64_t v;
  float w;
};

bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\r' || c == ','; }

std::string_view next_token(std::string_view& rest) {
  std::size_t i = 0;
  while (i < rest.size() && is_blank(rest[i])) ++i;
  std::size_t j = i;
  while (j < rest.size() && !is_blank(rest[j])) ++j;
  auto tok = rest.substr(i, j - i);
  rest.remove_prefix(j);
  return tok;
}

std::uint64_t parse_id(std::string_view tok, std::size_t line) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size())
    throw ParseError("invalid vertex id '" + std::string(tok) + "'", line);
  return value;
}

}  // namespace

CsrGraph parse_edge_list(std::string_view text, bool directed) {
  std::vector<RawEdge> raw;
  bool weighted = false;
  std::size_t line_no = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;

    auto rest = line;
    auto first = next_token(rest);
    if (first.empty() || first.front() == '#' || first.front() == '%') continue;
    auto second = next_token(rest);
    if (second.empty()) throw ParseError("expected 'u v [w]'", line_no);
    RawEdge e{parse_id(first, line_no), parse_id(second, line_no), 1.0f};
    if (auto third = next_token(rest); !third.empty()) {
      double w = 0;
      auto [ptr, ec] = std::from_chars(third.data(), third.data() + third.size(), w);
      if (ec != std::errc{} || ptr != third.data() + third.size())
        throw ParseError("invalid weight '" + std::string(third) + "'", line_no);
      if (!std::isfinite(w)) throw ValidationError("line " + std::to_string(line_no) + ": weight must be finite");
      if (w < 0) throw ValidationError("line " + std::to_string(line_no) + ": negative weight");
      e.w = static_cast<float>(w);
      weighted = true;
    }
    if (!next_token(rest).empty()) throw ParseError("too many columns", line_no);
    raw.push_back(e);
  }

  std::vector<std::uint64_t> labels;
  labels.reserve(raw.size() * 2);
  for (const auto& e : raw) {
    labels.push_back(e.u);
    labels.push_back(e.v);
  }
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  if (labels.size() > std::numeric_limits<VertexId>::max()) throw ValidationError("too many vertices for 32-bit ids");
  auto compact = [&](std::uint64_t label) {
    return static_cast<VertexId>(std::lower_bound(labels.begin(), labels.end(), label) - labels.begin());
  };

  std::vector<CsrGraph::Edge> edges;
  edges.reserve(directed ? raw.size() : raw.size() * 2);
  for (const auto& e : raw) {
    const auto u = compact(e.u);
    const auto v = compact(e.v);
    edges.push_back({u, v, e.w});
    if (!directed && u != v) edges.push_back({v, u, e.w});
  }
  raw.clear();
  raw.shrink_to_fit();

  auto g = CsrGraph::from_edges(labels.size(), edges, weighted);
  bool identity = true;
  for (std::size_t i = 0; i < labels.size() && identity; ++i) identity = labels[i] == i;
  if (!identity) g.set_labels(std::move(labels));
  return g;
}

CsrGraph load_edge_list(const std::filesystem::path& path, bool directed) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_edge_list(text, directed);
}

void write_edge_list(const CsrGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << std::setprecision(std::numeric_limits<float>::max_digits10);
  const auto offsets = g.row_offsets();
  const auto cols = g.col_indices();
  const auto w = g.weights();
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    for (auto e = offsets[v]; e < offsets[v + 1]; ++e) {
      out << v << ' ' << cols[e];
      if (g.has_weights()) out << ' ' << w[e];
      out << '\n';
    }
  }
  if (!out) throw IoError("write failed: " + path.string());
}

namespace {

constexpr char kMagic[4] = {'C', 'S', 'A', 'W'};

template <typename T>
void put(std::ofstream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
void put_array(std::ofstream& out, std::span<const T> values) {
  out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size_bytes()));
}

template <typename T>
T get(std::ifstream& in, const std::filesystem::path& path) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) throw IoError("truncated cache " + path.string());
  return value;
}

template <typename T>
std::vector<T> get_array(std::ifstream& in, std::size_t count, const std::filesystem::path& path) {
  std::vector<T> values(count);
  if (!in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(count * sizeof(T))))
    throw IoError("truncated cache " + path.string());
  return values;
}

}  // namespace

void write_binary_cache(const CsrGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kBinaryCacheVersion);
  put<std::uint64_t>(out, g.vertex_count());
  put<std::uint64_t>(out, g.edge_count());
  put<std::uint8_t>(out, g.has_weights() ? 1 : 0);
  put_array(out, g.row_offsets());
  put_array(out, g.col_indices());
  if (g.has_weights()) put_array(out, g.weights());
  if (!out) throw IoError("write failed: " + path.string());
}

bool is_binary_cache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  char magic[4] = {};
  return in.read(magic, 4) && std::memcmp(magic, kMagic, 4) == 0;
}

CsrGraph read_binary_cache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[4] = {};
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw IoError("not a CSAW cache: " + path.string());
  const auto version = get<std::uint32_t>(in, path);
  if (version != kBinaryCacheVersion) throw IoError("unsupported cache version " + std::to_string(version));
  const auto n = get<std::uint64_t>(in, path);
  const auto m = get<std::uint64_t>(in, path);
  const auto flag = get<std::uint8_t>(in, path);
  if (flag > 1) throw IoError("bad weight flag in " + path.string());
  auto offsets = get_array<EdgeIndex>(in, n + 1, path);
  auto cols = get_array<VertexId>(in, m, path);
  std::optional<std::vector<float>> weights;
  if (flag) weights = get_array<float>(in, m, path);
  return CsrGraph(std::move(offsets), std::move(cols), std::move(weights));
}

CsrGraph load_graph(const std::filesystem::path& path, bool directed) {
  if (is_binary_cache(path)) return read_binary_cache(path);
  return load_edge_list(path, directed);
}

PartitionSet::PartitionSet(std::size_t vertex_count, std::size_t partition_count) {
  if (partition_count == 0 || partition_count > vertex_count)
    throw ValidationError("partition count must be in [1, vertex_count]");
  base_size_ = vertex_count / partition_count;
  remainder_ = vertex_count % partition_count;
  boundaries_.resize(partition_count + 1);
  boundaries_[0] = 0;
  for (std::size_t p = 0; p < partition_count; ++p)
    boundaries_[p + 1] = static_cast<VertexId>(boundaries_[p] + base_size_ + (p < remainder_ ? 1 : 0));
}

std::size_t PartitionSet::owner(VertexId v) const {
  if (v >= boundaries_.back()) throw BoundsError("vertex " + std::to_string(v) + " has no owner partition");
  const std::size_t big = remainder_ * (base_size_ + 1);
  if (v < big) return v / (base_size_ + 1);
  return remainder_ + (v - big) / base_size_;
}

PartitionSet partition(const CsrGraph& g, std::size_t p) { return PartitionSet(g.vertex_count(), p); }

}  // namespace csaw
