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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <span>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "csaw/graph.hpp"

namespace csaw::fixture {

// 12-vertex toy graph. v8's neighbors are {5, 7, 9, 10, 11} with degrees {3, 6, 2, 2, 2}.
inline CsrGraph toy_graph() {
  const std::vector<std::pair<VertexId, VertexId>> pairs = {
      {8, 5}, {8, 7}, {8, 9}, {8, 10}, {8, 11}, {0, 7}, {2, 3}, {3, 4},
      {7, 1}, {7, 2}, {7, 4}, {7, 6}, {5, 4}, {5, 6}, {9, 10}, {11, 1}};
  std::vector<CsrGraph::Edge> edges;
  for (auto [u, v] : pairs) {
    edges.push_back({u, v});
    edges.push_back({v, u});
  }
  return CsrGraph::from_edges(12, edges, false);
}

inline CsrGraph path3() { return parse_edge_list("0 1\n1 2\n", false); }

// Undirected graph: a ring (connected, odd length keeps it non-bipartite) plus random chords.
inline CsrGraph random_graph(std::size_t n, std::size_t chords, std::uint64_t seed, bool weighted = false) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<VertexId> pick(0, static_cast<VertexId>(n - 1));
  std::uniform_real_distribution<float> w(0.5f, 4.0f);
  std::vector<CsrGraph::Edge> edges;
  auto add = [&](VertexId u, VertexId v) {
    const float x = weighted ? w(gen) : 1.0f;
    edges.push_back({u, v, x});
    edges.push_back({v, u, x});
  };
  for (VertexId v = 0; v < n; ++v) add(v, static_cast<VertexId>((v + 1) % n));
  for (std::size_t i = 0; i < chords; ++i) {
    const auto u = pick(gen);
    const auto v = pick(gen);
    if (u != v) add(u, v);
  }
  return CsrGraph::from_edges(n, edges, weighted);
}

// Power-law-ish directed graph without a ring, so some vertices have no out-edges.
inline CsrGraph skewed_graph(std::size_t n, std::size_t m, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<CsrGraph::Edge> edges;
  for (std::size_t i = 0; i < m; ++i) {
    const double a = std::uniform_real_distribution<double>(0, 1)(gen);
    const double b = std::uniform_real_distribution<double>(0, 1)(gen);
    const auto u = static_cast<VertexId>(std::min<double>(n - 1, std::floor(n * a * a)));
    const auto v = static_cast<VertexId>(std::min<double>(n - 1, std::floor(n * b * b * b)));
    edges.push_back({u, v});
  }
  return CsrGraph::from_edges(n, edges, false);
}

inline double total_variation(std::span<const double> p, std::span<const double> q) {
  double s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return s / 2;
}

inline std::vector<double> normalized(std::span<const double> x) {
  double t = 0;
  for (double v : x) t += v;
  std::vector<double> out(x.begin(), x.end());
  for (auto& v : out) v /= t;
  return out;
}

// Pearson goodness of fit; cells with zero expectation must have zero observations.
inline double chi_square_p(std::span<const std::size_t> observed, std::span<const double> probs) {
  std::size_t total = 0;
  for (auto o : observed) total += o;
  double stat = 0;
  int cells = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = probs[i] * static_cast<double>(total);
    if (e <= 0) {
      if (observed[i] != 0) return 0.0;
      continue;
    }
    stat += (observed[i] - e) * (observed[i] - e) / e;
    ++cells;
  }
  if (cells < 2) return 1.0;
  boost::math::chi_squared dist(cells - 1);
  return boost::math::cdf(boost::math::complement(dist, stat));
}

inline std::vector<double> frequencies(std::span<const std::size_t> counts) {
  std::size_t total = 0;
  for (auto c : counts) total += c;
  std::vector<double> out(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) out[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
  return out;
}

}  // namespace csaw::fixture
