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

#include "csaw/algorithms.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <set>

#include "csaw/error.hpp"

namespace csaw {

void ConfigOverrides::apply(SamplingConfig& config) const {
  if (mode) config.mode = *mode;
  if (scope) config.scope = *scope;
  if (filter_visited) config.filter_visited = *filter_visited;
  if (neighbor_size) config.neighbor_size = *neighbor_size;
  if (frontier_select) config.frontier_select = *frontier_select;
  if (neighbor_rule) config.neighbor_rule = neighbor_rule;
}

namespace {

void check_probability(std::string_view what, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError(std::string(what) + " must lie in [0, 1]");
}

AlgorithmDescriptor traversal(std::string name) {
  AlgorithmDescriptor d;
  d.name = std::move(name);
  d.family = AlgorithmFamily::Traversal;
  d.overrides.mode = Replacement::Without;
  d.overrides.scope = PoolScope::PerVertex;
  d.overrides.filter_visited = true;
  d.overrides.frontier_select = 0;
  d.ooc_supported = true;
  return d;
}

AlgorithmDescriptor walk(std::string name) {
  AlgorithmDescriptor d;
  d.name = std::move(name);
  d.family = AlgorithmFamily::RandomWalk;
  d.overrides.mode = Replacement::With;
  d.overrides.scope = PoolScope::PerVertex;
  d.overrides.filter_visited = false;
  d.overrides.neighbor_size = 1;
  d.overrides.frontier_select = 0;
  d.ooc_supported = true;
  return d;
}

double target_degree(const CsrGraph&, const EdgeContext& e) { return static_cast<double>(e.target_degree); }
double edge_weight(const CsrGraph&, const EdgeContext& e) { return e.weight; }

}  // namespace

AlgorithmDescriptor unbiased_neighbor_sampling() { return traversal("neighbor-unbiased"); }

AlgorithmDescriptor biased_neighbor_sampling(bool by_weight) {
  auto d = traversal("neighbor-biased");
  d.params["weighted"] = by_weight ? 1.0 : 0.0;
  d.spec.edge_bias = by_weight ? edge_weight : target_degree;
  d.spec.static_edge_bias = true;
  return d;
}

std::size_t forest_fire_burn_count(double pf, std::size_t pool_size, UniformSource& rng) {
  if (pf <= 0.0) return 0;
  if (pf >= 1.0) return pool_size;
  // P(X >= k) = pf^k, i.e. X = Geometric(1 - pf) - 1 on {0, 1, ...}.
  const double x = std::floor(std::log1p(-rng.next()) / std::log(pf));
  if (!(x < static_cast<double>(pool_size))) return pool_size;
  return static_cast<std::size_t>(x);
}

AlgorithmDescriptor forest_fire_sampling(double pf) {
  check_probability("forest fire burning probability", pf);
  auto d = traversal("forest-fire");
  d.params["pf"] = pf;
  d.overrides.neighbor_rule = [pf](const CsrGraph&, VertexId, std::size_t pool, UniformSource& rng) {
    return forest_fire_burn_count(pf, pool, rng);
  };
  return d;
}

AlgorithmDescriptor snowball_sampling() {
  auto d = traversal("snowball");
  d.overrides.neighbor_rule = [](const CsrGraph&, VertexId, std::size_t pool, UniformSource&) { return pool; };
  return d;
}

AlgorithmDescriptor layer_sampling() {
  auto d = traversal("layer");
  d.overrides.scope = PoolScope::PerLayer;
  d.ooc_supported = false;
  return d;
}

AlgorithmDescriptor simple_random_walk(bool weighted) {
  auto d = walk("simple-rw");
  d.params["weighted"] = weighted ? 1.0 : 0.0;
  if (weighted) d.spec.edge_bias = edge_weight;
  d.spec.static_edge_bias = true;
  return d;
}

AlgorithmDescriptor biased_random_walk() {
  auto d = walk("biased-rw");
  d.spec.edge_bias = target_degree;
  d.spec.static_edge_bias = true;
  return d;
}

AlgorithmDescriptor metropolis_hastings_random_walk() {
  auto d = walk("mh-rw");
  d.spec.update = [](const CsrGraph&, const EdgeContext& e, const InstanceView&,
                     UniformSource& rng) -> std::optional<Transition> {
    const double accept = std::min(1.0, static_cast<double>(e.source_degree) / static_cast<double>(e.target_degree));
    if (rng.next() < accept) return Transition{e.target, EventKind::Edge};
    return Transition{e.source, EventKind::Stay};
  };
  return d;
}

AlgorithmDescriptor random_walk_with_jump(double p_jump) {
  check_probability("jump probability", p_jump);
  auto d = walk("rw-jump");
  d.params["p"] = p_jump;
  d.spec.update = [p_jump](const CsrGraph& g, const EdgeContext& e, const InstanceView&,
                           UniformSource& rng) -> std::optional<Transition> {
    if (rng.next() < p_jump) {
      const auto target = static_cast<VertexId>(std::min<double>(std::floor(rng.next() * static_cast<double>(g.vertex_count())),
                                                                 static_cast<double>(g.vertex_count() - 1)));
      return Transition{target, EventKind::Teleport};
    }
    return Transition{e.target, EventKind::Edge};
  };
  return d;
}

AlgorithmDescriptor random_walk_with_restart(double p_restart, std::optional<VertexId> anchor) {
  check_probability("restart probability", p_restart);
  auto d = walk("rw-restart");
  d.params["p"] = p_restart;
  if (anchor) d.params["anchor"] = *anchor;
  d.spec.update = [p_restart, anchor](const CsrGraph&, const EdgeContext& e, const InstanceView& inst,
                                      UniformSource& rng) -> std::optional<Transition> {
    if (rng.next() < p_restart) return Transition{anchor ? *anchor : inst.seeds.front(), EventKind::Teleport};
    return Transition{e.target, EventKind::Edge};
  };
  return d;
}

AlgorithmDescriptor multidimensional_random_walk() {
  auto d = walk("multidim-rw");
  d.overrides.frontier_select = 1;
  d.spec.vertex_bias = [](const CsrGraph& g, VertexId v) { return static_cast<double>(g.degree(v)); };
  d.ooc_supported = false;
  d.seeds_fill_frontier = true;
  return d;
}

AlgorithmDescriptor node2vec(double p, double q) {
  if (!(p > 0) || !(q > 0) || !std::isfinite(p) || !std::isfinite(q))
    throw ValidationError("node2vec p and q must be positive");
  auto d = walk("node2vec");
  d.params["p"] = p;
  d.params["q"] = q;
  d.spec.edge_bias = [p, q](const CsrGraph& g, const EdgeContext& e) {
    if (!e.previous) return e.weight;
    if (e.target == *e.previous) return e.weight / p;
    if (g.has_edge(*e.previous, e.target)) return e.weight;
    return e.weight / q;
  };
  d.ooc_supported = false;
  return d;
}

namespace {

using Params = std::map<std::string, double>;

double param_or(const Params& params, const std::string& key, double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

void allow_only(const Params& params, std::string_view algorithm, std::set<std::string> allowed) {
  for (const auto& [key, value] : params)
    if (!allowed.contains(key))
      throw ValidationError("unknown parameter '" + key + "' for algorithm " + std::string(algorithm));
}

bool flag(const Params& params, const std::string& key) {
  const double v = param_or(params, key, 0.0);
  if (v != 0.0 && v != 1.0) throw ValidationError(key + " must be 0 or 1");
  return v == 1.0;
}

struct Entry {
  std::string_view name;
  std::function<AlgorithmDescriptor(const Params&)> make;
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = {
      {"neighbor-unbiased", [](const Params& p) { allow_only(p, "neighbor-unbiased", {}); return unbiased_neighbor_sampling(); }},
      {"neighbor-biased", [](const Params& p) { allow_only(p, "neighbor-biased", {"weighted"}); return biased_neighbor_sampling(flag(p, "weighted")); }},
      {"forest-fire", [](const Params& p) { allow_only(p, "forest-fire", {"pf"}); return forest_fire_sampling(param_or(p, "pf", 0.7)); }},
      {"snowball", [](const Params& p) { allow_only(p, "snowball", {}); return snowball_sampling(); }},
      {"layer", [](const Params& p) { allow_only(p, "layer", {}); return layer_sampling(); }},
      {"simple-rw", [](const Params& p) { allow_only(p, "simple-rw", {"weighted"}); return simple_random_walk(flag(p, "weighted")); }},
      {"biased-rw", [](const Params& p) { allow_only(p, "biased-rw", {}); return biased_random_walk(); }},
      {"mh-rw", [](const Params& p) { allow_only(p, "mh-rw", {}); return metropolis_hastings_random_walk(); }},
      {"rw-jump", [](const Params& p) { allow_only(p, "rw-jump", {"p"}); return random_walk_with_jump(param_or(p, "p", 0.15)); }},
      {"rw-restart",
       [](const Params& p) {
         allow_only(p, "rw-restart", {"p", "anchor"});
         std::optional<VertexId> anchor;
         if (auto it = p.find("anchor"); it != p.end()) {
           if (!(it->second >= 0) || it->second != std::floor(it->second) ||
               it->second > std::numeric_limits<VertexId>::max())
             throw ValidationError("anchor must be a vertex id");
           anchor = static_cast<VertexId>(it->second);
         }
         return random_walk_with_restart(param_or(p, "p", 0.15), anchor);
       }},
      {"multidim-rw", [](const Params& p) { allow_only(p, "multidim-rw", {}); return multidimensional_random_walk(); }},
      {"node2vec", [](const Params& p) { allow_only(p, "node2vec", {"p", "q"}); return node2vec(param_or(p, "p", 1.0), param_or(p, "q", 1.0)); }},
  };
  return entries;
}

}  // namespace

AlgorithmDescriptor make_algorithm(std::string_view name, const std::map<std::string, double>& params) {
  for (const auto& e : registry())
    if (e.name == name) return e.make(params);
  throw ValidationError("unknown algorithm '" + std::string(name) + "'");
}

std::vector<std::string> algorithm_names() {
  std::vector<std::string> names;
  for (const auto& e : registry()) names.emplace_back(e.name);
  return names;
}

}  // namespace csaw
