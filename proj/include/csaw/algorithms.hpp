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

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "csaw/framework.hpp"

namespace csaw {

/// Partial SamplingConfig an algorithm imposes on top of user settings.
struct ConfigOverrides {
  std::optional<Replacement> mode;
  std::optional<PoolScope> scope;
  std::optional<bool> filter_visited;
  std::optional<std::size_t> neighbor_size;
  std::optional<std::size_t> frontier_select;
  NeighborRule neighbor_rule;

  void apply(SamplingConfig& config) const;
};

enum class AlgorithmFamily { Traversal, RandomWalk };

/// A sampling or random-walk algorithm expressed purely through the bias API and configuration.
struct AlgorithmDescriptor {
  std::string name;
  BiasSpec spec;
  ConfigOverrides overrides;
  std::map<std::string, double> params;
  AlgorithmFamily family = AlgorithmFamily::Traversal;
  bool ooc_supported = false;
  bool seeds_fill_frontier = false;  // instances start with frontier_size seeds instead of one

  SamplingConfig configure(SamplingConfig base) const {
    overrides.apply(base);
    return base;
  }
};

AlgorithmDescriptor unbiased_neighbor_sampling();
/// Neighbor bias is the target degree, or the edge weight when `by_weight`.
AlgorithmDescriptor biased_neighbor_sampling(bool by_weight = false);
/// Burned neighbor count per vertex ~ Geometric(1 - pf) - 1, truncated to the pool.
AlgorithmDescriptor forest_fire_sampling(double pf = 0.7);
AlgorithmDescriptor snowball_sampling();
AlgorithmDescriptor layer_sampling();
/// Uniform step, or proportional to edge weight when `weighted`.
AlgorithmDescriptor simple_random_walk(bool weighted = false);
/// Neighbor degree as bias.
AlgorithmDescriptor biased_random_walk();
/// Uniform proposal accepted with min(1, deg(v) / deg(u)); rejection stays.
AlgorithmDescriptor metropolis_hastings_random_walk();
/// With probability p the step teleports to a uniformly random vertex.
AlgorithmDescriptor random_walk_with_jump(double p_jump);
/// With probability p the step teleports to `anchor` (the instance's first seed when unset).
AlgorithmDescriptor random_walk_with_restart(double p_restart, std::optional<VertexId> anchor = std::nullopt);
/// Pool of frontier_size vertices; each iteration picks one by degree and replaces it with a
/// uniform neighbor.
AlgorithmDescriptor multidimensional_random_walk();
/// Second-order walk: weight * (1/p back to previous, 1 to its neighbors, 1/q otherwise).
AlgorithmDescriptor node2vec(double p, double q);

/// Draws the forest-fire burned count for a pool of `pool_size` candidates.
std::size_t forest_fire_burn_count(double pf, std::size_t pool_size, UniformSource& rng);

/// Registry lookup by name; params are validated per algorithm. Throws ValidationError for an
/// unknown name, unknown parameter or out-of-range value.
AlgorithmDescriptor make_algorithm(std::string_view name, const std::map<std::string, double>& params = {});
std::vector<std::string> algorithm_names();

}  // namespace csaw
