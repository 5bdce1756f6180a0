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

#include "csaw/select.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <omp.h>

#include "csaw/error.hpp"

namespace csaw {

Ctps Ctps::build(std::span<const double> biases) {
  Ctps c;
  const auto n = biases.size();
  c.biases_.assign(biases.begin(), biases.end());
  c.prefix_.resize(n + 1);
  c.cumulative_.resize(n + 1);
  c.prefix_[0] = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    const double b = biases[m];
    if (!std::isfinite(b) || b < 0) throw ValidationError("bias " + std::to_string(m) + " is negative or not finite");
    if (b > 0) ++c.selectable_;
    c.prefix_[m + 1] = c.prefix_[m] + b;
  }
  const double total = c.prefix_[n];
  if (!(total > 0)) throw DegeneratePoolError("every candidate bias is zero");
  for (std::size_t m = 0; m <= n; ++m) c.cumulative_[m] = std::min(1.0, c.prefix_[m] / total);
  c.cumulative_[n] = 1.0;
  return c;
}

std::size_t its_select(const Ctps& ctps, double r) {
  if (!(r >= 0.0 && r < 1.0)) throw ValidationError("random number must lie in [0, 1)");
  const auto f = ctps.cumulative();
  // First boundary strictly above r; its predecessor owns r. Zero-width regions are skipped.
  auto it = std::upper_bound(f.begin() + 1, f.end(), r);
  return static_cast<std::size_t>(it - f.begin()) - 1;
}

std::size_t SelectionBitmap::default_stride(std::size_t n) noexcept {
  return std::clamp<std::size_t>((n + 7) / 8, 1, 32);
}

SelectionBitmap::SelectionBitmap(std::size_t n, std::size_t stride) : n_(n), stride_(stride) {
  if (stride_ == 0) throw ValidationError("bitmap stride must be positive");
  const std::size_t group = stride_ * 8;
  words_ = ((n_ + group - 1) / group) * stride_;
  cells_ = std::make_unique<std::atomic<std::uint8_t>[]>(words_);
  for (std::size_t w = 0; w < words_; ++w) cells_[w].store(0, std::memory_order_relaxed);
}

SelectionBitmap::Location SelectionBitmap::location(std::size_t i) const {
  const std::size_t group = stride_ * 8;
  const std::size_t g = i / group;
  const std::size_t j = i % group;
  return {g * stride_ + j % stride_, static_cast<unsigned>(j / stride_)};
}

bool SelectionBitmap::test_and_set(std::size_t i) {
  if (i >= n_) throw BoundsError("bitmap index " + std::to_string(i) + " out of range");
  const auto [word, bit] = location(i);
  const auto mask = static_cast<std::uint8_t>(1u << bit);
  const auto old = cells_[word].fetch_or(mask, std::memory_order_acq_rel);
  const bool was_set = (old & mask) != 0;
  if (!was_set) set_count_.fetch_add(1, std::memory_order_acq_rel);
  return was_set;
}

bool SelectionBitmap::test(std::size_t i) const {
  if (i >= n_) throw BoundsError("bitmap index " + std::to_string(i) + " out of range");
  const auto [word, bit] = location(i);
  return (cells_[word].load(std::memory_order_acquire) >> bit) & 1u;
}

void SelectionBitmap::clear() {
  for (std::size_t w = 0; w < words_; ++w) cells_[w].store(0, std::memory_order_relaxed);
  set_count_.store(0, std::memory_order_release);
}

RemapTrace brs_remap(const Ctps& ctps, std::size_t taken, double r_prime) {
  if (!(r_prime >= 0.0 && r_prime < 1.0)) throw ValidationError("random number must lie in [0, 1)");
  if (taken >= ctps.size()) throw BoundsError("taken candidate out of range");
  const double l = ctps.lower(taken);
  const double h = ctps.upper(taken);
  const auto f = ctps.cumulative();
  const std::size_t n = ctps.size();

  RemapTrace t;
  t.delta = h - l;
  t.lambda = 1.0 / (1.0 - t.delta);
  t.scaled = r_prime / t.lambda;
  if (t.scaled < l) {
    t.branch = RemapTrace::Branch::Left;
    t.adjusted = t.scaled;
    auto it = std::upper_bound(f.begin() + 1, f.begin() + static_cast<std::ptrdiff_t>(taken) + 1, t.adjusted);
    t.candidate = static_cast<std::size_t>(it - f.begin()) - 1;
    return t;
  }
  t.branch = RemapTrace::Branch::Right;
  t.adjusted = std::min(t.scaled + t.delta, std::nextafter(1.0, 0.0));
  auto it = std::upper_bound(f.begin() + 1, f.end(), t.adjusted);
  std::size_t k = static_cast<std::size_t>(it - f.begin()) - 1;
  if (k <= taken) {
    // Rounding left the adjusted value inside [l, h); move to the next region of positive width.
    k = taken + 1;
    while (k < n && !(ctps.width(k) > 0)) ++k;
    if (k == n) k = taken;
  }
  t.candidate = k;
  return t;
}

namespace {

std::vector<std::size_t> taken_indices(const SelectionBitmap& bm) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < bm.size(); ++i)
    if (bm.test(i)) out.push_back(i);
  return out;
}

DrawOutcome oracle_fallback(const Ctps& ctps, SelectionBitmap& taken, UniformSource& rng, std::size_t retries) {
  for (;;) {
    const auto idx = updated_sampling_oracle(ctps.biases(), taken_indices(taken), rng.next());
    if (!taken.test_and_set(idx)) return {idx, retries};
    ++retries;  // a concurrent lane claimed it between the snapshot and the claim
  }
}

void check_not_exhausted(const SelectionBitmap& taken, const Ctps& ctps) {
  if (taken.size() != ctps.size()) throw ValidationError("bitmap size does not match the candidate pool");
  if (taken.set_count() >= taken.size()) throw ExhaustedPoolError("every candidate is already selected");
}

}  // namespace

DrawOutcome bipartite_region_search(const Ctps& ctps, SelectionBitmap& taken, UniformSource& rng) {
  check_not_exhausted(taken, ctps);
  const std::size_t cap = restart_cap(ctps.size());
  std::size_t retries = 0;
  for (;;) {
    const std::size_t hit = its_select(ctps, rng.next());
    if (!taken.test_and_set(hit)) return {hit, retries};
    const std::size_t pick = brs_remap(ctps, hit, rng.next()).candidate;
    if (pick != hit && !taken.test_and_set(pick)) return {pick, retries};
    if (++retries >= cap) return oracle_fallback(ctps, taken, rng, retries);
  }
}

DrawOutcome repeated_sampling(const Ctps& ctps, SelectionBitmap& taken, UniformSource& rng) {
  check_not_exhausted(taken, ctps);
  const std::size_t cap = restart_cap(ctps.size());
  std::size_t retries = 0;
  for (;;) {
    const std::size_t hit = its_select(ctps, rng.next());
    if (!taken.test_and_set(hit)) return {hit, retries};
    if (++retries >= cap) return oracle_fallback(ctps, taken, rng, retries);
  }
}

std::size_t updated_sampling_oracle(std::span<const double> biases, std::span<const std::size_t> taken, double r) {
  std::vector<double> survivors(biases.begin(), biases.end());
  for (auto i : taken) {
    if (i >= survivors.size()) throw BoundsError("taken index out of range");
    survivors[i] = 0.0;
  }
  return its_select(Ctps::build(survivors), r);
}

SelectionResult select(const Ctps& ctps, std::size_t k, UniformSource& rng, Replacement mode) {
  SelectionResult result;
  if (k == 0) return result;
  const std::size_t n = ctps.size();
  if (mode == Replacement::With) {
    result.chosen.reserve(k);
    for (std::size_t i = 0; i < k; ++i) result.chosen.push_back(its_select(ctps, rng.next()));
    return result;
  }
  if (k > n) throw ValidationError("cannot select " + std::to_string(k) + " of " + std::to_string(n) + " without replacement");
  if (k == n) {
    result.chosen.resize(n);
    std::iota(result.chosen.begin(), result.chosen.end(), std::size_t{0});
    return result;
  }
  if (k > ctps.selectable())
    throw ValidationError("only " + std::to_string(ctps.selectable()) + " candidates have positive bias");
  SelectionBitmap taken(n);
  result.chosen.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto d = bipartite_region_search(ctps, taken, rng);
    result.chosen.push_back(d.index);
    result.retries += d.retries;
  }
  return result;
}

SelectionResult select(std::size_t pool_size, std::size_t k, const std::function<double(std::size_t)>& bias_of,
                       UniformSource& rng, Replacement mode) {
  if (k == 0) return {};
  if (mode == Replacement::Without && k > pool_size)
    throw ValidationError("cannot select " + std::to_string(k) + " of " + std::to_string(pool_size) + " without replacement");
  if (mode == Replacement::Without && k == pool_size) {
    SelectionResult all;
    all.chosen.resize(pool_size);
    std::iota(all.chosen.begin(), all.chosen.end(), std::size_t{0});
    return all;
  }
  std::vector<double> biases(pool_size);
  for (std::size_t i = 0; i < pool_size; ++i) biases[i] = bias_of(i);
  return select(Ctps::build(biases), k, rng, mode);
}

SelectionResult select_concurrent(const Ctps& ctps, std::size_t k,
                                  const std::function<CounterStream(std::size_t lane)>& lane_stream, int threads) {
  SelectionResult result;
  if (k == 0) return result;
  if (k > ctps.selectable())
    throw ValidationError("only " + std::to_string(ctps.selectable()) + " candidates have positive bias");
  SelectionBitmap taken(ctps.size());
  result.chosen.resize(k);
  std::vector<std::size_t> retries(k, 0);
#pragma omp parallel for num_threads(threads) schedule(dynamic, 1)
  for (std::size_t lane = 0; lane < k; ++lane) {
    auto stream = lane_stream(lane);
    const auto d = bipartite_region_search(ctps, taken, stream);
    result.chosen[lane] = d.index;
    retries[lane] = d.retries;
  }
  result.retries = std::accumulate(retries.begin(), retries.end(), std::size_t{0});
  return result;
}

}  // namespace csaw
