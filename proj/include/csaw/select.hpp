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

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "csaw/random.hpp"

namespace csaw {

/// Cumulative transition probability space over one candidate pool.
///
/// For biases b_0..b_{n-1} the prefix array holds S_0 = 0, S_{m+1} = S_m + b_m and the
/// cumulative array holds F_m = S_m / S_n. Candidate k owns the half-open region
/// [F_k, F_{k+1}) whose width is its transition probability b_k / sum(b).
class Ctps {
 public:
  Ctps() = default;

  /// Throws ValidationError on a negative or non-finite bias and DegeneratePoolError when
  /// every bias is zero.
  static Ctps build(std::span<const double> biases);

  std::size_t size() const noexcept { return biases_.size(); }
  double bias(std::size_t k) const { return biases_[k]; }
  double total() const noexcept { return prefix_.empty() ? 0.0 : prefix_.back(); }
  std::span<const double> biases() const noexcept { return biases_; }
  std::span<const double> prefix() const noexcept { return prefix_; }
  std::span<const double> cumulative() const noexcept { return cumulative_; }

  double lower(std::size_t k) const { return cumulative_[k]; }
  double upper(std::size_t k) const { return cumulative_[k + 1]; }
  double width(std::size_t k) const { return cumulative_[k + 1] - cumulative_[k]; }

  /// Number of candidates with a strictly positive bias.
  std::size_t selectable() const noexcept { return selectable_; }

 private:
  std::vector<double> biases_;
  std::vector<double> prefix_;
  std::vector<double> cumulative_;
  std::size_t selectable_ = 0;
};

/// Binary search of r over the CTPS: returns k with F_k <= r < F_{k+1}. r must lie in [0, 1).
std::size_t its_select(const Ctps& ctps, double r);

/// Per-candidate selection flags, one bit each, interleaved across `stride` 8-bit words so that
/// adjacent candidates land in different words. test_and_set is atomic.
class SelectionBitmap {
 public:
  static std::size_t default_stride(std::size_t n) noexcept;

  explicit SelectionBitmap(std::size_t n) : SelectionBitmap(n, default_stride(n)) {}
  SelectionBitmap(std::size_t n, std::size_t stride);

  std::size_t size() const noexcept { return n_; }
  std::size_t stride() const noexcept { return stride_; }
  std::size_t word_count() const noexcept { return words_; }

  struct Location {
    std::size_t word;
    unsigned bit;
    friend bool operator==(const Location&, const Location&) = default;
  };
  Location location(std::size_t i) const;

  /// Sets bit i; returns whether it was already set. Throws BoundsError when i >= size().
  bool test_and_set(std::size_t i);
  bool test(std::size_t i) const;
  std::size_t set_count() const noexcept { return set_count_.load(std::memory_order_acquire); }
  void clear();

 private:
  std::size_t n_;
  std::size_t stride_;
  std::size_t words_;
  std::unique_ptr<std::atomic<std::uint8_t>[]> cells_;
  std::atomic<std::size_t> set_count_{0};
};

/// Trace of the random-number adjustment applied after a draw hits an already selected region.
struct RemapTrace {
  enum class Branch { Left, Right };
  double lambda = 0;    // 1 / (1 - (h - l))
  double delta = 0;     // h - l
  double scaled = 0;    // r' / lambda
  double adjusted = 0;  // value actually searched: scaled (left) or scaled + delta (right)
  Branch branch = Branch::Left;
  std::size_t candidate = 0;
};

/// Adjusts r' against the taken region of candidate `taken` and searches the left sub-space
/// (0, l) or the right sub-space (h, 1). For a single taken candidate the result equals
/// `updated_sampling_oracle` on the same r'. Returns `taken` itself only when no other
/// candidate has positive width on the chosen side.
RemapTrace brs_remap(const Ctps& ctps, std::size_t taken, double r_prime);

struct DrawOutcome {
  std::size_t index = 0;
  std::size_t retries = 0;
};

/// Upper bound on restarts per draw before falling back to the updated-sampling oracle.
inline std::size_t restart_cap(std::size_t n) noexcept { return 64 * n; }

/// Bipartite region search: draw r, search; on hitting a taken region, remap a fresh r' around
/// it; landing on another taken region restarts. The chosen bit is claimed in `taken`.
/// Throws ExhaustedPoolError when every candidate is already taken.
DrawOutcome bipartite_region_search(const Ctps& ctps, SelectionBitmap& taken, UniformSource& rng);

/// Naive baseline: redraw until an untaken candidate is hit. Same cap and fallback.
DrawOutcome repeated_sampling(const Ctps& ctps, SelectionBitmap& taken, UniformSource& rng);

/// Reference: zero the taken biases, rebuild the CTPS over the survivors and search r.
std::size_t updated_sampling_oracle(std::span<const double> biases, std::span<const std::size_t> taken, double r);

enum class Replacement { With, Without };

struct SelectionResult {
  std::vector<std::size_t> chosen;
  std::size_t retries = 0;
};

/// k draws from a prebuilt CTPS. Without replacement uses bipartite region search over a fresh
/// bitmap; with replacement draws independently. k == size() without replacement returns every
/// index in order.
SelectionResult select(const Ctps& ctps, std::size_t k, UniformSource& rng, Replacement mode);

/// Builds the CTPS once from bias_of(0..pool_size-1) and performs k selections.
SelectionResult select(std::size_t pool_size, std::size_t k, const std::function<double(std::size_t)>& bias_of,
                       UniformSource& rng, Replacement mode);

/// k concurrent lanes sharing one bitmap, each drawing from its own stream. Produces k distinct
/// indices under any interleaving; which indices depends on the interleaving.
SelectionResult select_concurrent(const Ctps& ctps, std::size_t k,
                                  const std::function<CounterStream(std::size_t lane)>& lane_stream,
                                  int threads);

}  // namespace csaw
