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

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace csaw {

/// Source of uniform reals in [0, 1). Selection code only ever sees this interface, so tests can
/// script exact random numbers.
class UniformSource {
 public:
  virtual ~UniformSource() = default;
  virtual double next() = 0;
};

/// Philox4x32-10 (Salmon et al., SC'11). Each (key, counter) pair maps to four independent words.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;
  static Counter generate(Counter ctr, Key key);
};

/// Counter-based stream: the n-th draw is a pure function of (key, n), independent of who else
/// draws what and in which order.
class CounterStream final : public UniformSource {
 public:
  CounterStream(std::uint64_t key, std::uint32_t domain_hi, std::uint32_t domain_lo) noexcept;

  double next() override;
  std::uint64_t next_u64();

  /// Uniform integer in [0, bound); bound must be > 0.
  std::uint64_t next_below(std::uint64_t bound);

 private:
  void refill();

  Philox4x32::Key key_;
  std::uint32_t domain_hi_;
  std::uint32_t domain_lo_;
  std::uint32_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  unsigned used_ = 4;
};

/// Stream keyed by (master seed, instance, depth, slot). Identical keys always give identical
/// streams, regardless of scheduling order or worker count.
CounterStream instance_rng(std::uint64_t master_seed, std::uint32_t instance, std::uint32_t depth, std::uint64_t slot);

/// Replays a fixed list of numbers; throws once exhausted. For tests and worked examples.
class ScriptedSource final : public UniformSource {
 public:
  explicit ScriptedSource(std::vector<double> values) : values_(std::move(values)) {}
  double next() override;
  std::size_t consumed() const noexcept { return pos_; }

 private:
  std::vector<double> values_;
  std::size_t pos_ = 0;
};

}  // namespace csaw
