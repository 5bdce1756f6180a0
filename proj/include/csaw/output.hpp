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
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "csaw/framework.hpp"
#include "csaw/graph.hpp"

namespace csaw {

enum class OutputFormat { EdgeListPerInstance, SingleFileTagged };

/// "edge-list-per-instance" or "single-file-tagged"; throws ValidationError otherwise.
OutputFormat parse_output_format(std::string_view name);

/// Writes the Edge records of every output using original vertex labels.
/// Per-instance format: `path` is a directory holding instance_<i>.txt with "u v depth" lines.
/// Tagged format: `path` is one file with "instance u v depth" lines. Throws IoError.
void write_output(const CsrGraph& g, std::span<const SampleOutput> outputs, const std::filesystem::path& path,
                  OutputFormat format, InstanceId first_instance = 0);

struct RunReport {
  std::string algorithm;
  std::string mode;  // "in-memory" or "ooc"
  std::size_t instances = 0;
  std::size_t sampled_edges_total = 0;
  double wall_time = 0;  // seconds, sampling phase only
  double seps = 0;
  std::size_t retries_total = 0;
  std::optional<std::size_t> transfer_count;
  std::vector<std::size_t> per_instance_edges;

  static RunReport from_outputs(std::span<const SampleOutput> outputs, double wall_time);

  /// Single line "key=value ..." record. Per-instance counts are summarised (min/mean/max).
  std::string to_line() const;
  /// Human readable table.
  void print_table(std::ostream& out) const;
};

}  // namespace csaw
