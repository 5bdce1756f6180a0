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

#include "csaw/output.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>

#include "csaw/error.hpp"

namespace csaw {

OutputFormat parse_output_format(std::string_view name) {
  if (name == "edge-list-per-instance") return OutputFormat::EdgeListPerInstance;
  if (name == "single-file-tagged") return OutputFormat::SingleFileTagged;
  throw ValidationError("unknown output format '" + std::string(name) + "'");
}

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

void write_output(const CsrGraph& g, std::span<const SampleOutput> outputs, const std::filesystem::path& path,
                  OutputFormat format, InstanceId first_instance) {
  if (format == OutputFormat::SingleFileTagged) {
    auto out = open_for_write(path);
    for (std::size_t i = 0; i < outputs.size(); ++i)
      for (const auto& r : outputs[i].records)
        if (r.kind == EventKind::Edge)
          out << (first_instance + i) << ' ' << g.label(r.source) << ' ' << g.label(r.target) << ' ' << r.depth
              << '\n';
    finish(out, path);
    return;
  }
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec || !std::filesystem::is_directory(path)) throw IoError("cannot create directory " + path.string());
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    const auto file = path / ("instance_" + std::to_string(first_instance + i) + ".txt");
    auto out = open_for_write(file);
    for (const auto& r : outputs[i].records)
      if (r.kind == EventKind::Edge) out << g.label(r.source) << ' ' << g.label(r.target) << ' ' << r.depth << '\n';
    finish(out, file);
  }
}

RunReport RunReport::from_outputs(std::span<const SampleOutput> outputs, double wall_time) {
  RunReport r;
  r.instances = outputs.size();
  r.wall_time = wall_time;
  r.per_instance_edges.reserve(outputs.size());
  for (const auto& o : outputs) {
    r.per_instance_edges.push_back(o.edge_count());
    r.sampled_edges_total += o.edge_count();
    r.retries_total += o.retries;
  }
  r.seps = wall_time > 0 ? static_cast<double>(r.sampled_edges_total) / wall_time : 0.0;
  return r;
}

std::string RunReport::to_line() const {
  std::ostringstream s;
  s << std::setprecision(6);
  s << "algorithm=" << algorithm << " mode=" << mode << " instances=" << instances
    << " sampled_edges_total=" << sampled_edges_total << " wall_time=" << wall_time << " seps=" << seps
    << " retries_total=" << retries_total;
  if (transfer_count) s << " transfer_count=" << *transfer_count;
  if (!per_instance_edges.empty()) {
    const auto [lo, hi] = std::minmax_element(per_instance_edges.begin(), per_instance_edges.end());
    s << " edges_per_instance_min=" << *lo << " edges_per_instance_mean="
      << static_cast<double>(sampled_edges_total) / static_cast<double>(per_instance_edges.size())
      << " edges_per_instance_max=" << *hi;
  }
  return s.str();
}

void RunReport::print_table(std::ostream& out) const {
  auto row = [&](std::string_view k, const auto& v) { out << std::left << std::setw(22) << k << v << '\n'; };
  row("algorithm", algorithm);
  row("mode", mode);
  row("instances", instances);
  row("sampled edges", sampled_edges_total);
  row("wall time (s)", wall_time);
  row("SEPS", seps);
  row("retries", retries_total);
  if (transfer_count) row("partition transfers", *transfer_count);
}

}  // namespace csaw
