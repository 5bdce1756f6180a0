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

// csaw command line: sample a graph in memory or out of memory, write the samples and a report.

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "csaw/algorithms.hpp"
#include "csaw/error.hpp"
#include "csaw/framework.hpp"
#include "csaw/graph.hpp"
#include "csaw/ooc.hpp"
#include "csaw/output.hpp"

namespace {

constexpr int kUsageError = 2;
constexpr int kRuntimeError = 1;

// Errors that are the caller's fault rather than the run's.
struct UsageError : csaw::Error {
  using csaw::Error::Error;
};

struct SampleArgs {
  std::string graph;
  bool directed = false;
  std::string algorithm;
  std::vector<std::string> params;
  std::size_t instances = 1;
  std::size_t depth = 2;
  std::size_t neighbor_size = 2;
  std::size_t frontier_size = 1;
  std::size_t walk_length = 0;
  std::uint64_t seed = 0;
  std::string seeds_file;
  std::size_t partitions = 4;
  std::size_t memory_budget = 2;
  std::size_t streams = 2;
  std::size_t workers = 1;
  bool ooc = false;
  std::string output;
  std::string output_format = "single-file-tagged";
  std::string report;
  bool table = false;
};

std::map<std::string, double> parse_params(const std::vector<std::string>& raw) {
  std::map<std::string, double> params;
  for (const auto& kv : raw) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--param expects K=V, got '" + kv + "'");
    const auto key = kv.substr(0, eq);
    const auto value = kv.substr(eq + 1);
    if (value == "true") {
      params[key] = 1;
    } else if (value == "false") {
      params[key] = 0;
    } else {
      std::size_t used = 0;
      double v = 0;
      try {
        v = std::stod(value, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != value.size()) throw UsageError("--param value for '" + key + "' is not a number");
      params[key] = v;
    }
  }
  return params;
}

// One line per instance of whitespace separated vertex labels; lines are reused cyclically when
// there are fewer lines than instances.
std::vector<std::vector<csaw::VertexId>> read_seeds_file(const std::string& path, const csaw::CsrGraph& g,
                                                         std::size_t instances) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read seeds file " + path);
  std::vector<std::vector<csaw::VertexId>> lines;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream s(line);
    std::vector<csaw::VertexId> seeds;
    std::string token;
    while (s >> token) {
      std::uint64_t label = 0;
      try {
        std::size_t used = 0;
        label = std::stoull(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
      } catch (const std::exception&) {
        throw csaw::ParseError("bad seed '" + token + "'", lineno);
      }
      const auto v = g.find_label(label);
      if (!v) throw csaw::ValidationError("seed vertex " + token + " is not in the graph");
      seeds.push_back(*v);
    }
    if (!seeds.empty()) lines.push_back(std::move(seeds));
  }
  if (lines.empty()) throw csaw::ValidationError("seeds file " + path + " lists no seeds");
  std::vector<std::vector<csaw::VertexId>> out(instances);
  for (std::size_t i = 0; i < instances; ++i) out[i] = lines[i % lines.size()];
  return out;
}

int run_sample(const SampleArgs& a) {
  csaw::CsrGraph g;
  try {
    g = csaw::load_graph(a.graph, a.directed);
  } catch (const csaw::IoError& e) {
    throw UsageError(e.what());
  }

  csaw::AlgorithmDescriptor algo;
  try {
    algo = csaw::make_algorithm(a.algorithm, parse_params(a.params));
  } catch (const csaw::ValidationError& e) {
    throw UsageError(e.what());
  }

  csaw::SamplingConfig base;
  base.instances = a.instances;
  base.depth = a.depth;
  base.neighbor_size = a.neighbor_size;
  base.frontier_size = a.frontier_size;
  base.seed = a.seed;
  if (algo.family == csaw::AlgorithmFamily::RandomWalk && a.walk_length > 0) base.depth = a.walk_length;
  const auto config = algo.configure(base);
  config.validate();

  const std::size_t per_instance = algo.seeds_fill_frontier ? config.frontier_size : 1;
  const auto seeds = a.seeds_file.empty() ? csaw::random_seeds(g, config.instances, per_instance, config.seed)
                                          : read_seeds_file(a.seeds_file, g, config.instances);

  if (a.ooc && !algo.ooc_supported) throw UsageError("algorithm " + algo.name + " runs in memory only");
  if (a.workers == 0) throw UsageError("--workers must be >= 1");

  csaw::RunReport report;
  std::vector<csaw::SampleOutput> outputs;
  std::optional<std::size_t> transfers;
  const auto t0 = std::chrono::steady_clock::now();
  if (a.ooc) {
    const auto parts = csaw::partition(g, a.partitions);
    csaw::OocOptions options;
    options.budget = a.memory_budget;
    options.streams = a.streams;
    auto grouped = csaw::run_worker_groups(g, parts, config, algo.spec, seeds, options, a.workers);
    outputs = std::move(grouped.outputs);
    std::size_t total = 0;
    for (const auto& r : grouped.residencies) total += r.transfer_count;
    transfers = total;
  } else {
    outputs.resize(seeds.size());
    for (const auto& [begin, end] : csaw::split_instances(seeds.size(), a.workers)) {
      if (begin == end) continue;
      auto part = csaw::run(g, config, algo.spec, std::span(seeds).subspan(begin, end - begin), begin);
      for (std::size_t i = 0; i < part.size(); ++i) outputs[begin + i] = std::move(part[i]);
    }
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  report = csaw::RunReport::from_outputs(outputs, wall);
  report.algorithm = algo.name;
  report.mode = a.ooc ? "ooc" : "in-memory";
  report.transfer_count = transfers;

  if (!a.output.empty()) csaw::write_output(g, outputs, a.output, csaw::parse_output_format(a.output_format));
  const auto line = report.to_line();
  if (!a.report.empty()) {
    std::ofstream out(a.report, std::ios::trunc);
    if (!out) throw csaw::IoError("cannot write report " + a.report);
    out << line << '\n';
  }
  std::cout << line << '\n';
  if (a.table) report.print_table(std::cout);
  return 0;
}

int run_convert(const std::string& input, const std::string& output, bool directed) {
  csaw::CsrGraph g;
  try {
    g = csaw::load_graph(input, directed);
  } catch (const csaw::IoError& e) {
    throw UsageError(e.what());
  }
  csaw::write_binary_cache(g, output);
  std::cout << "vertices=" << g.vertex_count() << " edges=" << g.edge_count() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"csaw: parallel graph sampling and random walks"};
  app.require_subcommand(1);

  SampleArgs a;
  auto* sample = app.add_subcommand("sample", "Run sampling or random-walk instances");
  sample->add_option("--graph", a.graph, "Edge list or binary cache")->required();
  sample->add_flag("--directed", a.directed, "Treat edges as directed");
  sample->add_option("--algorithm", a.algorithm, "Algorithm name")->required();
  sample->add_option("--param", a.params, "Algorithm parameter K=V (repeatable)");
  sample->add_option("--instances", a.instances, "Number of instances")->check(CLI::PositiveNumber);
  sample->add_option("--depth", a.depth, "Sampling depth")->check(CLI::PositiveNumber);
  sample->add_option("--neighbor-size", a.neighbor_size, "Neighbors per frontier vertex");
  sample->add_option("--frontier-size", a.frontier_size, "Frontier pool size")->check(CLI::PositiveNumber);
  sample->add_option("--walk-length", a.walk_length, "Walk length (random walks; overrides --depth)");
  sample->add_option("--seed", a.seed, "Master seed");
  sample->add_option("--seeds-file", a.seeds_file, "Seed vertices, one instance per line");
  sample->add_option("--partitions", a.partitions, "Partition count (out of memory)")->check(CLI::PositiveNumber);
  sample->add_option("--memory-budget", a.memory_budget, "Resident partitions (out of memory)")
      ->check(CLI::PositiveNumber);
  sample->add_option("--streams", a.streams, "Concurrent partition drains")->check(CLI::PositiveNumber);
  sample->add_option("--workers", a.workers, "Worker groups")->check(CLI::PositiveNumber);
  sample->add_flag("--ooc", a.ooc, "Out-of-memory execution");
  sample->add_option("--output", a.output, "Output file (tagged) or directory (per instance)");
  sample->add_option("--output-format", a.output_format, "edge-list-per-instance | single-file-tagged")
      ->check(CLI::IsMember({"edge-list-per-instance", "single-file-tagged"}));
  sample->add_option("--report", a.report, "Write the report line to this file");
  sample->add_flag("--table", a.table, "Also print a human readable table");

  std::string conv_in, conv_out;
  bool conv_directed = false;
  auto* convert = app.add_subcommand("convert", "Convert an edge list to the binary cache");
  convert->add_option("input", conv_in, "Edge list")->required();
  convert->add_option("output", conv_out, "Binary cache path")->required();
  convert->add_flag("--directed", conv_directed, "Treat edges as directed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsageError;
  }

  try {
    if (*sample) return run_sample(a);
    return run_convert(conv_in, conv_out, conv_directed);
  } catch (const UsageError& e) {
    std::cerr << "csaw: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "csaw: " << e.what() << '\n';
    return kRuntimeError;
  }
}
