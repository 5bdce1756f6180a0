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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "csaw/error.hpp"
#include "csaw/output.hpp"
#include "support.hpp"

using namespace csaw;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("csaw_output_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(WriteOutput, SingleEdgePerInstanceFile) {
  auto g = parse_edge_list("1 2\n", false);  // labels 1, 2 compact to 0, 1
  std::vector<SampleOutput> out(1);
  out[0].records.push_back({0, 1, 1, EventKind::Edge});
  const auto dir = scratch("per_instance");
  write_output(g, out, dir, OutputFormat::EdgeListPerInstance);
  EXPECT_EQ(slurp(dir / "instance_0.txt"), "1 2 1\n");
  fs::remove_all(dir);
}

TEST(WriteOutput, TaggedFileSkipsEvents) {
  auto g = fixture::path3();
  std::vector<SampleOutput> out(2);
  out[0].records = {{1, 0, 1, EventKind::Edge}, {0, 0, 2, EventKind::Stay}};
  out[1].records = {{2, 1, 1, EventKind::Edge}, {1, 2, 2, EventKind::Teleport}};
  const auto file = scratch("tagged.txt");
  write_output(g, out, file, OutputFormat::SingleFileTagged, 5);
  EXPECT_EQ(slurp(file), "5 1 0 1\n6 2 1 1\n");
  fs::remove(file);
}

TEST(WriteOutput, UnwritablePathIsIoError) {
  auto g = fixture::path3();
  std::vector<SampleOutput> out(1);
  EXPECT_THROW(write_output(g, out, "/nonexistent_dir/x/y.txt", OutputFormat::SingleFileTagged), IoError);
  const auto file = scratch("is_a_file");
  std::ofstream(file) << "x";
  EXPECT_THROW(write_output(g, out, file, OutputFormat::EdgeListPerInstance), IoError);
  fs::remove(file);
}

TEST(WriteOutput, FormatNames) {
  EXPECT_EQ(parse_output_format("edge-list-per-instance"), OutputFormat::EdgeListPerInstance);
  EXPECT_EQ(parse_output_format("single-file-tagged"), OutputFormat::SingleFileTagged);
  EXPECT_THROW(parse_output_format("csv"), ValidationError);
}

TEST(Report, TotalsAndLine) {
  std::vector<SampleOutput> out(2);
  out[0].records = {{0, 1, 1, EventKind::Edge}, {1, 1, 2, EventKind::Stay}};
  out[0].retries = 3;
  out[1].records = {{0, 1, 1, EventKind::Edge}, {1, 2, 2, EventKind::Edge}};
  auto r = RunReport::from_outputs(out, 0.5);
  EXPECT_EQ(r.sampled_edges_total, 3u);
  EXPECT_EQ(r.retries_total, 3u);
  EXPECT_DOUBLE_EQ(r.seps, 6.0);
  EXPECT_EQ(r.per_instance_edges, (std::vector<std::size_t>{1, 2}));
  r.algorithm = "mh-rw";
  r.mode = "ooc";
  r.transfer_count = 4;
  const auto line = r.to_line();
  EXPECT_EQ(line.find('\n'), std::string::npos);
  EXPECT_NE(line.find("sampled_edges_total=3"), std::string::npos);
  EXPECT_NE(line.find("transfer_count=4"), std::string::npos);
  std::ostringstream table;
  r.print_table(table);
  EXPECT_NE(table.str().find("partition transfers"), std::string::npos);
}

TEST(Report, ZeroTimeGivesZeroSeps) {
  std::vector<SampleOutput> out(1);
  EXPECT_EQ(RunReport::from_outputs(out, 0).seps, 0.0);
}
