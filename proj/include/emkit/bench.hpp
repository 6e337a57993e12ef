// Copyright 2026 The emkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "emkit/graph.hpp"
#include "emkit/interval.hpp"

namespace emkit {

enum class GraphKind { random_gnm, cycle, complete, grid, tree, interval_random, list_random };

GraphKind parse_graph_kind(const std::string& name);
std::string graph_kind_name(GraphKind k);

struct GraphSpec {
  GraphKind kind = GraphKind::random_gnm;
  std::int64_t V = 0;        // vertices, intervals or list nodes; grid uses rows * cols
  std::int64_t E = 0;        // random-gnm only
  std::int64_t rows = 0, cols = 0;
  std::int64_t max_weight = 1;
  bool connected = false;    // random-gnm: retry until connected
  std::uint64_t seed = 1;
};

struct Generated {
  Graph graph;
  std::vector<Interval> intervals;
  std::vector<std::int64_t> succ;
  std::size_t attempts = 1;
};

// Deterministic in (kind, params, seed). Throws SpecError for impossible
// parameters, such as more edges than a simple graph can hold.
Generated generate(const GraphSpec& spec);

// Edge-list text: optional header `p edge V E`, then `u v [w]` per line with
// 0-based ids. Lines starting with `#` or `c` are comments. Without a header
// V is one more than the largest id.
Graph read_graph(std::istream& in);
Graph read_graph_file(const std::string& path);
void write_graph(std::ostream& out, const Graph& g);

// One `left right weight` triple per line.
void write_intervals(std::ostream& out, const std::vector<Interval>& iv);
// One successor per line, -1 at a tail.
void write_list(std::ostream& out, const std::vector<std::int64_t>& succ);
std::vector<std::int64_t> read_list(std::istream& in);

enum class Verdict { pass, fail, skipped };
std::string verdict_name(Verdict v);

struct ReportRow {
  std::string algorithm;
  std::string params;
  std::string result;
  double measured = 0;  // I/Os or passes
  double bound = 0;     // the matching asymptotic expression, constants dropped
  Verdict verdict = Verdict::skipped;
  double wall_ms = 0;

  double ratio() const { return bound > 0 ? measured / bound : 0; }
};

// CSV with a fixed column order, then one summary line per algorithm with
// the smallest and largest measured/bound ratio.
void write_report(std::ostream& out, const std::vector<ReportRow>& rows, bool with_wall_time = true);

}  // namespace emkit
