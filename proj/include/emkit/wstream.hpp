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
#include <string>
#include <vector>

#include "emkit/graph.hpp"

namespace emkit {

enum class Tag : std::uint8_t { key, node, arc, vertex, edge, palette, delta, best, result };

// One record on a tape. Field meaning depends on the tag and the algorithm;
// every record is a constant number of words.
struct StreamItem {
  Tag tag = Tag::key;
  std::uint8_t role = 0;
  std::uint8_t kind = 0;
  std::int64_t id = 0;
  std::int64_t u = 0;
  std::int64_t v = 0;
  std::int64_t pred = -1;
  std::int64_t succ = -1;
  std::int64_t w = 0;
  std::int64_t h = 0;
  std::int64_t r = 0;
  std::int64_t aux = 0;
  std::int64_t aux2 = 0;
  std::int64_t run = 0;
  std::int64_t mark = 0;
  double x = 0;
};

struct WsOptions {
  std::size_t M = 1024;         // working memory, in records
  std::size_t cap_factor = 8;   // output tape length <= cap_factor * N
  bool strict = true;           // throw BudgetError on a memory breach
  std::uint64_t seed = 1;
};

struct PassReport {
  std::string algo;
  std::size_t N = 0, V = 0, E = 0, M = 0;
  std::size_t passes = 0;
  std::size_t items_written = 0;
  std::size_t peak_live = 0;
  std::size_t breaches = 0;
  std::uint64_t comparisons = 0;

  static std::string csv_header();  // algo,N,V,E,M,passes,items_written
  std::string csv_row() const;
};

// The W-Stream machine: each pass reads the input tape front to back while
// writing a new tape, which becomes the input of the next pass. Working
// memory is accounted in records held between reads.
class TapeMachine {
 public:
  explicit TapeMachine(WsOptions opt);

  // N is the input length, or n_hint when the prepared stream is larger.
  void load(std::vector<StreamItem> input, std::size_t n_hint = 0);
  const std::vector<StreamItem>& tape() const { return in_; }
  std::size_t N() const { return n_; }
  std::size_t M() const { return opt_.M; }

  void begin_pass();
  bool read(StreamItem& item);
  void write(const StreamItem& item);
  void end_pass();
  template <class F>
  void pass(F&& f) {
    begin_pass();
    StreamItem it;
    while (read(it)) f(it);
    end_pass();
  }
  // Passes spent on preparation steps that are not simulated record by record.
  void charge_passes(std::size_t n) { passes_ += n; }

  void hold(std::size_t n = 1);
  void drop(std::size_t n = 1);
  std::size_t live() const { return live_; }
  std::size_t peak() const { return peak_; }
  std::size_t breaches() const { return breaches_; }
  std::size_t passes() const { return passes_; }
  std::size_t items_written() const { return written_; }
  std::int64_t next_epoch() { return ++epoch_; }
  std::uint64_t& comparisons() { return comparisons_; }

  PassReport report(std::string algo, std::size_t V = 0, std::size_t E = 0) const;

 private:
  WsOptions opt_;
  std::vector<StreamItem> in_, out_;
  std::size_t pos_ = 0;
  std::size_t n_ = 0;
  bool in_pass_ = false;
  std::size_t live_ = 0, peak_ = 0, breaches_ = 0;
  std::size_t passes_ = 0, written_ = 0;
  std::int64_t epoch_ = 0;
  std::uint64_t comparisons_ = 0;
};

struct SortResult {
  std::vector<std::int64_t> keys;
  PassReport report;
};
// Run formation, then merge phases that move M/2 records of each run of a
// pair into the pair's merged run per pass.
SortResult ws_sort(const std::vector<std::int64_t>& keys, WsOptions opt = {});

struct RankResult {
  std::vector<std::int64_t> rank;  // sum of weights strictly before the node
  PassReport report;
};
// Splices segments of M nodes out of the list, ranks the rest in memory and
// splices the segments back in reverse order. `succ` may describe several
// lists; a cycle is MalformedInput.
RankResult ws_list_rank(const std::vector<std::int64_t>& succ, WsOptions opt = {},
                        const std::vector<std::int64_t>& weight = {});

struct TourArc {
  std::int64_t u = 0, v = 0;
  std::int64_t next = -1;  // index into arcs; -1 ends the tour
};
struct TourResult {
  std::vector<TourArc> arcs;
  std::int64_t first = -1;
  PassReport report;
};
TourResult ws_euler_tour(const Graph& tree, std::int64_t root, WsOptions opt = {});

struct TreeLabels {
  std::vector<std::int64_t> values;
  PassReport report;
};
TreeLabels ws_root_tree(const Graph& tree, std::int64_t root, WsOptions opt = {});

enum class LabelMode { preorder, postorder, depth, descendants };
// Preorder and postorder numbers start at 1.
TreeLabels ws_label_tree(const Graph& tree, std::int64_t root, LabelMode mode, WsOptions opt = {});

enum class ExprOp : std::uint8_t { leaf, add, mul, min, max };
struct ExprNode {
  std::int64_t parent = -1;
  ExprOp op = ExprOp::leaf;
  double value = 0;  // leaves only
};
struct ExprResult {
  std::vector<double> values;
  PassReport report;
};
ExprResult ws_expr_eval(const std::vector<ExprNode>& nodes, WsOptions opt = {});

enum class Repr { adjacency, edges };

struct VertexSet {
  std::vector<char> in;
  PassReport report;
};
VertexSet ws_mis(const Graph& g, Repr repr, WsOptions opt = {});

struct WsColouring {
  std::vector<std::int64_t> colour;  // 1-based
  PassReport report;
};
WsColouring ws_colouring(const Graph& g, Repr repr, WsOptions opt = {});

struct WsMatching {
  std::vector<std::int64_t> edge_ids;
  PassReport report;
};
WsMatching ws_maximal_matching(const Graph& g, WsOptions opt = {});

struct WsCover {
  std::vector<char> in;
  std::int64_t weight = 0;
  PassReport report;
};
// Local-ratio cover; weights must be positive integers.
WsCover ws_vertex_cover(const Graph& g, const std::vector<std::int64_t>& weight, WsOptions opt = {});

struct StreamDijkstraResult {
  std::vector<std::vector<std::int64_t>> units;   // [j][v], -1 when not reached
  std::vector<std::vector<double>> length;        // true length of the path found
  std::vector<std::vector<std::int64_t>> parent;  // [j][v]
  PassReport report;
};
// Bounded multi-source Dijkstra over the tape from every vertex of A. Edge
// weights must be non-negative integers; exploration stops beyond `horizon`.
StreamDijkstraResult stream_dijkstra(const Graph& g, const std::vector<std::int64_t>& A, std::int64_t horizon,
                                     WsOptions opt = {});

// beta * ceil(w / beta), with zero weights raised to beta.
double ws_rounded_weight(double w, double beta);

struct ApproxPaths {
  std::vector<double> dist;        // length of the reported path, inf if none
  std::vector<std::int64_t> via;   // sample vertex the path ends through
  std::vector<std::int64_t> sample;
  std::vector<std::vector<double>> best;          // [j][v]
  std::vector<std::vector<std::int64_t>> hop;     // [j][v]
  std::vector<std::int64_t> aux_parent;           // shortest-path tree on the sample
  std::int64_t source = 0;
  PassReport report;

  // Vertex sequence of the reported path from the source to v.
  std::vector<std::int64_t> path(std::int64_t v) const;
};
ApproxPaths ws_sssp_approx(const Graph& g, std::int64_t source, double epsilon, double alpha, WsOptions opt = {});

}  // namespace emkit
