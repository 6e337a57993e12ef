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
#include <limits>
#include <vector>

#include "emkit/graph.hpp"

// Reference implementations used to check the external-memory and streaming
// algorithms. They favour obviousness over speed.
namespace emkit::oracle {

class UnionFind {
 public:
  explicit UnionFind(std::int64_t n = 0);
  std::int64_t find(std::int64_t x);
  bool unite(std::int64_t a, std::int64_t b);
  std::int64_t components() const { return comps_; }

 private:
  std::vector<std::int64_t> parent_;
  std::vector<std::int64_t> size_;
  std::int64_t comps_;
};

// Minimum spanning forest by Kruskal with (weight, id) order; returns edge ids.
std::vector<std::int64_t> kruskal(const Graph& g);
double kruskal_weight(const Graph& g);

// Component label of each vertex: the smallest vertex in its component.
std::vector<std::int64_t> component_labels(const Graph& g);
bool same_partition(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b);

// Number of edges with exactly one endpoint on the marked side.
std::int64_t cut_value(const Graph& g, const std::vector<char>& side);
// Global minimum cut of an unweighted multigraph (V >= 2).
std::int64_t stoer_wagner(const Graph& g);
// Minimum over all 2^(V-1) - 1 bipartitions; V <= 24.
std::int64_t exhaustive_mincut(const Graph& g);
bool is_connected(const Graph& g);

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Edge-weighted single-source shortest paths.
std::vector<double> dijkstra(const Graph& g, std::int64_t source);
// Hop distances; -1 for unreachable vertices.
std::vector<std::int64_t> bfs_levels(const Graph& g, std::int64_t source);

std::uint64_t count_inversions(std::vector<std::int64_t> a);

bool is_independent(const Graph& g, const std::vector<char>& in_set);
bool is_maximal_independent(const Graph& g, const std::vector<char>& in_set);
bool is_proper_colouring(const Graph& g, const std::vector<std::int64_t>& colour);
bool is_matching(const Graph& g, const std::vector<std::int64_t>& edge_ids);
bool is_maximal_matching(const Graph& g, const std::vector<std::int64_t>& edge_ids);
// Maximum matching size by subset dynamic programming; V <= 20.
std::int64_t max_matching_size(const Graph& g);
bool is_vertex_cover(const Graph& g, const std::vector<char>& cover);
// Minimum weight vertex cover by exhaustive search; V <= 20.
std::int64_t min_vertex_cover_weight(const Graph& g, const std::vector<std::int64_t>& weight);

// Intervals [left, right] with weights, for the interval-graph oracles.
struct RawInterval {
  double left = 0;
  double right = 0;
  double weight = 0;
};
Graph overlap_graph(const std::vector<RawInterval>& iv);
std::int64_t max_overlap(const std::vector<RawInterval>& iv);
// Shortest paths where a path's length is the sum of its interval weights.
std::vector<double> vertex_weighted_dijkstra(const std::vector<RawInterval>& iv, std::int64_t source);

}  // namespace emkit::oracle
