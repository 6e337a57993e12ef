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
#include <vector>

namespace emkit {

// Undirected edge with a stable id. Ties between equal weights are broken by
// id everywhere, which makes every weight distinct.
struct Edge {
  std::int64_t u = 0;
  std::int64_t v = 0;
  double w = 1.0;
  std::int64_t id = 0;
};

inline bool edge_lighter(const Edge& a, const Edge& b) {
  return a.w != b.w ? a.w < b.w : a.id < b.id;
}

struct Graph {
  std::int64_t V = 0;
  std::vector<Edge> edges;

  std::int64_t E() const { return static_cast<std::int64_t>(edges.size()); }
  void add_edge(std::int64_t u, std::int64_t v, double w = 1.0) {
    edges.push_back({u, v, w, static_cast<std::int64_t>(edges.size())});
  }
  std::vector<std::vector<std::int64_t>> adjacency() const;  // neighbour lists, multi-edges kept
  std::vector<std::int64_t> degrees() const;
  std::int64_t max_degree() const;
};

}  // namespace emkit
