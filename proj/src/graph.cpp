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

#include "emkit/graph.hpp"

#include <algorithm>

namespace emkit {

std::vector<std::vector<std::int64_t>> Graph::adjacency() const {
  std::vector<std::vector<std::int64_t>> adj(static_cast<std::size_t>(V));
  for (const Edge& e : edges) {
    adj[static_cast<std::size_t>(e.u)].push_back(e.v);
    if (e.u != e.v) adj[static_cast<std::size_t>(e.v)].push_back(e.u);
  }
  return adj;
}

std::vector<std::int64_t> Graph::degrees() const {
  std::vector<std::int64_t> d(static_cast<std::size_t>(V), 0);
  for (const Edge& e : edges) {
    ++d[static_cast<std::size_t>(e.u)];
    ++d[static_cast<std::size_t>(e.v)];
  }
  return d;
}

std::int64_t Graph::max_degree() const {
  const auto d = degrees();
  return d.empty() ? 0 : *std::max_element(d.begin(), d.end());
}

}  // namespace emkit
