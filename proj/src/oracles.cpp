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

#include "emkit/oracles.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <utility>

namespace emkit::oracle {

UnionFind::UnionFind(std::int64_t n)
    : parent_(static_cast<std::size_t>(n)), size_(static_cast<std::size_t>(n), 1), comps_(n) {
  std::iota(parent_.begin(), parent_.end(), 0);
}

std::int64_t UnionFind::find(std::int64_t x) {
  while (parent_[static_cast<std::size_t>(x)] != x) {
    auto& p = parent_[static_cast<std::size_t>(x)];
    p = parent_[static_cast<std::size_t>(p)];
    x = p;
  }
  return x;
}

bool UnionFind::unite(std::int64_t a, std::int64_t b) {
  a = find(a);
  b = find(b);
  if (a == b) return false;
  if (size_[static_cast<std::size_t>(a)] < size_[static_cast<std::size_t>(b)]) std::swap(a, b);
  parent_[static_cast<std::size_t>(b)] = a;
  size_[static_cast<std::size_t>(a)] += size_[static_cast<std::size_t>(b)];
  --comps_;
  return true;
}

std::vector<std::int64_t> kruskal(const Graph& g) {
  std::vector<Edge> es = g.edges;
  std::sort(es.begin(), es.end(), edge_lighter);
  UnionFind uf(g.V);
  std::vector<std::int64_t> out;
  for (const Edge& e : es)
    if (uf.unite(e.u, e.v)) out.push_back(e.id);
  return out;
}

double kruskal_weight(const Graph& g) {
  std::vector<double> w(g.edges.size());
  for (const Edge& e : g.edges) w[static_cast<std::size_t>(e.id)] = e.w;
  double total = 0;
  for (auto id : kruskal(g)) total += w[static_cast<std::size_t>(id)];
  return total;
}

std::vector<std::int64_t> component_labels(const Graph& g) {
  UnionFind uf(g.V);
  for (const Edge& e : g.edges) uf.unite(e.u, e.v);
  std::vector<std::int64_t> label(static_cast<std::size_t>(g.V), -1);
  std::vector<std::int64_t> root_min(static_cast<std::size_t>(g.V), -1);
  for (std::int64_t v = 0; v < g.V; ++v) {
    auto& m = root_min[static_cast<std::size_t>(uf.find(v))];
    if (m < 0) m = v;
  }
  for (std::int64_t v = 0; v < g.V; ++v)
    label[static_cast<std::size_t>(v)] = root_min[static_cast<std::size_t>(uf.find(v))];
  return label;
}

bool same_partition(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
  if (a.size() != b.size()) return false;
  std::map<std::int64_t, std::int64_t> ab, ba;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto [x, fresh_x] = ab.emplace(a[i], b[i]);
    auto [y, fresh_y] = ba.emplace(b[i], a[i]);
    if (x->second != b[i] || y->second != a[i]) return false;
  }
  return true;
}

std::int64_t cut_value(const Graph& g, const std::vector<char>& side) {
  std::int64_t c = 0;
  for (const Edge& e : g.edges)
    if (side[static_cast<std::size_t>(e.u)] != side[static_cast<std::size_t>(e.v)]) ++c;
  return c;
}

std::int64_t stoer_wagner(const Graph& g) {
  const std::size_t n = static_cast<std::size_t>(g.V);
  if (n < 2) return 0;
  std::vector<std::vector<std::int64_t>> w(n, std::vector<std::int64_t>(n, 0));
  for (const Edge& e : g.edges) {
    if (e.u == e.v) continue;
    ++w[static_cast<std::size_t>(e.u)][static_cast<std::size_t>(e.v)];
    ++w[static_cast<std::size_t>(e.v)][static_cast<std::size_t>(e.u)];
  }
  std::vector<std::size_t> alive(n);
  std::iota(alive.begin(), alive.end(), 0);
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  while (alive.size() > 1) {
    std::vector<std::int64_t> conn(n, 0);
    std::vector<char> added(n, 0);
    std::size_t prev = alive[0], last = alive[0];
    for (std::size_t step = 0; step < alive.size(); ++step) {
      std::size_t pick = n;
      for (std::size_t v : alive)
        if (!added[v] && (pick == n || conn[v] > conn[pick])) pick = v;
      added[pick] = 1;
      prev = last;
      last = pick;
      if (step + 1 == alive.size()) best = std::min(best, conn[pick]);
      for (std::size_t v : alive)
        if (!added[v]) conn[v] += w[pick][v];
    }
    for (std::size_t v : alive) {
      w[prev][v] += w[last][v];
      w[v][prev] = w[prev][v];
    }
    w[prev][prev] = 0;
    alive.erase(std::find(alive.begin(), alive.end(), last));
  }
  return best;
}

std::int64_t exhaustive_mincut(const Graph& g) {
  const std::int64_t n = g.V;
  if (n < 2) return 0;
  if (n > 24) throw std::invalid_argument("exhaustive_mincut: V too large");
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  // Vertex 0 stays on the unmarked side.
  for (std::uint64_t mask = 1; mask < (1ULL << (n - 1)); ++mask) {
    std::int64_t c = 0;
    for (const Edge& e : g.edges) {
      const bool a = e.u != 0 && ((mask >> (e.u - 1)) & 1ULL);
      const bool b = e.v != 0 && ((mask >> (e.v - 1)) & 1ULL);
      c += a != b;
    }
    best = std::min(best, c);
  }
  return best;
}

bool is_connected(const Graph& g) {
  if (g.V <= 1) return true;
  UnionFind uf(g.V);
  for (const Edge& e : g.edges) uf.unite(e.u, e.v);
  return uf.components() == 1;
}

std::vector<double> dijkstra(const Graph& g, std::int64_t source) {
  std::vector<std::vector<std::pair<std::int64_t, double>>> adj(static_cast<std::size_t>(g.V));
  for (const Edge& e : g.edges) {
    adj[static_cast<std::size_t>(e.u)].push_back({e.v, e.w});
    adj[static_cast<std::size_t>(e.v)].push_back({e.u, e.w});
  }
  std::vector<double> d(static_cast<std::size_t>(g.V), kInf);
  using Item = std::pair<double, std::int64_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  d[static_cast<std::size_t>(source)] = 0;
  pq.push({0, source});
  while (!pq.empty()) {
    auto [du, u] = pq.top();
    pq.pop();
    if (du > d[static_cast<std::size_t>(u)]) continue;
    for (auto [v, w] : adj[static_cast<std::size_t>(u)]) {
      if (du + w < d[static_cast<std::size_t>(v)]) {
        d[static_cast<std::size_t>(v)] = du + w;
        pq.push({du + w, v});
      }
    }
  }
  return d;
}

std::vector<std::int64_t> bfs_levels(const Graph& g, std::int64_t source) {
  const auto adj = g.adjacency();
  std::vector<std::int64_t> lvl(static_cast<std::size_t>(g.V), -1);
  std::queue<std::int64_t> q;
  lvl[static_cast<std::size_t>(source)] = 0;
  q.push(source);
  while (!q.empty()) {
    const auto u = q.front();
    q.pop();
    for (auto v : adj[static_cast<std::size_t>(u)]) {
      if (lvl[static_cast<std::size_t>(v)] < 0) {
        lvl[static_cast<std::size_t>(v)] = lvl[static_cast<std::size_t>(u)] + 1;
        q.push(v);
      }
    }
  }
  return lvl;
}

namespace {
std::uint64_t merge_count(std::vector<std::int64_t>& a, std::vector<std::int64_t>& tmp,
                          std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = (lo + hi) / 2;
  std::uint64_t inv = merge_count(a, tmp, lo, mid) + merge_count(a, tmp, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (a[j] < a[i]) {
      inv += mid - i;
      tmp[k++] = a[j++];
    } else {
      tmp[k++] = a[i++];
    }
  }
  while (i < mid) tmp[k++] = a[i++];
  while (j < hi) tmp[k++] = a[j++];
  std::copy(tmp.begin() + static_cast<std::ptrdiff_t>(lo), tmp.begin() + static_cast<std::ptrdiff_t>(hi),
            a.begin() + static_cast<std::ptrdiff_t>(lo));
  return inv;
}
}  // namespace

std::uint64_t count_inversions(std::vector<std::int64_t> a) {
  std::vector<std::int64_t> tmp(a.size());
  return merge_count(a, tmp, 0, a.size());
}

bool is_independent(const Graph& g, const std::vector<char>& in_set) {
  for (const Edge& e : g.edges)
    if (in_set[static_cast<std::size_t>(e.u)] && in_set[static_cast<std::size_t>(e.v)]) return false;
  return true;
}

bool is_maximal_independent(const Graph& g, const std::vector<char>& in_set) {
  if (!is_independent(g, in_set)) return false;
  std::vector<char> dominated(in_set.begin(), in_set.end());
  for (const Edge& e : g.edges) {
    if (in_set[static_cast<std::size_t>(e.u)]) dominated[static_cast<std::size_t>(e.v)] = 1;
    if (in_set[static_cast<std::size_t>(e.v)]) dominated[static_cast<std::size_t>(e.u)] = 1;
  }
  return std::all_of(dominated.begin(), dominated.end(), [](char c) { return c != 0; });
}

bool is_proper_colouring(const Graph& g, const std::vector<std::int64_t>& colour) {
  for (const Edge& e : g.edges)
    if (colour[static_cast<std::size_t>(e.u)] == colour[static_cast<std::size_t>(e.v)]) return false;
  return true;
}

bool is_matching(const Graph& g, const std::vector<std::int64_t>& edge_ids) {
  std::vector<char> used(static_cast<std::size_t>(g.V), 0);
  for (auto id : edge_ids) {
    const Edge& e = g.edges[static_cast<std::size_t>(id)];
    if (e.u == e.v || used[static_cast<std::size_t>(e.u)] || used[static_cast<std::size_t>(e.v)])
      return false;
    used[static_cast<std::size_t>(e.u)] = used[static_cast<std::size_t>(e.v)] = 1;
  }
  return true;
}

bool is_maximal_matching(const Graph& g, const std::vector<std::int64_t>& edge_ids) {
  if (!is_matching(g, edge_ids)) return false;
  std::vector<char> used(static_cast<std::size_t>(g.V), 0);
  for (auto id : edge_ids) {
    const Edge& e = g.edges[static_cast<std::size_t>(id)];
    used[static_cast<std::size_t>(e.u)] = used[static_cast<std::size_t>(e.v)] = 1;
  }
  for (const Edge& e : g.edges)
    if (e.u != e.v && !used[static_cast<std::size_t>(e.u)] && !used[static_cast<std::size_t>(e.v)])
      return false;
  return true;
}

std::int64_t max_matching_size(const Graph& g) {
  const std::int64_t n = g.V;
  if (n > 20) throw std::invalid_argument("max_matching_size: V too large");
  std::vector<std::uint32_t> nbr(static_cast<std::size_t>(n), 0);
  for (const Edge& e : g.edges)
    if (e.u != e.v) {
      nbr[static_cast<std::size_t>(e.u)] |= 1U << e.v;
      nbr[static_cast<std::size_t>(e.v)] |= 1U << e.u;
    }
  // best[mask] = maximum matching using only vertices in mask.
  std::vector<std::int8_t> best(1ULL << n, 0);
  for (std::uint32_t mask = 1; mask < (1U << n); ++mask) {
    const int v = __builtin_ctz(mask);
    const std::uint32_t rest = mask & ~(1U << v);
    std::int8_t b = best[rest];
    for (std::uint32_t cand = nbr[static_cast<std::size_t>(v)] & rest; cand; cand &= cand - 1) {
      const int u = __builtin_ctz(cand);
      b = std::max<std::int8_t>(b, static_cast<std::int8_t>(1 + best[rest & ~(1U << u)]));
    }
    best[mask] = b;
  }
  return best[(1U << n) - 1];
}

bool is_vertex_cover(const Graph& g, const std::vector<char>& cover) {
  for (const Edge& e : g.edges)
    if (!cover[static_cast<std::size_t>(e.u)] && !cover[static_cast<std::size_t>(e.v)]) return false;
  return true;
}

std::int64_t min_vertex_cover_weight(const Graph& g, const std::vector<std::int64_t>& weight) {
  const std::int64_t n = g.V;
  if (n > 20) throw std::invalid_argument("min_vertex_cover_weight: V too large");
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
    bool ok = true;
    for (const Edge& e : g.edges)
      if (!((mask >> e.u) & 1U) && !((mask >> e.v) & 1U)) {
        ok = false;
        break;
      }
    if (!ok) continue;
    std::int64_t w = 0;
    for (std::int64_t v = 0; v < n; ++v)
      if ((mask >> v) & 1U) w += weight[static_cast<std::size_t>(v)];
    best = std::min(best, w);
  }
  return best;
}

Graph overlap_graph(const std::vector<RawInterval>& iv) {
  Graph g;
  g.V = static_cast<std::int64_t>(iv.size());
  for (std::size_t i = 0; i < iv.size(); ++i)
    for (std::size_t j = i + 1; j < iv.size(); ++j)
      if (iv[i].left <= iv[j].right && iv[j].left <= iv[i].right)
        g.add_edge(static_cast<std::int64_t>(i), static_cast<std::int64_t>(j));
  return g;
}

std::int64_t max_overlap(const std::vector<RawInterval>& iv) {
  std::int64_t best = 0;
  for (std::size_t i = 0; i < iv.size(); ++i) {
    // Some maximum clique contains the point iv[i].left.
    std::int64_t c = 0;
    for (const auto& o : iv)
      if (o.left <= iv[i].left && iv[i].left <= o.right) ++c;
    best = std::max(best, c);
  }
  return best;
}

std::vector<double> vertex_weighted_dijkstra(const std::vector<RawInterval>& iv, std::int64_t source) {
  Graph g = overlap_graph(iv);
  // Directed weights: entering j costs w(j). Fold into an edge-weighted search.
  const std::size_t n = iv.size();
  std::vector<std::vector<std::int64_t>> adj = g.adjacency();
  std::vector<double> d(n, kInf);
  using Item = std::pair<double, std::int64_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  d[static_cast<std::size_t>(source)] = iv[static_cast<std::size_t>(source)].weight;
  pq.push({d[static_cast<std::size_t>(source)], source});
  while (!pq.empty()) {
    auto [du, u] = pq.top();
    pq.pop();
    if (du > d[static_cast<std::size_t>(u)]) continue;
    for (auto v : adj[static_cast<std::size_t>(u)]) {
      const double nd = du + iv[static_cast<std::size_t>(v)].weight;
      if (nd < d[static_cast<std::size_t>(v)]) {
        d[static_cast<std::size_t>(v)] = nd;
        pq.push({nd, v});
      }
    }
  }
  return d;
}

}  // namespace emkit::oracle
