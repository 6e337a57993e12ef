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

#include "emkit/em_mincut.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include "emkit/em_core.hpp"
#include "emkit/em_mst.hpp"
#include "emkit/emsh.hpp"
#include "emkit/errors.hpp"

namespace emkit {

namespace {

constexpr std::int64_t kNoCut = std::numeric_limits<std::int64_t>::max();

std::int64_t ceil_log2(std::uint64_t x) {
  std::int64_t r = 0;
  while ((std::uint64_t{1} << r) < x) ++r;
  return r;
}

void require_connected(const Graph& g, BlockDevice& dev) {
  if (g.V < 2) throw PreconditionError("minimum cut needs at least two vertices");
  auto lab = connected_components(g, dev);
  for (auto l : lab)
    if (l != lab.front()) throw DisconnectedGraph("graph is not connected");
}

std::unordered_map<std::int64_t, std::size_t> index_by_id(const Graph& g) {
  std::unordered_map<std::int64_t, std::size_t> m;
  m.reserve(g.edges.size());
  for (std::size_t i = 0; i < g.edges.size(); ++i) m.emplace(g.edges[i].id, i);
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// Tree packing

TreePacking greedy_tree_packing(const Graph& g, double epsilon, BlockDevice& dev) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ValidationError("epsilon must lie in (0, 1)");
  require_connected(g, dev);
  std::int64_t e = 0;
  for (const Edge& x : g.edges) e += x.u != x.v;
  TreePacking p;
  p.epsilon = epsilon;
  const std::int64_t L = std::max<std::int64_t>(1, ceil_log2(static_cast<std::uint64_t>(e)));
  p.K = static_cast<std::int64_t>(std::ceil(3.0 * static_cast<double>(L) / (epsilon * epsilon) - 1e-9));
  const auto idx = index_by_id(g);
  std::vector<std::int64_t> units(g.edges.size(), 0);
  std::map<std::vector<std::int64_t>, std::size_t> seen;
  Graph lg = g;
  std::int64_t top = 0;
  while (top < p.K) {
    for (std::size_t i = 0; i < lg.edges.size(); ++i) lg.edges[i].w = static_cast<double>(units[i]);
    MstResult r = mst(lg, dev);
    for (auto id : r.edge_ids) {
      auto& u = units[idx.at(id)];
      top = std::max(top, ++u);
    }
    auto [it, fresh] = seen.emplace(r.edge_ids, p.trees.size());
    if (fresh) p.trees.push_back({r.edge_ids, 0, Rational(0)});
    ++p.trees[it->second].units;
    ++p.iterations;
  }
  for (auto& t : p.trees) t.weight = Rational(t.units, p.K);
  p.loads.reserve(units.size());
  for (auto u : units) p.loads.emplace_back(u, p.K);
  p.value = Rational(static_cast<std::int64_t>(p.iterations), p.K);
  return p;
}

// ---------------------------------------------------------------------------
// Rooting and 1-respecting cuts

RootedTree root_tree(const Graph& g, const std::vector<std::int64_t>& tree_edge_ids, std::int64_t root,
                     BlockDevice& dev) {
  RootedTree t;
  t.V = g.V;
  t.root = root;
  const auto n = static_cast<std::size_t>(g.V);
  if (root < 0 || root >= g.V) throw MalformedInput("root out of range");
  if (static_cast<std::int64_t>(tree_edge_ids.size()) != g.V - 1)
    throw MalformedInput("a spanning tree needs V - 1 edges");
  t.parent.assign(n, -1);
  t.parent_edge.assign(n, -1);
  t.depth.assign(n, 0);
  t.pre.assign(n, 0);
  t.size.assign(n, 1);
  t.size[static_cast<std::size_t>(root)] = g.V;
  if (g.V == 1) {
    t.order = {root};
    return t;
  }
  const auto idx = index_by_id(g);
  std::vector<UEdge> und;
  std::unordered_map<std::uint64_t, std::int64_t> id_of_pair;
  auto pair_key = [&](std::int64_t a, std::int64_t b) {
    return static_cast<std::uint64_t>(std::min(a, b)) * static_cast<std::uint64_t>(g.V) +
           static_cast<std::uint64_t>(std::max(a, b));
  };
  for (auto id : tree_edge_ids) {
    const Edge& e = g.edges[idx.at(id)];
    und.push_back({e.u, e.v});
    id_of_pair[pair_key(e.u, e.v)] = id;
  }
  EulerTour tour = em_euler_tour(DiskArray<UEdge>::load(dev, und), root);
  if (tour.trees != 1 || tour.order.size() != 2 * und.size())
    throw MalformedInput("tree edges do not span the graph");

  // The earlier copy of each edge in the tour points away from the root.
  struct Copy {
    std::int64_t lo, hi, u, v, rank;
  };
  DiskArray<Copy> copies(dev);
  {
    Writer<Copy> w(copies);
    em_scan(tour.order, [&](const TourEdge& x) {
      w.put({std::min(x.u, x.v), std::max(x.u, x.v), x.u, x.v, x.rank});
    });
  }
  DiskArray<Copy> paired = em_sort(copies, [](const Copy& a, const Copy& b) {
    if (a.lo != b.lo) return a.lo < b.lo;
    if (a.hi != b.hi) return a.hi < b.hi;
    return a.rank < b.rank;
  });
  std::vector<std::int64_t> down_rank(n, -1), up_rank(n, -1);
  {
    bool first = true;
    em_scan(paired, [&](const Copy& c) {
      if (first) {
        t.parent[static_cast<std::size_t>(c.v)] = c.u;
        t.parent_edge[static_cast<std::size_t>(c.v)] = id_of_pair.at(pair_key(c.u, c.v));
        down_rank[static_cast<std::size_t>(c.v)] = c.rank;
      } else {
        up_rank[static_cast<std::size_t>(c.u)] = c.rank;
      }
      first = !first;
    });
  }
  std::int64_t d = 0, counter = 1;
  em_scan(tour.order, [&](const TourEdge& x) {
    if (down_rank[static_cast<std::size_t>(x.v)] == x.rank) {
      ++d;
      t.depth[static_cast<std::size_t>(x.v)] = d;
      t.pre[static_cast<std::size_t>(x.v)] = counter++;
    } else {
      --d;
    }
  });
  for (std::size_t v = 0; v < n; ++v)
    if (static_cast<std::int64_t>(v) != root) t.size[v] = (up_rank[v] - down_rank[v] + 1) / 2;

  struct Key {
    std::int64_t v, depth, parent;
  };
  std::vector<Key> keys;
  for (std::size_t v = 0; v < n; ++v) keys.push_back({static_cast<std::int64_t>(v), t.depth[v], t.parent[v]});
  DiskArray<Key> sorted = em_sort(DiskArray<Key>::load(dev, keys), [](const Key& a, const Key& b) {
    if (a.depth != b.depth) return a.depth > b.depth;
    return a.parent > b.parent;
  });
  em_scan(sorted, [&](const Key& k) { t.order.push_back(k.v); });
  return t;
}

void cut_1respect(const Graph& g, RootedTree& t, BlockDevice& dev) {
  const auto n = static_cast<std::size_t>(t.V);
  std::vector<std::int64_t> deg(n, 0), lca_count(n, 0);
  for (const Edge& e : g.edges) {
    if (e.u == e.v) continue;
    ++deg[static_cast<std::size_t>(e.u)];
    ++deg[static_cast<std::size_t>(e.v)];
  }
  // Offline LCA in one preorder walk: a union-find whose sets are the
  // finished subtrees hanging off the current root path.
  std::vector<std::vector<std::pair<std::int64_t, std::size_t>>> queries(n);
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const Edge& e = g.edges[i];
    if (e.u == e.v) continue;
    queries[static_cast<std::size_t>(e.u)].push_back({e.v, i});
    queries[static_cast<std::size_t>(e.v)].push_back({e.u, i});
  }
  std::vector<std::vector<std::int64_t>> kids(n);
  for (std::size_t v = 0; v < n; ++v)
    if (t.parent[v] >= 0) kids[static_cast<std::size_t>(t.parent[v])].push_back(static_cast<std::int64_t>(v));
  std::vector<std::int64_t> dsu(n), anc(n);
  std::iota(dsu.begin(), dsu.end(), 0);
  auto find = [&](std::int64_t x) {
    while (dsu[static_cast<std::size_t>(x)] != x) {
      dsu[static_cast<std::size_t>(x)] = dsu[static_cast<std::size_t>(dsu[static_cast<std::size_t>(x)])];
      x = dsu[static_cast<std::size_t>(x)];
    }
    return x;
  };
  std::vector<char> done(n, 0), answered(g.edges.size(), 0);
  std::vector<std::pair<std::int64_t, std::size_t>> stack{{t.root, 0}};
  anc[static_cast<std::size_t>(t.root)] = t.root;
  while (!stack.empty()) {
    auto& [v, next] = stack.back();
    const auto vi = static_cast<std::size_t>(v);
    if (next < kids[vi].size()) {
      const std::int64_t c = kids[vi][next++];
      anc[static_cast<std::size_t>(c)] = c;
      stack.push_back({c, 0});
      continue;
    }
    done[vi] = 1;
    for (auto [w, qi] : queries[vi]) {
      if (done[static_cast<std::size_t>(w)] && !answered[qi]) {
        answered[qi] = 1;
        ++lca_count[static_cast<std::size_t>(anc[static_cast<std::size_t>(find(w))])];
      }
    }
    const std::int64_t finished = v;
    stack.pop_back();
    if (!stack.empty()) {
      const std::int64_t p = stack.back().first;
      dsu[static_cast<std::size_t>(find(finished))] = find(p);
      anc[static_cast<std::size_t>(find(p))] = p;
    }
  }
  dev.charge_reads(dev.blocks_for(g.edges.size() * 2 + n));

  std::vector<std::int64_t> pos(n);
  for (std::size_t i = 0; i < n; ++i) pos[static_cast<std::size_t>(t.order[i])] = static_cast<std::int64_t>(i);
  std::vector<TfNode> nodes(n);
  std::vector<std::pair<std::int64_t, std::int64_t>> init(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = static_cast<std::size_t>(t.order[i]);
    nodes[i].parent = t.parent[v] < 0 ? kNil : pos[static_cast<std::size_t>(t.parent[v])];
    nodes[i].depth = static_cast<std::uint32_t>(t.depth[v]);
    init[i] = {deg[v], lca_count[v]};
  }
  auto sums = em_time_forward(dev, nodes, init,
                              [](std::size_t, std::pair<std::int64_t, std::int64_t> acc,
                                 const std::pair<std::int64_t, std::int64_t>& c) {
                                return std::make_pair(acc.first + c.first, acc.second + c.second);
                              });
  t.d_down.assign(n, 0);
  t.rho_down.assign(n, 0);
  t.cut_down.assign(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = static_cast<std::size_t>(t.order[i]);
    t.d_down[v] = sums[i].first;
    t.rho_down[v] = sums[i].second;
    if (static_cast<std::int64_t>(v) != t.root) t.cut_down[v] = t.d_down[v] - 2 * t.rho_down[v];
  }
}

// ---------------------------------------------------------------------------
// Cluster partition

ClusterPartition partition_tree(const RootedTree& t, std::size_t B) {
  if (B < 1) throw ValidationError("cluster size must be positive");
  const auto n = static_cast<std::size_t>(t.V);
  const auto cap = static_cast<std::int64_t>(B);
  std::vector<std::int64_t> var(n, 1), acc(n, 0), child_cluster(n, -1), label(n, -1);
  std::vector<std::vector<std::int64_t>> kids(n);
  std::vector<std::int64_t> author;  // vertex whose children form the cluster; -1 for the top
  std::int64_t top = -1;
  for (auto v : t.order) {
    const auto vi = static_cast<std::size_t>(v);
    const std::int64_t y = 1 + acc[vi];
    std::int64_t last = -1;
    const bool split = y >= cap && !kids[vi].empty();
    if (!split) {
      var[vi] = y;
    } else {
      var[vi] = 1;
      std::int64_t sum = 0;
      for (auto c : kids[vi]) {
        const auto ci = static_cast<std::size_t>(c);
        if (last < 0 || sum + var[ci] > cap) {
          last = static_cast<std::int64_t>(author.size());
          author.push_back(v);
          sum = 0;
        }
        sum += var[ci];
        child_cluster[ci] = last;
      }
    }
    const auto p = t.parent[vi];
    if (p >= 0) {
      acc[static_cast<std::size_t>(p)] += var[vi];
      kids[static_cast<std::size_t>(p)].push_back(v);
    } else if (split) {
      top = last;  // the root joins its last cluster
      author[static_cast<std::size_t>(top)] = -1;
    } else {
      top = static_cast<std::int64_t>(author.size());
      author.push_back(-1);
    }
  }
  for (auto it = t.order.rbegin(); it != t.order.rend(); ++it) {
    const auto vi = static_cast<std::size_t>(*it);
    if (t.parent[vi] < 0)
      label[vi] = top;
    else if (child_cluster[vi] >= 0)
      label[vi] = child_cluster[vi];
    else
      label[vi] = label[static_cast<std::size_t>(t.parent[vi])];
  }
  const std::size_t nc = author.size();
  std::vector<std::int64_t> pc(nc, -1), depth(nc, -1);
  for (std::size_t c = 0; c < nc; ++c)
    if (author[c] >= 0) pc[c] = label[static_cast<std::size_t>(author[c])];
  for (std::size_t c = nc; c-- > 0;) {
    // Parents are created after their children, so this walks top-down.
    std::int64_t d = 0;
    for (std::int64_t x = static_cast<std::int64_t>(c); pc[static_cast<std::size_t>(x)] >= 0;
         x = pc[static_cast<std::size_t>(x)])
      ++d;
    depth[c] = d;
  }
  std::vector<std::size_t> ids(nc);
  std::iota(ids.begin(), ids.end(), 0);
  std::sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) {
    if (depth[a] != depth[b]) return depth[a] > depth[b];
    if (pc[a] != pc[b]) return pc[a] < pc[b];
    return a < b;
  });
  std::vector<std::int64_t> relabel(nc);
  for (std::size_t k = 0; k < nc; ++k) relabel[ids[k]] = static_cast<std::int64_t>(k);

  ClusterPartition cp;
  cp.cluster_of.resize(n);
  cp.members.resize(nc);
  cp.parent_cluster.resize(nc);
  cp.root_parent.resize(nc);
  cp.depth.resize(nc);
  for (std::size_t c = 0; c < nc; ++c) {
    const auto k = static_cast<std::size_t>(relabel[c]);
    cp.parent_cluster[k] = pc[c] < 0 ? -1 : relabel[static_cast<std::size_t>(pc[c])];
    cp.root_parent[k] = author[c];
    cp.depth[k] = depth[c];
  }
  for (auto v : t.order) {
    const auto k = relabel[static_cast<std::size_t>(label[static_cast<std::size_t>(v)])];
    cp.cluster_of[static_cast<std::size_t>(v)] = k;
    cp.members[static_cast<std::size_t>(k)].push_back(v);
  }
  return cp;
}

// ---------------------------------------------------------------------------
// 2-respecting cuts

TwoRespect cut_2respect(const Graph& g, const RootedTree& t, BlockDevice& dev, const PairVisitor& visit) {
  const std::size_t B = dev.B();
  if (dev.M() < B * B) throw ValidationError("the pair sweep needs M >= B^2");
  TwoRespect best;
  if (t.V < 3) return best;
  if (t.cut_down.size() != static_cast<std::size_t>(t.V)) throw PreconditionError("run cut_1respect first");
  const ClusterPartition cp = partition_tree(t, B);
  const std::size_t N = cp.members.size();
  const auto n = static_cast<std::size_t>(t.V);
  std::vector<std::int64_t> loc(n);
  std::size_t bc = 1;
  for (const auto& m : cp.members) {
    bc = std::max(bc, m.size());
    for (std::size_t k = 0; k < m.size(); ++k) loc[static_cast<std::size_t>(m[k])] = static_cast<std::int64_t>(k);
  }
  const double span = static_cast<double>(N) * static_cast<double>(N) * static_cast<double>(bc) * static_cast<double>(bc);
  if (span > 4e18) throw ResourceError("pair sweep key space too large");

  // Children inside the same cluster, and the subforest roots of each cluster.
  std::vector<std::vector<std::int64_t>> kids_in(n);
  std::vector<std::vector<std::int64_t>> roots(N);
  for (std::size_t v = 0; v < n; ++v) {
    const auto p = t.parent[v];
    if (p >= 0 && cp.cluster_of[static_cast<std::size_t>(p)] == cp.cluster_of[v])
      kids_in[static_cast<std::size_t>(p)].push_back(loc[v]);
    else
      roots[static_cast<std::size_t>(cp.cluster_of[v])].push_back(loc[v]);
  }

  // S1: edges grouped by ordered cluster pair.
  struct PairEdge {
    std::int64_t ci, cj, lu, lv;
  };
  DiskArray<PairEdge> raw(dev);
  {
    Writer<PairEdge> w(raw);
    for (const Edge& e : g.edges) {
      if (e.u == e.v) continue;
      const auto cu = cp.cluster_of[static_cast<std::size_t>(e.u)], cv = cp.cluster_of[static_cast<std::size_t>(e.v)];
      w.put({cu, cv, loc[static_cast<std::size_t>(e.u)], loc[static_cast<std::size_t>(e.v)]});
      w.put({cv, cu, loc[static_cast<std::size_t>(e.v)], loc[static_cast<std::size_t>(e.u)]});
    }
  }
  DiskArray<PairEdge> s1 = em_sort(raw, [](const PairEdge& a, const PairEdge& b) {
    return a.ci != b.ci ? a.ci < b.ci : a.cj < b.cj;
  });
  s1.flush();
  Reader<PairEdge> rd(s1);

  const auto NN = static_cast<std::int64_t>(N);
  const auto BC = static_cast<std::int64_t>(bc);
  auto key = [&](std::int64_t i, std::int64_t j, std::int64_t ul, std::int64_t vl) {
    return ((i * NN + j) * BC + ul) * BC + vl;
  };
  SoftHeap q1 = SoftHeap::hard(dev);
  SoftHeap q2 = SoftHeap::hard(dev);

  std::vector<std::int64_t> cnt, D, Mx, Y, X;
  std::int64_t best_val = kNoCut;
  for (std::int64_t i = 0; i < NN; ++i) {
    const auto& Vi = cp.members[static_cast<std::size_t>(i)];
    const auto ni = static_cast<std::int64_t>(Vi.size());
    for (std::int64_t j = 0; j < NN; ++j) {
      const auto& Vj = cp.members[static_cast<std::size_t>(j)];
      const auto nj = static_cast<std::int64_t>(Vj.size());
      dev.charge_reads(dev.blocks_for(Vi.size() + Vj.size()));
      const auto sz = static_cast<std::size_t>(ni * nj);
      cnt.assign(sz, 0);
      Y.assign(sz, 0);
      X.assign(sz, 0);
      D.assign(sz, 0);
      Mx.assign(sz, 0);
      auto at = [nj](std::int64_t a, std::int64_t b) { return static_cast<std::size_t>(a * nj + b); };
      while (!rd.done() && rd.peek().ci == i && rd.peek().cj == j) {
        const PairEdge pe = rd.next();
        ++cnt[at(pe.lu, pe.lv)];
      }
      const std::int64_t lo = key(i, j, 0, 0), hi = key(i, j, BC - 1, BC - 1);
      while (!q1.empty() && q1.findmin().key <= hi) {
        const HeapItem it = q1.deletemin();
        if (it.key < lo) throw SpecError("pair sweep relay out of order");
        const std::int64_t r = it.key - lo;
        Y[at(r / BC, r % BC)] += static_cast<std::int64_t>(it.payload);
      }
      while (!q2.empty() && q2.findmin().key <= hi) {
        const HeapItem it = q2.deletemin();
        if (it.key < lo) throw SpecError("pair sweep relay out of order");
        const std::int64_t r = it.key - lo;
        X[at(r / BC, r % BC)] += static_cast<std::int64_t>(it.payload);
      }
      // D[u][v] = edges between u and the subtree of v; members are listed
      // children first, so every child is final before its parent.
      for (std::int64_t a = 0; a < ni; ++a) {
        for (std::int64_t b = 0; b < nj; ++b) {
          std::int64_t s = cnt[at(a, b)] + Y[at(a, b)];
          for (auto c : kids_in[static_cast<std::size_t>(Vj[static_cast<std::size_t>(b)])]) s += D[at(a, c)];
          D[at(a, b)] = s;
        }
      }
      for (std::int64_t a = 0; a < ni; ++a) {
        const auto& ka = kids_in[static_cast<std::size_t>(Vi[static_cast<std::size_t>(a)])];
        for (std::int64_t b = 0; b < nj; ++b) {
          std::int64_t s = D[at(a, b)] + X[at(a, b)];
          for (auto c : ka) s += Mx[at(c, b)];
          Mx[at(a, b)] = s;
        }
      }
      // Relay partial sums to the parent clusters.
      if (cp.parent_cluster[static_cast<std::size_t>(j)] >= 0) {
        const auto pj = cp.parent_cluster[static_cast<std::size_t>(j)];
        const auto target = loc[static_cast<std::size_t>(cp.root_parent[static_cast<std::size_t>(j)])];
        for (std::int64_t a = 0; a < ni; ++a) {
          std::int64_t s = 0;
          for (auto r : roots[static_cast<std::size_t>(j)]) s += D[at(a, r)];
          if (s > 0) q1.insert(key(i, pj, a, target), static_cast<std::uint64_t>(s));
        }
      }
      if (cp.parent_cluster[static_cast<std::size_t>(i)] >= 0) {
        const auto pi = cp.parent_cluster[static_cast<std::size_t>(i)];
        const auto target = loc[static_cast<std::size_t>(cp.root_parent[static_cast<std::size_t>(i)])];
        for (std::int64_t b = 0; b < nj; ++b) {
          std::int64_t s = 0;
          for (auto r : roots[static_cast<std::size_t>(i)]) s += Mx[at(r, b)];
          if (s > 0) q2.insert(key(pi, j, target, b), static_cast<std::uint64_t>(s));
        }
      }
      for (std::int64_t a = 0; a < ni; ++a) {
        const auto u = Vi[static_cast<std::size_t>(a)];
        if (u == t.root) continue;
        const auto cu = t.cut_down[static_cast<std::size_t>(u)];
        for (std::int64_t b = 0; b < nj; ++b) {
          const auto v = Vj[static_cast<std::size_t>(b)];
          if (v == t.root || v == u) continue;
          const auto cv = t.cut_down[static_cast<std::size_t>(v)];
          const auto m = Mx[at(a, b)];
          std::int64_t val;
          if (t.is_ancestor(u, v))
            val = cu - cv + 2 * (m - 2 * t.rho_down[static_cast<std::size_t>(v)]);
          else if (t.is_ancestor(v, u))
            val = cv - cu + 2 * (m - 2 * t.rho_down[static_cast<std::size_t>(u)]);
          else
            val = cu + cv - 2 * m;
          ++best.pairs;
          if (visit) visit(u, v, val);
          if (val < best_val) {
            best_val = val;
            best.u = u;
            best.v = v;
          }
        }
      }
    }
  }
  best.value = best_val == kNoCut ? -1 : best_val;
  return best;
}

// ---------------------------------------------------------------------------
// Sides

std::vector<std::int64_t> cut_side(const RootedTree& t, std::int64_t u, std::int64_t v) {
  std::vector<std::int64_t> side;
  for (std::int64_t x = 0; x < t.V; ++x) {
    const bool in_u = t.in_subtree(u, x);
    const bool in_v = v >= 0 && t.in_subtree(v, x);
    if (in_u != in_v) side.push_back(x);
  }
  return canonical_side(t.V, std::move(side));
}

std::vector<std::int64_t> canonical_side(std::int64_t V, std::vector<std::int64_t> side) {
  std::sort(side.begin(), side.end());
  side.erase(std::unique(side.begin(), side.end()), side.end());
  if (!side.empty() && side.front() == 0) {
    std::vector<std::int64_t> other;
    std::size_t k = 0;
    for (std::int64_t x = 0; x < V; ++x) {
      if (k < side.size() && side[k] == x)
        ++k;
      else
        other.push_back(x);
    }
    return other;
  }
  return side;
}

// ---------------------------------------------------------------------------
// Exact, sampled and fat modes

namespace {

struct TreeScan {
  std::int64_t value = kNoCut;
  CutRecord witness;
};

void scan_tree(const Graph& g, const PackedTree& pt, BlockDevice& dev, bool pairs, TreeScan& out) {
  RootedTree t = root_tree(g, pt.edge_ids, 0, dev);
  cut_1respect(g, t, dev);
  for (std::int64_t v = 0; v < t.V; ++v) {
    if (v == t.root) continue;
    const auto c = t.cut_down[static_cast<std::size_t>(v)];
    if (c < out.value) {
      out.value = c;
      out.witness = {{t.parent_edge[static_cast<std::size_t>(v)]}, c, cut_side(t, v)};
    }
  }
  if (!pairs) return;
  TwoRespect tr = cut_2respect(g, t, dev);
  if (tr.value >= 0 && tr.value < out.value) {
    out.value = tr.value;
    out.witness = {{t.parent_edge[static_cast<std::size_t>(tr.u)], t.parent_edge[static_cast<std::size_t>(tr.v)]},
                   tr.value,
                   cut_side(t, tr.u, tr.v)};
  }
}

}  // namespace

MincutResult mincut_with_packing(const Graph& g, const TreePacking& p, BlockDevice& dev, MincutOptions opt) {
  const IoStats start = dev.stats();
  MincutResult res;
  res.trees_packed = p.trees.size();
  std::vector<std::size_t> chosen;
  if (opt.mode == MincutMode::sampled) {
    const double lg = std::log2(static_cast<double>(g.V));
    const auto draws = static_cast<std::size_t>(std::ceil(2.0 * lg * lg + lg));
    std::vector<double> w;
    for (const auto& t : p.trees) w.push_back(static_cast<double>(t.units));
    std::mt19937_64 rng(opt.seed);
    std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
    for (std::size_t k = 0; k < draws; ++k) chosen.push_back(pick(rng));
    std::sort(chosen.begin(), chosen.end());
    chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
  } else {
    chosen.resize(p.trees.size());
    std::iota(chosen.begin(), chosen.end(), 0);
  }
  TreeScan scan;
  for (auto k : chosen) scan_tree(g, p.trees[k], dev, opt.mode != MincutMode::fat, scan);
  res.trees_examined = chosen.size();
  if (opt.mode == MincutMode::sampled) {
    const double lg = std::log2(static_cast<double>(g.V));
    if (static_cast<double>(scan.value) <= lg * lg) {
      res.fell_back = true;
      res.warning = "sampled mode: cut value does not exceed log^2 V, rerunning over all trees";
      for (std::size_t k = 0; k < p.trees.size(); ++k) scan_tree(g, p.trees[k], dev, true, scan);
      res.trees_examined = p.trees.size();
    }
  }
  res.value = scan.value;
  res.witness = scan.witness;
  res.io = dev.stats() - start;
  return res;
}

MincutResult mincut_exact(const Graph& g, BlockDevice& dev, MincutOptions opt) {
  const IoStats start = dev.stats();
  TreePacking p = greedy_tree_packing(g, opt.epsilon, dev);
  MincutResult res = mincut_with_packing(g, p, dev, opt);
  res.io = dev.stats() - start;
  return res;
}

// ---------------------------------------------------------------------------
// Certificates and the approximate algorithm

Graph sparse_certificate(const Graph& g, std::int64_t k, BlockDevice& dev) {
  if (k < 1) throw ValidationError("certificate order must be at least 1");
  Graph h;
  h.V = g.V;
  Graph rest;
  rest.V = g.V;
  for (const Edge& e : g.edges)
    if (e.u != e.v) rest.edges.push_back(e);
  for (std::int64_t i = 0; i < k && !rest.edges.empty(); ++i) {
    MstResult f = mst(rest, dev);
    std::vector<char> in(rest.edges.size(), 0);
    const auto idx = index_by_id(rest);
    for (auto id : f.edge_ids) in[idx.at(id)] = 1;
    Graph next;
    next.V = g.V;
    for (std::size_t j = 0; j < rest.edges.size(); ++j) {
      if (in[j])
        h.edges.push_back(rest.edges[j]);
      else
        next.edges.push_back(rest.edges[j]);
    }
    rest = std::move(next);
  }
  return h;
}

ApproxCutResult mincut_approx(const Graph& g, double epsilon, BlockDevice& dev) {
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  const IoStats start = dev.stats();
  require_connected(g, dev);
  ApproxCutResult res;
  std::int64_t best = kNoCut;
  Graph cur;
  cur.V = g.V;
  for (const Edge& e : g.edges)
    if (e.u != e.v) cur.edges.push_back(e);
  while (cur.V > 1) {
    ++res.levels;
    const auto deg = cur.degrees();
    const std::int64_t lmin = *std::min_element(deg.begin(), deg.end());
    best = std::min(best, lmin);
    const auto k = static_cast<std::int64_t>(std::floor(static_cast<double>(lmin) / (2.0 + epsilon)));
    if (k < 1) break;
    Graph h = sparse_certificate(cur, k, dev);
    std::vector<char> keep(cur.edges.size(), 0);
    {
      const auto idx = index_by_id(cur);
      for (const Edge& e : h.edges) keep[idx.at(e.id)] = 1;
    }
    Graph outside;
    outside.V = cur.V;
    for (std::size_t j = 0; j < cur.edges.size(); ++j)
      if (!keep[j]) outside.edges.push_back(cur.edges[j]);
    const auto lab = connected_components(outside, dev);
    std::vector<std::int64_t> dense(static_cast<std::size_t>(cur.V), -1);
    std::int64_t nv = 0;
    for (std::int64_t v = 0; v < cur.V; ++v) {
      auto& d = dense[static_cast<std::size_t>(lab[static_cast<std::size_t>(v)])];
      if (d < 0) d = nv++;
    }
    Graph next;
    next.V = nv;
    for (const Edge& e : cur.edges) {
      const auto a = dense[static_cast<std::size_t>(lab[static_cast<std::size_t>(e.u)])];
      const auto b = dense[static_cast<std::size_t>(lab[static_cast<std::size_t>(e.v)])];
      if (a != b) next.edges.push_back({a, b, e.w, e.id});
    }
    cur = std::move(next);
  }
  res.value = best;
  res.io = dev.stats() - start;
  return res;
}

// ---------------------------------------------------------------------------
// Alpha-minimum cut index

std::uint64_t AlphaMincutIndex::digest(const std::vector<std::int64_t>& side) {
  std::uint64_t h = 1469598103934665603ULL ^ side.size();
  for (auto x : side) {
    h ^= static_cast<std::uint64_t>(x) + 0x9e3779b97f4a7c15ULL;
    h *= 1099511628211ULL;
    h ^= h >> 29;
  }
  return h;
}

void AlphaMincutIndex::add(CutRecord rec) {
  auto& bucket = table_[digest(rec.side)];
  for (const auto& r : bucket)
    if (r.side == rec.side) return;
  bucket.push_back(std::move(rec));
  ++count_;
}

bool AlphaMincutIndex::query(const std::vector<std::int64_t>& side) const {
  for (auto x : side)
    if (x < 0 || x >= V_) return false;
  auto s = canonical_side(V_, side);
  if (s.empty() || static_cast<std::int64_t>(s.size()) == V_) return false;
  auto it = table_.find(digest(s));
  if (it == table_.end()) return false;
  for (const auto& r : it->second)
    if (r.side == s) return true;
  return false;
}

std::vector<CutRecord> AlphaMincutIndex::records() const {
  std::vector<CutRecord> out;
  for (const auto& [h, b] : table_) out.insert(out.end(), b.begin(), b.end());
  std::sort(out.begin(), out.end(), [](const CutRecord& a, const CutRecord& b) { return a.side < b.side; });
  return out;
}

AlphaMincutIndex build_alpha_index(const Graph& g, double alpha, BlockDevice& dev, double epsilon) {
  if (!(alpha < 1.5)) throw UnsupportedAlpha("alpha must be below 3/2");
  if (alpha < 1.0) throw ValidationError("alpha must be at least 1");
  TreePacking p = greedy_tree_packing(g, epsilon, dev);
  MincutResult mc = mincut_with_packing(g, p, dev, {epsilon, MincutMode::all, 1});
  AlphaMincutIndex idx;
  idx.alpha_ = alpha;
  idx.c_ = mc.value;
  idx.V_ = g.V;
  const auto limit = static_cast<std::int64_t>(std::floor(alpha * static_cast<double>(mc.value) + 1e-9));
  for (const auto& pt : p.trees) {
    RootedTree t = root_tree(g, pt.edge_ids, 0, dev);
    cut_1respect(g, t, dev);
    for (std::int64_t v = 0; v < t.V; ++v) {
      if (v == t.root || t.cut_down[static_cast<std::size_t>(v)] > limit) continue;
      idx.add({{t.parent_edge[static_cast<std::size_t>(v)]}, t.cut_down[static_cast<std::size_t>(v)], cut_side(t, v)});
    }
    cut_2respect(g, t, dev, [&](std::int64_t u, std::int64_t v, std::int64_t val) {
      if (val > limit || u > v) return;
      idx.add({{t.parent_edge[static_cast<std::size_t>(u)], t.parent_edge[static_cast<std::size_t>(v)]}, val,
               cut_side(t, u, v)});
    });
  }
  return idx;
}

}  // namespace emkit
