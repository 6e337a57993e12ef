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

#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "emkit/em_mst.hpp"
#include "emkit/oracles.hpp"

using namespace emkit;

namespace {

Graph random_graph(std::int64_t V, std::int64_t E, unsigned seed, bool connected = true) {
  std::mt19937_64 rng(seed);
  Graph g;
  g.V = V;
  std::uniform_real_distribution<double> wd(0.0, 1000.0);
  if (connected)
    for (std::int64_t v = 1; v < V; ++v) g.add_edge(static_cast<std::int64_t>(rng() % v), v, wd(rng));
  while (g.E() < E) {
    const auto u = static_cast<std::int64_t>(rng() % V), v = static_cast<std::int64_t>(rng() % V);
    if (u != v) g.add_edge(u, v, std::floor(wd(rng)));
  }
  return g;
}

DeviceParams dev_params() { return {8, 8 * 64}; }

}  // namespace

TEST_CASE("mst small graphs") {
  BlockDevice dev(dev_params());
  Graph tri;
  tri.V = 3;
  tri.add_edge(0, 1, 1);
  tri.add_edge(1, 2, 2);
  tri.add_edge(0, 2, 3);
  auto r = mst(tri, dev);
  CHECK(r.edge_ids == std::vector<std::int64_t>{0, 1});
  CHECK(r.weight == 3.0);

  Graph path;
  path.V = 5;
  for (int i = 0; i < 4; ++i) path.add_edge(i, i + 1, 10 - i);
  CHECK(mst(path, dev).edge_ids.size() == 4);

  Graph empty;
  empty.V = 4;
  auto e = mst(empty, dev);
  CHECK(e.edge_ids.empty());
  CHECK(e.labels == std::vector<std::int64_t>{0, 1, 2, 3});
}

TEST_CASE("mst matches kruskal on random graphs") {
  for (unsigned seed = 1; seed <= 12; ++seed) {
    for (int ratio : {2, 8, 32}) {
      const std::int64_t V = 100 + static_cast<std::int64_t>(seed) * 37;
      Graph g = random_graph(V, V * ratio, seed * 7 + static_cast<unsigned>(ratio));
      BlockDevice dev(dev_params());
      MstOptions opt;
      opt.trace = true;
      auto r = mst(g, dev, opt);
      CHECK(r.weight == doctest::Approx(oracle::kruskal_weight(g)));
      CHECK(static_cast<std::int64_t>(r.edge_ids.size()) == V - 1);
      CHECK(r.schedule_violations == 0);
      if (ratio < 8) CHECK(r.stages >= 1);
    }
  }
}

TEST_CASE("mst audit: hooks are lightest and fills are minsets") {
  for (unsigned seed = 1; seed <= 4; ++seed) {
    Graph g = random_graph(200, 200 * 6, seed);
    BlockDevice dev({32, 32 * 16});
    MstOptions opt;
    opt.audit = true;
    opt.trace = true;
    opt.truncate_stages = false;
    auto r = mst(g, dev, opt);
    CHECK(r.audit_violations == 0);
    CHECK(r.schedule_violations == 0);
    CHECK(r.trace.size() >= 3);
    CHECK(r.weight == doctest::Approx(oracle::kruskal_weight(g)));
  }
}

TEST_CASE("mst sparse and disconnected inputs") {
  for (unsigned seed = 1; seed <= 6; ++seed) {
    Graph g = random_graph(400, 200, seed, false);
    BlockDevice dev(dev_params());
    auto r = mst(g, dev);
    CHECK(r.weight == doctest::Approx(oracle::kruskal_weight(g)));
    CHECK(oracle::same_partition(r.labels, oracle::component_labels(g)));
    CHECK(r.boruvka_rounds >= 1);
  }
}

TEST_CASE("connected components") {
  BlockDevice dev(dev_params());
  Graph two;
  two.V = 6;
  two.add_edge(0, 1);
  two.add_edge(1, 2);
  two.add_edge(2, 0);
  two.add_edge(3, 4);
  two.add_edge(4, 5);
  two.add_edge(5, 3);
  auto l = connected_components(two, dev);
  CHECK(std::set<std::int64_t>(l.begin(), l.end()).size() == 2);

  std::mt19937_64 rng(3);
  Graph gp;
  gp.V = 2000;
  for (std::int64_t u = 0; u < gp.V; ++u)
    for (int t = 0; t < 1; ++t) {
      const auto v = static_cast<std::int64_t>(rng() % gp.V);
      if (v != u && rng() % 2 == 0) gp.add_edge(u, v);
    }
  BlockDevice dev2(dev_params());
  CHECK(connected_components(gp, dev2) == oracle::component_labels(gp));
}

TEST_CASE("hook and contract") {
  BlockDevice dev(dev_params());
  // Mutual pair: the smaller vertex becomes the root.
  auto s = contract(DiskArray<MstEdge>::load(dev, {{3, 7, 1.0, 0}, {7, 3, 1.0, 0}}));
  REQUIRE(s.size() == 1);
  CHECK(s.raw()[0].u == 7);
  CHECK(s.raw()[0].root == 3);

  // Star toward c = 0 with a mutual pair at the centre.
  std::vector<MstEdge> star;
  for (int x = 1; x < 6; ++x) star.push_back({x, 0, 1.0, x});
  star.push_back({0, 1, 1.0, 1});
  auto st = contract(DiskArray<MstEdge>::load(dev, star));
  CHECK(st.size() == 5);
  for (const auto& e : st.raw()) CHECK(e.root == 0);

  // Random pseudo-forests of lightest out-edges against union-find.
  std::mt19937_64 rng(1);
  const std::int64_t n = 1000;
  Graph g = random_graph(n, 3000, 5, false);
  std::vector<MstEdge> hooks;
  std::vector<const Edge*> best(static_cast<std::size_t>(n), nullptr);
  for (const auto& e : g.edges) {
    for (auto x : {e.u, e.v}) {
      auto& b = best[static_cast<std::size_t>(x)];
      if (e.u != e.v && (!b || edge_lighter(e, *b))) b = &e;
    }
  }
  oracle::UnionFind uf(n);
  for (std::int64_t x = 0; x < n; ++x) {
    const Edge* e = best[static_cast<std::size_t>(x)];
    if (!e) continue;
    hooks.push_back({x, e->u == x ? e->v : e->u, e->w, e->id});
    uf.unite(e->u, e->v);
  }
  auto stars = contract(DiskArray<MstEdge>::load(dev, hooks));
  std::vector<std::int64_t> lab(static_cast<std::size_t>(n));
  for (std::int64_t x = 0; x < n; ++x) lab[static_cast<std::size_t>(x)] = x;
  for (const auto& st2 : stars.raw()) lab[static_cast<std::size_t>(st2.u)] = st2.root;
  std::vector<std::int64_t> want(static_cast<std::size_t>(n));
  for (std::int64_t x = 0; x < n; ++x) want[static_cast<std::size_t>(x)] = uf.find(x);
  CHECK(oracle::same_partition(lab, want));
}

TEST_CASE("cleanup and fill") {
  BlockDevice dev(dev_params());
  // Internal edges vanish.
  auto f = DiskArray<Star>::load(dev, {{1, 0}});
  auto c = cleanup_bucket(DiskArray<MstEdge>::load(dev, {{0, 1, 1.0, 0}, {1, 0, 1.0, 0}}), f);
  CHECK(c.empty());
  // Parallel edges after renaming keep the lightest.
  auto f2 = DiskArray<Star>::load(dev, {{2, 1}});
  auto c2 = cleanup_bucket(DiskArray<MstEdge>::load(dev, {{0, 1, 5.0, 0}, {0, 2, 3.0, 1}}), f2);
  REQUIRE(c2.size() == 1);
  CHECK(c2.raw()[0].w == 3.0);
  CHECK(c2.raw()[0].dst == 1);

  // One external edge at k = 1: copied, threshold inherited.
  auto r = DiskArray<Threshold>::load(dev, {{0, 9.0, 4}});
  auto fb = fill_bucket(DiskArray<MstEdge>::load(dev, {{0, 1, 2.0, 0}}), r, 1);
  CHECK(fb.edges.size() == 1);
  REQUIRE(fb.thr.size() == 1);
  CHECK(fb.thr.raw()[0].w == 9.0);
  // Five edges at k = 1: three lightest kept, threshold is the fourth.
  std::vector<MstEdge> five;
  for (int i = 0; i < 5; ++i) five.push_back({0, i + 1, double(i), i});
  auto fb2 = fill_bucket(DiskArray<MstEdge>::load(dev, five), DiskArray<Threshold>(dev), 1);
  CHECK(fb2.edges.size() == 3);
  REQUIRE(fb2.thr.size() == 1);
  CHECK(fb2.thr.raw()[0].w == 3.0);
  CHECK(bucket_limit(0) == 1);
  CHECK(bucket_limit(2) == 15);
}

TEST_CASE("em prim") {
  BlockDevice dev(dev_params());
  std::vector<MstEdge> k4;
  int id = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) k4.push_back({a, b, double(7 * id % 11), id}), ++id;
  auto pr = em_prim(DiskArray<MstEdge>::load(dev, k4));
  CHECK(pr.edge_ids.size() == 3);
  Graph g;
  g.V = 4;
  for (auto& e : k4) g.edges.push_back({e.src, e.dst, e.w, e.id});
  double w = 0;
  for (auto i : pr.edge_ids) w += k4[static_cast<std::size_t>(i)].w;
  CHECK(w == oracle::kruskal_weight(g));

  // Multigraph with parallel edges and a self loop.
  std::vector<MstEdge> multi = {{0, 1, 5, 0}, {0, 1, 2, 1}, {1, 2, 4, 2}, {2, 1, 1, 3}, {2, 2, 0, 4}, {0, 2, 3, 5}};
  auto pm = em_prim(DiskArray<MstEdge>::load(dev, multi));
  std::sort(pm.edge_ids.begin(), pm.edge_ids.end());
  CHECK(pm.edge_ids == std::vector<std::int64_t>{1, 3});
}
