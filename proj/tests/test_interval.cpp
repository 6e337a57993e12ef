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

#include <cmath>
#include <map>
#include <random>

#include "emkit/errors.hpp"
#include "emkit/interval.hpp"
#include "emkit/oracles.hpp"

using namespace emkit;

namespace {

std::vector<Interval> random_intervals(std::size_t n, std::uint64_t seed, double span = 1000, double len = 40) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> at(0, span), width(1, len), wt(1, 10);
  std::vector<Interval> v;
  for (std::size_t i = 0; i < n; ++i) {
    const double l = std::floor(at(rng));
    v.push_back({l, l + std::floor(width(rng)), std::floor(wt(rng))});
  }
  return v;
}

std::vector<oracle::RawInterval> as_raw(const std::vector<Interval>& v) {
  std::vector<oracle::RawInterval> r;
  for (const auto& x : v) r.push_back({x.left, x.right, x.weight});
  return r;
}

ListArray random_lists(std::int64_t n, std::int64_t k, std::uint64_t seed, bool monotone) {
  std::mt19937_64 rng(seed);
  std::vector<std::int64_t> perm(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::vector<std::int64_t>> groups(static_cast<std::size_t>(k));
  for (std::int64_t i = 0; i < n; ++i) groups[static_cast<std::size_t>(i % k)].push_back(perm[static_cast<std::size_t>(i)]);
  std::vector<std::int64_t> succ(static_cast<std::size_t>(n), -1);
  for (auto& g : groups) {
    if (monotone) std::sort(g.begin(), g.end());
    for (std::size_t j = 0; j + 1 < g.size(); ++j) succ[static_cast<std::size_t>(g[j])] = g[j + 1];
  }
  return ListArray::from_succ(succ);
}

bool proper_on_list(const ListArray& a, const std::vector<std::int64_t>& c) {
  for (std::size_t u = 0; u < a.succ.size(); ++u)
    if (a.succ[u] >= 0 && c[u] == c[static_cast<std::size_t>(a.succ[u])]) return false;
  return true;
}

DeviceParams dev_params() { return {8, 8 * 32}; }

}  // namespace

TEST_CASE("interval set normalisation") {
  auto s = IntervalSet::build({{0, 2, 1}, {2, 4, 1}, {5, 5, 1}});
  CHECK(s.overlap(0, 1));
  CHECK_FALSE(s.overlap(1, 2));
  CHECK(s.lpos[2] < s.rpos[2]);
  CHECK(s.ties_broken == 2);
  for (std::size_t k = 0; k < s.endpoints.size(); ++k) CHECK(s.endpoints[k].pos == static_cast<std::int64_t>(k));
  CHECK_THROWS_AS(IntervalSet::build({{3, 1, 1}}), ValidationError);
  CHECK_THROWS_AS(IntervalSet::build({{0, 1, -1}}), ValidationError);
  auto r = random_intervals(200, 5);
  auto rs = IntervalSet::build(r);
  auto g = oracle::overlap_graph(as_raw(r));
  std::int64_t edges = 0;
  for (std::int64_t a = 0; a < rs.size(); ++a)
    for (std::int64_t b = a + 1; b < rs.size(); ++b) edges += rs.overlap(a, b);
  CHECK(edges == g.E());
}

TEST_CASE("chromatic number and igc colouring") {
  BlockDevice dev(dev_params());
  std::vector<Interval> disjoint, nested;
  for (int i = 0; i < 6; ++i) {
    disjoint.push_back({i * 10.0, i * 10.0 + 5, 1});
    nested.push_back({static_cast<double>(i), 100.0 - i, 1});
  }
  CHECK(chromatic_number(IntervalSet::build(disjoint), dev) == 1);
  CHECK(chromatic_number(IntervalSet::build(nested), dev) == 6);
  auto one = colour_igc(IntervalSet::build({{0, 1, 1}}), dev);
  CHECK(one.colour == std::vector<std::int64_t>{1});
  auto two = colour_igc(IntervalSet::build({{0, 1, 1}, {2, 3, 1}}), dev);
  CHECK(two.colour == std::vector<std::int64_t>{1, 1});
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    auto r = random_intervals(seed < 3 ? 200 : 500, seed, 1000, 10 + 30 * static_cast<double>(seed));
    auto s = IntervalSet::build(r);
    const auto chi = chromatic_number(s, dev);
    CHECK(chi == oracle::max_overlap(as_raw(r)));
    auto c = colour_igc(s, dev);
    CHECK(oracle::is_proper_colouring(oracle::overlap_graph(as_raw(r)), c.colour));
    CHECK(*std::max_element(c.colour.begin(), c.colour.end()) == chi);
  }
}

TEST_CASE("igc io stays within a heap-sort envelope") {
  BlockDevice dev({16, 16 * 16});
  auto s = IntervalSet::build(random_intervals(20000, 9, 100000, 400));
  auto c = colour_igc(s, dev);
  const double V = 20000, B = 16, mB = 16;
  const double lg = std::max(1.0, std::log(static_cast<double>(c.colours) / B) / std::log(mB));
  CHECK(static_cast<double>(c.io.total()) <= 16.0 * (V / B) * lg);
}

TEST_CASE("interval shortest paths") {
  BlockDevice dev(dev_params());
  auto lone = sssp_intervals(IntervalSet::build({{0, 1, 4}}), 0, dev);
  CHECK(lone.dist[0] == 4);
  auto chain = sssp_intervals(IntervalSet::build({{0, 2, 1}, {1, 4, 1}, {3, 6, 1}}), 0, dev);
  CHECK(chain.dist == std::vector<double>{1, 2, 3});
  CHECK(chain.parent == std::vector<std::int64_t>{-1, 0, 1});
  auto gap = sssp_intervals(IntervalSet::build({{0, 1, 1}, {5, 6, 1}}), 1, dev);
  CHECK(std::isinf(gap.dist[0]));
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    auto r = random_intervals(300, 40 + seed, 1000, 30);
    auto s = IntervalSet::build(r);
    const auto src = static_cast<std::int64_t>(seed * 37 % 300);
    auto t = sssp_intervals(s, src, dev);
    auto want = oracle::vertex_weighted_dijkstra(as_raw(r), src);
    for (std::size_t v = 0; v < r.size(); ++v) {
      CHECK(t.dist[v] == want[v]);
      if (t.parent[v] >= 0) {
        const auto p = static_cast<std::size_t>(t.parent[v]);
        CHECK(t.dist[p] + r[v].weight == t.dist[v]);
        CHECK(s.overlap(static_cast<std::int64_t>(v), t.parent[v]));
      }
    }
  }
}

TEST_CASE("interval bfs and dfs") {
  BlockDevice dev(dev_params());
  auto fan = bfs_tree(IntervalSet::build({{0, 10, 1}, {1, 2, 1}, {3, 4, 1}, {5, 12, 1}}), 0, dev);
  CHECK(fan.parent == std::vector<std::int64_t>{-1, 0, 0, 0});
  auto stair = bfs_tree(IntervalSet::build({{0, 2, 1}, {1, 4, 1}, {3, 6, 1}, {5, 8, 1}}), 0, dev);
  CHECK(stair.parent == std::vector<std::int64_t>{-1, 0, 1, 2});
  CHECK(stair.depth == std::vector<std::int64_t>{0, 1, 2, 3});
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    auto r = random_intervals(300, 70 + seed, 1000, 30);
    auto s = IntervalSet::build(r);
    const auto src = static_cast<std::int64_t>(seed * 53 % 300);
    auto t = bfs_tree(s, src, dev);
    auto want = oracle::bfs_levels(oracle::overlap_graph(as_raw(r)), src);
    CHECK(t.depth == want);
  }

  auto single = dfs_tree(IntervalSet::build({{0, 1, 1}}), dev);
  CHECK(single.parent == std::vector<std::int64_t>{-1});
  auto nest = dfs_tree(IntervalSet::build({{0, 10, 1}, {1, 9, 1}, {2, 8, 1}}), dev);
  CHECK(nest.parent == std::vector<std::int64_t>{-1, 0, 1});
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    auto r = random_intervals(300, 90 + seed, 1000, 30);
    auto s = IntervalSet::build(r);
    auto t = dfs_tree(s, dev);
    auto anc = [&](std::int64_t a, std::int64_t b) {
      for (; b >= 0; b = t.parent[static_cast<std::size_t>(b)])
        if (a == b) return true;
      return false;
    };
    std::int64_t cross = 0;
    for (const auto& e : oracle::overlap_graph(as_raw(r)).edges) cross += !(anc(e.u, e.v) || anc(e.v, e.u));
    CHECK(cross == 0);
  }
}

TEST_CASE("monotonic list labels and colours") {
  BlockDevice dev(dev_params());
  auto one = ListArray::from_succ({1, 2, 3, 4, 5, -1});
  CHECK(colour_2mlc(one, dev).colour == std::vector<std::int64_t>{0, 1, 0, 1, 0, 1});
  CHECK(mlcc_label(one, dev) == std::vector<std::int64_t>(6, 0));
  CHECK(mlcc_label(ListArray{}, dev).empty());
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto lists = random_lists(2000, 7 + static_cast<std::int64_t>(seed), seed, true);
    auto lab = mlcc_label(lists, dev);
    Graph g;
    g.V = lists.size();
    for (std::size_t u = 0; u < lists.succ.size(); ++u)
      if (lists.succ[u] >= 0) g.add_edge(static_cast<std::int64_t>(u), lists.succ[u]);
    CHECK(oracle::same_partition(lab, oracle::component_labels(g)));
    CHECK(proper_on_list(lists, colour_2mlc(lists, dev).colour));
  }
  CHECK_THROWS_AS(mlcc_label(ListArray::from_succ({-1, 0}), dev), ValidationError);
}

TEST_CASE("three colouring of general lists") {
  BlockDevice dev(dev_params());
  auto mono = ListArray::from_succ({1, 2, 3, -1});
  auto c = colour_3lc(mono, dev);
  CHECK(proper_on_list(mono, c.colour));
  CHECK(c.colours <= 3);
  // Zigzag: stretches of two forward then two backward links.
  std::vector<std::int64_t> order;
  for (std::int64_t b = 0; b < 40; b += 4) {
    order.push_back(b);
    order.push_back(b + 2);
    order.push_back(b + 3);
    order.push_back(b + 1);
  }
  std::vector<std::int64_t> succ(order.size(), -1);
  for (std::size_t j = 0; j + 1 < order.size(); ++j) succ[static_cast<std::size_t>(order[j])] = order[j + 1];
  auto zig = ListArray::from_succ(succ);
  CHECK(zig.stretches() > 10);
  auto zc = colour_3lc(zig, dev);
  CHECK(proper_on_list(zig, zc.colour));
  CHECK(zc.colours <= 3);
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    auto lists = random_lists(10000, 1 + static_cast<std::int64_t>(seed), seed, false);
    auto rc = colour_3lc(lists, dev);
    CHECK(proper_on_list(lists, rc.colour));
    CHECK(*std::max_element(rc.colour.begin(), rc.colour.end()) <= 3);
    CHECK(*std::min_element(rc.colour.begin(), rc.colour.end()) >= 1);
  }
}

TEST_CASE("mlcc and igc reductions") {
  BlockDevice dev(dev_params());
  auto single = reduce_mlcc_to_igc(ListArray::from_succ({1, 2, -1}), dev);
  CHECK(chromatic_number(single.intervals, dev) == 1);
  for (std::int64_t K = 1; K <= 10; ++K) {
    auto lists = random_lists(300, K, static_cast<std::uint64_t>(K), true);
    auto red = reduce_mlcc_to_igc(lists, dev);
    CHECK(red.components == K);
    CHECK(chromatic_number(red.intervals, dev) == K);
    auto col = colour_igc(red.intervals, dev);
    std::vector<std::int64_t> by_node(static_cast<std::size_t>(lists.size()), -1);
    for (std::size_t i = 0; i < red.node_of.size(); ++i)
      if (red.node_of[i] >= 0) by_node[static_cast<std::size_t>(red.node_of[i])] = col.colour[i];
    CHECK(oracle::same_partition(by_node, mlcc_label(lists, dev)));
  }
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto s = IntervalSet::build(random_intervals(400, 200 + seed));
    auto red = reduce_igc_to_mlcc(s, dev);
    CHECK(red.lists.monotonic());
    auto lab = mlcc_label(red.lists, dev);
    auto col = colour_igc(s, dev);
    std::vector<std::int64_t> by_interval(lab.size());
    for (std::size_t i = 0; i < lab.size(); ++i) by_interval[static_cast<std::size_t>(red.interval_of[i])] = lab[i];
    CHECK(oracle::same_partition(by_interval, col.colour));
  }
}
