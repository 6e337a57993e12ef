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

#include <random>

#include "emkit/em_mincut.hpp"
#include "emkit/errors.hpp"
#include "emkit/oracles.hpp"

using namespace emkit;

namespace {

Graph cycle(std::int64_t n) {
  Graph g;
  g.V = n;
  for (std::int64_t i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
  return g;
}

Graph complete(std::int64_t n) {
  Graph g;
  g.V = n;
  for (std::int64_t a = 0; a < n; ++a)
    for (std::int64_t b = a + 1; b < n; ++b) g.add_edge(a, b);
  return g;
}

Graph random_connected(std::int64_t V, std::int64_t E, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Graph g;
  g.V = V;
  for (std::int64_t v = 1; v < V; ++v) g.add_edge(static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(v)), v);
  while (g.E() < E) {
    const auto a = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(V));
    const auto b = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(V));
    if (a != b) g.add_edge(a, b);
  }
  return g;
}

std::int64_t crossing(const Graph& g, const std::vector<std::int64_t>& side) {
  std::vector<char> in(static_cast<std::size_t>(g.V), 0);
  for (auto x : side) in[static_cast<std::size_t>(x)] = 1;
  return oracle::cut_value(g, in);
}

DeviceParams dev_params() { return {4, 4 * 64}; }

}  // namespace

TEST_CASE("tree packing small graphs") {
  BlockDevice dev(dev_params());
  Graph k2;
  k2.V = 2;
  k2.add_edge(0, 1);
  auto p = greedy_tree_packing(k2, 0.1, dev);
  CHECK(p.trees.size() == 1);
  CHECK(p.value >= Rational(9, 10));
  CHECK(p.value <= Rational(1));

  auto c4 = greedy_tree_packing(cycle(4), 0.1, dev);
  CHECK(c4.value * Rational(10) >= Rational(9) * Rational(4, 3));
  Rational top(0);
  for (const auto& l : c4.loads) {
    CHECK(l <= Rational(1));
    top = std::max(top, l);
  }
  CHECK(top == Rational(1));
  Rational total(0);
  for (const auto& t : c4.trees) total += t.weight;
  CHECK(total == c4.value);

  Graph split;
  split.V = 4;
  split.add_edge(0, 1);
  split.add_edge(2, 3);
  CHECK_THROWS_AS(greedy_tree_packing(split, 0.1, dev), DisconnectedGraph);
  CHECK_THROWS_AS(greedy_tree_packing(k2, 1.5, dev), ValidationError);
}

TEST_CASE("one respecting cuts") {
  BlockDevice dev(dev_params());
  Graph path;
  path.V = 6;
  for (int i = 0; i < 5; ++i) path.add_edge(i, i + 1);
  auto t = root_tree(path, {0, 1, 2, 3, 4}, 0, dev);
  cut_1respect(path, t, dev);
  for (int v = 1; v < 6; ++v) CHECK(t.cut_down[static_cast<std::size_t>(v)] == 1);
  CHECK(t.cut_down[0] == -1);

  Graph c4 = cycle(4);
  auto tc = root_tree(c4, {0, 1, 2}, 0, dev);
  cut_1respect(c4, tc, dev);
  for (int v = 1; v < 4; ++v) CHECK(tc.cut_down[static_cast<std::size_t>(v)] == 2);

  Graph g = random_connected(100, 400, 7);
  std::vector<std::int64_t> tree;
  for (std::int64_t i = 0; i < 99; ++i) tree.push_back(i);
  for (std::int64_t root : {0, 37}) {
    auto rt = root_tree(g, tree, root, dev);
    cut_1respect(g, rt, dev);
    CHECK(rt.size[static_cast<std::size_t>(root)] == 100);
    for (std::int64_t v = 0; v < g.V; ++v) {
      if (v == root) continue;
      std::vector<std::int64_t> side;
      for (std::int64_t x = 0; x < g.V; ++x)
        if (rt.in_subtree(v, x)) side.push_back(x);
      CHECK(rt.cut_down[static_cast<std::size_t>(v)] == crossing(g, side));
    }
  }
  CHECK_THROWS_AS(root_tree(g, {0, 1}, 0, dev), MalformedInput);
}

TEST_CASE("cluster partition shape") {
  BlockDevice dev(dev_params());
  Graph g = random_connected(300, 300, 3);
  std::vector<std::int64_t> tree;
  for (std::int64_t i = 0; i < 299; ++i) tree.push_back(i);
  auto t = root_tree(g, tree, 0, dev);
  for (std::size_t B : {2u, 4u, 9u}) {
    auto cp = partition_tree(t, B);
    std::size_t total = 0;
    for (std::size_t c = 0; c < cp.members.size(); ++c) {
      const auto& m = cp.members[c];
      total += m.size();
      CHECK(m.size() <= 2 * B);
      std::int64_t shared = -2;
      for (auto v : m) {
        const auto p = t.parent[static_cast<std::size_t>(v)];
        if (p >= 0 && cp.cluster_of[static_cast<std::size_t>(p)] == static_cast<std::int64_t>(c)) continue;
        if (shared == -2) shared = p;
        CHECK(p == shared);
      }
      CHECK(shared == cp.root_parent[c]);
      if (cp.parent_cluster[c] >= 0) CHECK(cp.parent_cluster[c] > static_cast<std::int64_t>(c));
    }
    CHECK(total == 300);
  }
}

TEST_CASE("two respecting pair values match brute force") {
  BlockDevice dev(dev_params());
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    Graph g = random_connected(40, 90, seed);
    std::vector<std::int64_t> tree;
    for (std::int64_t i = 0; i < 39; ++i) tree.push_back(i);
    auto t = root_tree(g, tree, 0, dev);
    cut_1respect(g, t, dev);
    std::size_t seen = 0;
    std::int64_t best = -1;
    auto r = cut_2respect(g, t, dev, [&](std::int64_t u, std::int64_t v, std::int64_t val) {
      ++seen;
      CHECK(val == crossing(g, cut_side(t, u, v)));
      if (best < 0 || val < best) best = val;
    });
    CHECK(seen == 39u * 38u);
    CHECK(r.value == best);
    CHECK(r.value == crossing(g, cut_side(t, r.u, r.v)));
  }
  Graph c4 = cycle(4);
  auto t = root_tree(c4, {0, 1, 2}, 0, dev);
  cut_1respect(c4, t, dev);
  CHECK(cut_2respect(c4, t, dev).value == 2);

  Graph k4 = complete(4);
  auto star = root_tree(k4, {0, 1, 2}, 0, dev);
  cut_1respect(k4, star, dev);
  CHECK(cut_2respect(k4, star, dev).value == 4);

  BlockDevice small({8, 32});
  CHECK_THROWS_AS(cut_2respect(c4, t, small), ValidationError);
}

TEST_CASE("exact mincut against oracles") {
  BlockDevice dev(dev_params());
  CHECK(mincut_exact(cycle(7), dev).value == 2);
  CHECK(mincut_exact(complete(6), dev).value == 5);
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    Graph g = random_connected(10, 18, 100 + seed);
    auto r = mincut_exact(g, dev);
    CHECK(r.value == oracle::exhaustive_mincut(g));
    CHECK(r.value == crossing(g, r.witness.side));
    CHECK(std::find(r.witness.side.begin(), r.witness.side.end(), 0) == r.witness.side.end());
    CHECK(mincut_exact(g, dev, {0.3, MincutMode::fat, 1}).value >= r.value);
  }
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    Graph g = random_connected(48, 150, 200 + seed);
    CHECK(mincut_exact(g, dev).value == oracle::stoer_wagner(g));
  }
  Graph split;
  split.V = 3;
  split.add_edge(0, 1);
  CHECK_THROWS_AS(mincut_exact(split, dev), DisconnectedGraph);
}

TEST_CASE("sampled mincut") {
  BlockDevice dev(dev_params());
  Graph k = complete(24);
  auto p = greedy_tree_packing(k, 0.3, dev);
  int ok = 0;
  for (std::uint64_t s = 1; s <= 10; ++s) {
    auto r = mincut_with_packing(k, p, dev, {0.3, MincutMode::sampled, s});
    CHECK_FALSE(r.fell_back);
    ok += r.value == 23;
  }
  CHECK(ok >= 9);
  auto low = mincut_exact(cycle(9), dev, {0.3, MincutMode::sampled, 5});
  CHECK(low.fell_back);
  CHECK(!low.warning.empty());
  CHECK(low.value == 2);
}

TEST_CASE("certificate and approximate mincut") {
  BlockDevice dev(dev_params());
  Graph k5 = complete(5);
  auto h1 = sparse_certificate(k5, 1, dev);
  CHECK(h1.E() == 4);
  CHECK(oracle::is_connected(h1));
  auto h2 = sparse_certificate(k5, 2, dev);
  CHECK(h2.E() <= 8);
  CHECK(oracle::stoer_wagner(h2) >= 2);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Graph g = random_connected(30, 120, 300 + seed);
    const auto c = oracle::stoer_wagner(g);
    CHECK(oracle::stoer_wagner(sparse_certificate(g, c, dev)) == c);
    const auto a = mincut_approx(g, 0.5, dev).value;
    CHECK(a >= c);
    CHECK(static_cast<double>(a) <= 2.5 * static_cast<double>(c));
  }
  CHECK(mincut_approx(cycle(8), 0.5, dev).value == 2);
  Graph star;
  star.V = 6;
  for (int i = 1; i < 6; ++i) star.add_edge(0, i);
  CHECK(mincut_approx(star, 0.5, dev).value == 1);
}

TEST_CASE("alpha index") {
  BlockDevice dev(dev_params());
  Graph c5 = cycle(5);
  auto idx = build_alpha_index(c5, 1.4, dev, 0.1);
  CHECK(idx.mincut() == 2);
  CHECK(idx.size() == 10);
  for (std::uint32_t mask = 0; mask < 16; ++mask) {
    std::vector<std::int64_t> side;
    for (int b = 0; b < 4; ++b)
      if (mask >> b & 1) side.push_back(b + 1);
    const bool want = !side.empty() && crossing(c5, side) <= 2;
    CHECK(idx.query(side) == want);
  }
  Graph k2;
  k2.V = 2;
  k2.add_edge(0, 1);
  auto one = build_alpha_index(k2, 1.2, dev);
  CHECK(one.size() == 1);
  CHECK(one.query({0}));
  CHECK(one.query({1}));
  CHECK_THROWS_AS(build_alpha_index(c5, 1.5, dev), UnsupportedAlpha);
}
