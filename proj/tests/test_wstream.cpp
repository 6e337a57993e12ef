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

#include <algorithm>
#include <functional>
#include <numeric>
#include <random>

#include "doctest.h"
#include "emkit/errors.hpp"
#include "emkit/oracles.hpp"
#include "emkit/wstream.hpp"

using namespace emkit;

namespace {

WsOptions mem(std::size_t M) {
  WsOptions o;
  o.M = M;
  return o;
}

Graph random_tree(std::int64_t V, std::mt19937_64& rng) {
  Graph t;
  t.V = V;
  for (std::int64_t v = 1; v < V; ++v) {
    std::uniform_int_distribution<std::int64_t> pick(0, v - 1);
    t.add_edge(pick(rng), v);
  }
  return t;
}

Graph random_graph(std::int64_t V, std::int64_t E, std::mt19937_64& rng, int wmax = 1) {
  Graph g;
  g.V = V;
  std::uniform_int_distribution<std::int64_t> pick(0, V - 1);
  std::uniform_int_distribution<int> weight(1, wmax);
  while (g.E() < E) {
    const auto a = pick(rng), b = pick(rng);
    if (a != b) g.add_edge(a, b, weight(rng));
  }
  return g;
}

// Depth-first order that leaves each vertex towards the neighbour after the
// one it came from, in cyclic sorted order.
struct TourOrder {
  std::vector<std::int64_t> parent, pre, post, depth, size;
};

TourOrder tour_order(const Graph& t, std::int64_t root) {
  auto adj = t.adjacency();
  for (auto& a : adj) std::sort(a.begin(), a.end());
  const auto V = static_cast<std::size_t>(t.V);
  TourOrder o{std::vector<std::int64_t>(V, -1), std::vector<std::int64_t>(V), std::vector<std::int64_t>(V),
              std::vector<std::int64_t>(V), std::vector<std::int64_t>(V, 1)};
  std::int64_t pre = 0, post = 0;
  std::function<void(std::int64_t, std::int64_t, std::int64_t)> go = [&](std::int64_t v, std::int64_t p,
                                                                          std::int64_t d) {
    const auto vi = static_cast<std::size_t>(v);
    o.parent[vi] = p;
    o.depth[vi] = d;
    o.pre[vi] = ++pre;
    const auto& a = adj[vi];
    std::size_t start = 0;
    if (p >= 0) start = static_cast<std::size_t>(std::upper_bound(a.begin(), a.end(), p) - a.begin());
    for (std::size_t k = 0; k < a.size(); ++k) {
      const auto w = a[(start + k) % a.size()];
      if (w == p) continue;
      go(w, v, d + 1);
      o.size[vi] += o.size[static_cast<std::size_t>(w)];
    }
    o.post[vi] = ++post;
  };
  go(root, -1, 0);
  return o;
}

}  // namespace

TEST_CASE("tape machine enforces the memory budget and the output cap") {
  TapeMachine m(mem(4));
  m.load(std::vector<StreamItem>(3));
  m.hold(4);
  CHECK_THROWS_AS(m.hold(1), BudgetError);
  CHECK(m.breaches() == 1);

  WsOptions loose = mem(4);
  loose.strict = false;
  TapeMachine n(loose);
  n.hold(6);
  CHECK(n.breaches() == 1);
  CHECK(n.peak() == 6);

  TapeMachine c(mem(4));
  c.load(std::vector<StreamItem>(2));
  c.begin_pass();
  for (int i = 0; i < 16; ++i) c.write(StreamItem{});
  CHECK_THROWS_AS(c.write(StreamItem{}), BudgetError);
  CHECK_THROWS_AS(TapeMachine(mem(1)), ValidationError);
}

TEST_CASE("sort pass counts follow the merge schedule") {
  std::mt19937_64 rng(7);
  const std::size_t M = 32;
  for (std::size_t ratio : {1, 2, 4, 8, 16}) {
    std::vector<std::int64_t> keys(ratio * M);
    for (auto& k : keys) k = static_cast<std::int64_t>(rng() % 1000);
    auto res = ws_sort(keys, mem(M));
    auto want = keys;
    std::sort(want.begin(), want.end());
    CHECK(res.keys == want);
    std::size_t expect = 1;
    for (std::size_t k = 1; (std::size_t{1} << k) <= ratio; ++k) expect += std::size_t{1} << k;
    CHECK(res.report.passes == expect);
    CHECK(res.report.peak_live <= M);
  }
  std::vector<std::int64_t> keys(4 * 50);
  for (auto& k : keys) k = static_cast<std::int64_t>(rng() % 97);
  CHECK(ws_sort(keys, mem(50)).report.passes <= 7);

  for (std::size_t n : {0, 1, 33, 95, 150}) {
    std::vector<std::int64_t> ks(n);
    for (auto& k : ks) k = static_cast<std::int64_t>(rng() % 50);
    auto want = ks;
    std::sort(want.begin(), want.end());
    CHECK(ws_sort(ks, mem(16)).keys == want);
  }
}

TEST_CASE("list ranking") {
  SUBCASE("chain of five") {
    auto res = ws_list_rank({1, 2, 3, 4, -1}, mem(2));
    CHECK(res.rank == std::vector<std::int64_t>{0, 1, 2, 3, 4});
  }
  SUBCASE("shuffled list of three memory loads") {
    std::mt19937_64 rng(3);
    const std::size_t M = 40, n = 3 * M;
    std::vector<std::int64_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::int64_t> succ(n, -1), weight(n);
    for (std::size_t i = 0; i + 1 < n; ++i) succ[static_cast<std::size_t>(order[i])] = order[i + 1];
    for (auto& w : weight) w = static_cast<std::int64_t>(rng() % 5) - 1;
    auto res = ws_list_rank(succ, mem(M));
    for (std::size_t i = 0; i < n; ++i) CHECK(res.rank[static_cast<std::size_t>(order[i])] == static_cast<std::int64_t>(i));
    CHECK(res.report.passes <= 2 * (n / M) + 2);
    CHECK(res.report.peak_live <= M);

    auto wres = ws_list_rank(succ, mem(M), weight);
    std::int64_t acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(wres.rank[static_cast<std::size_t>(order[i])] == acc);
      acc += weight[static_cast<std::size_t>(order[i])];
    }
  }
  SUBCASE("several lists") {
    std::mt19937_64 rng(5);
    const std::size_t n = 200;
    std::vector<std::int64_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::int64_t> succ(n, -1), want(n);
    std::int64_t pos = 0;
    for (std::size_t i = 0; i < n; ++i) {
      want[static_cast<std::size_t>(order[i])] = pos++;
      if (i % 37 == 36) {
        pos = 0;
      } else if (i + 1 < n) {
        succ[static_cast<std::size_t>(order[i])] = order[i + 1];
      }
    }
    CHECK(ws_list_rank(succ, mem(16)).rank == want);
  }
  SUBCASE("cycles are rejected") {
    CHECK_THROWS_AS(ws_list_rank({1, 2, 0}, mem(8)), MalformedInput);
    std::vector<std::int64_t> succ(100);
    for (std::size_t i = 0; i < 100; ++i) succ[i] = static_cast<std::int64_t>((i * 7 + 3) % 100);
    CHECK_THROWS_AS(ws_list_rank(succ, mem(8)), MalformedInput);
    CHECK_THROWS_AS(ws_list_rank({1, 1, -1}, mem(8)), MalformedInput);
  }
}

TEST_CASE("Euler tour and tree labels") {
  SUBCASE("single edge") {
    Graph t;
    t.V = 2;
    t.add_edge(0, 1);
    auto tour = ws_euler_tour(t, 0, mem(4));
    CHECK(tour.arcs.size() == 2);
    CHECK(ws_label_tree(t, 0, LabelMode::depth, mem(4)).values == std::vector<std::int64_t>{0, 1});
    CHECK(ws_label_tree(t, 0, LabelMode::descendants, mem(4)).values == std::vector<std::int64_t>{2, 1});
  }
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 6; ++trial) {
    const std::int64_t V = 20 + 30 * trial;
    Graph t = random_tree(V, rng);
    const std::int64_t root = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(V));
    const std::size_t M = 16;
    auto tour = ws_euler_tour(t, root, mem(M));
    std::size_t steps = 0;
    std::int64_t at = tour.first;
    CHECK(tour.arcs[static_cast<std::size_t>(at)].u == root);
    std::int64_t last = -1;
    while (at >= 0) {
      const auto& a = tour.arcs[static_cast<std::size_t>(at)];
      if (last >= 0) CHECK(tour.arcs[static_cast<std::size_t>(last)].v == a.u);
      last = at;
      at = a.next;
      ++steps;
    }
    CHECK(steps == 2 * static_cast<std::size_t>(V - 1));
    CHECK(tour.arcs[static_cast<std::size_t>(last)].v == root);

    const TourOrder o = tour_order(t, root);
    auto parent = ws_root_tree(t, root, mem(M));
    CHECK(parent.values == o.parent);
    CHECK(parent.report.peak_live <= M);
    CHECK(ws_label_tree(t, root, LabelMode::preorder, mem(M)).values == o.pre);
    CHECK(ws_label_tree(t, root, LabelMode::postorder, mem(M)).values == o.post);
    CHECK(ws_label_tree(t, root, LabelMode::depth, mem(M)).values == o.depth);
    CHECK(ws_label_tree(t, root, LabelMode::descendants, mem(M)).values == o.size);
  }
  Graph bad;
  bad.V = 4;
  bad.add_edge(0, 1);
  bad.add_edge(1, 0);
  bad.add_edge(2, 3);
  CHECK_THROWS_AS(ws_root_tree(bad, 0, mem(4)), MalformedInput);
  Graph cyc;
  cyc.V = 4;
  cyc.add_edge(0, 1);
  cyc.add_edge(1, 2);
  cyc.add_edge(2, 0);
  CHECK_THROWS_AS(ws_root_tree(cyc, 0, mem(4)), MalformedInput);
}

TEST_CASE("expression evaluation") {
  // (3 + 4) * 2
  std::vector<ExprNode> e{{-1, ExprOp::mul, 0}, {0, ExprOp::add, 0}, {1, ExprOp::leaf, 3},
                          {1, ExprOp::leaf, 4}, {0, ExprOp::leaf, 2}};
  CHECK(ws_expr_eval(e, mem(4)).values[0] == doctest::Approx(14));

  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 4; ++trial) {
    const std::int64_t n = 150;
    std::vector<ExprNode> nodes(static_cast<std::size_t>(n));
    std::vector<std::vector<std::int64_t>> kids(static_cast<std::size_t>(n));
    for (std::int64_t v = 1; v < n; ++v) {
      const auto p = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(v));
      nodes[static_cast<std::size_t>(v)].parent = p;
      kids[static_cast<std::size_t>(p)].push_back(v);
    }
    const ExprOp ops[] = {ExprOp::add, ExprOp::min, ExprOp::max};
    for (std::int64_t v = 0; v < n; ++v) {
      auto& nd = nodes[static_cast<std::size_t>(v)];
      if (kids[static_cast<std::size_t>(v)].empty()) {
        nd.op = ExprOp::leaf;
        nd.value = static_cast<double>(rng() % 100);
      } else {
        nd.op = ops[rng() % 3];
      }
    }
    std::function<double(std::int64_t)> eval = [&](std::int64_t v) {
      const auto& nd = nodes[static_cast<std::size_t>(v)];
      if (nd.op == ExprOp::leaf) return nd.value;
      double acc = 0;
      bool first = true;
      for (auto c : kids[static_cast<std::size_t>(v)]) {
        const double x = eval(c);
        if (first) acc = x;
        else if (nd.op == ExprOp::add) acc += x;
        else if (nd.op == ExprOp::min) acc = std::min(acc, x);
        else acc = std::max(acc, x);
        first = false;
      }
      return acc;
    };
    auto res = ws_expr_eval(nodes, mem(16));
    for (std::int64_t v = 0; v < n; ++v) CHECK(res.values[static_cast<std::size_t>(v)] == doctest::Approx(eval(v)));
    CHECK(res.report.peak_live <= 16);
  }
  std::vector<ExprNode> bad{{-1, ExprOp::add, 0}};
  CHECK_THROWS_AS(ws_expr_eval(bad, mem(4)), MalformedInput);
}

TEST_CASE("independent sets, colourings and matchings") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 8; ++trial) {
    Graph g = random_graph(60 + 10 * trial, 200 + 40 * trial, rng);
    for (Repr repr : {Repr::adjacency, Repr::edges}) {
      const std::size_t M = 24;
      auto mis = ws_mis(g, repr, mem(M));
      CHECK(oracle::is_maximal_independent(g, mis.in));
      CHECK(mis.report.peak_live <= M);
      auto col = ws_colouring(g, repr, mem(M));
      CHECK(oracle::is_proper_colouring(g, col.colour));
      const auto deg = g.degrees();
      for (std::int64_t v = 0; v < g.V; ++v) {
        CHECK(col.colour[static_cast<std::size_t>(v)] >= 1);
        CHECK(col.colour[static_cast<std::size_t>(v)] <= deg[static_cast<std::size_t>(v)] + 1);
      }
      CHECK(col.report.peak_live <= M);
    }
    auto mt = ws_maximal_matching(g, mem(16));
    CHECK(oracle::is_maximal_matching(g, mt.edge_ids));
    CHECK(mt.report.peak_live <= 16);
  }
  Graph loop;
  loop.V = 2;
  loop.add_edge(1, 1);
  CHECK_THROWS_AS(ws_mis(loop, Repr::edges, mem(8)), MalformedInput);
}

TEST_CASE("vertex cover") {
  Graph one;
  one.V = 2;
  one.add_edge(0, 1);
  auto c = ws_vertex_cover(one, {1, 3}, mem(4));
  CHECK(c.in == std::vector<char>{1, 0});

  Graph star;
  star.V = 6;
  for (std::int64_t v = 1; v < 6; ++v) star.add_edge(0, v);
  auto s = ws_vertex_cover(star, {1, 5, 5, 5, 5, 5}, mem(4));
  CHECK(s.in == std::vector<char>{1, 0, 0, 0, 0, 0});

  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 20; ++trial) {
    Graph g = random_graph(12, 24, rng);
    std::vector<std::int64_t> w(12);
    for (auto& x : w) x = 1 + static_cast<std::int64_t>(rng() % 9);
    auto res = ws_vertex_cover(g, w, mem(4));
    CHECK(oracle::is_vertex_cover(g, res.in));
    CHECK(res.weight <= 2 * oracle::min_vertex_cover_weight(g, w));
    CHECK(res.report.peak_live <= 4);
  }
  CHECK_THROWS_AS(ws_vertex_cover(one, {0, 1}, mem(4)), ValidationError);
}

TEST_CASE("shortest paths on the stream") {
  CHECK(ws_rounded_weight(3, 2) == 4);
  CHECK(ws_rounded_weight(0, 2) == 2);

  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 4; ++trial) {
    const std::int64_t V = 20 + 10 * trial;
    Graph g = random_graph(V, 3 * V, rng, 9);
    std::vector<std::int64_t> A(static_cast<std::size_t>(V));
    std::iota(A.begin(), A.end(), 0);
    auto res = stream_dijkstra(g, A, std::numeric_limits<std::int64_t>::max(),
                               mem(2 * static_cast<std::size_t>(V * V)));
    for (std::int64_t s = 0; s < V; s += 7) {
      const auto d = oracle::dijkstra(g, s);
      for (std::int64_t v = 0; v < V; ++v) {
        const double want = d[static_cast<std::size_t>(v)];
        const auto got = res.units[static_cast<std::size_t>(s)][static_cast<std::size_t>(v)];
        if (want == oracle::kInf) CHECK(got == -1);
        else CHECK(static_cast<double>(got) == want);
      }
    }
  }

  Graph g = random_graph(120, 480, rng, 20);
  auto approx = ws_sssp_approx(g, 0, 0.25, 2.0, mem(512));
  const auto d = oracle::dijkstra(g, 0);
  std::size_t good = 0;
  for (std::int64_t v = 0; v < g.V; ++v) {
    const auto vi = static_cast<std::size_t>(v);
    CHECK(approx.dist[vi] >= d[vi] - 1e-9);
    if (approx.dist[vi] <= 1.25 * d[vi] + 1e-9) ++good;
    if (approx.dist[vi] == oracle::kInf) continue;
    const auto p = approx.path(v);
    REQUIRE(!p.empty());
    CHECK(p.front() == 0);
    CHECK(p.back() == v);
    double len = 0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
      double w = oracle::kInf;
      for (const auto& e : g.edges) {
        if ((e.u == p[i] && e.v == p[i + 1]) || (e.v == p[i] && e.u == p[i + 1])) w = std::min(w, e.w);
      }
      len += w;
    }
    CHECK(len <= approx.dist[vi] + 1e-9);
  }
  CHECK(good >= 114);
  CHECK(approx.report.peak_live <= 512);
}
