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
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "doctest.h"
#include "emkit/em_core.hpp"

using namespace emkit;

namespace {

DeviceParams small(std::size_t B, std::size_t M) { return DeviceParams{B, M}; }

std::uint64_t reads_of_scan(std::size_t n, std::size_t B) {
  BlockDevice dev(small(B, 8 * B));
  auto arr = DiskArray<int>::load(dev, std::vector<int>(n, 1));
  const auto before = dev.stats();
  em_scan(arr, [](int) {});
  return (dev.stats() - before).reads;
}

}  // namespace

TEST_CASE("device parameters") {
  CHECK(DeviceParams{4, 10}.m() == 2);
  CHECK_THROWS_AS(DeviceParams({1, 10}).validate(), ValidationError);
  CHECK_THROWS_AS(DeviceParams({4, 7}).validate(), ValidationError);
  IoStats s{3, 4};
  CHECK(IoStats::csv_header() == "op,reads,writes,N,B,M");
  CHECK(s.csv_row("scan", 10, DeviceParams{2, 8}) == "scan,3,4,10,2,8");
}

TEST_CASE("em_scan charges ceil(N/B) reads") {
  CHECK(reads_of_scan(0, 8) == 0);
  CHECK(reads_of_scan(8, 8) == 1);
  CHECK(reads_of_scan(10 * 8 + 1, 8) == 11);
  for (std::size_t n : {1u, 7u, 64u, 65u, 1000u}) CHECK(reads_of_scan(n, 8) == (n + 7) / 8);
}

TEST_CASE("buffer pool recharges after eviction") {
  BlockDevice dev(small(2, 4));  // two frames
  auto arr = DiskArray<int>::load(dev, {1, 2, 3, 4, 5, 6});
  (void)arr.get(0);
  (void)arr.get(1);  // same block
  CHECK(dev.stats().reads == 1);
  (void)arr.get(2);
  (void)arr.get(4);  // evicts block 0
  (void)arr.get(0);
  CHECK(dev.stats().reads == 4);
}

TEST_CASE("em_sort small cases") {
  BlockDevice dev(small(2, 4));
  auto arr = DiskArray<int>::load(dev, {3, 1, 2});
  auto out = em_sort(arr);
  CHECK(out.raw() == std::vector<int>{1, 2, 3});

  BlockDevice dev2(small(4, 16));
  std::vector<int> sorted(16);
  std::iota(sorted.begin(), sorted.end(), 0);
  auto in2 = DiskArray<int>::load(dev2, sorted);
  SortReport rep;
  auto out2 = em_sort(in2, std::less<int>{}, {}, &rep);
  CHECK(out2.raw() == sorted);
  CHECK(rep.runs_formed == 1);
  CHECK(rep.merge_passes == 0);
}

TEST_CASE("em_sort is stable") {
  BlockDevice dev(small(2, 8));
  std::vector<std::pair<int, int>> v;
  std::mt19937 rng(5);
  for (int i = 0; i < 300; ++i) v.push_back({static_cast<int>(rng() % 7), i});
  auto arr = DiskArray<std::pair<int, int>>::load(dev, v);
  auto out = em_sort(arr, [](const auto& a, const auto& b) { return a.first < b.first; });
  std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  CHECK(out.raw() == v);
}

TEST_CASE("em_sort random N=2^14 within the I/O ceiling") {
  const std::size_t N = 1 << 14, B = 64, M = 1024;
  BlockDevice dev(small(B, M));
  std::mt19937_64 rng(11);
  std::vector<std::uint64_t> v(N);
  for (auto& x : v) x = rng();
  auto arr = DiskArray<std::uint64_t>::load(dev, v);
  auto out = em_sort(arr);
  std::sort(v.begin(), v.end());
  CHECK(out.raw() == v);
  const double nb = static_cast<double>(N) / B;
  const double bound = 4.0 * nb * std::log(nb) / std::log(static_cast<double>(M) / B);
  CHECK(static_cast<double>(dev.stats().total()) <= bound);
}

TEST_CASE("em_sort respects the capacity cap") {
  BlockDevice dev(small(4, 16));
  std::vector<int> v(200);
  std::iota(v.rbegin(), v.rend(), 0);
  auto arr = DiskArray<int>::load(dev, v);
  CHECK_THROWS_AS(em_sort(arr, std::less<int>{}, SortOptions{0.5}), ResourceError);

  BlockDevice tight(small(4, 16), 250);
  auto arr2 = DiskArray<int>::load(tight, v);
  CHECK_THROWS_AS(em_sort(arr2), ResourceError);
}

namespace {

DiskArray<ListRecord<std::int64_t>> make_list(BlockDevice& dev, const std::vector<std::int64_t>& order) {
  std::vector<ListRecord<std::int64_t>> recs(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    auto& r = recs[i];
    r.id = order[i];
    r.pred = i == 0 ? kNil : order[i - 1];
    r.succ = i + 1 == order.size() ? kNil : order[i + 1];
    r.w = 1;
  }
  std::shuffle(recs.begin(), recs.end(), std::mt19937(3));
  return DiskArray<ListRecord<std::int64_t>>::load(dev, recs);
}

}  // namespace

TEST_CASE("em_list_rank trivial lists") {
  BlockDevice dev(small(2, 8));
  auto one = make_list(dev, {42});
  auto r1 = em_list_rank(one);
  REQUIRE(r1.size() == 1);
  CHECK(r1.raw()[0].rank == 0);

  auto chain = make_list(dev, {10, 11, 12, 13, 14});
  auto r2 = em_list_rank(chain);
  for (std::size_t i = 0; i < 5; ++i) CHECK(r2.raw()[i].rank == static_cast<std::int64_t>(i));
}

TEST_CASE("em_list_rank random lists equal a pointer walk") {
  for (std::uint32_t seed = 1; seed <= 4; ++seed) {
    BlockDevice dev(small(4, 32));
    std::mt19937 rng(seed);
    // Several disjoint lists over ids 0..999.
    std::vector<std::int64_t> ids(1000);
    std::iota(ids.begin(), ids.end(), 0);
    std::shuffle(ids.begin(), ids.end(), rng);
    std::vector<ListRecord<std::int64_t>> recs(1000);
    std::map<std::int64_t, std::int64_t> expect;
    std::size_t i = 0;
    while (i < ids.size()) {
      const std::size_t len = 1 + rng() % 300;
      const std::size_t hi = std::min(ids.size(), i + len);
      for (std::size_t k = i; k < hi; ++k) {
        auto& r = recs[static_cast<std::size_t>(ids[k])];
        r.id = ids[k];
        r.pred = k == i ? kNil : ids[k - 1];
        r.succ = k + 1 == hi ? kNil : ids[k + 1];
        r.w = 1;
        expect[ids[k]] = static_cast<std::int64_t>(k - i);
      }
      i = hi;
    }
    auto arr = DiskArray<ListRecord<std::int64_t>>::load(dev, recs);
    auto ranks = em_list_rank(arr);
    REQUIRE(ranks.size() == 1000);
    for (const auto& r : ranks.raw()) CHECK(r.rank == expect[r.id]);
  }
}

TEST_CASE("em_list_rank with bitwise OR") {
  BlockDevice dev(small(2, 8));
  std::vector<ListRecord<std::uint32_t>> recs;
  const std::vector<std::uint32_t> w = {1, 0, 4, 0, 2, 0, 8, 0, 0};
  for (std::int64_t i = 0; i < 9; ++i)
    recs.push_back({i, i + 1 < 9 ? i + 1 : kNil, i > 0 ? i - 1 : kNil, w[static_cast<std::size_t>(i)]});
  auto arr = DiskArray<ListRecord<std::uint32_t>>::load(dev, recs);
  auto ranks = em_list_rank<std::uint32_t>(arr, 0u, [](std::uint32_t a, std::uint32_t b) { return a | b; });
  std::uint32_t acc = 0;
  for (std::size_t i = 0; i < 9; ++i) {
    CHECK(ranks.raw()[i].rank == acc);
    acc |= w[i];
  }
}

TEST_CASE("em_list_rank rejects malformed lists") {
  BlockDevice dev(small(2, 8));
  std::vector<ListRecord<std::int64_t>> cyc;
  for (std::int64_t i = 0; i < 50; ++i) cyc.push_back({i, (i + 1) % 50, (i + 49) % 50, 1});
  auto a = DiskArray<ListRecord<std::int64_t>>::load(dev, cyc);
  CHECK_THROWS_AS(em_list_rank(a), MalformedInput);

  std::vector<ListRecord<std::int64_t>> bad = {{0, 1, kNil, 1}, {1, kNil, kNil, 1}};
  auto b = DiskArray<ListRecord<std::int64_t>>::load(dev, bad);
  CHECK_THROWS_AS(em_list_rank(b), MalformedInput);

  std::vector<ListRecord<std::int64_t>> self = {{0, 0, 0, 1}};
  auto c = DiskArray<ListRecord<std::int64_t>>::load(dev, self);
  CHECK_THROWS_AS(em_list_rank(c), MalformedInput);
}

namespace {

// Tour built directly from adjacency lists sorted by neighbour id.
std::vector<std::pair<std::int64_t, std::int64_t>> memory_tour(
    const std::vector<UEdge>& edges, std::int64_t root) {
  std::map<std::int64_t, std::vector<std::int64_t>> adj;
  for (const auto& e : edges) {
    adj[e.a].push_back(e.b);
    adj[e.b].push_back(e.a);
  }
  for (auto& [v, l] : adj) std::sort(l.begin(), l.end());
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  if (adj.empty()) return out;
  std::int64_t u = root, v = adj[root][0];
  const auto start = std::make_pair(u, v);
  do {
    out.push_back({u, v});
    const auto& l = adj[v];
    const auto pos = std::find(l.begin(), l.end(), u) - l.begin();
    const std::int64_t w = l[static_cast<std::size_t>(pos + 1) % l.size()];
    u = v;
    v = w;
  } while (std::make_pair(u, v) != start);
  return out;
}

}  // namespace

TEST_CASE("em_euler_tour small trees") {
  BlockDevice dev(small(2, 8));
  auto e1 = DiskArray<UEdge>::load(dev, {{0, 1}});
  auto t1 = em_euler_tour(e1, 0);
  REQUIRE(t1.order.size() == 2);
  CHECK(t1.order.raw()[0].u == 0);
  CHECK(t1.order.raw()[0].v == 1);
  CHECK(t1.order.raw()[1].u == 1);
  CHECK(t1.order.raw()[1].v == 0);

  auto e2 = DiskArray<UEdge>::load(dev, {{0, 1}, {1, 2}});
  auto t2 = em_euler_tour(e2, 0);
  CHECK(t2.order.size() == 4);
  CHECK(t2.trees == 1);
}

TEST_CASE("em_euler_tour random tree equals in-memory tour") {
  for (std::uint32_t seed = 1; seed <= 3; ++seed) {
    std::mt19937 rng(seed);
    const std::int64_t n = 200;
    std::vector<UEdge> edges;
    for (std::int64_t v = 1; v < n; ++v) edges.push_back({static_cast<std::int64_t>(rng() % v), v});
    std::shuffle(edges.begin(), edges.end(), rng);
    BlockDevice dev(small(4, 64));
    auto arr = DiskArray<UEdge>::load(dev, edges);
    const std::int64_t root = static_cast<std::int64_t>(rng() % n);
    auto tour = em_euler_tour(arr, root);
    const auto expect = memory_tour(edges, root);
    REQUIRE(tour.order.size() == static_cast<std::size_t>(2 * (n - 1)));
    for (std::size_t i = 0; i < expect.size(); ++i) {
      CHECK(tour.order.raw()[i].u == expect[i].first);
      CHECK(tour.order.raw()[i].v == expect[i].second);
      CHECK(tour.order.raw()[i].rank == static_cast<std::int64_t>(i));
    }
    // Every undirected edge appears twice.
    std::map<std::pair<std::int64_t, std::int64_t>, int> seen;
    for (const auto& t : tour.order.raw()) ++seen[{std::min(t.u, t.v), std::max(t.u, t.v)}];
    for (const auto& [k, c] : seen) CHECK(c == 2);
  }
}

TEST_CASE("em_euler_tour forests and malformed input") {
  BlockDevice dev(small(2, 8));
  auto forest = DiskArray<UEdge>::load(dev, {{0, 1}, {5, 6}, {6, 7}});
  auto t = em_euler_tour(forest, 6);
  CHECK(t.trees == 2);
  CHECK(t.order.size() == 6);
  auto cyc = DiskArray<UEdge>::load(dev, {{0, 1}, {1, 2}, {2, 0}});
  CHECK_THROWS_AS(em_euler_tour(cyc, 0), MalformedInput);
  auto loop = DiskArray<UEdge>::load(dev, {{3, 3}});
  CHECK_THROWS_AS(em_euler_tour(loop, 3), MalformedInput);
}

TEST_CASE("em_time_forward") {
  BlockDevice dev(small(2, 8));
  auto sum = [](std::size_t, long a, long b) { return a + b; };
  CHECK(em_time_forward<long>(dev, {{kNil, 0}}, {7}, sum) == std::vector<long>{7});
  // Leaves 1, 2, 3 under one root.
  std::vector<TfNode> nodes = {{3, 1}, {3, 1}, {3, 1}, {kNil, 0}};
  auto out = em_time_forward<long>(dev, nodes, {1, 2, 3, 0}, sum);
  CHECK(out[3] == 6);
  std::vector<TfNode> unsorted = {{kNil, 0}, {0, 1}};
  CHECK_THROWS_AS(em_time_forward<long>(dev, unsorted, {0, 1}, sum), PreconditionError);
}

TEST_CASE("em_time_forward evaluates random expression trees") {
  std::mt19937 rng(9);
  const std::size_t n = 500;
  // Random tree: parent of v is some u < v; ops alternate + and * by node.
  std::vector<std::int64_t> parent(n, kNil);
  std::vector<std::uint32_t> depth(n, 0);
  for (std::size_t v = 1; v < n; ++v) {
    parent[v] = static_cast<std::int64_t>(rng() % v);
    depth[v] = depth[static_cast<std::size_t>(parent[v])] + 1;
  }
  std::vector<std::vector<std::size_t>> kids(n);
  for (std::size_t v = 1; v < n; ++v) kids[static_cast<std::size_t>(parent[v])].push_back(v);
  std::vector<char> is_mul(n);
  std::vector<std::int64_t> leaf(n);
  for (std::size_t v = 0; v < n; ++v) {
    is_mul[v] = static_cast<char>(rng() % 2);
    leaf[v] = static_cast<std::int64_t>(rng() % 5) - 2;
  }
  const std::int64_t mod = 1000000007;
  std::function<std::int64_t(std::size_t)> eval = [&](std::size_t v) -> std::int64_t {
    if (kids[v].empty()) return leaf[v];
    std::int64_t acc = is_mul[v] ? 1 : 0;
    for (auto c : kids[v]) acc = is_mul[v] ? (acc * eval(c)) % mod : (acc + eval(c)) % mod;
    return acc;
  };
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return depth[a] > depth[b]; });
  std::vector<std::size_t> pos(n);
  for (std::size_t i = 0; i < n; ++i) pos[order[i]] = i;
  std::vector<TfNode> nodes(n);
  std::vector<std::int64_t> init(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = order[i];
    nodes[i] = {parent[v] == kNil ? kNil : static_cast<std::int64_t>(pos[static_cast<std::size_t>(parent[v])]), depth[v]};
    init[i] = kids[v].empty() ? leaf[v] : (is_mul[v] ? 1 : 0);
  }
  BlockDevice dev(small(4, 64));
  auto out = em_time_forward<std::int64_t>(dev, nodes, init, [&](std::size_t i, std::int64_t a, std::int64_t b) {
    return is_mul[order[i]] ? (a * b) % mod : (a + b) % mod;
  });
  CHECK(out[pos[0]] == eval(0));
}
