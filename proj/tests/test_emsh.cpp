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
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "emkit/emsh.hpp"
#include "emkit/errors.hpp"

using namespace emkit;

namespace {
DeviceParams small_dev() { return {2, 2 * 144}; }
}  // namespace

TEST_CASE("emsh parameters") {
  auto p = EmshParams::soft({2, 288}, 0.2);
  CHECK(p.sqrt_m == 12);
  CHECK(p.r == 1);
  CHECK(p.cap == 24);
  CHECK(p.half == 12);
  CHECK(p.s(1) == 0);
  CHECK(p.s(2) == 2);
  CHECK(p.s(3) == 3);
  CHECK(p.s(4) == 5);
  CHECK(EmshParams::soft({2, 288}, 0.05).r == 2);
  CHECK(EmshParams::soft({2, 288}, 1.0).r == 0);
  CHECK_THROWS_AS(EmshParams::soft({2, 32}, 0.5), ValidationError);
  CHECK_NOTHROW(EmshParams::soft({2, 32}, 1.0));
  CHECK_THROWS_AS(EmshParams::soft({2, 288}, 0.0), ValidationError);
  CHECK_THROWS_AS(EmshParams::soft({2, 288}, 1.5), ValidationError);
}

TEST_CASE("emsh small sequence") {
  BlockDevice dev(small_dev());
  SoftHeap h(dev, 0.5);
  for (std::int64_t k : {5, 3, 8, 1}) h.insert(k);
  CHECK(h.findmin().key == 1);
  std::vector<std::int64_t> got;
  while (!h.empty()) got.push_back(h.deletemin().key);
  CHECK(got == std::vector<std::int64_t>{1, 3, 5, 8});
  CHECK_THROWS_AS(h.deletemin(), EmptyError);
  CHECK_THROWS_AS(h.findmin(), EmptyError);
}

TEST_CASE("emsh hard heap sorts exactly") {
  BlockDevice dev(small_dev());
  SoftHeap h = SoftHeap::hard(dev);
  std::mt19937_64 rng(7);
  std::vector<std::int64_t> keys(5000);
  for (auto& k : keys) k = static_cast<std::int64_t>(rng() % 1000);
  for (auto k : keys) h.insert(k);
  CHECK(h.audit() == "");
  CHECK(h.max_rank() >= 1);
  std::sort(keys.begin(), keys.end());
  std::vector<std::int64_t> got;
  std::size_t step = 0;
  while (!h.empty()) {
    auto it = h.deletemin();
    CHECK_FALSE(it.corrupt);
    got.push_back(it.key);
    if (++step % 397 == 0) REQUIRE(h.audit() == "");
  }
  CHECK(got == keys);
}

TEST_CASE("emsh soft heap with epsilon one builds deep cnodes") {
  BlockDevice dev({2, 2 * 16});  // sqrt(m) = 4, r = 0
  SoftHeap h(dev, 1.0);
  std::mt19937_64 rng(11);
  const std::size_t n = 20000;
  std::multiset<std::int64_t> alive;
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::int64_t>(rng() % 100000);
    h.insert(k);
    alive.insert(k);
    if (i % 1499 == 0) REQUIRE(h.audit() == "");
  }
  CHECK(h.max_rank() >= 3);
  CHECK(h.corrupt_count() <= n);
  std::size_t step = 0;
  while (!h.empty()) {
    auto it = h.deletemin();
    auto pos = alive.find(it.key);
    REQUIRE(pos != alive.end());
    alive.erase(pos);
    if (++step % 1009 == 0) REQUIRE(h.audit() == "");
    if (step % 3 == 0 && step < n / 2) {
      const auto k = static_cast<std::int64_t>(rng() % 100000);
      h.insert(k);
      alive.insert(k);
    }
  }
  CHECK(alive.empty());
  CHECK(h.audit() == "");
}

TEST_CASE("emsh corruption stays within epsilon n") {
  for (double eps : {0.2, 0.05}) {
    for (unsigned seed = 1; seed <= 3; ++seed) {
      BlockDevice dev(small_dev());
      SoftHeap h(dev, eps);
      std::mt19937_64 rng(seed);
      std::size_t worst = 0;
      bool ok = true;
      for (int i = 0; i < 10000; ++i) {
        h.insert(static_cast<std::int64_t>(rng() % 1000000));
        if (static_cast<double>(h.corrupt_count()) > eps * static_cast<double>(h.inserted())) ok = false;
        if (i % 3 == 2) h.deletemin();
        if (static_cast<double>(h.corrupt_count()) > eps * static_cast<double>(h.inserted())) ok = false;
        worst = std::max(worst, h.corrupt_count());
      }
      CHECK(ok);
      CHECK(h.corrupt_count() == h.corrupt_count_walk());
      CHECK(h.audit() == "");
    }
  }
}

TEST_CASE("emsh corrupt flag is consistent with key order") {
  BlockDevice dev({2, 2 * 16});
  SoftHeap h(dev, 1.0);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 6000; ++i) h.insert(static_cast<std::int64_t>(rng() % 50000));
  std::size_t flagged = 0;
  while (!h.empty()) flagged += h.deletemin().corrupt;
  CHECK(flagged <= 6000);
}

TEST_CASE("emsh meld") {
  BlockDevice dev(small_dev());
  SoftHeap a = SoftHeap::hard(dev);
  SoftHeap b = SoftHeap::hard(dev);
  std::vector<std::int64_t> all;
  std::mt19937_64 rng(5);
  for (int i = 0; i < 3000; ++i) {
    const auto k = static_cast<std::int64_t>(rng() % 10000);
    (i % 3 ? a : b).insert(k);
    all.push_back(k);
  }
  for (int i = 0; i < 400; ++i) a.deletemin();
  std::sort(all.begin(), all.end());
  a.meld(b);
  CHECK(b.empty());
  CHECK(a.audit() == "");
  CHECK(a.size() == 2600);
  std::vector<std::int64_t> got;
  while (!a.empty()) got.push_back(a.deletemin().key);
  CHECK(std::is_sorted(got.begin(), got.end()));

  SoftHeap c(dev, 0.5);
  SoftHeap d = SoftHeap::hard(dev);
  CHECK_THROWS_AS(c.meld(d), IncompatibleHeaps);
  BlockDevice other(small_dev());
  SoftHeap e = SoftHeap::hard(other);
  CHECK_THROWS_AS(d.meld(e), IncompatibleHeaps);
}

TEST_CASE("emsh hard heap matches a reference multiset") {
  for (unsigned seed = 1; seed <= 4; ++seed) {
    BlockDevice dev(small_dev());
    std::vector<SoftHeap> heaps;
    std::vector<std::multiset<std::int64_t>> refs(3);
    for (int i = 0; i < 3; ++i) heaps.push_back(SoftHeap::hard(dev));
    std::mt19937_64 rng(seed);
    bool ok = true;
    for (int op = 0; op < 4000; ++op) {
      const auto h = rng() % 3;
      const auto kind = rng() % 10;
      if (kind < 5 || refs[h].empty()) {
        const auto k = static_cast<std::int64_t>(rng() % 500);
        heaps[h].insert(k);
        refs[h].insert(k);
      } else if (kind < 8) {
        ok = ok && heaps[h].deletemin().key == *refs[h].begin();
        refs[h].erase(refs[h].begin());
      } else if (kind < 9) {
        auto it = refs[h].begin();
        std::advance(it, static_cast<long>(rng() % refs[h].size()));
        heaps[h].delete_by_key(*it);
        refs[h].erase(it);
      } else {
        const auto g = (h + 1) % 3;
        heaps[h].meld(heaps[g]);
        refs[h].insert(refs[g].begin(), refs[g].end());
        refs[g].clear();
      }
    }
    for (int h = 0; h < 3; ++h) {
      while (!refs[h].empty()) {
        ok = ok && heaps[h].deletemin().key == *refs[h].begin();
        refs[h].erase(refs[h].begin());
      }
    }
    CHECK(ok);
  }
}

TEST_CASE("emsh delete records") {
  BlockDevice dev(small_dev());
  SoftHeap h = SoftHeap::hard(dev);
  for (std::int64_t k : {4, 2, 9}) h.insert(k);
  h.delete_by_key(4);
  CHECK(h.deletemin().key == 2);
  CHECK(h.deletemin().key == 9);
  CHECK(h.empty());

  SoftHeap g = SoftHeap::hard(dev);
  for (std::int64_t k : {1, 2, 3}) g.insert(k);
  g.delete_by_key(7);
  for (int i = 0; i < 3; ++i) g.deletemin();
  CHECK_THROWS_AS(g.deletemin(), DanglingDelete);

  SoftHeap s(dev, 0.5);
  CHECK_THROWS_AS(s.delete_by_key(1), PreconditionError);
}

TEST_CASE("emsh rebalance epoch") {
  BlockDevice dev(small_dev());
  SoftHeap h = SoftHeap::hard(dev);
  CHECK(h.rebalance_epoch());
  CHECK(h.epoch_inserts() == 0);
  for (int i = 0; i < 4000; ++i) h.insert(i);
  CHECK_FALSE(h.rebalance_epoch());
  for (int i = 0; i < 3900; ++i) h.deletemin();
  CHECK(h.rebalance_epoch());
  CHECK(h.epoch_inserts() == 100);
  CHECK(h.epoch_deletes() == 0);
  CHECK(h.audit() == "");
  for (int i = 3900; i < 4000; ++i) REQUIRE(h.deletemin().key == i);
  CHECK(h.rebalance_epoch());
  CHECK(h.epoch_inserts() == 0);
  SoftHeap s(dev, 0.5);
  CHECK_FALSE(s.rebalance_epoch());
}

TEST_CASE("emsh applications") {
  std::mt19937_64 rng(9);
  std::vector<std::int64_t> v(4001);
  for (auto& x : v) x = static_cast<std::int64_t>(rng() % 100000);
  auto sorted = v;
  std::sort(sorted.begin(), sorted.end());
  auto sel = select_median(v, 0.2);
  CHECK(sel.value == sorted[2000]);
  CHECK(sel.rounds >= 1);
  CHECK(select_median({7}, 0.5).value == 7);
  CHECK_THROWS_AS(select_median({}, 0.5), EmptyError);

  auto hs = heap_sort(v);
  CHECK(hs.out == sorted);
  auto ns = near_sort(v, 0.2);
  CHECK(ns.out.size() == v.size());
  auto copy = ns.out;
  std::sort(copy.begin(), copy.end());
  CHECK(copy == sorted);
  CHECK(static_cast<double>(ns.corrupt_max) <= 0.2 * static_cast<double>(v.size()));
}

TEST_CASE("emsh heapsort comparison ratio") {
  std::mt19937_64 rng(1);
  for (int e = 8; e <= 14; e += 2) {
    const std::size_t n = std::size_t{1} << e;
    std::vector<std::int64_t> v(n);
    for (auto& x : v) x = static_cast<std::int64_t>(rng());
    auto hs = heap_sort(v);
    const double ratio = static_cast<double>(hs.comparisons) / (static_cast<double>(n) * e);
    MESSAGE("N=2^" << e << " ratio " << ratio);
    CHECK(ratio <= 4.0);
  }
}
