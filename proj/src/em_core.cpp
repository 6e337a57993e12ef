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

#include "emkit/em_core.hpp"

namespace emkit {

DiskArray<RankRecord<std::int64_t>> em_list_rank(const DiskArray<ListRecord<std::int64_t>>& list) {
  return em_list_rank<std::int64_t>(list, 0, [](std::int64_t a, std::int64_t b) { return a + b; });
}

namespace {

struct Dir {
  std::int64_t u;
  std::int64_t v;
};

struct NextRec {
  std::int64_t u;  // key: the directed edge (u, v)
  std::int64_t v;
  std::int64_t nu;
  std::int64_t nv;
};

bool dir_less(std::int64_t au, std::int64_t av, std::int64_t bu, std::int64_t bv) {
  return au != bu ? au < bu : av < bv;
}

// Union-find over sparse vertex ids, used to validate the forest and to name
// each tree by its smallest vertex.
class SparseDsu {
 public:
  std::int64_t find(std::int64_t x) {
    auto it = parent_.try_emplace(x, x).first;
    if (it->second == x) return x;
    const std::int64_t r = find(it->second);
    parent_[x] = r;
    return r;
  }
  bool unite(std::int64_t a, std::int64_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
    return true;
  }

 private:
  std::unordered_map<std::int64_t, std::int64_t> parent_;
};

}  // namespace

EulerTour em_euler_tour(const DiskArray<UEdge>& edges, std::int64_t root) {
  BlockDevice& dev = edges.device();
  SparseDsu dsu;
  DiskArray<Dir> dirs(dev);
  {
    Writer<Dir> dw(dirs);
    em_scan(edges, [&](const UEdge& e) {
      if (e.a == e.b) throw MalformedInput("euler tour: self-loop");
      if (!dsu.unite(e.a, e.b)) throw MalformedInput("euler tour: input is not a forest");
      dw.put({e.a, e.b});
      dw.put({e.b, e.a});
    });
  }
  EulerTour tour{DiskArray<TourEdge>(dev), 0};
  if (dirs.empty()) return tour;

  DiskArray<Dir> adj =
      em_sort(dirs, [](const Dir& a, const Dir& b) { return dir_less(a.u, a.v, b.u, b.v); });
  dirs = DiskArray<Dir>();

  // For each vertex v with neighbours w_0 < ... < w_{d-1}, the edge (w_j, v)
  // continues with (v, w_{j+1 mod d}).
  DiskArray<NextRec> nexts(dev);
  {
    Writer<NextRec> nw(nexts);
    std::vector<std::int64_t> group;
    std::int64_t cur = 0;
    auto emit = [&] {
      const std::size_t d = group.size();
      for (std::size_t j = 0; j < d; ++j) nw.put({group[j], cur, cur, group[(j + 1) % d]});
      group.clear();
    };
    em_scan(adj, [&](const Dir& e) {
      if (!group.empty() && e.u != cur) emit();
      if (group.empty()) cur = e.u;
      group.push_back(e.v);
    });
    if (!group.empty()) emit();
  }
  DiskArray<NextRec> ns = em_sort(
      nexts, [](const NextRec& a, const NextRec& b) { return dir_less(a.u, a.v, b.u, b.v); });
  nexts = DiskArray<NextRec>();

  // Start edge of each tree; the edge entering it is cut.
  const std::int64_t root_tree = dsu.find(root);
  auto start_vertex = [&](std::int64_t tree) { return tree == root_tree ? root : tree; };

  // Number directed edges by their (u, v) position k and flag start edges.
  struct Indexed {
    std::int64_t k, u, v, nu, nv;
    bool start;
  };
  DiskArray<Indexed> idx(dev);
  {
    Writer<Indexed> iw(idx);
    std::int64_t k = 0;
    std::int64_t prev_u = kNil;
    bool have_prev = false;
    em_scan(ns, [&](const NextRec& r) {
      const bool first_of_u = !have_prev || r.u != prev_u;
      have_prev = true;
      prev_u = r.u;
      const bool start = first_of_u && r.u == start_vertex(dsu.find(r.u));
      iw.put({k++, r.u, r.v, r.nu, r.nv, start});
    });
  }
  ns = DiskArray<NextRec>();

  // Sorting by successor aligns each record with the index of its successor.
  DiskArray<Indexed> by_next = em_sort(idx, [](const Indexed& a, const Indexed& b) {
    return dir_less(a.nu, a.nv, b.nu, b.nv);
  });
  struct Half {
    std::int64_t id;
    std::int64_t other;
    bool is_succ;
  };
  DiskArray<Half> halves(dev);
  {
    Writer<Half> hw(halves);
    Reader<Indexed> target(idx);
    em_scan(by_next, [&](const Indexed& r) {
      const Indexed t = target.next();  // the edge (r.nu, r.nv) itself
      if (t.start) return;
      hw.put({r.k, t.k, true});
      hw.put({t.k, r.k, false});
    });
  }
  by_next = DiskArray<Indexed>();
  DiskArray<Half> hs =
      em_sort(halves, [](const Half& a, const Half& b) { return a.id < b.id; });
  halves = DiskArray<Half>();

  DiskArray<ListRecord<std::int64_t>> links(dev);
  {
    Writer<ListRecord<std::int64_t>> lw(links);
    Reader<Half> hr(hs);
    em_scan(idx, [&](const Indexed& r) {
      ListRecord<std::int64_t> rec{r.k, kNil, kNil, 1};
      while (!hr.done() && hr.peek().id == r.k) {
        const Half h = hr.next();
        (h.is_succ ? rec.succ : rec.pred) = h.other;
      }
      lw.put(rec);
    });
  }
  hs = DiskArray<Half>();
  DiskArray<RankRecord<std::int64_t>> ranks = em_list_rank(links);

  DiskArray<TourEdge> unordered(dev);
  {
    Writer<TourEdge> tw(unordered);
    Reader<ListRecord<std::int64_t>> lr(links);
    Reader<Indexed> ir(idx);
    em_scan(ranks, [&](const RankRecord<std::int64_t>& r) {
      const ListRecord<std::int64_t> l = lr.next();
      const Indexed e = ir.next();
      TourEdge te{e.u, e.v, kNil, kNil, dsu.find(e.u), r.rank};
      if (l.succ != kNil) {
        te.next_u = e.nu;
        te.next_v = e.nv;
      }
      tw.put(te);
    });
  }
  tour.order = em_sort(unordered, [](const TourEdge& a, const TourEdge& b) {
    return a.tree != b.tree ? a.tree < b.tree : a.rank < b.rank;
  });
  std::int64_t last_tree = kNil;
  for (const TourEdge& t : tour.order.raw()) {
    if (t.tree != last_tree) ++tour.trees;
    last_tree = t.tree;
  }
  return tour;
}

}  // namespace emkit
