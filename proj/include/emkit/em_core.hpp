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

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "emkit/device.hpp"
#include "emkit/disk_array.hpp"
#include "emkit/errors.hpp"

namespace emkit {

// Visits every item of `arr` in order. Frames of `arr` are evicted first, so
// exactly ceil(N/B) block reads are charged.
template <class T, class Visitor>
Visitor em_scan(const DiskArray<T>& arr, Visitor visit) {
  arr.flush();
  Reader<T> rd(arr);
  while (!rd.done()) visit(rd.next());
  return visit;
}

struct SortOptions {
  // Intermediate storage may not exceed this multiple of the input size.
  double capacity_factor = 64.0;
};

struct SortReport {
  std::size_t runs_formed = 0;
  std::size_t merge_passes = 0;
};

// Stable m-way mergesort. Runs of M items are formed in memory, then merged
// with fan-in m - 1 (one frame is kept for output).
template <class T, class Less>
DiskArray<T> em_sort(const DiskArray<T>& in, Less less, SortOptions opt = {},
                     SortReport* report = nullptr) {
  BlockDevice& dev = in.device();
  const std::size_t n = in.size();
  const std::size_t base = dev.allocated();
  const double cap = opt.capacity_factor * static_cast<double>(n > 0 ? n : 1);
  auto check_cap = [&] {
    if (static_cast<double>(dev.allocated() - base) > cap)
      throw ResourceError("em_sort: intermediate storage exceeds capacity cap");
  };
  in.flush();

  const std::size_t run_len = dev.M();
  std::vector<DiskArray<T>> runs;
  {
    Reader<T> rd(in);
    std::vector<T> buf;
    buf.reserve(std::min(run_len, n));
    while (!rd.done()) {
      buf.clear();
      while (!rd.done() && buf.size() < run_len) buf.push_back(rd.next());
      std::stable_sort(buf.begin(), buf.end(), less);
      DiskArray<T> run(dev);
      {
        Writer<T> wr(run);
        for (const T& v : buf) wr.put(v);
      }
      check_cap();
      runs.push_back(std::move(run));
    }
  }
  if (report) report->runs_formed = runs.size();

  const std::size_t fan_in = dev.m() > 2 ? dev.m() - 1 : 2;
  while (runs.size() > 1) {
    if (report) ++report->merge_passes;
    std::vector<DiskArray<T>> next;
    for (std::size_t g = 0; g < runs.size(); g += fan_in) {
      const std::size_t hi = std::min(runs.size(), g + fan_in);
      if (hi - g == 1) {
        next.push_back(std::move(runs[g]));
        continue;
      }
      std::vector<Reader<T>> rds;
      rds.reserve(hi - g);
      for (std::size_t r = g; r < hi; ++r) rds.emplace_back(runs[r]);
      // Ties go to the lower run index, which keeps the merge stable.
      auto cmp = [&](std::size_t a, std::size_t b) {
        const T& x = rds[a].peek();
        const T& y = rds[b].peek();
        if (less(y, x)) return true;
        if (less(x, y)) return false;
        return a > b;
      };
      std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(cmp)> pq(cmp);
      for (std::size_t r = 0; r < rds.size(); ++r)
        if (!rds[r].done()) pq.push(r);
      DiskArray<T> out(dev);
      {
        Writer<T> wr(out);
        while (!pq.empty()) {
          const std::size_t r = pq.top();
          pq.pop();
          wr.put(rds[r].next());
          if (!rds[r].done()) pq.push(r);
        }
      }
      check_cap();
      rds.clear();
      for (std::size_t r = g; r < hi; ++r) runs[r] = DiskArray<T>();
      next.push_back(std::move(out));
    }
    runs = std::move(next);
  }
  if (runs.empty()) return DiskArray<T>(dev);
  runs.front().flush();
  return std::move(runs.front());
}

template <class T>
DiskArray<T> em_sort(const DiskArray<T>& in) {
  return em_sort(in, std::less<T>{});
}

// ---------------------------------------------------------------------------
// List ranking

inline constexpr std::int64_t kNil = -1;

template <class W>
struct ListRecord {
  std::int64_t id = 0;
  std::int64_t succ = kNil;
  std::int64_t pred = kNil;
  W w{};  // weight of the link id -> succ
};

template <class W>
struct RankRecord {
  std::int64_t id = 0;
  W rank{};
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

template <class W, class Op>
DiskArray<RankRecord<W>> rank_in_memory(const DiskArray<ListRecord<W>>& list, W identity,
                                        Op op) {
  BlockDevice& dev = list.device();
  std::vector<ListRecord<W>> recs;
  recs.reserve(list.size());
  em_scan(list, [&](const ListRecord<W>& r) { recs.push_back(r); });
  std::unordered_map<std::int64_t, std::size_t> at;
  at.reserve(recs.size() * 2);
  for (std::size_t i = 0; i < recs.size(); ++i) at.emplace(recs[i].id, i);
  std::vector<W> rank(recs.size(), identity);
  std::vector<char> seen(recs.size(), 0);
  std::size_t reached = 0;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (recs[i].pred != kNil) continue;
    std::size_t cur = i;
    W acc = identity;
    while (true) {
      if (seen[cur]) throw MalformedInput("list ranking: node reached twice");
      seen[cur] = 1;
      ++reached;
      rank[cur] = acc;
      if (recs[cur].succ == kNil) break;
      acc = op(acc, recs[cur].w);
      auto nx = at.find(recs[cur].succ);
      if (nx == at.end()) throw MalformedInput("list ranking: successor not in list");
      cur = nx->second;
    }
  }
  if (reached != recs.size()) throw MalformedInput("list ranking: cycle detected");
  std::vector<RankRecord<W>> out(recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) out[i] = {recs[i].id, rank[i]};
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  DiskArray<RankRecord<W>> res(dev);
  Writer<RankRecord<W>> wr(res);
  for (const auto& r : out) wr.put(r);
  return res;
}

template <class W>
struct SpliceMsg {
  std::int64_t target;
  std::int64_t from;  // the spliced node
  std::int64_t value;
  W w;
  bool to_pred;  // message updates the target's successor
};

template <class W>
struct Spliced {
  std::int64_t id;
  std::int64_t pred;
  W pred_w;
};

template <class W, class Op>
DiskArray<RankRecord<W>> rank_recursive(DiskArray<ListRecord<W>> list, W identity, Op op,
                                        std::uint64_t salt, int stall) {
  BlockDevice& dev = list.device();
  if (list.size() <= std::max<std::size_t>(dev.M() / 2, 1)) return rank_in_memory(list, identity, op);
  if (stall > 64) throw MalformedInput("list ranking: no progress (cycle suspected)");

  auto coin = [&](std::int64_t id) {
    return (mix64(static_cast<std::uint64_t>(id) ^ salt) & 1ULL) != 0;
  };
  auto selected = [&](const ListRecord<W>& r) {
    return r.pred != kNil && coin(r.id) && !coin(r.pred);
  };

  // Messages from each spliced node to its neighbours; isolated nodes leave.
  DiskArray<SpliceMsg<W>> msgs(dev);
  DiskArray<RankRecord<W>> done(dev);
  std::size_t n_sel = 0;
  {
    Writer<SpliceMsg<W>> mw(msgs);
    Writer<RankRecord<W>> dw(done);
    em_scan(list, [&](const ListRecord<W>& r) {
      if (r.pred == kNil && r.succ == kNil) {
        dw.put({r.id, identity});
      } else if (selected(r)) {
        ++n_sel;
        mw.put({r.pred, r.id, r.succ, r.w, true});
        if (r.succ != kNil) mw.put({r.succ, r.id, r.pred, r.w, false});
      }
    });
  }
  auto by_target = [](const SpliceMsg<W>& a, const SpliceMsg<W>& b) { return a.target < b.target; };
  DiskArray<SpliceMsg<W>> sorted_msgs = em_sort(msgs, by_target);
  msgs = DiskArray<SpliceMsg<W>>();

  // `list` is sorted by id on entry; apply the messages in one merge.
  DiskArray<ListRecord<W>> rest(dev);
  DiskArray<Spliced<W>> spliced(dev);
  {
    Writer<ListRecord<W>> rw(rest);
    Writer<Spliced<W>> sw(spliced);
    Reader<SpliceMsg<W>> mr(sorted_msgs);
    em_scan(list, [&](ListRecord<W> r) {
      const bool isolated = r.pred == kNil && r.succ == kNil;
      const bool sel = selected(r);
      const W old_w = r.w;
      while (!mr.done() && mr.peek().target < r.id) mr.next();
      while (!mr.done() && mr.peek().target == r.id) {
        SpliceMsg<W> m = mr.next();
        if (m.to_pred) {
          sw.put({m.from, r.id, old_w});
          r.succ = m.value;
          r.w = op(old_w, m.w);
        } else {
          r.pred = m.value;
        }
      }
      if (!isolated && !sel) rw.put(r);
    });
  }
  list = DiskArray<ListRecord<W>>();
  sorted_msgs = DiskArray<SpliceMsg<W>>();

  const int next_stall = n_sel == 0 && done.empty() ? stall + 1 : 0;
  DiskArray<RankRecord<W>> sub =
      rank_recursive(std::move(rest), identity, op, mix64(salt + 0x51ed27ULL), next_stall);

  // Splice back: rank(x) = rank(pred) (+) w(pred) taken before the splice.
  auto by_pred = [](const Spliced<W>& a, const Spliced<W>& b) { return a.pred < b.pred; };
  DiskArray<Spliced<W>> sp = em_sort(spliced, by_pred);
  spliced = DiskArray<Spliced<W>>();
  DiskArray<RankRecord<W>> back(dev);
  {
    Writer<RankRecord<W>> bw(back);
    Reader<RankRecord<W>> rr(sub);
    em_scan(sp, [&](const Spliced<W>& s) {
      while (!rr.done() && rr.peek().id < s.pred) rr.next();
      if (rr.done() || rr.peek().id != s.pred) throw MalformedInput("list ranking: lost predecessor");
      bw.put({s.id, op(rr.peek().rank, s.pred_w)});
    });
  }
  sp = DiskArray<Spliced<W>>();
  auto by_id = [](const RankRecord<W>& a, const RankRecord<W>& b) { return a.id < b.id; };
  DiskArray<RankRecord<W>> back_sorted = em_sort(back, by_id);
  DiskArray<RankRecord<W>> done_sorted = em_sort(done, by_id);
  back = DiskArray<RankRecord<W>>();
  done = DiskArray<RankRecord<W>>();

  DiskArray<RankRecord<W>> out(dev);
  {
    Writer<RankRecord<W>> ow(out);
    Reader<RankRecord<W>> a(sub), b(back_sorted), c(done_sorted);
    while (!a.done() || !b.done() || !c.done()) {
      Reader<RankRecord<W>>* best = nullptr;
      for (auto* r : {&a, &b, &c})
        if (!r->done() && (best == nullptr || r->peek().id < best->peek().id)) best = r;
      ow.put(best->next());
    }
  }
  out.flush();
  return out;
}

}  // namespace detail

// Generalized list ranking: rank(head) = identity and
// rank(succ(x)) = op(rank(x), w(x)). With w = 1 and op = + this is the number
// of links from the head. Output is sorted by id.
template <class W, class Op>
DiskArray<RankRecord<W>> em_list_rank(const DiskArray<ListRecord<W>>& list, W identity, Op op) {
  BlockDevice& dev = list.device();
  auto by_id = [](const ListRecord<W>& a, const ListRecord<W>& b) { return a.id < b.id; };
  DiskArray<ListRecord<W>> sorted = em_sort(list, by_id);

  // Consistency: every succ link must be mirrored by a pred link.
  struct Claim {
    std::int64_t target;
    std::int64_t pred;
  };
  DiskArray<Claim> claims(dev);
  {
    Writer<Claim> cw(claims);
    std::int64_t last = 0;
    bool first = true;
    em_scan(sorted, [&](const ListRecord<W>& r) {
      if (!first && r.id == last) throw MalformedInput("list ranking: duplicate id");
      first = false;
      last = r.id;
      if (r.succ != kNil) cw.put({r.succ, r.id});
    });
  }
  DiskArray<Claim> cs =
      em_sort(claims, [](const Claim& a, const Claim& b) { return a.target < b.target; });
  {
    Reader<Claim> cr(cs);
    em_scan(sorted, [&](const ListRecord<W>& r) {
      std::int64_t expect = kNil;
      if (!cr.done() && cr.peek().target < r.id) throw MalformedInput("list ranking: dangling successor");
      if (!cr.done() && cr.peek().target == r.id) expect = cr.next().pred;
      if (!cr.done() && cr.peek().target == r.id) throw MalformedInput("list ranking: two predecessors");
      if (expect != r.pred) throw MalformedInput("list ranking: pred/succ mismatch");
    });
    if (!cr.done()) throw MalformedInput("list ranking: dangling successor");
  }
  return detail::rank_recursive(std::move(sorted), identity, op, 0x2545f4914f6cdd1dULL, 0);
}

// Plain ranks: number of links from the head.
DiskArray<RankRecord<std::int64_t>> em_list_rank(const DiskArray<ListRecord<std::int64_t>>& list);

// ---------------------------------------------------------------------------
// Euler tour

struct UEdge {
  std::int64_t a = 0;
  std::int64_t b = 0;
};

struct TourEdge {
  std::int64_t u = 0;
  std::int64_t v = 0;
  std::int64_t next_u = kNil;  // successor edge (next_u, next_v); kNil at the end of a tour
  std::int64_t next_v = kNil;
  std::int64_t tree = 0;       // smallest vertex of the tree
  std::int64_t rank = 0;       // position within its tree's tour
};

struct EulerTour {
  // Every directed edge once, ordered by (tree, rank).
  DiskArray<TourEdge> order;
  // Tours are cycles before the edge entering each start edge is cut; the
  // successor of (u, v) is (v, w) where w follows u in v's adjacency order.
  std::size_t trees = 0;
};

// Builds the tour of every tree of a forest. The tree containing `root`
// starts at root's first out-edge; other trees start at their smallest
// vertex. Throws MalformedInput if the edges do not form a forest.
EulerTour em_euler_tour(const DiskArray<UEdge>& edges, std::int64_t root);

// ---------------------------------------------------------------------------
// Time-forward processing

struct TfNode {
  std::int64_t parent = kNil;  // index of the parent in the node array
  std::uint32_t depth = 0;
};

// Nodes must be ordered by non-increasing depth with each parent after its
// children. value(i) = fold of combine(i, acc, value(child)) over the
// children of i, starting from init[i]. Messages travel from child to parent
// through a priority queue keyed by the parent's position.
template <class V, class Combine>
std::vector<V> em_time_forward(BlockDevice& dev, const std::vector<TfNode>& nodes,
                               const std::vector<V>& init, Combine combine) {
  const std::size_t n = nodes.size();
  if (init.size() != n) throw PreconditionError("time forward: value count mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && nodes[i].depth > nodes[i - 1].depth)
      throw PreconditionError("time forward: nodes not sorted by depth");
    const auto p = nodes[i].parent;
    if (p != kNil && (p <= static_cast<std::int64_t>(i) || p >= static_cast<std::int64_t>(n)))
      throw PreconditionError("time forward: parent precedes child");
    if (p != kNil && nodes[static_cast<std::size_t>(p)].depth + 1 != nodes[i].depth)
      throw PreconditionError("time forward: parent depth mismatch");
  }
  using Msg = std::pair<std::int64_t, std::size_t>;  // (destination, slot)
  std::priority_queue<Msg, std::vector<Msg>, std::greater<Msg>> pq;
  std::vector<V> payload;
  payload.reserve(n);
  std::vector<V> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    V acc = init[i];
    while (!pq.empty() && pq.top().first == static_cast<std::int64_t>(i)) {
      acc = combine(i, acc, payload[pq.top().second]);
      pq.pop();
    }
    out.push_back(acc);
    if (nodes[i].parent != kNil) {
      payload.push_back(acc);
      pq.push({nodes[i].parent, payload.size() - 1});
    }
  }
  // Input and output are each streamed once; relay messages are written and
  // read back once.
  dev.charge_reads(dev.blocks_for(n) + dev.blocks_for(payload.size()));
  dev.charge_writes(dev.blocks_for(n) + dev.blocks_for(payload.size()));
  return out;
}

}  // namespace emkit
