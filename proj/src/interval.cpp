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

#include "emkit/interval.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <sstream>

#include "emkit/disk_array.hpp"
#include "emkit/em_core.hpp"
#include "emkit/emsh.hpp"
#include "emkit/errors.hpp"

namespace emkit {

namespace {

constexpr double kInfDist = std::numeric_limits<double>::infinity();

// Non-negative doubles order the same way as their bit patterns.
std::int64_t dist_key(double d) { return std::bit_cast<std::int64_t>(d); }

DiskArray<Endpoint> endpoint_array(const IntervalSet& s, BlockDevice& dev) {
  return DiskArray<Endpoint>::load(dev, s.endpoints);
}

}  // namespace

// ---------------------------------------------------------------------------
// Interval sets

IntervalSet IntervalSet::build(std::vector<Interval> raw) {
  IntervalSet s;
  const auto n = raw.size();
  struct Raw {
    double value;
    bool right;
    std::int64_t id;
  };
  std::vector<Raw> pts;
  pts.reserve(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const Interval& iv = raw[i];
    if (!std::isfinite(iv.left) || !std::isfinite(iv.right) || !std::isfinite(iv.weight))
      throw ValidationError("interval " + std::to_string(i) + " has a non-finite field");
    if (iv.left > iv.right) throw ValidationError("interval " + std::to_string(i) + " has left > right");
    if (iv.weight < 0) throw ValidationError("interval " + std::to_string(i) + " has a negative weight");
    pts.push_back({iv.left, false, static_cast<std::int64_t>(i)});
    pts.push_back({iv.right, true, static_cast<std::int64_t>(i)});
  }
  std::sort(pts.begin(), pts.end(), [](const Raw& a, const Raw& b) {
    if (a.value != b.value) return a.value < b.value;
    if (a.right != b.right) return !a.right;
    return a.id < b.id;
  });
  s.lpos.assign(n, 0);
  s.rpos.assign(n, 0);
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (k > 0 && pts[k].value == pts[k - 1].value) ++s.ties_broken;
    auto& slot = pts[k].right ? s.rpos : s.lpos;
    slot[static_cast<std::size_t>(pts[k].id)] = static_cast<std::int64_t>(k);
  }
  s.endpoints.reserve(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const auto id = static_cast<std::size_t>(pts[k].id);
    s.endpoints.push_back({static_cast<std::int64_t>(k), pts[k].id, pts[k].right ? s.lpos[id] : s.rpos[id],
                           !pts[k].right});
  }
  s.raw = std::move(raw);
  return s;
}

bool IntervalSet::overlap(std::int64_t a, std::int64_t b) const {
  const auto ua = static_cast<std::size_t>(a), ub = static_cast<std::size_t>(b);
  return lpos[ua] < rpos[ub] && lpos[ub] < rpos[ua];
}

IntervalSet read_intervals(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedInput("cannot open " + path);
  std::vector<Interval> raw;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    Interval iv;
    if (!(ss >> iv.left >> iv.right)) throw MalformedInput(path + ":" + std::to_string(lineno) + ": expected left right [weight]");
    if (!(ss >> iv.weight)) iv.weight = 1;
    std::string extra;
    if (ss >> extra) throw MalformedInput(path + ":" + std::to_string(lineno) + ": trailing text");
    raw.push_back(iv);
  }
  return IntervalSet::build(std::move(raw));
}

// ---------------------------------------------------------------------------
// Chromatic number and colouring

std::int64_t chromatic_number(const IntervalSet& s, BlockDevice& dev) {
  auto arr = endpoint_array(s, dev);
  std::int64_t open = 0, best = 0;
  em_scan(arr, [&](const Endpoint& e) {
    if (e.left) {
      best = std::max(best, ++open);
    } else {
      --open;
    }
  });
  return best;
}

Colouring colour_igc(const IntervalSet& s, BlockDevice& dev) {
  const IoStats start = dev.stats();
  Colouring out;
  const std::int64_t chi = chromatic_number(s, dev);
  out.colour.assign(static_cast<std::size_t>(s.size()), 0);
  out.colours = chi;
  std::deque<std::int64_t> queue;
  for (std::int64_t c = 1; c <= chi; ++c) queue.push_back(c);
  SoftHeap pq = SoftHeap::hard(dev);
  std::uint64_t queue_ops = 0;
  auto arr = endpoint_array(s, dev);
  em_scan(arr, [&](const Endpoint& e) {
    ++queue_ops;
    if (e.left) {
      if (queue.empty()) throw SpecError("colour queue ran dry");
      const std::int64_t c = queue.front();
      queue.pop_front();
      out.colour[static_cast<std::size_t>(e.id)] = c;
      pq.insert(e.twin, static_cast<std::uint64_t>(c));
    } else {
      const HeapItem it = pq.deletemin();
      if (it.key != e.pos) throw SpecError("right endpoints left the heap out of order");
      queue.push_back(static_cast<std::int64_t>(it.payload));
    }
  });
  // The colour queue only spills when chi exceeds memory.
  if (static_cast<std::size_t>(chi) > dev.M()) {
    dev.charge_reads(dev.blocks_for(queue_ops));
    dev.charge_writes(dev.blocks_for(queue_ops));
  }
  dev.charge_writes(dev.blocks_for(out.colour.size()));
  out.io = dev.stats() - start;
  return out;
}

// ---------------------------------------------------------------------------
// Shortest paths, BFS and DFS

namespace {

struct Span {
  std::int64_t id, l, r;
  double w;
};

// Intervals that reach past the source's left end, with left endpoints
// clipped to it, sorted by left endpoint with the source first. With
// `mirror` the line is reflected first.
std::vector<Span> one_side(const IntervalSet& s, std::int64_t source, bool mirror, BlockDevice& dev) {
  const std::int64_t top = 2 * s.size() - 1;
  auto L = [&](std::size_t i) { return mirror ? top - s.rpos[i] : s.lpos[i]; };
  auto R = [&](std::size_t i) { return mirror ? top - s.lpos[i] : s.rpos[i]; };
  const auto src = static_cast<std::size_t>(source);
  const std::int64_t ls = L(src);
  std::vector<Span> spans;
  for (std::size_t i = 0; i < s.raw.size(); ++i)
    if (R(i) > ls) spans.push_back({static_cast<std::int64_t>(i), std::max(L(i), ls), R(i), s.raw[i].weight});
  auto sorted = em_sort(DiskArray<Span>::load(dev, spans), [source](const Span& a, const Span& b) {
    if (a.l != b.l) return a.l < b.l;
    if ((a.id == source) != (b.id == source)) return a.id == source;
    return a.id < b.id;
  });
  std::vector<Span> out;
  out.reserve(spans.size());
  em_scan(sorted, [&](const Span& x) { out.push_back(x); });
  return out;
}

void sssp_sweep(const std::vector<Span>& A, IntervalTree& t, BlockDevice& dev) {
  const std::size_t n = A.size();
  std::vector<double> d(n, kInfDist);
  std::vector<std::int64_t> par(n, -1);
  d[0] = A[0].w;
  SoftHeap pq = SoftHeap::hard(dev);
  std::size_t p = 1;
  auto settle_upto = [&](std::size_t i) {
    while (p < n && A[p].l < A[i].r) {
      d[p] = d[i] + A[p].w;
      par[p] = A[i].id;
      if (A[p].r > A[i].r) pq.insert(dist_key(d[p]), p);
      ++p;
    }
  };
  settle_upto(0);
  while (!pq.empty()) settle_upto(static_cast<std::size_t>(pq.deletemin().payload));
  for (std::size_t k = 0; k < n; ++k) {
    const auto id = static_cast<std::size_t>(A[k].id);
    if (d[k] < t.dist[id]) {
      t.dist[id] = d[k];
      t.parent[id] = par[k];
    }
  }
}

void bfs_sweep(const std::vector<Span>& A, IntervalTree& t) {
  const std::size_t n = A.size();
  std::vector<std::int64_t> depth(n, -1), par(n, -1);
  depth[0] = 0;
  std::size_t cur = 0, p = 1;
  std::int64_t reach = A[0].r;
  for (;;) {
    std::size_t best = n;
    while (p < n && A[p].l < reach) {
      depth[p] = depth[cur] + 1;
      par[p] = A[cur].id;
      if (best == n || A[p].r > A[best].r) best = p;
      ++p;
    }
    if (best == n || A[best].r <= reach) break;
    cur = best;
    reach = A[best].r;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const auto id = static_cast<std::size_t>(A[k].id);
    if (depth[k] >= 0 && (t.depth[id] < 0 || depth[k] < t.depth[id])) {
      t.depth[id] = depth[k];
      t.parent[id] = par[k];
    }
  }
}

void check_source(const IntervalSet& s, std::int64_t source) {
  if (source < 0 || source >= s.size()) throw ValidationError("source interval out of range");
}

}  // namespace

IntervalTree sssp_intervals(const IntervalSet& s, std::int64_t source, BlockDevice& dev) {
  check_source(s, source);
  const IoStats start = dev.stats();
  IntervalTree t;
  const auto n = static_cast<std::size_t>(s.size());
  t.dist.assign(n, kInfDist);
  t.parent.assign(n, -1);
  t.depth.assign(n, -1);
  sssp_sweep(one_side(s, source, false, dev), t, dev);
  sssp_sweep(one_side(s, source, true, dev), t, dev);
  // Depths follow the parent pointers, which point to strictly closer intervals.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return t.dist[a] < t.dist[b]; });
  for (auto v : order) {
    if (t.dist[v] == kInfDist) break;
    t.depth[v] = t.parent[v] < 0 ? 0 : t.depth[static_cast<std::size_t>(t.parent[v])] + 1;
  }
  t.io = dev.stats() - start;
  return t;
}

IntervalTree bfs_tree(const IntervalSet& s, std::int64_t source, BlockDevice& dev) {
  check_source(s, source);
  const IoStats start = dev.stats();
  IntervalTree t;
  const auto n = static_cast<std::size_t>(s.size());
  t.parent.assign(n, -1);
  t.depth.assign(n, -1);
  bfs_sweep(one_side(s, source, false, dev), t);
  bfs_sweep(one_side(s, source, true, dev), t);
  t.io = dev.stats() - start;
  return t;
}

IntervalTree dfs_tree(const IntervalSet& s, BlockDevice& dev) {
  const IoStats start = dev.stats();
  IntervalTree t;
  const auto n = static_cast<std::size_t>(s.size());
  t.parent.assign(n, -1);
  t.depth.assign(n, -1);
  SoftHeap open = SoftHeap::hard(dev);  // keyed by -left, so the minimum is the youngest
  std::size_t live = 0;                 // the heap also holds pending delete records
  auto arr = endpoint_array(s, dev);
  em_scan(arr, [&](const Endpoint& e) {
    const auto id = static_cast<std::size_t>(e.id);
    if (e.left) {
      if (live > 0) {
        const auto p = static_cast<std::int64_t>(open.findmin().payload);
        t.parent[id] = p;
        t.depth[id] = t.depth[static_cast<std::size_t>(p)] + 1;
      } else {
        t.depth[id] = 0;
      }
      open.insert(-e.pos, static_cast<std::uint64_t>(e.id));
      ++live;
    } else {
      open.delete_by_key(-e.twin);
      --live;
    }
  });
  t.io = dev.stats() - start;
  return t;
}

// ---------------------------------------------------------------------------
// List arrays

ListArray ListArray::from_succ(const std::vector<std::int64_t>& succ) {
  ListArray a;
  a.succ = succ;
  a.pred.assign(succ.size(), -1);
  for (std::size_t u = 0; u < succ.size(); ++u) {
    const auto v = succ[u];
    if (v < 0) continue;
    if (v >= static_cast<std::int64_t>(succ.size())) throw ValidationError("successor out of range");
    if (a.pred[static_cast<std::size_t>(v)] >= 0) throw ValidationError("node has two predecessors");
    a.pred[static_cast<std::size_t>(v)] = static_cast<std::int64_t>(u);
  }
  return a;
}

void ListArray::validate() const {
  const auto n = size();
  if (static_cast<std::int64_t>(pred.size()) != n) throw ValidationError("pred and succ differ in length");
  for (std::int64_t u = 0; u < n; ++u) {
    const auto s = succ[static_cast<std::size_t>(u)], p = pred[static_cast<std::size_t>(u)];
    if (s < -1 || s >= n || p < -1 || p >= n) throw ValidationError("list pointer out of range");
    if (s == u || p == u) throw ValidationError("list node points to itself");
    if (s >= 0 && pred[static_cast<std::size_t>(s)] != u) throw ValidationError("pred and succ disagree");
    if (p >= 0 && succ[static_cast<std::size_t>(p)] != u) throw ValidationError("pred and succ disagree");
  }
}

bool ListArray::monotonic() const {
  for (std::size_t u = 0; u < succ.size(); ++u)
    if (succ[u] >= 0 && succ[u] <= static_cast<std::int64_t>(u)) return false;
  return true;
}

std::int64_t ListArray::stretches() const {
  std::int64_t runs = 0;
  for (std::size_t u = 0; u < succ.size(); ++u) {
    const auto s = succ[u];
    if (s < 0) continue;
    const bool fwd = s > static_cast<std::int64_t>(u);
    const auto p = pred[u];
    if (p < 0 || (static_cast<std::int64_t>(u) > p) != fwd) ++runs;
  }
  return runs;
}

namespace {

struct ListNode {
  std::int64_t pred, succ;
};

// The priority-queue relay shared by MLCC and 2MLC: each node receives its
// value from its predecessor through the heap, keyed by its own index.
template <class HeadValue, class Pass>
std::vector<std::int64_t> relay(const ListArray& lists, BlockDevice& dev, HeadValue head_value, Pass pass) {
  lists.validate();
  if (!lists.monotonic()) throw ValidationError("list array is not monotonic");
  std::vector<ListNode> nodes(static_cast<std::size_t>(lists.size()));
  for (std::size_t u = 0; u < nodes.size(); ++u) nodes[u] = {lists.pred[u], lists.succ[u]};
  auto arr = DiskArray<ListNode>::load(dev, nodes);
  std::vector<std::int64_t> out;
  out.reserve(nodes.size());
  SoftHeap pq = SoftHeap::hard(dev);
  std::int64_t i = 0;
  em_scan(arr, [&](const ListNode& x) {
    std::int64_t v;
    if (x.pred < 0) {
      v = head_value(i);
    } else {
      const HeapItem it = pq.deletemin();
      if (it.key != i) throw ValidationError("list relay out of order");
      v = static_cast<std::int64_t>(it.payload);
    }
    out.push_back(v);
    if (x.succ >= 0) pq.insert(x.succ, static_cast<std::uint64_t>(pass(v)));
    ++i;
  });
  dev.charge_writes(dev.blocks_for(out.size()));
  return out;
}

}  // namespace

std::vector<std::int64_t> mlcc_label(const ListArray& lists, BlockDevice& dev) {
  return relay(lists, dev, [](std::int64_t i) { return i; }, [](std::int64_t v) { return v; });
}

Colouring colour_2mlc(const ListArray& lists, BlockDevice& dev) {
  const IoStats start = dev.stats();
  Colouring c;
  c.colour = relay(lists, dev, [](std::int64_t) { return std::int64_t{0}; }, [](std::int64_t v) { return 1 - v; });
  c.colours = 0;
  for (auto x : c.colour) c.colours = std::max(c.colours, x + 1);
  c.io = dev.stats() - start;
  return c;
}

Colouring colour_3lc(const ListArray& lists, BlockDevice& dev) {
  lists.validate();
  const IoStats start = dev.stats();
  const auto n = static_cast<std::size_t>(lists.size());
  // Forward links u -> succ(u) > u form one monotonic instance; backward
  // links, read in reverse, form the other.
  ListArray fw, bw;
  fw.pred.assign(n, -1);
  fw.succ.assign(n, -1);
  bw.pred.assign(n, -1);
  bw.succ.assign(n, -1);
  for (std::size_t u = 0; u < n; ++u) {
    const auto s = lists.succ[u];
    if (s < 0) continue;
    const auto ui = static_cast<std::int64_t>(u);
    if (s > ui) {
      fw.succ[u] = s;
      fw.pred[static_cast<std::size_t>(s)] = ui;
    } else {
      bw.succ[static_cast<std::size_t>(s)] = ui;
      bw.pred[u] = s;
    }
  }
  dev.charge_reads(dev.blocks_for(n));
  dev.charge_writes(2 * dev.blocks_for(n));
  const auto a = colour_2mlc(fw, dev).colour;
  const auto b = colour_2mlc(bw, dev).colour;

  Colouring out;
  out.colour.resize(n);
  for (std::size_t u = 0; u < n; ++u) out.colour[u] = 2 * a[u] + b[u] + 1;

  // Stretch boundaries touch both instances; everyone else can infer the
  // colours of its neighbours from its own.
  auto in_fw = [&](std::size_t u) { return fw.succ[u] >= 0 || fw.pred[u] >= 0; };
  auto in_bw = [&](std::size_t u) { return bw.succ[u] >= 0 || bw.pred[u] >= 0; };
  std::vector<std::pair<std::int64_t, std::int64_t>> boundary;
  for (std::size_t u = 0; u < n; ++u)
    if (in_fw(u) && in_bw(u)) boundary.push_back({static_cast<std::int64_t>(u), out.colour[u]});
  auto sorted = em_sort(DiskArray<std::pair<std::int64_t, std::int64_t>>::load(dev, boundary),
                        [](const auto& x, const auto& y) { return x.first < y.first; });
  boundary.clear();
  em_scan(sorted, [&](const auto& x) { boundary.push_back(x); });
  auto lookup = [&](std::int64_t v) {
    auto it = std::lower_bound(boundary.begin(), boundary.end(), std::make_pair(v, std::int64_t{0}),
                               [](const auto& x, const auto& y) { return x.first < y.first; });
    return it->second;
  };
  auto neighbour_colour = [&](std::size_t x, std::int64_t y, bool forward_link) -> std::int64_t {
    const auto yi = static_cast<std::size_t>(y);
    if (in_fw(yi) && in_bw(yi)) return lookup(y);
    if (forward_link) return 2 * (1 - a[x]) + 1;
    return (1 - b[x]) + 1;
  };
  for (std::size_t x = 0; x < n; ++x) {
    if (out.colour[x] != 4) continue;
    bool used[5] = {false, false, false, false, false};
    const auto xi = static_cast<std::int64_t>(x);
    if (const auto s = lists.succ[x]; s >= 0) used[neighbour_colour(x, s, s > xi)] = true;
    if (const auto p = lists.pred[x]; p >= 0) used[neighbour_colour(x, p, p < xi)] = true;
    std::int64_t c = 1;
    while (used[c]) ++c;
    out.colour[x] = c;
  }
  dev.charge_reads(dev.blocks_for(n));
  dev.charge_writes(dev.blocks_for(n));
  out.colours = 0;
  for (auto c : out.colour) out.colours = std::max(out.colours, c);
  out.io = dev.stats() - start;
  return out;
}

// ---------------------------------------------------------------------------
// Reductions

ListsAsIntervals reduce_mlcc_to_igc(const ListArray& lists, BlockDevice& dev) {
  lists.validate();
  if (!lists.monotonic()) throw ValidationError("list array is not monotonic");
  const auto V = lists.size();
  std::int64_t K = 0;
  for (auto p : lists.pred) K += p < 0;
  const auto n = static_cast<std::size_t>(2 * K + V);
  std::vector<std::int64_t> succ(n, -1);
  std::int64_t heads = 0, lasts = 0;
  for (std::int64_t u = 0; u < V; ++u) {
    const auto i = static_cast<std::size_t>(K + u);
    if (lists.pred[static_cast<std::size_t>(u)] < 0) succ[static_cast<std::size_t>(heads++)] = K + u;
    const auto s = lists.succ[static_cast<std::size_t>(u)];
    succ[i] = s >= 0 ? K + s : K + V + lasts++;
  }
  dev.charge_reads(dev.blocks_for(static_cast<std::size_t>(V)));
  dev.charge_writes(dev.blocks_for(n));
  ListsAsIntervals out;
  out.components = K;
  std::vector<Interval> iv;
  for (std::size_t i = 0; i < n; ++i) {
    if (succ[i] < 0) continue;
    iv.push_back({static_cast<double>(i), static_cast<double>(succ[i]) - 0.5, 1.0});
    const auto node = static_cast<std::int64_t>(i) - K;
    out.node_of.push_back(node >= 0 && node < V ? node : -1);
  }
  out.intervals = IntervalSet::build(std::move(iv));
  return out;
}

IntervalsAsLists reduce_igc_to_mlcc(const IntervalSet& s, BlockDevice& dev) {
  IntervalsAsLists out;
  out.chi = chromatic_number(s, dev);
  const auto n = static_cast<std::size_t>(s.size());
  std::vector<std::int64_t> right_rank(n), left_rank(n);
  out.interval_of.resize(n);
  std::int64_t li = 0, ri = 0;
  auto arr = endpoint_array(s, dev);
  em_scan(arr, [&](const Endpoint& e) {
    if (e.left) {
      left_rank[static_cast<std::size_t>(e.id)] = li;
      out.interval_of[static_cast<std::size_t>(li++)] = e.id;
    } else {
      right_rank[static_cast<std::size_t>(e.id)] = ri++;
    }
  });
  std::vector<std::int64_t> succ(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = right_rank[static_cast<std::size_t>(out.interval_of[i])];
    if (out.chi + j < static_cast<std::int64_t>(n)) succ[i] = out.chi + j;
  }
  dev.charge_writes(dev.blocks_for(2 * n));
  out.lists = ListArray::from_succ(succ);
  return out;
}

}  // namespace emkit
