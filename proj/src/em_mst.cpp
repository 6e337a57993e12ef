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

#include "emkit/em_mst.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "emkit/em_core.hpp"
#include "emkit/emsh.hpp"
#include "emkit/errors.hpp"

namespace emkit {

namespace {

bool by_src(const MstEdge& a, const MstEdge& b) {
  return a.src != b.src ? a.src < b.src : mst_lighter(a, b);
}
bool by_dst(const MstEdge& a, const MstEdge& b) { return a.dst < b.dst; }
bool by_pair(const MstEdge& a, const MstEdge& b) {
  if (a.src != b.src) return a.src < b.src;
  if (a.dst != b.dst) return a.dst < b.dst;
  return mst_lighter(a, b);
}
bool by_id(const MstEdge& a, const MstEdge& b) { return a.id < b.id; }
bool star_by_u(const Star& a, const Star& b) { return a.u < b.u; }
bool star_by_root(const Star& a, const Star& b) { return a.root < b.root; }

template <class T, class Pred>
DiskArray<T> filter(const DiskArray<T>& in, Pred keep) {
  DiskArray<T> out(in.device());
  Writer<T> w(out);
  em_scan(in, [&](const T& x) {
    if (keep(x)) w.put(x);
  });
  w.close();
  return out;
}

// Replaces the field selected by `get` with the star root, for input sorted
// on that field.
template <class T, class Get>
DiskArray<T> rename_sorted(const DiskArray<T>& in, const DiskArray<Star>& f, Get get) {
  DiskArray<T> out(in.device());
  Writer<T> w(out);
  in.flush();
  f.flush();
  Reader<Star> rf(f);
  em_scan(in, [&](T x) {
    std::int64_t& key = get(x);
    while (!rf.done() && rf.peek().u < key) rf.next();
    if (!rf.done() && rf.peek().u == key) key = rf.peek().root;
    w.put(x);
  });
  w.close();
  return out;
}

std::size_t count_sources(const DiskArray<MstEdge>& a) {
  std::size_t n = 0;
  std::int64_t last = 0;
  bool any = false;
  em_scan(a, [&](const MstEdge& e) {
    if (!any || e.src != last) ++n;
    any = true;
    last = e.src;
  });
  return n;
}

int ceil_log2(std::uint64_t x) {
  int r = 0;
  while ((std::uint64_t{1} << r) < x) ++r;
  return r;
}

}  // namespace

std::size_t bucket_limit(int k) {
  if (k >= 6) return std::numeric_limits<std::size_t>::max() / 2;
  return (std::size_t{1} << (std::size_t{1} << k)) - 1;
}

DiskArray<MstEdge> hook_phase(const DiskArray<MstEdge>& b0) {
  return filter(b0, [](const MstEdge&) { return true; });
}

DiskArray<Star> contract(const DiskArray<MstEdge>& hooks) {
  BlockDevice& dev = hooks.device();
  DiskArray<Star> out(dev);
  if (hooks.empty()) return out;
  // A mutual pair appears twice under one id; keep a single copy.
  DiskArray<MstEdge> sorted = em_sort(hooks, by_id);
  DiskArray<UEdge> und(dev);
  {
    Writer<UEdge> w(und);
    std::int64_t last = -1;
    bool any = false;
    em_scan(sorted, [&](const MstEdge& e) {
      if (any && e.id == last) return;
      any = true;
      last = e.id;
      w.put({e.src, e.dst});
    });
  }
  EulerTour tour = em_euler_tour(und, und.raw().front().a);
  DiskArray<Star> raw(dev);
  {
    Writer<Star> w(raw);
    em_scan(tour.order, [&](const TourEdge& t) {
      if (t.u != t.tree) w.put({t.u, t.tree});
    });
  }
  DiskArray<Star> by_u = em_sort(raw, star_by_u);
  Writer<Star> w(out);
  std::int64_t last = -1;
  bool any = false;
  em_scan(by_u, [&](const Star& s) {
    if (any && s.u == last) return;
    any = true;
    last = s.u;
    w.put(s);
  });
  w.close();
  return out;
}

DiskArray<Star> compose_stars(const DiskArray<Star>& older, const DiskArray<Star>& newer) {
  BlockDevice& dev = newer.device();
  DiskArray<Star> newer_u = em_sort(newer, star_by_u);
  DiskArray<Star> all(dev);
  if (!older.empty()) {
    DiskArray<Star> by_root = em_sort(older, star_by_root);
    DiskArray<Star> moved = rename_sorted(by_root, newer_u, [](Star& s) -> std::int64_t& { return s.root; });
    Writer<Star> w(all);
    em_scan(moved, [&](const Star& s) { w.put(s); });
    em_scan(newer_u, [&](const Star& s) { w.put(s); });
    w.close();
    return em_sort(all, star_by_u);
  }
  return newer_u;
}

DiskArray<MstEdge> cleanup_bucket(const DiskArray<MstEdge>& bucket, const DiskArray<Star>& f) {
  BlockDevice& dev = bucket.device();
  DiskArray<MstEdge> pairs(dev);
  if (f.empty()) {
    pairs = em_sort(bucket, by_pair);
  } else {
    DiskArray<MstEdge> s1 = rename_sorted(bucket, f, [](MstEdge& e) -> std::int64_t& { return e.src; });
    DiskArray<MstEdge> s2 = em_sort(s1, by_dst);
    DiskArray<MstEdge> s3 = rename_sorted(s2, f, [](MstEdge& e) -> std::int64_t& { return e.dst; });
    pairs = em_sort(s3, by_pair);
  }
  DiskArray<MstEdge> kept(dev);
  {
    Writer<MstEdge> w(kept);
    MstEdge last{};
    bool any = false;
    em_scan(pairs, [&](const MstEdge& e) {
      if (e.src == e.dst) return;
      if (any && e.src == last.src && e.dst == last.dst) return;
      any = true;
      last = e;
      w.put(e);
    });
  }
  return em_sort(kept, by_src);
}

DiskArray<Threshold> rename_thresholds(const DiskArray<Threshold>& thr, const DiskArray<Star>& f) {
  BlockDevice& dev = f.device();
  DiskArray<Threshold> moved = rename_sorted(thr, f, [](Threshold& t) -> std::int64_t& { return t.v; });
  DiskArray<Threshold> sorted = em_sort(moved, [](const Threshold& a, const Threshold& b) {
    if (a.v != b.v) return a.v < b.v;
    return threshold_below(a.w, a.id, b);
  });
  DiskArray<Threshold> out(dev);
  Writer<Threshold> w(out);
  std::int64_t last = 0;
  bool any = false;
  em_scan(sorted, [&](const Threshold& t) {
    if (any && t.v == last) return;
    any = true;
    last = t.v;
    w.put(t);
  });
  w.close();
  return out;
}

DiskArray<MstEdge> minset_extract(const DiskArray<MstEdge>& cleaned, const DiskArray<Threshold>& r) {
  DiskArray<MstEdge> out(cleaned.device());
  Writer<MstEdge> w(out);
  r.flush();
  Reader<Threshold> rr(r);
  em_scan(cleaned, [&](const MstEdge& e) {
    while (!rr.done() && rr.peek().v < e.src) rr.next();
    Threshold t{e.src};
    if (!rr.done() && rr.peek().v == e.src) t = rr.peek();
    if (threshold_below(e.w, e.id, t)) w.put(e);
  });
  w.close();
  return out;
}

FilledBucket fill_bucket(const DiskArray<MstEdge>& src, const DiskArray<Threshold>& r, int k) {
  BlockDevice& dev = src.device();
  FilledBucket fb{DiskArray<MstEdge>(dev), DiskArray<Threshold>(dev)};
  const std::size_t lim = bucket_limit(k);
  src.flush();
  r.flush();
  Reader<MstEdge> es(src);
  Reader<Threshold> rs(r);
  Writer<MstEdge> we(fb.edges);
  Writer<Threshold> wt(fb.thr);
  while (!es.done() || !rs.done()) {
    std::int64_t v = 0;
    if (es.done())
      v = rs.peek().v;
    else if (rs.done())
      v = es.peek().src;
    else
      v = std::min(es.peek().src, rs.peek().v);
    Threshold h{v};
    if (!rs.done() && rs.peek().v == v) h = rs.next();
    std::size_t taken = 0;
    bool cut = false;
    while (!es.done() && es.peek().src == v) {
      const MstEdge e = es.next();
      if (taken < lim) {
        we.put(e);
        ++taken;
      } else if (!cut) {
        h = Threshold{v, e.w, e.id};
        cut = true;
      }
    }
    if (std::isfinite(h.w)) wt.put(h);
  }
  we.close();
  wt.close();
  return fb;
}

PrimResult em_prim(const DiskArray<MstEdge>& edges) {
  BlockDevice& dev = edges.device();
  PrimResult res;
  if (edges.empty()) return res;
  struct Arc {
    std::int64_t src, dst, rank;
  };
  DiskArray<MstEdge> ranked = em_sort(edges, mst_lighter);
  DiskArray<std::int64_t> id_of(dev);
  DiskArray<Arc> arcs(dev);
  {
    Writer<std::int64_t> wi(id_of);
    Writer<Arc> wa(arcs);
    std::int64_t rank = 0;
    em_scan(ranked, [&](const MstEdge& e) {
      wi.put(e.id);
      wa.put({e.src, e.dst, rank});
      wa.put({e.dst, e.src, rank});
      ++rank;
    });
  }
  DiskArray<Arc> adj = em_sort(arcs, [](const Arc& a, const Arc& b) { return a.src < b.src; });
  // Offsets of each vertex's adjacency; the reduced graph has few vertices.
  std::vector<std::int64_t> verts;
  std::vector<std::size_t> begin;
  {
    std::size_t pos = 0;
    em_scan(adj, [&](const Arc& a) {
      if (verts.empty() || verts.back() != a.src) {
        verts.push_back(a.src);
        begin.push_back(pos);
      }
      ++pos;
    });
    begin.push_back(pos);
  }
  auto index_of = [&](std::int64_t v) {
    return static_cast<std::size_t>(std::lower_bound(verts.begin(), verts.end(), v) - verts.begin());
  };
  std::unordered_set<std::int64_t> captured;
  SoftHeap pq = SoftHeap::hard(dev);
  auto capture = [&](std::int64_t v, std::int64_t via) {
    captured.insert(v);
    const std::size_t i = index_of(v);
    adj.flush();
    Reader<Arc> rd(adj, begin[i], begin[i + 1]);
    while (!rd.done()) {
      const Arc a = rd.next();
      if (a.rank != via) pq.insert(a.rank, static_cast<std::uint64_t>(a.dst));
    }
  };
  for (std::size_t s = 0; s < verts.size(); ++s) {
    const std::int64_t start = verts[s];
    if (captured.count(start)) continue;
    capture(start, -1);
    while (!pq.empty()) {
      const HeapItem it = pq.deletemin();
      if (!pq.empty() && pq.findmin().key == it.key) {
        pq.deletemin();  // both copies present: internal edge
        continue;
      }
      const auto v = static_cast<std::int64_t>(it.payload);
      res.edge_ids.push_back(id_of.get(static_cast<std::size_t>(it.key)));
      res.labels.push_back({v, start});
      capture(v, it.key);
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Driver

namespace {

class MstRun {
 public:
  MstRun(const Graph& g, BlockDevice& dev, MstOptions opt, MstResult& res)
      : g_(g), dev_(dev), opt_(opt), res_(res), cur_(dev), lab_(dev), forest_(dev) {
    if (opt_.audit) {
      comp_.resize(static_cast<std::size_t>(g.V));
      for (std::int64_t v = 0; v < g.V; ++v) comp_[static_cast<std::size_t>(v)] = v;
    }
  }

  void run() {
    const IoStats start = dev_.stats();
    DiskArray<MstEdge> raw(dev_);
    {
      Writer<MstEdge> w(raw);
      for (const Edge& e : g_.edges) {
        if (e.u == e.v) continue;
        w.put({e.u, e.v, e.w, e.id});
        w.put({e.v, e.u, e.w, e.id});
      }
    }
    DiskArray<MstEdge> sorted = em_sort(raw, by_src);
    cur_ = cleanup_bucket(sorted, DiskArray<Star>(dev_));
    measure();

    // Sparse inputs: plain Boruvka rounds until E > V.
    while (e_und_ > 0 && e_und_ <= v_act_) {
      stage(0, -1, 0);
      ++res_.boruvka_rounds;
    }

    const std::size_t e_main = e_und_;
    const std::size_t v_main = std::max<std::size_t>(v_act_, 1);
    const std::uint64_t ratio = std::max<std::uint64_t>(2, (e_main + v_main - 1) / v_main);
    const int lg = ceil_log2(static_cast<std::uint64_t>(ceil_log2(ratio)));
    const std::size_t target = std::max<std::size_t>(1, e_main / dev_.B());
    for (int j = 0; e_und_ > 0 && v_act_ > target; ++j) {
      const IoStats before = dev_.stats();
      stage(j + lg, j, target);
      ++res_.stages;
      res_.stage_io.push_back(dev_.stats() - before);
    }

    DiskArray<MstEdge> und = filter(cur_, [](const MstEdge& e) { return e.src < e.dst; });
    res_.prim_vertices = v_act_;
    res_.prim_edges = und.size();
    PrimResult pr = em_prim(und);
    for (auto id : pr.edge_ids) forest_.push_back({0, 0, 0.0, id});
    if (!pr.labels.empty()) lab_ = compose_stars(lab_, DiskArray<Star>::load(dev_, pr.labels));

    finish();
    res_.io = dev_.stats() - start;
  }

 private:
  struct Bucket {
    DiskArray<MstEdge> edges;
    DiskArray<Threshold> thr;
    DiskArray<Star> stars;
    bool full = false;
  };

  void measure() {
    v_act_ = count_sources(cur_);
    e_und_ = cur_.size() / 2;
  }

  void stage(int g, int stage_no, std::size_t target) {
    const std::int64_t phases = std::int64_t{1} << g;
    std::vector<Bucket> b;
    for (int k = 0; k <= g + 1; ++k)
      b.push_back({DiskArray<MstEdge>(dev_), DiskArray<Threshold>(dev_), DiskArray<Star>(dev_), false});
    b[static_cast<std::size_t>(g + 1)].edges = std::move(cur_);
    b[static_cast<std::size_t>(g + 1)].full = true;
    for (int k = g; k >= 0; --k) {
      auto& up = b[static_cast<std::size_t>(k + 1)];
      FilledBucket fb = fill_bucket(up.edges, up.thr, k);
      b[static_cast<std::size_t>(k)].edges = std::move(fb.edges);
      b[static_cast<std::size_t>(k)].thr = std::move(fb.thr);
      b[static_cast<std::size_t>(k)].full = true;
    }
    if (opt_.audit)
      for (int k = 0; k <= g; ++k) audit_bucket(b[static_cast<std::size_t>(k)]);

    std::size_t live = v_act_;
    DiskArray<Star> stage_f(dev_);
    for (std::int64_t i = 1; i <= phases; ++i) {
      ++res_.phases;
      DiskArray<MstEdge> hooks = hook_phase(b[0].edges);
      if (opt_.audit) audit_hooks(hooks);
      em_scan(hooks, [&](const MstEdge& e) { forest_.push_back(e); });
      DiskArray<Star> stars = contract(hooks);
      live -= std::min(live, stars.size());
      if (opt_.audit) apply_stars(stars);
      b[0].edges = DiskArray<MstEdge>(dev_);
      b[0].thr = DiskArray<Threshold>(dev_);
      b[0].full = false;

      const int f = 1 + __builtin_ctzll(static_cast<unsigned long long>(i));
      DiskArray<Star> F(dev_);
      for (int k = f - 1; k >= 1; --k) {
        if (b[static_cast<std::size_t>(k)].full) ++res_.schedule_violations;
        F = compose_stars(F, b[static_cast<std::size_t>(k)].stars);
      }
      F = compose_stars(F, stars);
      Bucket& bf = b[static_cast<std::size_t>(f)];
      DiskArray<MstEdge> cleaned = cleanup_bucket(bf.edges, F);
      if (f == g + 1) {
        cur_ = std::move(cleaned);
        stage_f = std::move(F);
        break;
      }
      DiskArray<Threshold> r = rename_thresholds(bf.thr, F);
      DiskArray<MstEdge> x = minset_extract(cleaned, r);
      {
        FilledBucket fb = fill_bucket(x, r, f - 1);
        b[static_cast<std::size_t>(f - 1)].edges = std::move(fb.edges);
        b[static_cast<std::size_t>(f - 1)].thr = std::move(fb.thr);
      }
      for (int k = f - 2; k >= 0; --k) {
        auto& up = b[static_cast<std::size_t>(k + 1)];
        FilledBucket fb = fill_bucket(up.edges, up.thr, k);
        b[static_cast<std::size_t>(k)].edges = std::move(fb.edges);
        b[static_cast<std::size_t>(k)].thr = std::move(fb.thr);
      }
      for (int k = 0; k < f; ++k) {
        b[static_cast<std::size_t>(k)].full = true;
        b[static_cast<std::size_t>(k)].stars = DiskArray<Star>(dev_);
      }
      bf.edges = DiskArray<MstEdge>(dev_);
      bf.thr = DiskArray<Threshold>(dev_);
      bf.stars = std::move(F);
      bf.full = false;
      if (opt_.audit)
        for (int k = 0; k < f; ++k) audit_bucket(b[static_cast<std::size_t>(k)]);

      MstPhaseTrace t;
      t.stage = stage_no;
      t.phase = i;
      t.g = g;
      t.hooked = hooks.size();
      for (int k = 0; k <= g + 1; ++k) t.full.push_back(b[static_cast<std::size_t>(k)].full);
      for (int k = 1; k <= g + 1; ++k) {
        const bool expect_full = ((i >> (k - 1)) & 1) == 0;
        if (t.full[static_cast<std::size_t>(k)] != expect_full) ++res_.schedule_violations;
      }
      if (opt_.trace) res_.trace.push_back(std::move(t));

      if (opt_.truncate_stages && live <= target) {
        // Every phase so far is summarised by the empty buckets, oldest at
        // the highest index.
        DiskArray<Star> all(dev_);
        for (int k = g; k >= 1; --k)
          if (!b[static_cast<std::size_t>(k)].full) all = compose_stars(all, b[static_cast<std::size_t>(k)].stars);
        cur_ = cleanup_bucket(b[static_cast<std::size_t>(g + 1)].edges, all);
        stage_f = std::move(all);
        break;
      }
    }
    if (!stage_f.empty()) lab_ = compose_stars(lab_, stage_f);
    measure();
  }

  void finish() {
    DiskArray<MstEdge> by = em_sort(forest_, by_id);
    std::int64_t last = -1;
    bool any = false;
    em_scan(by, [&](const MstEdge& e) {
      if (any && e.id == last) return;
      any = true;
      last = e.id;
      res_.edge_ids.push_back(e.id);
    });
    std::unordered_map<std::int64_t, double> w;
    for (const Edge& e : g_.edges) w.emplace(e.id, e.w);
    for (auto id : res_.edge_ids) res_.weight += w[id];
    res_.labels.resize(static_cast<std::size_t>(g_.V));
    for (std::int64_t v = 0; v < g_.V; ++v) res_.labels[static_cast<std::size_t>(v)] = v;
    em_scan(lab_, [&](const Star& s) { res_.labels[static_cast<std::size_t>(s.u)] = s.root; });
  }

  // -------------------------------------------------------------------------
  // In-memory cross-checks

  struct Ext {
    std::int64_t nbr;
    double w;
    std::int64_t id;
  };

  std::unordered_map<std::int64_t, std::vector<Ext>> external_lists() const {
    std::map<std::pair<std::int64_t, std::int64_t>, Ext> best;
    auto offer = [&](std::int64_t a, std::int64_t b, const Edge& e) {
      auto key = std::make_pair(a, b);
      auto it = best.find(key);
      const Ext x{b, e.w, e.id};
      if (it == best.end() || e.w < it->second.w || (e.w == it->second.w && e.id < it->second.id))
        best[key] = x;
    };
    for (const Edge& e : g_.edges) {
      const auto a = comp_[static_cast<std::size_t>(e.u)], c = comp_[static_cast<std::size_t>(e.v)];
      if (a == c) continue;
      offer(a, c, e);
      offer(c, a, e);
    }
    std::unordered_map<std::int64_t, std::vector<Ext>> out;
    for (const auto& [key, x] : best) out[key.first].push_back(x);
    for (auto& [v, l] : out)
      std::sort(l.begin(), l.end(), [](const Ext& a, const Ext& b) { return a.w != b.w ? a.w < b.w : a.id < b.id; });
    return out;
  }

  void audit_hooks(const DiskArray<MstEdge>& hooks) {
    auto ext = external_lists();
    for (const MstEdge& e : hooks.raw()) {
      auto it = ext.find(e.src);
      if (it == ext.end() || it->second.front().id != e.id || it->second.front().nbr != e.dst)
        ++res_.audit_violations;
    }
  }

  void audit_bucket(const Bucket& bk) {
    auto ext = external_lists();
    std::unordered_map<std::int64_t, Threshold> thr;
    for (const Threshold& t : bk.thr.raw()) thr[t.v] = t;
    const auto& es = bk.edges.raw();
    for (std::size_t i = 0; i < es.size();) {
      std::size_t j = i;
      while (j < es.size() && es[j].src == es[i].src) ++j;
      const auto& l = ext[es[i].src];
      const std::size_t n = j - i;
      if (n > l.size()) {
        ++res_.audit_violations;
      } else {
        for (std::size_t t = 0; t < n; ++t)
          if (l[t].id != es[i + t].id || l[t].nbr != es[i + t].dst) ++res_.audit_violations;
        if (n < l.size()) {
          Threshold h{es[i].src};
          if (auto it = thr.find(es[i].src); it != thr.end()) h = it->second;
          if (threshold_below(l[n].w, l[n].id, h)) ++res_.audit_violations;
        }
      }
      i = j;
    }
  }

  void apply_stars(const DiskArray<Star>& stars) {
    std::unordered_map<std::int64_t, std::int64_t> to;
    for (const Star& s : stars.raw()) to[s.u] = s.root;
    for (auto& c : comp_)
      if (auto it = to.find(c); it != to.end()) c = it->second;
  }

  const Graph& g_;
  BlockDevice& dev_;
  MstOptions opt_;
  MstResult& res_;
  DiskArray<MstEdge> cur_;
  DiskArray<Star> lab_;
  DiskArray<MstEdge> forest_;
  std::size_t v_act_ = 0;
  std::size_t e_und_ = 0;
  std::vector<std::int64_t> comp_;
};

}  // namespace

MstResult mst(const Graph& g, BlockDevice& dev, MstOptions opt) {
  MstResult res;
  MstRun run(g, dev, opt, res);
  run.run();
  return res;
}

std::vector<std::int64_t> connected_components(const Graph& g, BlockDevice& dev) {
  return mst(g, dev).labels;
}

}  // namespace emkit
