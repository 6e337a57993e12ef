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
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <random>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "emkit/errors.hpp"
#include "emkit/wstream.hpp"
#include "wstream_internal.hpp"

namespace emkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_simple_endpoints(const Graph& g) {
  if (g.V < 0) throw MalformedInput("negative vertex count");
  for (const auto& e : g.edges) {
    if (e.u < 0 || e.v < 0 || e.u >= g.V || e.v >= g.V) throw MalformedInput("edge endpoint out of range");
    if (e.u == e.v) throw MalformedInput("self-loop");
  }
}

std::size_t lg_ceil(std::int64_t n) {
  std::size_t b = 0;
  while ((std::int64_t{1} << b) < n) ++b;
  return std::max<std::size_t>(1, b);
}

StreamItem edge_item(std::int64_t u, std::int64_t v, std::int64_t id) {
  StreamItem it;
  it.tag = Tag::edge;
  it.u = u;
  it.v = v;
  it.id = id;
  return it;
}

StreamItem result_item(std::int64_t v, std::int64_t value = 1) {
  StreamItem it;
  it.tag = Tag::result;
  it.id = v;
  it.r = value;
  return it;
}

std::vector<StreamItem> adjacency_stream(const Graph& g) {
  const auto adj = g.adjacency();
  std::vector<StreamItem> in;
  in.reserve(static_cast<std::size_t>(g.V) + 2 * g.edges.size());
  for (std::int64_t v = 0; v < g.V; ++v) {
    StreamItem it;
    it.tag = Tag::vertex;
    it.id = v;
    in.push_back(it);
  }
  for (std::int64_t v = 0; v < g.V; ++v) {
    for (auto y : adj[static_cast<std::size_t>(v)]) in.push_back(edge_item(v, y, 0));
  }
  return in;
}

std::vector<StreamItem> edge_stream(const Graph& g) {
  std::vector<StreamItem> in;
  in.reserve(g.edges.size());
  for (const auto& e : g.edges) in.push_back(edge_item(e.u, e.v, e.id));
  return in;
}

// ---------------------------------------------------------------------------
// Maximal independent set

VertexSet mis_adjacency(const Graph& g, WsOptions opt) {
  TapeMachine m(opt);
  m.load(adjacency_stream(g));
  const auto step = static_cast<std::int64_t>(m.M());
  for (std::int64_t lo = 0; lo < g.V; lo += step) {
    const std::int64_t hi = std::min(g.V, lo + step);
    const auto size = static_cast<std::size_t>(hi - lo);
    auto in_seg = [&](std::int64_t x) { return x >= lo && x < hi; };
    std::vector<char> marked(size, 0), elected(size, 0);
    m.hold(size);
    // An entry (u, y) marked 1 says u joined the set.
    m.pass([&](const StreamItem& it) {
      if (it.tag == Tag::edge && it.kind == 1 && in_seg(it.v)) marked[static_cast<std::size_t>(it.v - lo)] = 1;
      m.write(it);
    });
    std::int64_t current = -1;
    StreamItem it;
    m.begin_pass();
    while (m.read(it)) {
      if (it.tag == Tag::edge && in_seg(it.u)) {
        const auto i = static_cast<std::size_t>(it.u - lo);
        if (it.u != current) {
          current = it.u;
          if (!marked[i]) elected[i] = 1;
        }
        if (elected[i]) {
          it.kind = 1;
          if (in_seg(it.v)) marked[static_cast<std::size_t>(it.v - lo)] = 1;
        }
      }
      m.write(it);
    }
    for (std::size_t i = 0; i < size; ++i) {
      if (!marked[i] && !elected[i]) elected[i] = 1;
      if (elected[i]) m.write(result_item(lo + static_cast<std::int64_t>(i)));
    }
    m.end_pass();
    m.drop(size);
  }
  VertexSet res;
  res.in.assign(static_cast<std::size_t>(g.V), 0);
  for (const auto& x : m.tape()) {
    if (x.tag == Tag::result) res.in[static_cast<std::size_t>(x.id)] = 1;
  }
  res.report = m.report("mis", static_cast<std::size_t>(g.V), g.edges.size());
  return res;
}

VertexSet mis_edges(const Graph& g, WsOptions opt) {
  TapeMachine m(opt);
  m.load(edge_stream(g), g.edges.size() + static_cast<std::size_t>(g.V));
  const std::size_t M = m.M();
  const std::size_t lg = lg_ceil(g.V);
  const auto x = static_cast<std::int64_t>(
      std::max<std::size_t>(1, std::min<std::size_t>(M / 2, static_cast<std::size_t>(std::sqrt(M * lg / 2.0)))));
  for (std::int64_t lo = 0; lo < g.V; lo += x) {
    const std::int64_t hi = std::min(g.V, lo + x);
    const auto size = static_cast<std::size_t>(hi - lo);
    const std::size_t matrix = (size * size + lg - 1) / lg;
    auto in_seg = [&](std::int64_t y) { return y >= lo && y < hi; };
    std::vector<char> adj(size * size, 0), marked(size, 0), elected(size, 0);
    m.hold(size + matrix);
    // kind bit 1: u is in the set, bit 2: v is in the set.
    m.pass([&](const StreamItem& it) {
      if (it.tag == Tag::edge) {
        const bool a = in_seg(it.u), b = in_seg(it.v);
        if (a && b) {
          adj[static_cast<std::size_t>(it.u - lo) * size + static_cast<std::size_t>(it.v - lo)] = 1;
          adj[static_cast<std::size_t>(it.v - lo) * size + static_cast<std::size_t>(it.u - lo)] = 1;
        }
        if (a && (it.kind & 2)) marked[static_cast<std::size_t>(it.u - lo)] = 1;
        if (b && (it.kind & 1)) marked[static_cast<std::size_t>(it.v - lo)] = 1;
      }
      m.write(it);
    });
    for (std::size_t i = 0; i < size; ++i) {
      if (marked[i]) continue;
      elected[i] = 1;
      for (std::size_t j = i + 1; j < size; ++j) {
        if (adj[i * size + j]) marked[j] = 1;
      }
    }
    m.begin_pass();
    StreamItem it;
    while (m.read(it)) {
      if (it.tag == Tag::edge) {
        if (in_seg(it.u) && elected[static_cast<std::size_t>(it.u - lo)]) it.kind |= 1;
        if (in_seg(it.v) && elected[static_cast<std::size_t>(it.v - lo)]) it.kind |= 2;
      }
      m.write(it);
    }
    for (std::size_t i = 0; i < size; ++i) {
      if (elected[i]) m.write(result_item(lo + static_cast<std::int64_t>(i)));
    }
    m.end_pass();
    m.drop(size + matrix);
  }
  VertexSet res;
  res.in.assign(static_cast<std::size_t>(g.V), 0);
  for (const auto& y : m.tape()) {
    if (y.tag == Tag::result) res.in[static_cast<std::size_t>(y.id)] = 1;
  }
  res.report = m.report("mis", static_cast<std::size_t>(g.V), g.edges.size());
  return res;
}

// ---------------------------------------------------------------------------
// Colouring

WsColouring colour_adjacency(const Graph& g, WsOptions opt) {
  TapeMachine m(opt);
  m.load(adjacency_stream(g));

  // Append the palette {1, ..., deg(v) + 1} after each adjacency list.
  {
    std::int64_t current = -1, count = 0;
    auto palette = [&] {
      if (current < 0) return;
      for (std::int64_t c = 1; c <= count + 1; ++c) {
        StreamItem p;
        p.tag = Tag::palette;
        p.u = current;
        p.id = c;
        m.write(p);
      }
    };
    m.begin_pass();
    StreamItem it;
    while (m.read(it)) {
      if (it.tag == Tag::edge && it.u != current) {
        palette();
        current = it.u;
        count = 0;
      }
      if (it.tag == Tag::edge) ++count;
      m.write(it);
    }
    palette();
    m.end_pass();
  }

  const auto step = static_cast<std::int64_t>(m.M());
  for (std::int64_t lo = 0; lo < g.V; lo += step) {
    const std::int64_t hi = std::min(g.V, lo + step);
    const auto size = static_cast<std::size_t>(hi - lo);
    auto in_seg = [&](std::int64_t y) { return y >= lo && y < hi; };
    std::vector<std::int64_t> colour(size, 0);
    m.hold(size);

    std::int64_t current = -1;
    std::unordered_set<std::int64_t> used;
    m.pass([&](const StreamItem& it) {
      if (it.tag == Tag::edge && in_seg(it.u)) {
        if (it.u != current) {
          current = it.u;
          used.clear();
        }
        if (in_seg(it.v) && colour[static_cast<std::size_t>(it.v - lo)] > 0) {
          used.insert(colour[static_cast<std::size_t>(it.v - lo)]);
        }
      } else if (it.tag == Tag::palette && in_seg(it.u)) {
        auto& c = colour[static_cast<std::size_t>(it.u - lo)];
        if (c == 0 && !used.count(it.id)) c = it.id;
        return;
      }
      m.write(it);
    });
    for (auto& c : colour) {
      if (c == 0) c = 1;
    }

    current = -1;
    used.clear();
    StreamItem it;
    m.begin_pass();
    while (m.read(it)) {
      if (it.tag == Tag::edge && it.u >= hi) {
        if (it.u != current) {
          current = it.u;
          used.clear();
        }
        if (in_seg(it.v)) used.insert(colour[static_cast<std::size_t>(it.v - lo)]);
      } else if (it.tag == Tag::palette && it.u >= hi && it.u == current && used.count(it.id)) {
        continue;
      }
      m.write(it);
    }
    for (std::size_t i = 0; i < size; ++i) m.write(result_item(lo + static_cast<std::int64_t>(i), colour[i]));
    m.end_pass();
    m.drop(size);
  }
  WsColouring res;
  res.colour.assign(static_cast<std::size_t>(g.V), 0);
  for (const auto& y : m.tape()) {
    if (y.tag == Tag::result) res.colour[static_cast<std::size_t>(y.id)] = y.r;
  }
  res.report = m.report("colour", static_cast<std::size_t>(g.V), g.edges.size());
  return res;
}

WsColouring colour_edges(const Graph& g, WsOptions opt) {
  TapeMachine m(opt);
  m.load(edge_stream(g), g.edges.size() + static_cast<std::size_t>(g.V));
  const std::size_t M = m.M();
  const std::size_t lg = lg_ceil(g.V);
  const auto delta = static_cast<std::size_t>(std::max<std::int64_t>(0, g.max_degree()));
  const std::size_t lgd = lg_ceil(static_cast<std::int64_t>(delta) + 1);
  const double bound = std::min({M / 3.0, std::sqrt(M * lg / 3.0),
                                 static_cast<double>(M * lg) / (3.0 * static_cast<double>((delta + 1) * lgd))});
  const auto x = static_cast<std::int64_t>(std::max(1.0, std::floor(bound)));
  for (std::int64_t lo = 0; lo < g.V; lo += x) {
    const std::int64_t hi = std::min(g.V, lo + x);
    const auto size = static_cast<std::size_t>(hi - lo);
    const std::size_t words = size + (size * size + lg - 1) / lg + (size * (delta + 1) * lgd + lg - 1) / lg;
    auto in_seg = [&](std::int64_t y) { return y >= lo && y < hi; };
    std::vector<char> adj(size * size, 0);
    std::vector<std::int64_t> deg(size, 0), colour(size, 0);
    std::vector<std::vector<char>> forbidden(size, std::vector<char>(delta + 2, 0));
    m.hold(words);
    // aux and aux2 hold the colours of u and v once known.
    m.pass([&](const StreamItem& it) {
      if (it.tag == Tag::edge) {
        const bool a = in_seg(it.u), b = in_seg(it.v);
        if (a && b) {
          adj[static_cast<std::size_t>(it.u - lo) * size + static_cast<std::size_t>(it.v - lo)] = 1;
          adj[static_cast<std::size_t>(it.v - lo) * size + static_cast<std::size_t>(it.u - lo)] = 1;
        }
        if (a) {
          ++deg[static_cast<std::size_t>(it.u - lo)];
          if (it.aux2 > 0 && static_cast<std::size_t>(it.aux2) <= delta + 1) {
            forbidden[static_cast<std::size_t>(it.u - lo)][static_cast<std::size_t>(it.aux2)] = 1;
          }
        }
        if (b) {
          ++deg[static_cast<std::size_t>(it.v - lo)];
          if (it.aux > 0 && static_cast<std::size_t>(it.aux) <= delta + 1) {
            forbidden[static_cast<std::size_t>(it.v - lo)][static_cast<std::size_t>(it.aux)] = 1;
          }
        }
      }
      m.write(it);
    });
    for (std::size_t i = 0; i < size; ++i) {
      auto& f = forbidden[i];
      for (std::size_t j = 0; j < i; ++j) {
        if (adj[i * size + j]) f[static_cast<std::size_t>(colour[j])] = 1;
      }
      for (std::int64_t c = 1; c <= deg[i] + 1; ++c) {
        if (!f[static_cast<std::size_t>(c)]) {
          colour[i] = c;
          break;
        }
      }
      if (colour[i] == 0) throw std::logic_error("palette exhausted");
    }
    m.begin_pass();
    StreamItem it;
    while (m.read(it)) {
      if (it.tag == Tag::edge) {
        if (in_seg(it.u)) it.aux = colour[static_cast<std::size_t>(it.u - lo)];
        if (in_seg(it.v)) it.aux2 = colour[static_cast<std::size_t>(it.v - lo)];
      }
      m.write(it);
    }
    for (std::size_t i = 0; i < size; ++i) m.write(result_item(lo + static_cast<std::int64_t>(i), colour[i]));
    m.end_pass();
    m.drop(words);
  }
  WsColouring res;
  res.colour.assign(static_cast<std::size_t>(g.V), 0);
  for (const auto& y : m.tape()) {
    if (y.tag == Tag::result) res.colour[static_cast<std::size_t>(y.id)] = y.r;
  }
  res.report = m.report("colour", static_cast<std::size_t>(g.V), g.edges.size());
  return res;
}

}  // namespace

VertexSet ws_mis(const Graph& g, Repr repr, WsOptions opt) {
  check_simple_endpoints(g);
  return repr == Repr::adjacency ? mis_adjacency(g, opt) : mis_edges(g, opt);
}

WsColouring ws_colouring(const Graph& g, Repr repr, WsOptions opt) {
  check_simple_endpoints(g);
  return repr == Repr::adjacency ? colour_adjacency(g, opt) : colour_edges(g, opt);
}

// ---------------------------------------------------------------------------
// Maximal matching

WsMatching ws_maximal_matching(const Graph& g, WsOptions opt) {
  check_simple_endpoints(g);
  TapeMachine m(opt);
  m.load(edge_stream(g));
  for (;;) {
    std::unordered_set<std::int64_t> ends;
    std::vector<StreamItem> L;
    bool remaining = false;
    m.begin_pass();
    StreamItem it;
    while (m.read(it)) {
      if (it.tag != Tag::edge) {
        m.write(it);
        continue;
      }
      if (ends.count(it.u) || ends.count(it.v)) continue;
      if (L.size() < m.M()) {
        m.hold();
        L.push_back(it);
        ends.insert(it.u);
        ends.insert(it.v);
        continue;
      }
      remaining = true;
      m.write(it);
    }
    for (const auto& e : L) m.write(result_item(e.id));
    m.drop(L.size());
    m.end_pass();
    if (!remaining) break;
  }
  WsMatching res;
  for (const auto& y : m.tape()) {
    if (y.tag == Tag::result) res.edge_ids.push_back(y.id);
  }
  std::sort(res.edge_ids.begin(), res.edge_ids.end());
  res.report = m.report("match", static_cast<std::size_t>(g.V), g.edges.size());
  return res;
}

// ---------------------------------------------------------------------------
// Weighted vertex cover

WsCover ws_vertex_cover(const Graph& g, const std::vector<std::int64_t>& weight, WsOptions opt) {
  check_simple_endpoints(g);
  if (weight.size() != static_cast<std::size_t>(g.V)) throw ValidationError("one weight per vertex expected");
  for (auto w : weight) {
    if (w <= 0) throw ValidationError("vertex weights must be positive integers");
  }
  TapeMachine m(opt);
  {
    auto in = edge_stream(g);
    for (auto& it : in) {
      it.aux = weight[static_cast<std::size_t>(it.u)];
      it.aux2 = weight[static_cast<std::size_t>(it.v)];
    }
    m.load(std::move(in));
  }
  for (;;) {
    // Residual weights of the vertices touched in this round.
    std::unordered_map<std::int64_t, std::int64_t> R;
    bool written = false;
    auto residual = [&](std::int64_t v, std::int64_t carried) {
      auto f = R.find(v);
      return f == R.end() ? carried : f->second;
    };
    m.begin_pass();
    StreamItem it;
    while (m.read(it)) {
      if (it.tag != Tag::edge) {
        m.write(it);
        continue;
      }
      const std::int64_t ru = residual(it.u, it.aux), rv = residual(it.v, it.aux2);
      if (ru == 0 || rv == 0) continue;
      const std::size_t fresh = (R.count(it.u) ? 0 : 1) + (R.count(it.v) ? 0 : 1);
      if (R.size() + fresh <= m.M()) {
        m.hold(fresh);
        const std::int64_t eps = std::min(ru, rv);
        R[it.u] = ru - eps;
        R[it.v] = rv - eps;
        continue;
      }
      written = true;
      m.write(it);
    }
    auto emit_zeros = [&] {
      std::vector<std::int64_t> zero;
      for (const auto& [v, r] : R) {
        if (r == 0) zero.push_back(v);
      }
      std::sort(zero.begin(), zero.end());
      for (auto v : zero) m.write(result_item(v));
    };
    if (!written) {
      emit_zeros();
      m.drop(R.size());
      m.end_pass();
      break;
    }
    m.end_pass();
    m.begin_pass();
    while (m.read(it)) {
      if (it.tag == Tag::edge) {
        it.aux = residual(it.u, it.aux);
        it.aux2 = residual(it.v, it.aux2);
        if (it.aux == 0 || it.aux2 == 0) continue;
      }
      m.write(it);
    }
    emit_zeros();
    m.drop(R.size());
    m.end_pass();
  }
  WsCover res;
  res.in.assign(static_cast<std::size_t>(g.V), 0);
  for (const auto& y : m.tape()) {
    if (y.tag == Tag::result) {
      res.in[static_cast<std::size_t>(y.id)] = 1;
      res.weight += weight[static_cast<std::size_t>(y.id)];
    }
  }
  res.report = m.report("vcover", static_cast<std::size_t>(g.V), g.edges.size());
  return res;
}

// ---------------------------------------------------------------------------
// Shortest paths

namespace {

struct Found {
  std::int64_t units = std::numeric_limits<std::int64_t>::max();
  double length = kInf;
  std::int64_t parent = -1;
  bool better_than(std::int64_t u, double t) const { return u < units || (u == units && t < length); }
};

// Tape layout: arcs u -> v grouped by v (Tag::edge, w original weight,
// h rounded weight), then the group's distance records (Tag::delta, aux = j,
// r = distance in units, x = true length, pred = parent, kind = settled),
// then its best-so-far records (Tag::best).
class GroupedPass {
 public:
  virtual ~GroupedPass() = default;
  void run(TapeMachine& m) {
    m.begin_pass();
    StreamItem it;
    while (m.read(it)) {
      if (it.v != cur_) {
        end_group(m);
        cur_ = it.v;
        stage_ = 0;
        start(cur_);
      }
      const int want = it.tag == Tag::edge ? 0 : it.tag == Tag::delta ? 1 : 2;
      while (stage_ < want) advance(m);
      if (want == 0) on_edge(m, it);
      else if (want == 1) on_delta(m, it);
      else on_best(m, it);
    }
    end_group(m);
    m.end_pass();
  }

 protected:
  virtual void start(std::int64_t) {}
  virtual void on_edge(TapeMachine& m, StreamItem& it) { m.write(it); }
  virtual void on_delta(TapeMachine& m, StreamItem& it) { m.write(it); }
  virtual void on_best(TapeMachine& m, StreamItem& it) { m.write(it); }
  virtual void close_deltas(TapeMachine&) {}
  virtual void close_bests(TapeMachine&) {}
  std::int64_t cur_ = -1;

 private:
  void advance(TapeMachine& m) {
    if (stage_ == 1) close_deltas(m);
    ++stage_;
  }
  void end_group(TapeMachine& m) {
    if (cur_ < 0) return;
    while (stage_ < 2) advance(m);
    close_bests(m);
    cur_ = -1;
  }
  int stage_ = 0;
};

struct Settled {
  std::int64_t y;
  double length;
};

class Relaxation : public GroupedPass {
 public:
  Relaxation(const std::vector<std::vector<Settled>>& P, const std::vector<std::int64_t>& d) : P_(P), d_(d) {
    for (std::size_t j = 0; j < P.size(); ++j) {
      for (const auto& s : P[j]) {
        from_[s.y].push_back({j, s.length});
        settle_[s.y].push_back(j);
      }
    }
  }

 protected:
  void start(std::int64_t) override {
    X_.clear();
    seen_.clear();
  }
  void on_edge(TapeMachine& m, StreamItem& it) override {
    auto f = from_.find(it.u);
    if (f != from_.end()) {
      for (const auto& [j, t] : f->second) {
        const std::int64_t cand = d_[j] + it.h;
        const double len = t + static_cast<double>(it.w);
        Found& x = X_[j];
        if (x.better_than(cand, len)) x = {cand, len, it.u};
      }
    }
    m.write(it);
  }
  void on_delta(TapeMachine& m, StreamItem& it) override {
    const auto j = static_cast<std::size_t>(it.aux);
    seen_.insert(j);
    auto f = X_.find(j);
    const Found held{it.r, it.x, it.pred};
    if (f != X_.end() && it.kind == 0 && held.better_than(f->second.units, f->second.length)) {
      it.r = f->second.units;
      it.x = f->second.length;
      it.pred = f->second.parent;
    }
    if (settles(j)) it.kind = 1;
    m.write(it);
  }
  void close_deltas(TapeMachine& m) override {
    std::vector<std::size_t> js;
    for (const auto& [j, x] : X_) {
      if (!seen_.count(j)) js.push_back(j);
    }
    auto s = settle_.find(cur_);
    if (s != settle_.end()) {
      for (auto j : s->second) {
        if (!seen_.count(j) && !X_.count(j)) js.push_back(j);
      }
    }
    std::sort(js.begin(), js.end());
    for (auto j : js) {
      StreamItem it;
      it.tag = Tag::delta;
      it.v = cur_;
      it.aux = static_cast<std::int64_t>(j);
      auto f = X_.find(j);
      if (settles(j)) {
        it.r = d_[j];
        it.x = length_in_P(j);
        it.pred = -1;
        it.kind = 1;
        if (f != X_.end() && f->second.units == it.r && f->second.length < it.x) {
          it.x = f->second.length;
          it.pred = f->second.parent;
        }
      } else {
        it.r = f->second.units;
        it.x = f->second.length;
        it.pred = f->second.parent;
      }
      m.write(it);
    }
  }

 private:
  bool settles(std::size_t j) const {
    auto s = settle_.find(cur_);
    return s != settle_.end() && std::find(s->second.begin(), s->second.end(), j) != s->second.end();
  }
  double length_in_P(std::size_t j) const {
    for (const auto& s : P_[j]) {
      if (s.y == cur_) return s.length;
    }
    return 0;
  }
  const std::vector<std::vector<Settled>>& P_;
  const std::vector<std::int64_t>& d_;
  std::unordered_map<std::int64_t, std::vector<std::pair<std::size_t, double>>> from_;
  std::unordered_map<std::int64_t, std::vector<std::size_t>> settle_;
  std::unordered_map<std::size_t, Found> X_;
  std::unordered_set<std::size_t> seen_;
};

// Runs the bounded Dijkstra from every A[j] on a tape holding the grouped
// arcs with their rounded weights and no distance records.
void dijkstra_passes(TapeMachine& m, const std::vector<std::int64_t>& A, std::int64_t horizon, std::size_t cap) {
  const std::size_t k = A.size();
  m.hold(2 * k);  // A with the d_j, and the per-group minima X_j
  std::vector<std::vector<Settled>> P(k);
  std::vector<std::int64_t> d(k, 0);
  std::size_t held = 0;
  for (std::size_t j = 0; j < k; ++j) P[j].push_back({A[j], 0.0});
  m.hold(k);
  held = k;
  for (;;) {
    Relaxation relax(P, d);
    relax.run(m);
    m.drop(held);
    held = 0;
    for (auto& p : P) p.clear();
    // Extraction: the unsettled records at minimum distance, per source.
    std::vector<std::int64_t> best(k, std::numeric_limits<std::int64_t>::max());
    m.begin_pass();
    StreamItem it;
    while (m.read(it)) {
      if (it.tag == Tag::delta && it.kind == 0 && it.r <= horizon) {
        const auto j = static_cast<std::size_t>(it.aux);
        if (it.r < best[j]) {
          best[j] = it.r;
          m.drop(P[j].size());
          held -= P[j].size();
          P[j].clear();
        }
        if (it.r == best[j] && P[j].size() < cap) {
          m.hold();
          ++held;
          P[j].push_back({it.v, it.x});
        }
      }
      m.write(it);
    }
    m.end_pass();
    bool any = false;
    for (std::size_t j = 0; j < k; ++j) {
      if (!P[j].empty()) {
        any = true;
        d[j] = best[j];
      }
    }
    if (!any) break;
  }
  m.drop(2 * k);
}

class MergeBest : public GroupedPass {
 public:
  explicit MergeBest(std::function<std::int64_t(std::int64_t)> round) : round_(std::move(round)) {}

 protected:
  void start(std::int64_t) override { scratch_.clear(); }
  void on_edge(TapeMachine& m, StreamItem& it) override {
    if (round_) it.h = round_(it.w);
    m.write(it);
  }
  void on_delta(TapeMachine&, StreamItem& it) override {
    Found& f = scratch_[it.aux];
    if (it.x < f.length) f = {0, it.x, it.pred};
  }
  void on_best(TapeMachine& m, StreamItem& it) override {
    auto f = scratch_.find(it.aux);
    if (f != scratch_.end()) {
      if (f->second.length < it.x) {
        it.x = f->second.length;
        it.pred = f->second.parent;
      }
      scratch_.erase(f);
    }
    m.write(it);
  }
  void close_bests(TapeMachine& m) override {
    std::vector<std::int64_t> js;
    for (const auto& [j, f] : scratch_) js.push_back(j);
    std::sort(js.begin(), js.end());
    for (auto j : js) {
      StreamItem it;
      it.tag = Tag::best;
      it.v = cur_;
      it.aux = j;
      it.x = scratch_[j].length;
      it.pred = scratch_[j].parent;
      m.write(it);
    }
    scratch_.clear();
  }

 private:
  std::function<std::int64_t(std::int64_t)> round_;
  std::unordered_map<std::int64_t, Found> scratch_;
};

std::vector<StreamItem> arc_stream(const Graph& g) {
  std::vector<StreamItem> in;
  in.reserve(2 * g.edges.size());
  for (const auto& e : g.edges) {
    if (!(e.w >= 0) || e.w != std::floor(e.w) || e.w > 1e15) {
      throw ValidationError("edge weights must be non-negative integers");
    }
    const auto w = static_cast<std::int64_t>(e.w);
    if (e.u == e.v) continue;
    StreamItem a = edge_item(e.u, e.v, e.id);
    a.w = w;
    a.h = w;
    in.push_back(a);
    std::swap(a.u, a.v);
    in.push_back(a);
  }
  return in;
}

void check_sssp_graph(const Graph& g) {
  if (g.V < 1) throw MalformedInput("graph has no vertices");
  for (const auto& e : g.edges) {
    if (e.u < 0 || e.v < 0 || e.u >= g.V || e.v >= g.V) throw MalformedInput("edge endpoint out of range");
  }
}

std::size_t sample_cap(std::size_t M) {
  if (M < 8) throw ValidationError("shortest paths need at least 8 records of memory");
  return static_cast<std::size_t>(std::floor(std::sqrt(M / 2.0)));
}

void sort_by_target(TapeMachine& m) {
  wsdetail::sort_tape(m, [](const StreamItem& a, const StreamItem& b) {
    return a.v != b.v ? a.v < b.v : a.u != b.u ? a.u < b.u : a.id < b.id;
  });
}

}  // namespace

StreamDijkstraResult stream_dijkstra(const Graph& g, const std::vector<std::int64_t>& A, std::int64_t horizon,
                                     WsOptions opt) {
  check_sssp_graph(g);
  const std::size_t cap = sample_cap(opt.M);
  if (A.empty() || A.size() > cap) throw ValidationError("sample size must lie in [1, floor(sqrt(M/2))]");
  for (auto a : A) {
    if (a < 0 || a >= g.V) throw ValidationError("sample vertex out of range");
  }
  TapeMachine m(opt);
  m.load(arc_stream(g), 2 * g.edges.size() + static_cast<std::size_t>(g.V) * A.size());
  sort_by_target(m);
  dijkstra_passes(m, A, horizon, cap);

  StreamDijkstraResult res;
  const auto V = static_cast<std::size_t>(g.V);
  res.units.assign(A.size(), std::vector<std::int64_t>(V, -1));
  res.length.assign(A.size(), std::vector<double>(V, kInf));
  res.parent.assign(A.size(), std::vector<std::int64_t>(V, -1));
  for (std::size_t j = 0; j < A.size(); ++j) {
    res.units[j][static_cast<std::size_t>(A[j])] = 0;
    res.length[j][static_cast<std::size_t>(A[j])] = 0;
  }
  for (const auto& it : m.tape()) {
    if (it.tag != Tag::delta) continue;
    const auto j = static_cast<std::size_t>(it.aux);
    const auto y = static_cast<std::size_t>(it.v);
    if (it.r > horizon) continue;
    res.units[j][y] = it.r;
    res.length[j][y] = it.x;
    res.parent[j][y] = it.pred;
  }
  res.report = m.report("sdijkstra", V, g.edges.size());
  return res;
}

double ws_rounded_weight(double w, double beta) {
  if (!(beta > 0) || !(w >= 0)) throw ValidationError("rounding needs beta > 0 and w >= 0");
  return beta * std::max(1.0, std::ceil(w / beta));
}

ApproxPaths ws_sssp_approx(const Graph& g, std::int64_t source, double epsilon, double alpha, WsOptions opt) {
  check_sssp_graph(g);
  if (source < 0 || source >= g.V) throw ValidationError("source out of range");
  if (!(epsilon > 0) || !(alpha > 0)) throw ValidationError("epsilon and alpha must be positive");
  const std::size_t cap = sample_cap(opt.M);
  const auto V = static_cast<std::size_t>(g.V);
  const std::size_t k = std::min(V, cap);

  ApproxPaths res;
  res.source = source;
  res.sample.push_back(source);
  {
    std::vector<std::int64_t> others;
    for (std::int64_t v = 0; v < g.V; ++v) {
      if (v != source) others.push_back(v);
    }
    std::mt19937_64 rng(opt.seed);
    std::shuffle(others.begin(), others.end(), rng);
    others.resize(k - 1);
    res.sample.insert(res.sample.end(), others.begin(), others.end());
  }
  const auto& A = res.sample;

  TapeMachine m(opt);
  m.load(arc_stream(g), 2 * g.edges.size() + 2 * V * k);
  sort_by_target(m);

  const double lgV = std::max(1.0, std::log2(static_cast<double>(V)));
  const double lp = alpha * static_cast<double>(V) * lgV / static_cast<double>(k);
  const auto l = static_cast<std::int64_t>(std::ceil(2 * (1 + epsilon) * lp / epsilon));
  double total = 0;
  for (const auto& e : g.edges) total += e.w;
  const int phases = total <= 2 ? 1 : static_cast<int>(std::ceil(std::log2(total)));

  for (int i = 1; i <= phases; ++i) {
    const double beta = epsilon * std::ldexp(1.0, i - 1) / lp;
    MergeBest round([beta](std::int64_t w) {
      return w == 0 ? std::int64_t{1} : static_cast<std::int64_t>(std::ceil(static_cast<double>(w) / beta));
    });
    round.run(m);
    dijkstra_passes(m, A, l, cap);
  }
  MergeBest(nullptr).run(m);

  res.best.assign(k, std::vector<double>(V, kInf));
  res.hop.assign(k, std::vector<std::int64_t>(V, -1));
  std::unordered_map<std::int64_t, std::size_t> index;
  for (std::size_t j = 0; j < k; ++j) {
    index[A[j]] = j;
    res.best[j][static_cast<std::size_t>(A[j])] = 0;
  }

  // Distances between sample vertices, then shortest paths over them.
  std::vector<std::vector<double>> G(k, std::vector<double>(k, kInf));
  m.hold(k * k);
  m.pass([&](const StreamItem& it) {
    if (it.tag == Tag::best) {
      auto f = index.find(it.v);
      if (f != index.end()) G[static_cast<std::size_t>(it.aux)][f->second] = it.x;
    }
    m.write(it);
  });
  std::vector<double> D(k, kInf);
  res.aux_parent.assign(k, -1);
  {
    std::vector<char> done(k, 0);
    D[0] = 0;
    for (std::size_t round = 0; round < k; ++round) {
      std::size_t a = k;
      for (std::size_t j = 0; j < k; ++j) {
        if (!done[j] && D[j] < kInf && (a == k || D[j] < D[a])) a = j;
      }
      if (a == k) break;
      done[a] = 1;
      for (std::size_t b = 0; b < k; ++b) {
        const double w = std::min(G[a][b], G[b][a]);
        if (D[a] + w < D[b]) {
          D[b] = D[a] + w;
          res.aux_parent[b] = static_cast<std::int64_t>(a);
        }
      }
    }
  }
  m.drop(k * k);

  res.dist.assign(V, kInf);
  res.via.assign(V, -1);
  res.dist[static_cast<std::size_t>(source)] = 0;
  res.via[static_cast<std::size_t>(source)] = 0;
  m.hold(k);
  m.pass([&](const StreamItem& it) {
    if (it.tag == Tag::best) {
      const auto j = static_cast<std::size_t>(it.aux);
      const auto y = static_cast<std::size_t>(it.v);
      res.best[j][y] = std::min(res.best[j][y], it.x);
      if (res.best[j][y] == it.x) res.hop[j][y] = it.pred;
      const double cand = D[j] + it.x;
      if (cand < res.dist[y]) {
        res.dist[y] = cand;
        res.via[y] = static_cast<std::int64_t>(j);
      }
    }
    m.write(it);
  });
  m.drop(k);
  for (std::size_t j = 0; j < k; ++j) {
    const auto y = static_cast<std::size_t>(A[j]);
    if (D[j] < res.dist[y]) {
      res.dist[y] = D[j];
      res.via[y] = static_cast<std::int64_t>(j);
    }
  }
  res.report = m.report("sssp", V, g.edges.size());
  return res;
}

std::vector<std::int64_t> ApproxPaths::path(std::int64_t v) const {
  if (v < 0 || static_cast<std::size_t>(v) >= dist.size()) throw ValidationError("vertex out of range");
  if (dist[static_cast<std::size_t>(v)] == kInf) return {};
  const std::size_t steps = dist.size() + 1;
  // Vertices from sample[j] to y along the recorded parents, or empty.
  auto table_path = [&](std::size_t j, std::int64_t y) {
    std::vector<std::int64_t> seq{y};
    while (y != sample[j]) {
      y = hop[j][static_cast<std::size_t>(y)];
      if (y < 0 || seq.size() > steps) throw std::logic_error("broken path record");
      seq.push_back(y);
    }
    std::reverse(seq.begin(), seq.end());
    return seq;
  };
  auto append = [](std::vector<std::int64_t>& out, const std::vector<std::int64_t>& seg) {
    out.insert(out.end(), seg.begin() + (out.empty() ? 0 : 1), seg.end());
  };
  const auto x = static_cast<std::size_t>(via[static_cast<std::size_t>(v)]);
  std::vector<std::size_t> chain;
  for (auto a = static_cast<std::int64_t>(x); a >= 0; a = aux_parent[static_cast<std::size_t>(a)]) {
    chain.push_back(static_cast<std::size_t>(a));
    if (chain.size() > sample.size()) throw std::logic_error("broken sample tree");
  }
  std::reverse(chain.begin(), chain.end());
  std::vector<std::int64_t> out;
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    const std::size_t a = chain[i], b = chain[i + 1];
    if (best[a][static_cast<std::size_t>(sample[b])] <= best[b][static_cast<std::size_t>(sample[a])]) {
      append(out, table_path(a, sample[b]));
    } else {
      auto seg = table_path(b, sample[a]);
      std::reverse(seg.begin(), seg.end());
      append(out, seg);
    }
  }
  if (out.empty()) out.push_back(sample[x]);
  append(out, table_path(x, v));
  return out;
}

}  // namespace emkit
