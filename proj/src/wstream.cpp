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

#include "emkit/wstream.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "emkit/errors.hpp"
#include "wstream_internal.hpp"

namespace emkit {

std::string PassReport::csv_header() { return "algo,N,V,E,M,passes,items_written"; }

std::string PassReport::csv_row() const {
  std::ostringstream os;
  os << algo << ',' << N << ',' << V << ',' << E << ',' << M << ',' << passes << ',' << items_written;
  return os.str();
}

TapeMachine::TapeMachine(WsOptions opt) : opt_(opt) {
  if (opt_.M < 2) throw ValidationError("W-Stream memory must hold at least two records");
  if (opt_.cap_factor < 1) throw ValidationError("output cap factor must be at least 1");
}

void TapeMachine::load(std::vector<StreamItem> input, std::size_t n_hint) {
  if (in_pass_) throw std::logic_error("load during a pass");
  in_ = std::move(input);
  out_.clear();
  n_ = std::max(in_.size(), n_hint);
  pos_ = 0;
}

void TapeMachine::begin_pass() {
  if (in_pass_) throw std::logic_error("nested pass");
  in_pass_ = true;
  pos_ = 0;
  out_.clear();
  ++passes_;
}

bool TapeMachine::read(StreamItem& item) {
  if (pos_ >= in_.size()) return false;
  item = in_[pos_++];
  return true;
}

void TapeMachine::write(const StreamItem& item) {
  if (!in_pass_) throw std::logic_error("write outside a pass");
  out_.push_back(item);
  ++written_;
  if (out_.size() > opt_.cap_factor * std::max<std::size_t>(n_, 1)) {
    throw BudgetError("output tape exceeds " + std::to_string(opt_.cap_factor) + "N records");
  }
}

void TapeMachine::end_pass() {
  if (!in_pass_) throw std::logic_error("end_pass outside a pass");
  in_.swap(out_);
  out_.clear();
  pos_ = 0;
  in_pass_ = false;
}

void TapeMachine::hold(std::size_t n) {
  live_ += n;
  peak_ = std::max(peak_, live_);
  if (live_ > opt_.M) {
    ++breaches_;
    if (opt_.strict) {
      throw BudgetError("working memory holds " + std::to_string(live_) + " records, budget is " +
                        std::to_string(opt_.M));
    }
  }
}

void TapeMachine::drop(std::size_t n) { live_ -= std::min(n, live_); }

PassReport TapeMachine::report(std::string algo, std::size_t V, std::size_t E) const {
  PassReport r;
  r.algo = std::move(algo);
  r.N = n_;
  r.V = V;
  r.E = E;
  r.M = opt_.M;
  r.passes = passes_;
  r.items_written = written_;
  r.peak_live = peak_;
  r.breaches = breaches_;
  r.comparisons = comparisons_;
  return r;
}

// ---------------------------------------------------------------------------
// Sorting

SortResult ws_sort(const std::vector<std::int64_t>& keys, WsOptions opt) {
  TapeMachine m(opt);
  std::vector<StreamItem> in(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    in[i].tag = Tag::key;
    in[i].id = keys[i];
  }
  m.load(std::move(in));
  wsdetail::sort_tape(m, [](const StreamItem& a, const StreamItem& b) { return a.id < b.id; });
  SortResult res;
  res.keys.reserve(keys.size());
  for (const auto& it : m.tape()) res.keys.push_back(it.id);
  res.report = m.report("sort");
  return res;
}

// ---------------------------------------------------------------------------
// List ranking

namespace wsdetail {

namespace {

constexpr std::int64_t kRanked = -2;
constexpr std::int64_t kLive = -1;

enum Attach : std::uint8_t { none = 0, tail = 1, head = 2, alone = 3 };

struct Update {
  std::int64_t dw = 0, dh = 0;
  bool set_succ = false, set_pred = false;
  std::int64_t succ = -1, pred = -1;
};

struct Target {
  std::int64_t tail = -1, head = -1;
  bool restore_succ = false, restore_pred = false;
  std::int64_t succ = -1, pred = -1;
  bool seen = false;
};

}  // namespace

void rank_tape(TapeMachine& m) {
  const std::size_t M = m.M();
  std::size_t live = m.tape().size();
  std::int64_t level = 0;
  bool first = true;
  auto normalise = [&](StreamItem& it) {
    if (!first) return;
    it.run = kLive;
    it.h = 0;
    it.r = 0;
    it.kind = none;
  };
  StreamItem it;

  while (live > M) {
    ++level;
    std::vector<StreamItem> seg;
    std::unordered_map<std::int64_t, std::size_t> at;
    std::unordered_map<std::int64_t, Update> upd;
    bool analysed = false;

    auto analyse = [&] {
      analysed = true;
      std::vector<char> seen(seg.size(), 0);
      for (std::size_t i = 0; i < seg.size(); ++i) {
        if (seg[i].pred >= 0 && at.count(seg[i].pred)) continue;
        std::size_t j = i, last = i;
        std::int64_t W = 0;
        for (;;) {
          seen[j] = 1;
          W += seg[j].h + seg[j].w;
          last = j;
          auto f = at.find(seg[j].succ);
          if (seg[j].succ < 0 || f == at.end()) break;
          j = f->second;
          if (seen[j]) throw MalformedInput("list contains a cycle");
        }
        const std::int64_t p = seg[i].pred, s = seg[last].succ;
        StreamItem& a1 = seg[i];
        if (p >= 0) {
          a1.kind = tail;
          a1.aux = p;
          a1.aux2 = W;
          Update& u = upd[p];
          u.dw += W;
          u.set_succ = true;
          u.succ = s;
          if (s >= 0) {
            upd[s].set_pred = true;
            upd[s].pred = p;
          }
        } else if (s >= 0) {
          a1.kind = head;
          a1.aux = s;
          a1.aux2 = W;
          upd[s].dh += W;
          upd[s].set_pred = true;
          upd[s].pred = -1;
        } else {
          a1.kind = alone;
          std::int64_t acc = 0;
          for (std::size_t k = i;;) {
            acc += seg[k].h + seg[k].w;
            seg[k].r = acc;
            auto f = at.find(seg[k].succ);
            if (seg[k].succ < 0 || f == at.end()) break;
            k = f->second;
          }
        }
      }
      for (std::size_t i = 0; i < seg.size(); ++i) {
        if (!seen[i]) throw MalformedInput("list contains a cycle");
        seg[i].run = level;
        m.write(seg[i]);
      }
    };

    m.begin_pass();
    while (m.read(it)) {
      normalise(it);
      if (it.run >= 1) {
        m.write(it);
        continue;
      }
      if (!analysed) {
        m.hold();
        at.emplace(it.id, seg.size());
        seg.push_back(it);
        if (seg.size() == M) analyse();
        continue;
      }
      auto f = upd.find(it.id);
      if (f != upd.end()) {
        const Update& u = f->second;
        it.w += u.dw;
        it.h += u.dh;
        if (u.set_succ) it.succ = u.succ;
        if (u.set_pred) it.pred = u.pred;
      }
      m.write(it);
    }
    if (!analysed) analyse();
    m.drop(seg.size());
    m.end_pass();
    live -= seg.size();
    first = false;
  }

  // The remaining list fits in memory.
  {
    std::vector<StreamItem> rest;
    std::unordered_map<std::int64_t, std::size_t> at;
    m.begin_pass();
    while (m.read(it)) {
      normalise(it);
      if (it.run >= 1) {
        m.write(it);
        continue;
      }
      m.hold();
      at.emplace(it.id, rest.size());
      rest.push_back(it);
    }
    std::size_t visited = 0;
    std::vector<char> seen(rest.size(), 0);
    for (std::size_t i = 0; i < rest.size(); ++i) {
      if (rest[i].pred >= 0) continue;
      std::int64_t acc = 0;
      for (std::size_t k = i;;) {
        if (seen[k]) throw MalformedInput("list contains a cycle");
        seen[k] = 1;
        ++visited;
        acc += rest[k].h + rest[k].w;
        rest[k].r = acc;
        if (rest[k].succ < 0) break;
        auto f = at.find(rest[k].succ);
        if (f == at.end()) throw MalformedInput("list pointer leaves the list");
        k = f->second;
      }
    }
    if (visited != rest.size()) throw MalformedInput("list contains a cycle");
    for (auto& x : rest) {
      x.run = kRanked;
      m.write(x);
    }
    m.drop(rest.size());
    m.end_pass();
    first = false;
  }

  for (std::int64_t t = level; t >= 1; --t) {
    std::vector<StreamItem> seg;
    std::unordered_map<std::int64_t, std::size_t> at;
    std::unordered_map<std::int64_t, Target> tg;
    bool built = false;
    std::size_t found = 0;

    auto last_of = [&](std::size_t i) {
      for (;;) {
        auto f = at.find(seg[i].succ);
        if (seg[i].succ < 0 || f == at.end()) return i;
        i = f->second;
      }
    };
    auto build = [&] {
      built = true;
      for (std::size_t i = 0; i < seg.size(); ++i) {
        if (seg[i].kind == tail) {
          const std::size_t k = last_of(i);
          Target& p = tg[seg[i].aux];
          p.tail = static_cast<std::int64_t>(i);
          p.restore_succ = true;
          p.succ = seg[i].id;
          if (seg[k].succ >= 0) {
            Target& s = tg[seg[k].succ];
            s.restore_pred = true;
            s.pred = seg[k].id;
          }
        } else if (seg[i].kind == head) {
          const std::size_t k = last_of(i);
          Target& s = tg[seg[i].aux];
          s.head = static_cast<std::int64_t>(i);
          s.restore_pred = true;
          s.pred = seg[k].id;
        }
      }
    };
    auto assign = [&](std::size_t i, std::int64_t base) {
      for (;;) {
        base += seg[i].h + seg[i].w;
        seg[i].r = base;
        auto f = at.find(seg[i].succ);
        if (seg[i].succ < 0 || f == at.end()) return;
        i = f->second;
      }
    };

    m.begin_pass();
    while (m.read(it)) {
      if (it.run == t) {
        m.hold();
        at.emplace(it.id, seg.size());
        seg.push_back(it);
        continue;
      }
      if (!built && !seg.empty()) build();
      if (built) {
        auto f = tg.find(it.id);
        if (f != tg.end()) {
          Target& T = f->second;
          const std::int64_t r0 = it.r, w0 = it.w, h0 = it.h;
          if (T.tail >= 0) {
            const auto i = static_cast<std::size_t>(T.tail);
            assign(i, r0 - seg[i].aux2);
            it.r -= seg[i].aux2;
            it.w -= seg[i].aux2;
          }
          if (T.head >= 0) {
            const auto i = static_cast<std::size_t>(T.head);
            assign(i, r0 - w0 - h0);
            it.h -= seg[i].aux2;
          }
          if (T.restore_succ) it.succ = T.succ;
          if (T.restore_pred) it.pred = T.pred;
          T.seen = true;
          ++found;
        }
      }
      m.write(it);
    }
    if (!built) build();
    if (found != tg.size()) throw std::logic_error("splice target missing from the tape");
    for (auto& x : seg) {
      x.run = kRanked;
      m.write(x);
    }
    m.drop(seg.size());
    m.end_pass();
  }
}

}  // namespace wsdetail

RankResult ws_list_rank(const std::vector<std::int64_t>& succ, WsOptions opt,
                        const std::vector<std::int64_t>& weight) {
  const auto n = static_cast<std::int64_t>(succ.size());
  if (!weight.empty() && weight.size() != succ.size()) throw ValidationError("one weight per node expected");
  std::vector<std::int64_t> pred(succ.size(), -1);
  for (std::int64_t i = 0; i < n; ++i) {
    const std::int64_t s = succ[static_cast<std::size_t>(i)];
    if (s < -1 || s >= n) throw MalformedInput("successor out of range");
    if (s == -1) continue;
    if (pred[static_cast<std::size_t>(s)] != -1) throw MalformedInput("node has two predecessors");
    pred[static_cast<std::size_t>(s)] = i;
  }
  std::vector<StreamItem> in(succ.size());
  for (std::int64_t i = 0; i < n; ++i) {
    auto& it = in[static_cast<std::size_t>(i)];
    it.tag = Tag::node;
    it.id = i;
    it.succ = succ[static_cast<std::size_t>(i)];
    it.pred = pred[static_cast<std::size_t>(i)];
    it.w = weight.empty() ? 1 : weight[static_cast<std::size_t>(i)];
  }
  TapeMachine m(opt);
  m.load(std::move(in));
  wsdetail::rank_tape(m);
  RankResult res;
  res.rank.assign(succ.size(), 0);
  for (const auto& it : m.tape()) res.rank[static_cast<std::size_t>(it.id)] = it.r - it.w;
  res.report = m.report("lrank", succ.size());
  return res;
}

// ---------------------------------------------------------------------------
// Trees

namespace {

bool is_arc(const StreamItem& it) { return it.tag == Tag::arc; }

void check_tree_shape(const Graph& t, std::int64_t root) {
  if (t.V < 1) throw MalformedInput("tree has no vertices");
  if (root < 0 || root >= t.V) throw ValidationError("root out of range");
  if (t.E() != t.V - 1) throw MalformedInput("a tree on V vertices has V - 1 edges");
  for (const auto& e : t.edges) {
    if (e.u < 0 || e.v < 0 || e.u >= t.V || e.v >= t.V) throw MalformedInput("edge endpoint out of range");
    if (e.u == e.v) throw MalformedInput("self-loop in tree");
  }
}

// Leaves the arcs of the Euler tour from `root` on the tape: id, u, v, and
// succ as the next arc of the tour. Returns the id of the first arc.
std::int64_t euler_stage(TapeMachine& m, const Graph& t, std::int64_t root) {
  check_tree_shape(t, root);
  std::vector<StreamItem> in;
  in.reserve(2 * t.edges.size());
  for (const auto& e : t.edges) {
    StreamItem a;
    a.tag = Tag::arc;
    a.u = e.u;
    a.v = e.v;
    a.w = 1;
    in.push_back(a);
    std::swap(a.u, a.v);
    in.push_back(a);
  }
  m.load(std::move(in));
  if (t.V == 1) return -1;
  wsdetail::sort_tape(m, [](const StreamItem& a, const StreamItem& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });

  // Number the arcs and link each to the next arc leaving the same vertex.
  std::int64_t root_first = -1;
  {
    std::int64_t next_id = 0, group_first = -1;
    bool have_prev = false;
    StreamItem prev, it;
    m.begin_pass();
    while (m.read(it)) {
      it.id = next_id++;
      if (have_prev) {
        if (prev.u == it.u && prev.v == it.v) throw MalformedInput("repeated edge in tree");
        prev.aux = prev.u == it.u ? it.id : group_first;
        m.write(prev);
        m.drop();
      }
      if (!have_prev || prev.u != it.u) group_first = it.id;
      if (it.u == root && root_first < 0) root_first = it.id;
      m.hold();
      prev = it;
      have_prev = true;
    }
    prev.aux = group_first;
    m.write(prev);
    m.drop();
    m.end_pass();
  }
  if (root_first < 0) throw MalformedInput("root has no incident edge");

  const std::int64_t V = t.V;
  auto key = [V](std::int64_t a, std::int64_t b) { return a * V + b; };
  wsdetail::partner_passes(
      m, is_arc, [&](const StreamItem& x) { return key(x.u, x.v); },
      [&](const StreamItem& y) { return key(y.v, y.u); },
      [&](StreamItem& x, const StreamItem& y) {
        x.succ = y.aux == root_first ? -1 : y.aux;
        x.pred = -1;
      });
  return root_first;
}

// Euler tour plus unit ranks along it; afterwards `role` is 1 on arcs that
// point away from the root.
void orient_stage(TapeMachine& m, const Graph& t, std::int64_t root, LabelMode mode) {
  euler_stage(m, t, root);
  if (t.V == 1) return;
  wsdetail::partner_passes(
      m, is_arc, [](const StreamItem& x) { return x.id; },
      [](const StreamItem& y) { return y.succ < 0 ? -1 : y.succ; },
      [](StreamItem& x, const StreamItem& y) { x.pred = y.id; });
  wsdetail::rank_tape(m);
  const std::int64_t V = t.V;
  auto key = [V](std::int64_t a, std::int64_t b) { return a * V + b; };
  wsdetail::partner_passes(
      m, is_arc, [&](const StreamItem& x) { return key(x.u, x.v); },
      [&](const StreamItem& y) { return key(y.v, y.u); },
      [&](StreamItem& x, const StreamItem& y) {
        const bool down = x.r < y.r;
        x.role = down ? 1 : 0;
        switch (mode) {
          case LabelMode::preorder:
          case LabelMode::descendants: x.w = down ? 1 : 0; break;
          case LabelMode::postorder: x.w = down ? 0 : 1; break;
          case LabelMode::depth: x.w = down ? 1 : -1; break;
        }
      });
}

std::vector<std::int64_t> label_stage(TapeMachine& m, const Graph& t, std::int64_t root, LabelMode mode) {
  orient_stage(m, t, root, mode);
  std::vector<std::int64_t> out(static_cast<std::size_t>(t.V), 0);
  const auto V = t.V;
  switch (mode) {
    case LabelMode::preorder: out[static_cast<std::size_t>(root)] = 1; break;
    case LabelMode::postorder:
    case LabelMode::descendants: out[static_cast<std::size_t>(root)] = V; break;
    case LabelMode::depth: break;
  }
  if (V == 1) return out;
  wsdetail::rank_tape(m);
  if (mode == LabelMode::descendants) {
    auto key = [V](std::int64_t a, std::int64_t b) { return a * V + b; };
    wsdetail::partner_passes(
        m, is_arc, [&](const StreamItem& x) { return key(x.u, x.v); },
        [&](const StreamItem& y) { return key(y.v, y.u); },
        [](StreamItem& x, const StreamItem& y) { x.aux = y.r; });
  }
  for (const auto& a : m.tape()) {
    const bool down = a.role == 1;
    switch (mode) {
      case LabelMode::preorder:
        if (down) out[static_cast<std::size_t>(a.v)] = a.r + 1;
        break;
      case LabelMode::depth:
        if (down) out[static_cast<std::size_t>(a.v)] = a.r;
        break;
      case LabelMode::postorder:
        if (!down) out[static_cast<std::size_t>(a.u)] = a.r;
        break;
      case LabelMode::descendants:
        if (down) out[static_cast<std::size_t>(a.v)] = a.aux - a.r + 1;
        break;
    }
  }
  return out;
}

}  // namespace

TourResult ws_euler_tour(const Graph& tree, std::int64_t root, WsOptions opt) {
  TapeMachine m(opt);
  TourResult res;
  res.first = euler_stage(m, tree, root);
  res.arcs.assign(m.tape().size(), {});
  for (const auto& a : m.tape()) res.arcs[static_cast<std::size_t>(a.id)] = {a.u, a.v, a.succ};
  res.report = m.report("euler", static_cast<std::size_t>(tree.V), tree.edges.size());
  return res;
}

TreeLabels ws_root_tree(const Graph& tree, std::int64_t root, WsOptions opt) {
  TapeMachine m(opt);
  orient_stage(m, tree, root, LabelMode::preorder);
  TreeLabels res;
  res.values.assign(static_cast<std::size_t>(tree.V), -1);
  for (const auto& a : m.tape()) {
    if (a.role == 1) res.values[static_cast<std::size_t>(a.v)] = a.u;
  }
  res.report = m.report("root", static_cast<std::size_t>(tree.V), tree.edges.size());
  return res;
}

TreeLabels ws_label_tree(const Graph& tree, std::int64_t root, LabelMode mode, WsOptions opt) {
  TapeMachine m(opt);
  TreeLabels res;
  res.values = label_stage(m, tree, root, mode);
  res.report = m.report("label", static_cast<std::size_t>(tree.V), tree.edges.size());
  return res;
}

// ---------------------------------------------------------------------------
// Expression trees

namespace {

double fold(ExprOp op, double a, double b) {
  switch (op) {
    case ExprOp::add: return a + b;
    case ExprOp::mul: return a * b;
    case ExprOp::min: return std::min(a, b);
    case ExprOp::max: return std::max(a, b);
    case ExprOp::leaf: break;
  }
  throw MalformedInput("leaf used as an operator");
}

}  // namespace

ExprResult ws_expr_eval(const std::vector<ExprNode>& nodes, WsOptions opt) {
  const auto n = static_cast<std::int64_t>(nodes.size());
  if (n == 0) throw MalformedInput("empty expression");
  Graph t;
  t.V = n;
  std::int64_t root = -1;
  std::vector<std::int64_t> children(nodes.size(), 0);
  for (std::int64_t i = 0; i < n; ++i) {
    const auto p = nodes[static_cast<std::size_t>(i)].parent;
    if (p == -1) {
      if (root >= 0) throw MalformedInput("expression has two roots");
      root = i;
      continue;
    }
    if (p < 0 || p >= n || p == i) throw MalformedInput("parent out of range");
    ++children[static_cast<std::size_t>(p)];
    t.add_edge(p, i);
  }
  if (root < 0) throw MalformedInput("expression has no root");
  for (std::int64_t i = 0; i < n; ++i) {
    const bool leaf = nodes[static_cast<std::size_t>(i)].op == ExprOp::leaf;
    if (leaf != (children[static_cast<std::size_t>(i)] == 0)) {
      throw MalformedInput("operators need operands and leaves need none");
    }
  }

  TapeMachine m(opt);
  const std::vector<std::int64_t> depth = label_stage(m, t, root, LabelMode::depth);

  // Join depths with the node records, then order deeper vertices first and
  // siblings together.
  std::vector<StreamItem> in(nodes.size());
  for (std::int64_t i = 0; i < n; ++i) {
    auto& it = in[static_cast<std::size_t>(i)];
    const auto& nd = nodes[static_cast<std::size_t>(i)];
    it.tag = Tag::node;
    it.id = i;
    it.pred = nd.parent;
    it.kind = static_cast<std::uint8_t>(nd.op);
    it.x = nd.value;
    it.r = depth[static_cast<std::size_t>(i)];
    it.h = 0;
  }
  m.load(std::move(in));
  m.charge_passes(1);
  wsdetail::sort_tape(m, [](const StreamItem& a, const StreamItem& b) {
    if (a.r != b.r) return a.r > b.r;
    if (a.pred != b.pred) return a.pred < b.pred;
    return a.id < b.id;
  });

  const std::size_t chunk = std::max<std::size_t>(1, m.M() / 2);
  std::size_t left = nodes.size();
  while (left > 0) {
    std::vector<StreamItem> loaded;
    std::unordered_map<std::int64_t, std::size_t> at;
    std::unordered_map<std::int64_t, double> pending;
    bool evaluated = false;
    auto evaluate = [&] {
      evaluated = true;
      for (auto& x : loaded) {
        const auto op = static_cast<ExprOp>(x.kind);
        if (op != ExprOp::leaf && x.h == 0) throw MalformedInput("operator without operands");
        if (x.pred < 0) continue;
        auto f = at.find(x.pred);
        if (f != at.end()) {
          StreamItem& p = loaded[f->second];
          p.x = p.h ? fold(static_cast<ExprOp>(p.kind), p.x, x.x) : x.x;
          p.h = 1;
          continue;
        }
        auto [g, fresh] = pending.try_emplace(x.pred, x.x);
        if (fresh) {
          m.hold();
        } else {
          const auto pop = static_cast<ExprOp>(nodes[static_cast<std::size_t>(x.pred)].op);
          g->second = fold(pop, g->second, x.x);
        }
      }
    };
    StreamItem it;
    m.begin_pass();
    while (m.read(it)) {
      if (it.run == 1) {
        if (!evaluated) evaluate();
        m.write(it);
        continue;
      }
      if (!evaluated && loaded.size() < chunk) {
        m.hold();
        at.emplace(it.id, loaded.size());
        loaded.push_back(it);
        continue;
      }
      if (!evaluated) evaluate();
      auto f = pending.find(it.id);
      if (f != pending.end()) {
        it.x = it.h ? fold(static_cast<ExprOp>(it.kind), it.x, f->second) : f->second;
        it.h = 1;
      }
      m.write(it);
    }
    if (!evaluated) evaluate();
    for (auto& x : loaded) {
      x.run = 1;
      m.write(x);
    }
    m.drop(loaded.size() + pending.size());
    m.end_pass();
    left -= loaded.size();
  }

  ExprResult res;
  res.values.assign(nodes.size(), 0);
  for (const auto& x : m.tape()) res.values[static_cast<std::size_t>(x.id)] = x.x;
  res.report = m.report("expr", nodes.size(), nodes.size() - 1);
  return res;
}

}  // namespace emkit
