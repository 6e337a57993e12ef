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

#include "emkit/emsh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "emkit/errors.hpp"

namespace emkit {

// ---------------------------------------------------------------------------
// Parameters

EmshParams EmshParams::soft(DeviceParams d, double epsilon) {
  d.validate();
  if (!(epsilon > 0.0) || epsilon > 1.0) throw ValidationError("epsilon must lie in (0, 1]");
  EmshParams p;
  p.device = d;
  p.epsilon = epsilon;
  p.sqrt_m = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(d.m()))));
  while ((p.sqrt_m + 1) * (p.sqrt_m + 1) <= d.m()) ++p.sqrt_m;
  while (p.sqrt_m * p.sqrt_m > d.m()) --p.sqrt_m;
  if (p.sqrt_m < 2) throw ValidationError("soft heap needs sqrt(m) >= 2");
  if (epsilon < 1.0 && p.sqrt_m < 11)
    throw ValidationError("soft heap with epsilon < 1 needs sqrt(m) >= 11 (m > 110)");
  double pw = 1.0;
  p.r = 0;
  while (pw * epsilon < 1.0 - 1e-12) {
    pw *= static_cast<double>(p.sqrt_m);
    ++p.r;
  }
  p.cap = d.B() * p.sqrt_m;
  p.half = p.cap / 2;
  return p;
}

EmshParams EmshParams::exact(DeviceParams d) {
  d.validate();
  EmshParams p;
  p.device = d;
  p.hard = true;
  p.epsilon = 0.0;
  p.sqrt_m = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(d.m()))));
  while ((p.sqrt_m + 1) * (p.sqrt_m + 1) <= d.m()) ++p.sqrt_m;
  while (p.sqrt_m * p.sqrt_m > d.m()) --p.sqrt_m;
  if (p.sqrt_m < 2) throw ValidationError("hard heap needs sqrt(m) >= 2");
  p.r = std::numeric_limits<int>::max() / 4;
  p.cap = d.B() * p.sqrt_m;
  p.half = p.cap / 2;
  return p;
}

std::int64_t EmshParams::s(int k) const {
  if (k <= r) return 0;
  std::int64_t v = 2;
  for (int j = r + 2; j <= k; ++j) v = (3 * v + 1) / 2;
  return v;
}

bool EmshParams::same_shape(const EmshParams& o) const {
  return device.B() == o.device.B() && device.M() == o.device.M() && hard == o.hard &&
         r == o.r && cap == o.cap;
}

// ---------------------------------------------------------------------------
// Internal structures

struct SoftHeap::Node {
  int rank = 0;
  std::vector<std::unique_ptr<Node>> kids;
  // pnode: sorted ascending from `head`
  std::vector<Elem> arr;
  std::size_t head = 0;
  // cnode
  std::list<std::vector<Elem>> list;
  Elem ck{};
  bool has_ck = false;
  std::size_t ncorrupt = 0;

  std::size_t psize() const { return arr.size() - head; }
  bool leaf() const { return kids.empty(); }
  void compact() {
    if (head == 0) return;
    arr.erase(arr.begin(), arr.begin() + static_cast<std::ptrdiff_t>(head));
    head = 0;
  }
};

struct SoftHeap::Bucket {
  std::vector<std::unique_ptr<Node>> roots;
  std::vector<Elem> staged;
  std::vector<Node*> src;  // source root of each staged element (ranks <= r)
  std::size_t head = 0;
  Node* src_root = nullptr;  // source root of the staged listnode (ranks > r)
  std::size_t staged_corrupt = 0;

  bool staged_empty() const { return head >= staged.size(); }
  void clear_staged() {
    staged.clear();
    src.clear();
    head = 0;
    src_root = nullptr;
    staged_corrupt = 0;
  }
};

struct SoftHeap::Probe {
  static std::vector<std::int64_t> staged_keys(const SoftHeap& h, int rank) {
    std::vector<std::int64_t> out;
    const auto i = static_cast<std::size_t>(rank);
    if (i >= h.buckets_.size() || !h.buckets_[i]) return out;
    const Bucket& b = *h.buckets_[i];
    for (std::size_t k = b.head; k < b.staged.size(); ++k) out.push_back(b.staged[k].key);
    return out;
  }
  static std::size_t root_elements(const SoftHeap& h, int rank) {
    const auto i = static_cast<std::size_t>(rank);
    if (i >= h.buckets_.size() || !h.buckets_[i]) return 0;
    std::size_t n = 0;
    for (const auto& r : h.buckets_[i]->roots) n += r->psize();
    return n;
  }
  static void sift_root(SoftHeap& h, int rank, std::size_t idx) {
    h.sift(h.buckets_[static_cast<std::size_t>(rank)]->roots.at(idx).get());
  }
  static std::size_t max_list_size(const SoftHeap& h, int rank);
};

namespace {

// k-way merge of sorted runs with a loser tree; each output costs about
// log2(k) comparisons.
template <class Run, class Less>
class Tournament {
 public:
  Tournament(std::vector<Run> runs, Less less) : runs_(std::move(runs)), less_(less) {
    k_ = 1;
    while (k_ < runs_.size()) k_ <<= 1;
    tree_.assign(2 * k_, kNone);
    for (std::size_t i = 0; i < k_; ++i) tree_[k_ + i] = i < runs_.size() ? i : kNone;
    winners_.assign(2 * k_, kNone);
    for (std::size_t i = 0; i < k_; ++i) winners_[k_ + i] = tree_[k_ + i];
    for (std::size_t n = k_ - 1; n >= 1; --n) {
      const std::size_t a = winners_[2 * n], b = winners_[2 * n + 1];
      if (beats(a, b)) {
        winners_[n] = a;
        tree_[n] = b;
      } else {
        winners_[n] = b;
        tree_[n] = a;
      }
    }
    top_ = winners_[1];
  }

  bool empty() const { return top_ == kNone || runs_[top_].done(); }
  std::size_t top_run() const { return top_; }

  void advance() {
    runs_[top_].pop();
    std::size_t w = top_;
    for (std::size_t n = (k_ + top_) / 2; n >= 1; n /= 2) {
      if (!beats(w, tree_[n])) std::swap(w, tree_[n]);
    }
    top_ = w;
  }

  Run& run(std::size_t i) { return runs_[i]; }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  bool beats(std::size_t a, std::size_t b) {
    const bool a_ok = a != kNone && !runs_[a].done();
    const bool b_ok = b != kNone && !runs_[b].done();
    if (!a_ok) return false;
    if (!b_ok) return true;
    if (less_(runs_[a].front(), runs_[b].front())) return true;
    if (less_(runs_[b].front(), runs_[a].front())) return false;
    return a < b;
  }

  std::vector<Run> runs_;
  Less less_;
  std::size_t k_ = 1;
  std::vector<std::size_t> tree_;
  std::vector<std::size_t> winners_;
  std::size_t top_ = kNone;
};

}  // namespace

// ---------------------------------------------------------------------------
// Construction

SoftHeap::SoftHeap(BlockDevice& dev, double epsilon)
    : SoftHeap(dev, EmshParams::soft(dev.params(), epsilon)) {}

SoftHeap::SoftHeap(BlockDevice& dev, const EmshParams& params) : dev_(&dev), params_(params) {
  if (params_.device.B() != dev.B() || params_.device.M() != dev.M())
    throw ValidationError("heap parameters do not match the device");
}

SoftHeap SoftHeap::hard(BlockDevice& dev) { return SoftHeap(dev, EmshParams::exact(dev.params())); }

SoftHeap::SoftHeap(SoftHeap&&) noexcept = default;
SoftHeap& SoftHeap::operator=(SoftHeap&&) noexcept = default;
SoftHeap::~SoftHeap() = default;

bool SoftHeap::lt(const Elem& a, const Elem& b) const {
  ++comparisons_;
  if (a.key != b.key) return a.key < b.key;
  if (a.del != b.del) return a.del;
  return a.uid < b.uid;
}

void SoftHeap::charge_reads(std::size_t items) { dev_->charge_reads(dev_->blocks_for(items)); }
void SoftHeap::charge_writes(std::size_t items) { dev_->charge_writes(dev_->blocks_for(items)); }

SoftHeap::Node* SoftHeap::new_node(int rank) {
  auto* n = new Node();
  n->rank = rank;
  return n;
}

int SoftHeap::max_rank() const {
  for (std::size_t i = buckets_.size(); i-- > 0;)
    if (buckets_[i]) return static_cast<int>(i);
  return -1;
}

std::size_t SoftHeap::trees_of_rank(int k) const {
  const auto i = static_cast<std::size_t>(k);
  return i < buckets_.size() && buckets_[i] ? buckets_[i]->roots.size() : 0;
}

bool SoftHeap::violates(const Node* x) const {
  if (x->leaf()) return false;
  if (x->rank <= params_.r) return x->psize() < params_.half;
  return static_cast<std::int64_t>(x->list.size()) < params_.s(x->rank) / 2 + 1;
}

void SoftHeap::recount(Node* x) {
  std::size_t c = 0;
  if (x->has_ck)
    for (const auto& ln : x->list)
      for (const Elem& e : ln) c += e.key < x->ck.key;
  corrupt_ = corrupt_ - x->ncorrupt + c;
  x->ncorrupt = c;
}

const SoftHeap::Elem& SoftHeap::bucket_min(const Bucket& b) const {
  return b.src_root != nullptr ? b.src_root->ck : b.staged[b.head];
}

// ---------------------------------------------------------------------------
// Insert, findmin, deletemin

void SoftHeap::insert(std::int64_t key, std::uint64_t payload) {
  push_raw(Elem{key, uid_++, payload, false});
}

void SoftHeap::delete_by_key(std::int64_t key) {
  if (!params_.hard) throw PreconditionError("delete_by_key requires a hard heap");
  push_raw(Elem{key, uid_++, 0, true});
}

void SoftHeap::push_raw(const Elem& e) {
  ++records_;
  ++n_inserted_;
  ++epoch_inserts_;
  // buffer_ is sorted descending; find the first slot holding something smaller.
  std::size_t lo = 0, hi = buffer_.size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (lt(buffer_[mid], e))
      hi = mid;
    else
      lo = mid + 1;
  }
  buffer_.insert(buffer_.begin() + static_cast<std::ptrdiff_t>(lo), e);
  if (buffer_.size() < params_.cap) return;

  std::unique_ptr<Node> x(new_node(0));
  x->arr.assign(buffer_.rbegin(), buffer_.rend());
  buffer_.clear();
  charge_writes(x->arr.size());
  auto carry = std::make_unique<Bucket>();
  carry->roots.push_back(std::move(x));
  meld_buckets({}, std::move(carry));
}

const SoftHeap::Elem& SoftHeap::peek_raw(bool* corrupt) const {
  const int i = suffixmin_.empty() ? -1 : suffixmin_[0];
  if (!buffer_.empty() && (i < 0 || lt(buffer_.back(), bucket_min(*buckets_[static_cast<std::size_t>(i)])))) {
    if (corrupt) *corrupt = false;
    return buffer_.back();
  }
  if (i < 0) throw EmptyError("heap is empty");
  const Bucket& b = *buckets_[static_cast<std::size_t>(i)];
  const Elem& e = b.staged[b.head];
  if (corrupt) *corrupt = b.src_root != nullptr && e.key < b.src_root->ck.key;
  return e;
}

std::pair<SoftHeap::Elem, bool> SoftHeap::pop_raw() {
  if (records_ == 0) throw EmptyError("heap is empty");
  const int i = suffixmin_.empty() ? -1 : suffixmin_[0];
  --records_;
  ++n_deleted_;
  ++epoch_deletes_;
  if (!buffer_.empty() && (i < 0 || lt(buffer_.back(), bucket_min(*buckets_[static_cast<std::size_t>(i)])))) {
    Elem e = buffer_.back();
    buffer_.pop_back();
    return {e, false};
  }
  const auto bi = static_cast<std::size_t>(i);
  Bucket& b = *buckets_[bi];
  // One block of the staged elements is in memory at a time.
  if (b.head % dev_->B() == 0) dev_->charge_reads(1);
  const Elem e = b.staged[b.head++];
  bool corrupt = false;
  if (b.src_root != nullptr && e.key < b.src_root->ck.key) {
    corrupt = true;
    --b.staged_corrupt;
    --corrupt_;
  }
  if (b.staged_empty()) fill_up(bi);
  update_suffixmin(bi);
  return {e, corrupt};
}

void SoftHeap::settle() {
  while (records_ > 0) {
    if (!peek_raw().del) return;
    const std::int64_t key = peek_raw().key;
    std::size_t pending = 0;
    while (records_ > 0 && peek_raw().del && peek_raw().key == key) {
      pop_raw();
      ++pending;
    }
    for (; pending > 0; --pending) {
      if (records_ == 0 || peek_raw().del || peek_raw().key != key)
        throw DanglingDelete("delete record for key " + std::to_string(key) + " has no element");
      pop_raw();
    }
  }
}

HeapItem SoftHeap::deletemin() {
  if (params_.hard) settle();
  auto [e, c] = pop_raw();
  return {e.key, e.payload, c};
}

HeapItem SoftHeap::findmin() {
  if (params_.hard) settle();
  bool c = false;
  const Elem& e = peek_raw(&c);
  return {e.key, e.payload, c};
}

void SoftHeap::update_suffixmin(std::size_t from) {
  while (!buckets_.empty() && !buckets_.back()) buckets_.pop_back();
  suffixmin_.resize(buckets_.size(), -1);
  if (buckets_.empty()) return;
  from = std::min(from, buckets_.size() - 1);
  for (std::size_t j = from + 1; j-- > 0;) {
    int best = j + 1 < buckets_.size() ? suffixmin_[j + 1] : -1;
    if (buckets_[j] && (best < 0 || lt(bucket_min(*buckets_[j]), bucket_min(*buckets_[static_cast<std::size_t>(best)]))))
      best = static_cast<int>(j);
    suffixmin_[j] = best;
  }
}

void SoftHeap::update_all_suffixmin() {
  while (!buckets_.empty() && !buckets_.back()) buckets_.pop_back();
  update_suffixmin(buckets_.empty() ? 0 : buckets_.size() - 1);
}

// ---------------------------------------------------------------------------
// Meld

void SoftHeap::meld(SoftHeap& other) {
  if (&other == this) return;
  if (other.dev_ != dev_ || !params_.same_shape(other.params_))
    throw IncompatibleHeaps("meld needs heaps with identical parameters on one device");
  std::vector<Elem> merged;
  merged.reserve(buffer_.size() + other.buffer_.size());
  std::size_t a = 0, b = 0;
  while (a < buffer_.size() || b < other.buffer_.size()) {
    if (b >= other.buffer_.size() || (a < buffer_.size() && lt(other.buffer_[b], buffer_[a])))
      merged.push_back(buffer_[a++]);
    else
      merged.push_back(other.buffer_[b++]);
  }
  records_ += other.records_;
  n_inserted_ += other.n_inserted_;
  n_deleted_ += other.n_deleted_;
  epoch_inserts_ += other.epoch_inserts_;
  epoch_deletes_ += other.epoch_deletes_;
  corrupt_ += other.corrupt_;
  comparisons_ += other.comparisons_;
  uid_ = std::max(uid_, other.uid_);
  auto theirs = std::move(other.buckets_);
  other.buckets_.clear();
  other.suffixmin_.clear();
  other.buffer_.clear();
  other.records_ = other.n_inserted_ = other.n_deleted_ = 0;
  other.epoch_inserts_ = other.epoch_deletes_ = other.corrupt_ = 0;
  other.comparisons_ = 0;

  std::unique_ptr<Bucket> carry;
  if (merged.size() >= params_.cap) {
    // The largest cap elements (front of the descending buffer) form a node.
    std::unique_ptr<Node> x(new_node(0));
    x->arr.assign(merged.rend() - static_cast<std::ptrdiff_t>(params_.cap), merged.rend());
    merged.erase(merged.begin(), merged.begin() + static_cast<std::ptrdiff_t>(params_.cap));
    charge_writes(x->arr.size());
    carry = std::make_unique<Bucket>();
    carry->roots.push_back(std::move(x));
  }
  buffer_ = std::move(merged);
  meld_buckets(std::move(theirs), std::move(carry));
}

void SoftHeap::return_staged(Bucket& b, std::size_t i) {
  if (b.staged_empty()) {
    b.clear_staged();
    return;
  }
  const std::size_t rem = b.staged.size() - b.head;
  charge_writes(rem);
  if (static_cast<int>(i) <= params_.r) {
    // The surviving staged elements of a root are the ones just before its head.
    for (std::size_t k = b.head; k < b.staged.size(); ++k) --b.src[k]->head;
    b.clear_staged();
    return;
  }
  Node* x1 = b.src_root;
  std::vector<Elem> l(b.staged.begin() + static_cast<std::ptrdiff_t>(b.head), b.staged.end());
  corrupt_ -= b.staged_corrupt;
  b.clear_staged();
  if (!x1->list.empty() && l.size() < params_.half && x1->list.back().size() < params_.half) {
    x1->list.back().insert(x1->list.back().end(), l.begin(), l.end());
  } else if (l.size() >= params_.half) {
    x1->list.push_front(std::move(l));
  } else {
    x1->list.push_back(std::move(l));
  }
  recount(x1);
  if (violates(x1)) sift(x1);
}

void SoftHeap::meld_buckets(std::vector<std::unique_ptr<Bucket>> other, std::unique_ptr<Bucket> carry) {
  const std::size_t sm = params_.sqrt_m;
  for (std::size_t i = 0; i < buckets_.size() || i < other.size() || carry; ++i) {
    if (buckets_.size() <= i) buckets_.resize(i + 1);
    std::unique_ptr<Bucket> b1 = std::move(buckets_[i]);
    std::unique_ptr<Bucket> b2 = i < other.size() ? std::move(other[i]) : nullptr;
    std::unique_ptr<Bucket> c = std::move(carry);
    const int present = (b1 != nullptr) + (b2 != nullptr) + (c != nullptr);
    if (present == 0) continue;
    if (present == 1) {
      buckets_[i] = b1 ? std::move(b1) : b2 ? std::move(b2) : std::move(c);
      if (buckets_[i]->staged_empty()) fill_up(i);
      continue;
    }
    std::vector<std::unique_ptr<Node>> pool;
    for (Bucket* b : {b1.get(), b2.get(), c.get()}) {
      if (b == nullptr) continue;
      return_staged(*b, i);
      for (auto& r : b->roots) pool.push_back(std::move(r));
    }
    for (auto& r : pool)
      if (violates(r.get())) sift(r.get());
    auto nb = std::make_unique<Bucket>();
    if (pool.size() >= sm) {
      std::unique_ptr<Node> x(new_node(static_cast<int>(i) + 1));
      for (std::size_t k = 0; k < sm; ++k) x->kids.push_back(std::move(pool[k]));
      pool.erase(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(sm));
      sift(x.get());
      carry = std::make_unique<Bucket>();
      carry->roots.push_back(std::move(x));
    }
    for (auto& r : pool) nb->roots.push_back(std::move(r));
    if (!nb->roots.empty()) {
      buckets_[i] = std::move(nb);
      fill_up(i);
    }
  }
  update_all_suffixmin();
}

// ---------------------------------------------------------------------------
// Fill-Up

void SoftHeap::fill_up(std::size_t i) {
  Bucket& b = *buckets_[i];
  b.clear_staged();
  const bool pure = static_cast<int>(i) <= params_.r;
  for (auto& r : b.roots)
    if (violates(r.get())) sift(r.get());
  auto exhausted = [&](const std::unique_ptr<Node>& r) {
    return r->leaf() && (pure ? r->psize() == 0 : r->list.empty());
  };
  b.roots.erase(std::remove_if(b.roots.begin(), b.roots.end(), exhausted), b.roots.end());
  if (b.roots.empty()) {
    buckets_[i].reset();
    return;
  }
  if (pure) {
    struct Run {
      Node* n;
      bool done() const { return n->head >= n->arr.size(); }
      const Elem& front() const { return n->arr[n->head]; }
      void pop() { ++n->head; }
    };
    std::vector<Run> runs;
    for (auto& r : b.roots) runs.push_back({r.get()});
    auto less = [this](const Elem& x, const Elem& y) { return lt(x, y); };
    Tournament<Run, decltype(less)> t(std::move(runs), less);
    while (b.staged.size() < params_.half && !t.empty()) {
      Run& run = t.run(t.top_run());
      b.staged.push_back(run.front());
      b.src.push_back(run.n);
      t.advance();
    }
    charge_reads(b.staged.size() + b.roots.size());
    charge_writes(b.staged.size());
    if (b.staged.empty()) buckets_[i].reset();
    return;
  }
  Node* y = nullptr;
  for (auto& r : b.roots)
    if (!r->list.empty() && (y == nullptr || lt(r->ck, y->ck))) y = r.get();
  if (y == nullptr) {
    buckets_[i].reset();
    return;
  }
  b.staged = std::move(y->list.front());
  y->list.pop_front();
  std::sort(b.staged.begin(), b.staged.end(), [this](const Elem& x, const Elem& z) { return lt(x, z); });
  b.src_root = y;
  recount(y);
  for (const Elem& e : b.staged) b.staged_corrupt += e.key < y->ck.key;
  corrupt_ += b.staged_corrupt;
}

// ---------------------------------------------------------------------------
// Sift

std::vector<SoftHeap::Elem> SoftHeap::extract(Node* x, std::size_t want) {
  struct Run {
    Node* n;
    bool done() const { return n->head >= n->arr.size(); }
    const Elem& front() const { return n->arr[n->head]; }
    void pop() { ++n->head; }
  };
  std::vector<Run> runs;
  for (auto& k : x->kids) runs.push_back({k.get()});
  auto less = [this](const Elem& a, const Elem& b) { return lt(a, b); };
  Tournament<Run, decltype(less)> t(std::move(runs), less);
  std::vector<Elem> out;
  out.reserve(want);
  while (out.size() < want && !t.empty()) {
    out.push_back(t.run(t.top_run()).front());
    t.advance();
  }
  for (auto& k : x->kids)
    if (k->head * 2 >= k->arr.size()) k->compact();
  charge_reads(out.size() + x->kids.size());
  charge_writes(out.size());
  return out;
}

void SoftHeap::repair_children(Node* x) {
  for (auto& k : x->kids)
    if (violates(k.get())) sift(k.get());
  const bool pure_kids = x->rank - 1 <= params_.r;
  auto gone = [&](const std::unique_ptr<Node>& k) {
    return k->leaf() && (pure_kids ? k->psize() == 0 : k->list.empty());
  };
  x->kids.erase(std::remove_if(x->kids.begin(), x->kids.end(), gone), x->kids.end());
}

void SoftHeap::sift(Node* x) {
  if (!violates(x)) throw PreconditionError("sift called on a node that satisfies its invariant");
  if (x->rank <= params_.r)
    sift_pnode(x);
  else if (x->rank == params_.r + 1)
    sift_r1(x);
  else
    sift_cnode(x);
}

void SoftHeap::sift_pnode(Node* x) {
  x->compact();
  std::vector<Elem> got = extract(x, params_.half);
  x->arr.insert(x->arr.end(), got.begin(), got.end());
  repair_children(x);
}

void SoftHeap::sift_r1(Node* x) {
  const std::size_t half = params_.half;
  std::vector<Elem> got;
  if (x->list.size() == 1) {
    got = extract(x, half);
    repair_children(x);
    if (!got.empty()) {
      auto& l = x->list.front();
      if (got.size() == half) {
        x->list.push_front(got);
      } else if (l.size() + got.size() <= half) {
        l.insert(l.end(), got.begin(), got.end());
      } else {
        x->list.push_back(got);
        auto& tail = x->list.back();
        auto& first = x->list.front();
        const std::size_t need = half - first.size();
        first.insert(first.end(), tail.begin(), tail.begin() + static_cast<std::ptrdiff_t>(need));
        tail.erase(tail.begin(), tail.begin() + static_cast<std::ptrdiff_t>(need));
      }
    }
  } else {
    got = extract(x, half);
    repair_children(x);
    if (!x->kids.empty()) {
      std::vector<Elem> more = extract(x, half);
      repair_children(x);
      got.insert(got.end(), more.begin(), more.end());
    }
    if (!got.empty()) {
      if (got.size() <= half) {
        x->list.push_back(got);
      } else {
        x->list.emplace_back(got.begin(), got.begin() + static_cast<std::ptrdiff_t>(half));
        x->list.emplace_back(got.begin() + static_cast<std::ptrdiff_t>(half), got.end());
      }
    }
  }
  if (!got.empty() && (!x->has_ck || lt(x->ck, got.back()))) {
    x->ck = got.back();
    x->has_ck = true;
  }
  recount(x);
}

void SoftHeap::sift_cnode(Node* x) {
  const auto sk = static_cast<std::size_t>(params_.s(x->rank));
  const std::size_t half = params_.half;
  while (x->list.size() < sk) {
    x->kids.erase(std::remove_if(x->kids.begin(), x->kids.end(),
                                 [](const std::unique_ptr<Node>& k) { return k->leaf() && k->list.empty(); }),
                  x->kids.end());
    if (x->kids.empty()) break;
    std::size_t yi = x->kids.size();
    for (std::size_t k = 0; k < x->kids.size(); ++k) {
      if (x->kids[k]->list.empty()) continue;
      if (yi == x->kids.size() || lt(x->kids[k]->ck, x->kids[yi]->ck)) yi = k;
    }
    if (yi == x->kids.size()) break;
    Node* y = x->kids[yi].get();
    if (!x->list.empty() && x->list.back().size() + y->list.back().size() <= params_.cap) {
      auto& yl = y->list.back();
      yl.insert(yl.end(), x->list.back().begin(), x->list.back().end());
      charge_reads(yl.size());
      charge_writes(yl.size());
      x->list.pop_back();
    }
    if (!x->list.empty() && x->list.back().size() < half) {
      auto& xl = x->list.back();
      auto& yl = y->list.back();
      const std::size_t need = half - xl.size();
      xl.insert(xl.end(), yl.end() - static_cast<std::ptrdiff_t>(need), yl.end());
      yl.erase(yl.end() - static_cast<std::ptrdiff_t>(need), yl.end());
      charge_reads(half);
      charge_writes(half);
    }
    x->list.splice(x->list.end(), y->list);
    x->ck = y->ck;
    x->has_ck = true;
    recount(y);
    if (!y->leaf()) sift(y);
    if (y->leaf() && y->list.empty()) x->kids.erase(x->kids.begin() + static_cast<std::ptrdiff_t>(yi));
  }
  recount(x);
}

// ---------------------------------------------------------------------------
// Epochs

bool SoftHeap::rebalance_epoch() {
  if (!params_.hard) return false;
  const std::size_t remaining = records_;
  const std::size_t n_i = epoch_inserts_;
  if (remaining == 0) {
    buckets_.clear();
    suffixmin_.clear();
    epoch_inserts_ = epoch_deletes_ = 0;
    return true;
  }
  const std::size_t sm = params_.sqrt_m;
  if (!(remaining * sm < n_i)) return false;
  std::vector<Elem> all;
  all.reserve(remaining);
  const std::size_t lifetime_in = n_inserted_, lifetime_out = n_deleted_;
  while (records_ > 0) all.push_back(pop_raw().first);
  buckets_.clear();
  suffixmin_.clear();
  for (const Elem& e : all) push_raw(e);
  n_inserted_ = lifetime_in;
  n_deleted_ = lifetime_out;
  epoch_inserts_ = all.size();
  epoch_deletes_ = 0;
  return true;
}

// ---------------------------------------------------------------------------
// Audit

void SoftHeap::audit_node(const Node* x, bool is_root, std::string& err) const {
  auto fail = [&](const std::string& m) {
    if (err.empty()) err = m + " (rank " + std::to_string(x->rank) + ")";
  };
  auto quiet_lt = [](const Elem& a, const Elem& b) {
    if (a.key != b.key) return a.key < b.key;
    if (a.del != b.del) return a.del;
    return a.uid < b.uid;
  };
  if (x->kids.size() > params_.sqrt_m) fail("too many children");
  for (const auto& k : x->kids)
    if (k->rank != x->rank - 1) fail("child rank mismatch");
  if (x->rank <= params_.r) {
    if (x->psize() > params_.cap) fail("pnode over capacity");
    if (!is_root && !x->leaf() && x->psize() < params_.half) fail("PNI violated");
    for (std::size_t i = x->head + 1; i < x->arr.size(); ++i)
      if (quiet_lt(x->arr[i], x->arr[i - 1])) fail("pnode array unsorted");
    if (x->psize() > 0)
      for (const auto& k : x->kids)
        if (k->psize() > 0 && !quiet_lt(x->arr.back(), k->arr[k->head])) fail("pnode heap order");
  } else {
    std::size_t idx = 0;
    for (const auto& ln : x->list) {
      ++idx;
      if (ln.size() > params_.cap) fail("listnode over capacity");
      if (idx < x->list.size() && ln.size() < params_.half) fail("short listnode before the last");
      for (const Elem& e : ln)
        if (x->has_ck && e.key > x->ck.key) fail("element above its ckey");
    }
    const auto s = params_.s(x->rank);
    if (!is_root && !x->leaf() && static_cast<std::int64_t>(x->list.size()) < s / 2 + 1) fail("CNI violated");
    if (static_cast<std::int64_t>(x->list.size()) > 3 * std::max<std::int64_t>(s, 1)) fail("list longer than 3 s_k");
    if (x->has_ck) {
      for (const auto& k : x->kids) {
        if (x->rank == params_.r + 1) {
          if (k->psize() > 0 && !quiet_lt(x->ck, k->arr[k->head])) fail("rank r+1 heap order");
        } else if (k->has_ck && !k->list.empty() && !quiet_lt(x->ck, k->ck)) {
          fail("ckey heap order");
        }
      }
    }
  }
  for (const auto& k : x->kids) audit_node(k.get(), false, err);
}

std::size_t SoftHeap::corrupt_count_walk() const {
  std::size_t c = 0;
  std::vector<const Node*> stack;
  for (const auto& b : buckets_) {
    if (!b) continue;
    if (b->src_root != nullptr)
      for (std::size_t k = b->head; k < b->staged.size(); ++k) c += b->staged[k].key < b->src_root->ck.key;
    for (const auto& r : b->roots) stack.push_back(r.get());
  }
  while (!stack.empty()) {
    const Node* x = stack.back();
    stack.pop_back();
    if (x->has_ck)
      for (const auto& ln : x->list)
        for (const Elem& e : ln) c += e.key < x->ck.key;
    for (const auto& k : x->kids) stack.push_back(k.get());
  }
  return c;
}

std::string SoftHeap::audit() const {
  std::string err;
  for (std::size_t i = 0; i < buckets_.size(); ++i) {
    if (!buckets_[i]) continue;
    const Bucket& b = *buckets_[i];
    if (b.roots.size() >= params_.sqrt_m) err = "too many roots at rank " + std::to_string(i);
    if (b.staged_empty()) err = "bucket without staged elements at rank " + std::to_string(i);
    for (const auto& r : b.roots) {
      if (r->rank != static_cast<int>(i)) err = "root rank mismatch";
      audit_node(r.get(), true, err);
    }
  }
  for (std::size_t i = 0; i < buckets_.size() && err.empty(); ++i) {
    int best = -1;
    for (std::size_t j = i; j < buckets_.size(); ++j) {
      if (!buckets_[j] || buckets_[j]->staged_empty()) continue;
      const Elem& mj = bucket_min(*buckets_[j]);
      if (best < 0) {
        best = static_cast<int>(j);
        continue;
      }
      const Elem& mb = bucket_min(*buckets_[static_cast<std::size_t>(best)]);
      if (mj.key < mb.key || (mj.key == mb.key && (mj.del > mb.del || (mj.del == mb.del && mj.uid < mb.uid))))
        best = static_cast<int>(j);
    }
    if (suffixmin_[i] != best) err = "suffixmin wrong at rank " + std::to_string(i);
  }
  if (err.empty() && corrupt_count_walk() != corrupt_) err = "corruption tally out of sync";
  return err;
}

// ---------------------------------------------------------------------------
// Applications

SelectResult select_median(const std::vector<std::int64_t>& items, double epsilon, DeviceParams d) {
  if (items.empty()) throw EmptyError("select_median: empty input");
  SelectResult res;
  BlockDevice dev(d);
  std::vector<std::int64_t> a = items;
  std::size_t k = (a.size() - 1) / 2;
  while (true) {
    ++res.rounds;
    if (a.size() <= 16) {
      std::sort(a.begin(), a.end());
      res.value = a[k];
      break;
    }
    SoftHeap h(dev, epsilon);
    for (auto x : a) h.insert(x);
    const auto todo = std::max<std::size_t>(1, static_cast<std::size_t>(epsilon * static_cast<double>(a.size())));
    std::int64_t pivot = std::numeric_limits<std::int64_t>::min();
    for (std::size_t j = 0; j < todo; ++j) pivot = std::max(pivot, h.deletemin().key);
    std::vector<std::int64_t> lo, hi;
    std::size_t eq = 0;
    for (auto x : a) {
      if (x < pivot)
        lo.push_back(x);
      else if (x > pivot)
        hi.push_back(x);
      else
        ++eq;
    }
    dev.charge_reads(dev.blocks_for(a.size()));
    dev.charge_writes(dev.blocks_for(a.size()));
    if (k < lo.size()) {
      a = std::move(lo);
    } else if (k < lo.size() + eq) {
      res.value = pivot;
      break;
    } else {
      k -= lo.size() + eq;
      a = std::move(hi);
    }
  }
  res.io = dev.stats();
  return res;
}

NearSortResult near_sort(const std::vector<std::int64_t>& items, double epsilon, DeviceParams d) {
  NearSortResult res;
  BlockDevice dev(d);
  SoftHeap h(dev, epsilon);
  for (auto x : items) {
    h.insert(x);
    res.corrupt_max = std::max(res.corrupt_max, h.corrupt_count());
  }
  res.out.reserve(items.size());
  while (!h.empty()) {
    res.out.push_back(h.deletemin().key);
    res.corrupt_max = std::max(res.corrupt_max, h.corrupt_count());
  }
  res.comparisons = h.comparisons();
  res.io = dev.stats();
  return res;
}

HeapSortResult heap_sort(const std::vector<std::int64_t>& items, DeviceParams d) {
  HeapSortResult res;
  BlockDevice dev(d);
  SoftHeap h = SoftHeap::hard(dev);
  for (auto x : items) h.insert(x);
  res.out.reserve(items.size());
  while (!h.empty()) res.out.push_back(h.deletemin().key);
  res.comparisons = h.comparisons();
  res.io = dev.stats();
  return res;
}

}  // namespace emkit
