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

#include <cstddef>
#include <cstdint>
#include <list>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "emkit/device.hpp"

namespace emkit {

struct EmshParams {
  DeviceParams device;
  double epsilon = 1.0;
  bool hard = false;

  std::size_t sqrt_m = 0;  // floor(sqrt(M/B))
  int r = 0;               // smallest r with sqrt_m^r >= 1/epsilon
  std::size_t cap = 0;     // B * sqrt_m, capacity of a node or listnode
  std::size_t half = 0;    // cap / 2

  // Soft heap with error rate epsilon in (0, 1]. For epsilon < 1 the device
  // must have sqrt_m >= 11.
  static EmshParams soft(DeviceParams d, double epsilon);
  // Exact heap: no rank is ever corrupt.
  static EmshParams exact(DeviceParams d);

  // s_k: 0 for k <= r, 2 for k = r + 1, ceil(1.5 s_{k-1}) beyond.
  std::int64_t s(int k) const;
  bool same_shape(const EmshParams& o) const;
};

struct HeapItem {
  std::int64_t key = 0;
  std::uint64_t payload = 0;
  bool corrupt = false;
};

// External memory soft heap. Trees of sqrt(m)-ary nodes live on the
// simulated device; buckets, the insert buffer and suffixmin pointers live in
// memory. Node contents are charged at block granularity as they move.
class SoftHeap {
 public:
  SoftHeap(BlockDevice& dev, double epsilon);
  SoftHeap(BlockDevice& dev, const EmshParams& params);
  static SoftHeap hard(BlockDevice& dev);

  SoftHeap(SoftHeap&&) noexcept;
  SoftHeap& operator=(SoftHeap&&) noexcept;
  ~SoftHeap();

  void insert(std::int64_t key, std::uint64_t payload = 0);
  HeapItem deletemin();
  // Same element deletemin would return. Charges no I/O unless a pending
  // delete record has to be resolved first.
  HeapItem findmin();
  // Moves every element of `other` into this heap; `other` becomes empty.
  void meld(SoftHeap& other);

  // Hard heap only: schedules removal of the element with this key.
  void delete_by_key(std::int64_t key);
  // Hard heap only: drains and reinserts when few elements remain in a tall
  // heap. Returns false (no-op) when the condition does not hold.
  bool rebalance_epoch();

  bool empty() const { return records_ == 0; }
  // Records currently stored, including unresolved delete records.
  std::size_t size() const { return records_; }
  std::size_t inserted() const { return n_inserted_; }
  std::size_t deleted() const { return n_deleted_; }
  std::size_t epoch_inserts() const { return epoch_inserts_; }
  std::size_t epoch_deletes() const { return epoch_deletes_; }
  std::size_t corrupt_count() const { return corrupt_; }
  std::uint64_t comparisons() const { return comparisons_; }
  int max_rank() const;
  std::size_t buffer_size() const { return buffer_.size(); }
  std::size_t trees_of_rank(int k) const;
  const EmshParams& params() const { return params_; }
  BlockDevice& device() const { return *dev_; }

  // Structural audit: node invariants for non-roots, heap order, children
  // ranks, root counts, suffixmin, and the corruption tally. Empty on success.
  std::string audit() const;
  std::size_t corrupt_count_walk() const;

  struct Elem {
    std::int64_t key;
    std::uint64_t uid;
    std::uint64_t payload;
    bool del;
  };
  struct Node;
  struct Bucket;

  // Test hooks exposing internals.
  struct Probe;

 private:
  bool lt(const Elem& a, const Elem& b) const;
  void push_raw(const Elem& e);
  std::pair<Elem, bool> pop_raw();
  const Elem& peek_raw(bool* corrupt = nullptr) const;
  void settle();
  void meld_buckets(std::vector<std::unique_ptr<Bucket>> other, std::unique_ptr<Bucket> carry);
  void fill_up(std::size_t i);
  void sift(Node* x);
  void sift_pnode(Node* x);
  void sift_r1(Node* x);
  void sift_cnode(Node* x);
  std::vector<Elem> extract(Node* x, std::size_t want);
  void repair_children(Node* x);
  void return_staged(Bucket& b, std::size_t i);
  void recount(Node* x);
  bool violates(const Node* x) const;
  const Elem& bucket_min(const Bucket& b) const;
  void update_suffixmin(std::size_t from);
  void update_all_suffixmin();
  void charge_reads(std::size_t items);
  void charge_writes(std::size_t items);
  Node* new_node(int rank);
  void audit_node(const Node* x, bool is_root, std::string& err) const;

  BlockDevice* dev_;
  EmshParams params_;
  std::vector<Elem> buffer_;  // sorted descending; minimum at the back
  std::vector<std::unique_ptr<Bucket>> buckets_;
  std::vector<int> suffixmin_;
  std::size_t records_ = 0;
  std::size_t n_inserted_ = 0;
  std::size_t n_deleted_ = 0;
  std::size_t epoch_inserts_ = 0;
  std::size_t epoch_deletes_ = 0;
  std::size_t corrupt_ = 0;
  std::uint64_t uid_ = 0;
  mutable std::uint64_t comparisons_ = 0;
};

// ---------------------------------------------------------------------------
// Applications

struct SelectResult {
  std::int64_t value = 0;
  std::size_t rounds = 0;
  IoStats io;
};
// Lower median of distinct items: repeatedly deletes epsilon*N items, pivots
// on the largest one deleted, and keeps the side holding the target rank.
SelectResult select_median(const std::vector<std::int64_t>& items, double epsilon,
                           DeviceParams d = {8, 8 * 144});

struct NearSortResult {
  std::vector<std::int64_t> out;
  std::size_t corrupt_max = 0;
  std::uint64_t comparisons = 0;
  IoStats io;
};
// Drains a soft heap; at most epsilon*N^2 inversions.
NearSortResult near_sort(const std::vector<std::int64_t>& items, double epsilon,
                         DeviceParams d = {8, 8 * 144});

struct HeapSortResult {
  std::vector<std::int64_t> out;
  std::uint64_t comparisons = 0;
  IoStats io;
};
// N inserts into a hard heap followed by N deletemins.
HeapSortResult heap_sort(const std::vector<std::int64_t>& items, DeviceParams d = {8, 8 * 144});

}  // namespace emkit
