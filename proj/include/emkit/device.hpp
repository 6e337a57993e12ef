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
#include <string>
#include <string_view>
#include <unordered_map>

namespace emkit {

struct DeviceParams {
  std::size_t block_size_B = 64;
  std::size_t memory_M = 1024;

  std::size_t B() const { return block_size_B; }
  std::size_t M() const { return memory_M; }
  // Number of blocks that fit in memory, always floor(M / B).
  std::size_t m() const { return memory_M / block_size_B; }

  // Throws ValidationError unless B >= 2 and M >= 2B.
  void validate() const;
};

struct IoStats {
  std::uint64_t reads = 0;
  std::uint64_t writes = 0;

  std::uint64_t total() const { return reads + writes; }
  IoStats operator-(const IoStats& o) const { return {reads - o.reads, writes - o.writes}; }
  IoStats& operator+=(const IoStats& o) {
    reads += o.reads;
    writes += o.writes;
    return *this;
  }

  static std::string csv_header();
  // op,reads,writes,N,B,M
  std::string csv_row(std::string_view op, std::size_t n, const DeviceParams& p) const;
};

// A simulated disk. Arrays mounted on it keep their data in ordinary memory,
// but every block they touch goes through a buffer pool of m frames and is
// charged as a read on a miss and as a write when a dirty frame leaves.
class BlockDevice {
 public:
  explicit BlockDevice(DeviceParams p, std::size_t capacity_items = 0);
  BlockDevice(const BlockDevice&) = delete;
  BlockDevice& operator=(const BlockDevice&) = delete;

  const DeviceParams& params() const { return params_; }
  std::size_t B() const { return params_.B(); }
  std::size_t M() const { return params_.M(); }
  std::size_t m() const { return params_.m(); }

  const IoStats& stats() const { return stats_; }
  void reset_stats() { stats_ = {}; }
  void charge_reads(std::uint64_t n) { stats_.reads += n; }
  void charge_writes(std::uint64_t n) { stats_.writes += n; }
  std::uint64_t blocks_for(std::size_t items) const { return (items + B() - 1) / B(); }

  // Capacity in items; 0 means unlimited.
  void set_capacity(std::size_t items) { capacity_ = items; }
  std::size_t capacity() const { return capacity_; }
  std::size_t allocated() const { return allocated_; }
  std::size_t peak_allocated() const { return peak_; }

  std::uint32_t attach(std::size_t items);
  void grow(std::size_t items);
  void detach(std::uint32_t id, std::size_t items);

  // Bring block `blk` of array `id` into the pool. `fresh` blocks hold no
  // data yet and are not read from disk.
  void touch(std::uint32_t id, std::size_t blk, bool dirty, bool fresh);
  // Drop one frame, writing it back if dirty.
  void release(std::uint32_t id, std::size_t blk);
  // Drop every frame of an array, writing back dirty ones.
  void evict_array(std::uint32_t id);
  void evict_all();

  std::size_t frames() const { return frames_; }
  std::size_t resident() const { return lru_.size(); }

 private:
  struct Frame {
    std::uint64_t key;
    bool dirty;
  };
  static std::uint64_t key_of(std::uint32_t id, std::size_t blk) {
    return (static_cast<std::uint64_t>(id) << 40) | static_cast<std::uint64_t>(blk);
  }
  void drop(std::list<Frame>::iterator it);

  DeviceParams params_;
  IoStats stats_;
  std::size_t capacity_ = 0;
  std::size_t allocated_ = 0;
  std::size_t peak_ = 0;
  std::uint32_t next_id_ = 1;
  std::size_t frames_ = 0;
  std::list<Frame> lru_;
  std::unordered_map<std::uint64_t, std::list<Frame>::iterator> where_;
};

}  // namespace emkit
