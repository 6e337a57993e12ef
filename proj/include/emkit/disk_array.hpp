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
#include <utility>
#include <vector>

#include "emkit/device.hpp"

namespace emkit {

// A sequence of fixed-size records stored on a BlockDevice. Item i lives in
// block i / B. Every access goes through the device's buffer pool.
template <class T>
class DiskArray {
 public:
  DiskArray() = default;
  explicit DiskArray(BlockDevice& dev) : dev_(&dev), id_(dev.attach(0)) {}

  // Places `items` on the device without charging any transfer; models input
  // that already resides on disk.
  static DiskArray load(BlockDevice& dev, std::vector<T> items) {
    DiskArray a(dev);
    dev.grow(items.size());
    a.data_ = std::move(items);
    a.written_ = a.data_.size();
    return a;
  }

  DiskArray(DiskArray&& o) noexcept { *this = std::move(o); }
  DiskArray& operator=(DiskArray&& o) noexcept {
    if (this != &o) {
      release_all();
      dev_ = o.dev_;
      id_ = o.id_;
      data_ = std::move(o.data_);
      written_ = o.written_;
      o.dev_ = nullptr;
      o.data_.clear();
      o.written_ = 0;
    }
    return *this;
  }
  DiskArray(const DiskArray&) = delete;
  DiskArray& operator=(const DiskArray&) = delete;
  ~DiskArray() { release_all(); }

  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  BlockDevice& device() const { return *dev_; }
  std::uint32_t id() const { return id_; }

  T get(std::size_t i) const {
    dev_->touch(id_, i / dev_->B(), false, false);
    return data_[i];
  }

  void set(std::size_t i, const T& v) {
    const std::size_t blk = i / dev_->B();
    dev_->touch(id_, blk, true, blk * dev_->B() >= written_);
    data_[i] = v;
    if (i + 1 > written_) written_ = i + 1;
  }

  void push_back(const T& v) {
    dev_->grow(1);
    data_.push_back(v);
    set(data_.size() - 1, v);
  }

  // Writes back dirty blocks and drops this array's frames from the pool.
  void flush() const {
    if (dev_) dev_->evict_array(id_);
  }

  // Inspection without I/O accounting, for verification code.
  const std::vector<T>& raw() const { return data_; }

 private:
  void release_all() {
    if (dev_) dev_->detach(id_, data_.size());
    dev_ = nullptr;
  }

  BlockDevice* dev_ = nullptr;
  std::uint32_t id_ = 0;
  std::vector<T> data_;
  std::size_t written_ = 0;
};

// Sequential reader holding one frame; a block is released as soon as the
// cursor leaves it.
template <class T>
class Reader {
 public:
  explicit Reader(const DiskArray<T>& a, std::size_t begin = 0)
      : Reader(a, begin, a.size()) {}
  Reader(const DiskArray<T>& a, std::size_t begin, std::size_t end)
      : a_(&a), pos_(begin), end_(end) {}
  Reader(Reader&& o) noexcept : a_(o.a_), pos_(o.pos_), end_(o.end_), held_(o.held_) {
    o.held_ = kNone;
  }
  Reader(const Reader&) = delete;
  ~Reader() { drop(); }

  bool done() const { return pos_ >= end_; }
  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return end_ - pos_; }

  const T& peek() {
    load();
    return a_->raw()[pos_];
  }
  T next() {
    load();
    return a_->raw()[pos_++];
  }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  void load() {
    const std::size_t blk = pos_ / a_->device().B();
    if (blk != held_) {
      drop();
      a_->device().touch(a_->id(), blk, false, false);
      held_ = blk;
    }
  }
  void drop() {
    if (held_ != kNone && a_ != nullptr) a_->device().release(a_->id(), held_);
    held_ = kNone;
  }

  const DiskArray<T>* a_;
  std::size_t pos_;
  std::size_t end_;
  std::size_t held_ = kNone;
};

// Sequential appender; each completed block is written out once.
template <class T>
class Writer {
 public:
  explicit Writer(DiskArray<T>& a) : a_(&a) {}
  Writer(const Writer&) = delete;
  ~Writer() { close(); }

  void put(const T& v) {
    const std::size_t blk = a_->size() / a_->device().B();
    if (blk != held_) {
      flush_block();
      held_ = blk;
    }
    a_->push_back(v);
  }

  void close() { flush_block(); }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  void flush_block() {
    if (held_ != kNone) a_->device().release(a_->id(), held_);
    held_ = kNone;
  }

  DiskArray<T>* a_;
  std::size_t held_ = kNone;
};

}  // namespace emkit
