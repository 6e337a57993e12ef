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

#include "emkit/device.hpp"

#include <sstream>

#include "emkit/errors.hpp"

namespace emkit {

void DeviceParams::validate() const {
  if (block_size_B < 2) throw ValidationError("block size B must be at least 2");
  if (memory_M < 2 * block_size_B) throw ValidationError("memory M must be at least 2B");
}

std::string IoStats::csv_header() { return "op,reads,writes,N,B,M"; }

std::string IoStats::csv_row(std::string_view op, std::size_t n, const DeviceParams& p) const {
  std::ostringstream os;
  os << op << ',' << reads << ',' << writes << ',' << n << ',' << p.B() << ',' << p.M();
  return os.str();
}

BlockDevice::BlockDevice(DeviceParams p, std::size_t capacity_items)
    : params_(p), capacity_(capacity_items) {
  params_.validate();
  frames_ = params_.m();
}

std::uint32_t BlockDevice::attach(std::size_t items) {
  grow(items);
  return next_id_++;
}

void BlockDevice::grow(std::size_t items) {
  if (capacity_ != 0 && allocated_ + items > capacity_) {
    throw ResourceError("device capacity exceeded: " + std::to_string(allocated_ + items) +
                        " items requested, capacity " + std::to_string(capacity_));
  }
  allocated_ += items;
  if (allocated_ > peak_) peak_ = allocated_;
}

void BlockDevice::detach(std::uint32_t id, std::size_t items) {
  for (auto it = lru_.begin(); it != lru_.end();) {
    if ((it->key >> 40) == id) {
      where_.erase(it->key);
      it = lru_.erase(it);
    } else {
      ++it;
    }
  }
  allocated_ -= items < allocated_ ? items : allocated_;
}

void BlockDevice::drop(std::list<Frame>::iterator it) {
  if (it->dirty) ++stats_.writes;
  where_.erase(it->key);
  lru_.erase(it);
}

void BlockDevice::touch(std::uint32_t id, std::size_t blk, bool dirty, bool fresh) {
  const auto key = key_of(id, blk);
  auto found = where_.find(key);
  if (found != where_.end()) {
    auto it = found->second;
    it->dirty = it->dirty || dirty;
    lru_.splice(lru_.begin(), lru_, it);
    return;
  }
  if (lru_.size() >= frames_) drop(std::prev(lru_.end()));
  if (!fresh) ++stats_.reads;
  lru_.push_front(Frame{key, dirty});
  where_[key] = lru_.begin();
}

void BlockDevice::release(std::uint32_t id, std::size_t blk) {
  auto found = where_.find(key_of(id, blk));
  if (found != where_.end()) drop(found->second);
}

void BlockDevice::evict_array(std::uint32_t id) {
  for (auto it = lru_.begin(); it != lru_.end();) {
    auto next = std::next(it);
    if ((it->key >> 40) == id) drop(it);
    it = next;
  }
}

void BlockDevice::evict_all() {
  while (!lru_.empty()) drop(lru_.begin());
}

}  // namespace emkit
