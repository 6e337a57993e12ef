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
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "emkit/errors.hpp"
#include "emkit/wstream.hpp"

namespace emkit::wsdetail {

// Sorts the records of the tape. The first pass forms runs of M records;
// every later pass moves M/2 records of each of the two runs of a pair into
// the pair's merged run C, merging them with all of C as it streams by.
// Records carry their pair in `run` and A/B/C in `role`.
template <class Less>
void sort_tape(TapeMachine& m, Less less) {
  std::uint64_t& count = m.comparisons();
  auto lt = [&](const StreamItem& a, const StreamItem& b) {
    ++count;
    return less(a, b);
  };
  const std::size_t M = m.M();
  const std::size_t half = std::max<std::size_t>(1, M / 2);

  std::vector<StreamItem> buf;
  std::int64_t runs = 0;
  auto flush_run = [&] {
    std::sort(buf.begin(), buf.end(), lt);
    for (auto& it : buf) {
      it.run = runs / 2;
      it.role = static_cast<std::uint8_t>(runs % 2);
      m.write(it);
    }
    m.drop(buf.size());
    buf.clear();
    ++runs;
  };
  m.begin_pass();
  StreamItem it;
  while (m.read(it)) {
    m.hold();
    buf.push_back(it);
    if (buf.size() == M) flush_run();
  }
  if (!buf.empty()) flush_run();
  m.end_pass();
  if (runs <= 1) return;

  bool relabel = false;
  for (;;) {
    bool unmoved = false;
    std::int64_t merged_runs = 0;
    std::int64_t cur = -1;
    std::size_t ta = 0, tb = 0;
    std::vector<StreamItem> a, b, d;
    std::size_t dpos = 0;
    bool merged = false;

    auto emit_c = [&](StreamItem x) {
      x.role = 2;
      x.run = cur;
      m.write(x);
    };
    auto ensure_merged = [&] {
      if (merged) return;
      d.clear();
      d.reserve(a.size() + b.size());
      std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(d), lt);
      a.clear();
      b.clear();
      dpos = 0;
      merged = true;
    };
    auto finish = [&] {
      if (cur < 0) return;
      ensure_merged();
      while (dpos < d.size()) {
        emit_c(d[dpos++]);
        m.drop();
      }
      ++merged_runs;
    };

    m.begin_pass();
    while (m.read(it)) {
      if (relabel && it.role == 2) {
        it.role = static_cast<std::uint8_t>(it.run % 2);
        it.run /= 2;
      }
      if (it.run != cur) {
        finish();
        cur = it.run;
        ta = tb = 0;
        merged = false;
        d.clear();
        dpos = 0;
      }
      if (it.role == 0) {
        if (ta < half) {
          ++ta;
          m.hold();
          a.push_back(it);
        } else {
          unmoved = true;
          m.write(it);
        }
      } else if (it.role == 1) {
        if (tb < half) {
          ++tb;
          m.hold();
          b.push_back(it);
        } else {
          unmoved = true;
          m.write(it);
        }
      } else {
        ensure_merged();
        while (dpos < d.size() && lt(d[dpos], it)) {
          emit_c(d[dpos++]);
          m.drop();
        }
        emit_c(it);
      }
    }
    finish();
    m.end_pass();
    relabel = false;
    if (!unmoved) {
      if (merged_runs <= 1) return;
      relabel = true;
    }
  }
}

// For every participating record x, finds the record y with
// stream_key(y) == load_key(x) and calls combine(x, y). Each pass loads the
// next M unprocessed records and writes them back at the end of the tape.
template <class Part, class LoadKey, class StreamKey, class Combine>
void partner_passes(TapeMachine& m, Part part, LoadKey load_key, StreamKey stream_key, Combine combine) {
  const std::int64_t ep = m.next_epoch();
  for (;;) {
    std::vector<StreamItem> loaded;
    std::unordered_map<std::int64_t, std::size_t> index;
    bool loading = true;
    std::size_t remaining = 0;
    auto close_loading = [&] {
      if (!loading) return;
      loading = false;
      for (const auto& y : loaded) {
        auto f = index.find(stream_key(y));
        if (f != index.end()) combine(loaded[f->second], y);
      }
    };
    m.begin_pass();
    StreamItem it;
    while (m.read(it)) {
      if (!part(it)) {
        m.write(it);
        continue;
      }
      const bool fresh = it.mark < ep;
      if (fresh && loading && loaded.size() < m.M()) {
        m.hold();
        index.emplace(load_key(it), loaded.size());
        loaded.push_back(it);
        continue;
      }
      close_loading();
      if (fresh) ++remaining;
      auto f = index.find(stream_key(it));
      if (f != index.end()) combine(loaded[f->second], it);
      m.write(it);
    }
    close_loading();
    for (auto& x : loaded) {
      x.mark = ep;
      m.write(x);
    }
    m.drop(loaded.size());
    m.end_pass();
    if (remaining == 0) return;
  }
}

// Weighted list ranking of every record on the tape, using id, pred, succ
// and w. Afterwards r holds the inclusive prefix sum of w along each list.
void rank_tape(TapeMachine& m);

}  // namespace emkit::wsdetail
