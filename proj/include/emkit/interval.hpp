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

#include <cstdint>
#include <string>
#include <vector>

#include "emkit/device.hpp"

namespace emkit {

struct Interval {
  double left = 0;
  double right = 0;
  double weight = 1;
};

struct Endpoint {
  std::int64_t pos = 0;   // rank among all 2V endpoints
  std::int64_t id = 0;    // interval id
  std::int64_t twin = 0;  // rank of the other endpoint of the same interval
  bool left = false;
};

// Intervals normalised to 2V distinct integer endpoint ranks. At equal raw
// values a left endpoint sorts before a right one, so closed intervals that
// touch still overlap; remaining ties are broken by interval id.
struct IntervalSet {
  std::vector<Interval> raw;
  std::vector<std::int64_t> lpos, rpos;  // per interval id
  std::vector<Endpoint> endpoints;       // sorted by pos
  std::size_t ties_broken = 0;           // endpoint pairs that shared a raw value

  static IntervalSet build(std::vector<Interval> raw);
  std::int64_t size() const { return static_cast<std::int64_t>(raw.size()); }
  bool overlap(std::int64_t a, std::int64_t b) const;
};

// Reads `left right weight` lines (weight optional, default 1).
IntervalSet read_intervals(const std::string& path);

std::int64_t chromatic_number(const IntervalSet& s, BlockDevice& dev);

struct Colouring {
  std::vector<std::int64_t> colour;  // 1-based for intervals, 0/1 for 2MLC
  std::int64_t colours = 0;
  IoStats io;
};

// Queue-and-heap colouring with exactly chi colours.
Colouring colour_igc(const IntervalSet& s, BlockDevice& dev);

struct IntervalTree {
  std::vector<std::int64_t> parent;  // -1 for roots and unreachable intervals
  std::vector<std::int64_t> depth;   // -1 when unreachable
  std::vector<double> dist;          // shortest paths only
  IoStats io;
};

// Path length is the sum of the weights of the intervals on it, source
// included. Unreachable intervals get infinity.
IntervalTree sssp_intervals(const IntervalSet& s, std::int64_t source, BlockDevice& dev);
IntervalTree bfs_tree(const IntervalSet& s, std::int64_t source, BlockDevice& dev);
// Parent of each interval is the open interval with the largest left
// endpoint when it starts. Yields a DFS forest with no cross edges.
IntervalTree dfs_tree(const IntervalSet& s, BlockDevice& dev);

struct ListArray {
  std::vector<std::int64_t> pred, succ;  // -1 for none

  std::int64_t size() const { return static_cast<std::int64_t>(succ.size()); }
  // Pointers in range and mutually consistent.
  void validate() const;
  bool monotonic() const;
  // Number of maximal runs of forward or of backward links.
  std::int64_t stretches() const;
  static ListArray from_succ(const std::vector<std::int64_t>& succ);
};

// Component label (id of the head node) of every node of a monotonic list array.
std::vector<std::int64_t> mlcc_label(const ListArray& lists, BlockDevice& dev);
Colouring colour_2mlc(const ListArray& lists, BlockDevice& dev);
// Proper colouring of a general list array with colours 1..3.
Colouring colour_3lc(const ListArray& lists, BlockDevice& dev);

struct ListsAsIntervals {
  IntervalSet intervals;
  std::vector<std::int64_t> node_of;  // interval id -> list node, -1 for padding
  std::int64_t components = 0;
};
ListsAsIntervals reduce_mlcc_to_igc(const ListArray& lists, BlockDevice& dev);

struct IntervalsAsLists {
  ListArray lists;
  std::vector<std::int64_t> interval_of;  // list node -> interval id
  std::int64_t chi = 0;
};
IntervalsAsLists reduce_igc_to_mlcc(const IntervalSet& s, BlockDevice& dev);

}  // namespace emkit
