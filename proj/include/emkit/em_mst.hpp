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
#include <limits>
#include <vector>

#include "emkit/device.hpp"
#include "emkit/disk_array.hpp"
#include "emkit/graph.hpp"

namespace emkit {

// Directed copy of an undirected edge; every edge is stored once per endpoint.
struct MstEdge {
  std::int64_t src = 0;
  std::int64_t dst = 0;
  double w = 0.0;
  std::int64_t id = 0;
};

inline bool mst_lighter(const MstEdge& a, const MstEdge& b) {
  return a.w != b.w ? a.w < b.w : a.id < b.id;
}

// Vertex u was absorbed into the supervertex represented by root.
struct Star {
  std::int64_t u = 0;
  std::int64_t root = 0;
};

// h_k(v): a lower bound on the lightest external edge of v missing from a
// bucket. The default value is infinite.
struct Threshold {
  std::int64_t v = 0;
  double w = std::numeric_limits<double>::infinity();
  std::int64_t id = std::numeric_limits<std::int64_t>::max();
};

inline bool threshold_below(double w, std::int64_t id, const Threshold& t) {
  return w != t.w ? w < t.w : id < t.id;
}

struct MstPhaseTrace {
  int stage = 0;
  std::int64_t phase = 0;
  int g = 0;
  std::vector<bool> full;  // full[k] for k = 0..g+1 after the phase
  std::size_t hooked = 0;
};

struct MstOptions {
  bool trace = false;
  // End a stage early once the supervertex count reaches E/B. Turning this
  // off runs every stage through all of its phases.
  bool truncate_stages = true;
  // Cross-checks every hook and bucket fill against an in-memory model of
  // the contracted graph. Slow; meant for tests.
  bool audit = false;
};

struct MstResult {
  std::vector<std::int64_t> edge_ids;  // sorted ids of forest edges
  double weight = 0.0;
  std::vector<std::int64_t> labels;    // smallest vertex of each component
  std::vector<MstPhaseTrace> trace;
  std::size_t schedule_violations = 0;
  std::size_t audit_violations = 0;
  std::size_t boruvka_rounds = 0;      // plain rounds used while E <= V
  std::size_t stages = 0;
  std::size_t phases = 0;
  std::size_t prim_vertices = 0;
  std::size_t prim_edges = 0;
  IoStats io;
  std::vector<IoStats> stage_io;
};

// Minimum spanning forest with staged Boruvka phases and an EM-Prim finish.
MstResult mst(const Graph& g, BlockDevice& dev, MstOptions opt = {});

// Component label (smallest member vertex) of every vertex.
std::vector<std::int64_t> connected_components(const Graph& g, BlockDevice& dev);

// ---------------------------------------------------------------------------
// Building blocks. Buckets are sorted by (src, weight, id).

// The selected hook edges: the single B_0 entry of every supervertex.
DiskArray<MstEdge> hook_phase(const DiskArray<MstEdge>& b0);

// Stars for the components of the hook graph. The representative of a
// component is its smallest vertex. Sorted by u.
DiskArray<Star> contract(const DiskArray<MstEdge>& hooks);

// Stars of `older` followed by the clustering in `newer`.
DiskArray<Star> compose_stars(const DiskArray<Star>& older, const DiskArray<Star>& newer);

// Renames both endpoints through `f`, drops internal edges and keeps the
// lightest of each group of parallel edges.
DiskArray<MstEdge> cleanup_bucket(const DiskArray<MstEdge>& bucket, const DiskArray<Star>& f);

// Thresholds of the absorbed supervertices, reduced to the minimum per
// representative (the seed threshold r_i).
DiskArray<Threshold> rename_thresholds(const DiskArray<Threshold>& thr, const DiskArray<Star>& f);

// Edges of each supervertex lighter than its threshold.
DiskArray<MstEdge> minset_extract(const DiskArray<MstEdge>& cleaned, const DiskArray<Threshold>& r);

struct FilledBucket {
  DiskArray<MstEdge> edges;
  DiskArray<Threshold> thr;
};

// Keeps the 2^(2^k) - 1 lightest edges of every supervertex. The threshold
// becomes the next lightest edge, or is inherited from `r` when none is left.
FilledBucket fill_bucket(const DiskArray<MstEdge>& src, const DiskArray<Threshold>& r, int k);

struct PrimResult {
  std::vector<std::int64_t> edge_ids;
  std::vector<Star> labels;  // (vertex, start vertex of its component)
};

// EM-Prim over an undirected edge list (one record per edge) with the hard
// heap as the priority queue.
PrimResult em_prim(const DiskArray<MstEdge>& edges);

// Per-vertex bucket limit 2^(2^k) - 1, saturating.
std::size_t bucket_limit(int k);

}  // namespace emkit
