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

#include <boost/rational.hpp>
#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "emkit/device.hpp"
#include "emkit/graph.hpp"

namespace emkit {

using Rational = boost::rational<std::int64_t>;

struct PackedTree {
  std::vector<std::int64_t> edge_ids;  // sorted
  std::int64_t units = 0;              // weight in multiples of 1/K
  Rational weight;
};

struct TreePacking {
  std::vector<PackedTree> trees;  // distinct trees, in order of first use
  std::vector<Rational> loads;    // indexed like Graph::edges
  Rational value;                 // W
  double epsilon = 0.0;
  std::int64_t K = 1;             // increment is 1/K
  std::size_t iterations = 0;
};

// Greedy packing: repeatedly add 1/K to a load-minimal spanning tree until
// some edge reaches load 1. K = ceil(3 ceil(log2 E) / eps^2).
TreePacking greedy_tree_packing(const Graph& g, double epsilon, BlockDevice& dev);

// A spanning tree rooted at `root` with the 1-respecting cut annotations.
// Cut quantities count every edge of the graph, tree edges included, so
// cut_down[v] is the value of the cut (v subtree, rest).
struct RootedTree {
  std::int64_t V = 0;
  std::int64_t root = 0;
  std::vector<std::int64_t> parent;     // -1 at the root
  std::vector<std::int64_t> parent_edge;
  std::vector<std::int64_t> depth;
  std::vector<std::int64_t> pre;        // preorder position
  std::vector<std::int64_t> size;       // subtree size
  std::vector<std::int64_t> order;      // non-increasing (depth, parent)
  std::vector<std::int64_t> d_down;     // degree sum of the subtree
  std::vector<std::int64_t> rho_down;   // edges with both ends in the subtree
  std::vector<std::int64_t> cut_down;   // C(v subtree) = d_down - 2 rho_down; -1 at the root

  bool is_ancestor(std::int64_t a, std::int64_t b) const {
    return pre[static_cast<std::size_t>(a)] <= pre[static_cast<std::size_t>(b)] &&
           pre[static_cast<std::size_t>(b)] < pre[static_cast<std::size_t>(a)] + size[static_cast<std::size_t>(a)];
  }
  bool in_subtree(std::int64_t v, std::int64_t x) const { return is_ancestor(v, x); }
};

// Roots the tree with an Euler tour and fills parent, depth, pre, size and
// order. Throws MalformedInput if the edges are not a spanning tree.
RootedTree root_tree(const Graph& g, const std::vector<std::int64_t>& tree_edge_ids, std::int64_t root,
                     BlockDevice& dev);

// Fills d_down, rho_down and cut_down with time-forward processing and an
// offline LCA pass over the tour.
void cut_1respect(const Graph& g, RootedTree& t, BlockDevice& dev);

struct ClusterPartition {
  std::vector<std::int64_t> cluster_of;           // per vertex, level-order label
  std::vector<std::vector<std::int64_t>> members;  // each deeper vertices first
  std::vector<std::int64_t> parent_cluster;       // -1 for the root cluster
  std::vector<std::int64_t> root_parent;          // common parent of the cluster's roots, -1 at the top
  std::vector<std::int64_t> depth;
};

// Clusters of about B vertices. All roots of a cluster's subforest share one
// parent, and children clusters are labelled before their parents.
ClusterPartition partition_tree(const RootedTree& t, std::size_t B);

struct TwoRespect {
  std::int64_t value = -1;  // -1 when the tree has fewer than two edges
  std::int64_t u = -1;
  std::int64_t v = -1;
  std::size_t pairs = 0;
};

using PairVisitor = std::function<void(std::int64_t u, std::int64_t v, std::int64_t value)>;

// Minimum over pairs of tree edges (u, p(u)), (v, p(v)) of the cut crossed by
// exactly those two tree edges. Requires cut_1respect to have run and
// M >= B^2. Every ordered pair is visited.
TwoRespect cut_2respect(const Graph& g, const RootedTree& t, BlockDevice& dev, const PairVisitor& visit = {});

struct CutRecord {
  std::vector<std::int64_t> tree_edges;  // one or two edge ids of the defining tree
  std::int64_t value = 0;
  std::vector<std::int64_t> side;        // sorted, never contains vertex 0
};

// The side of the cut determined by the subtree(s) below the given vertices.
std::vector<std::int64_t> cut_side(const RootedTree& t, std::int64_t u, std::int64_t v = -1);
std::vector<std::int64_t> canonical_side(std::int64_t V, std::vector<std::int64_t> side);

enum class MincutMode { all, sampled, fat };

struct MincutOptions {
  double epsilon = 0.3;
  MincutMode mode = MincutMode::all;
  std::uint64_t seed = 1;
};

struct MincutResult {
  std::int64_t value = 0;
  CutRecord witness;
  std::size_t trees_packed = 0;
  std::size_t trees_examined = 0;
  bool fell_back = false;
  std::string warning;
  IoStats io;
};

MincutResult mincut_exact(const Graph& g, BlockDevice& dev, MincutOptions opt = {});
// Same, reusing a packing already computed for g.
MincutResult mincut_with_packing(const Graph& g, const TreePacking& p, BlockDevice& dev, MincutOptions opt);

// Union of k successively peeled spanning forests.
Graph sparse_certificate(const Graph& g, std::int64_t k, BlockDevice& dev);

struct ApproxCutResult {
  std::int64_t value = 0;
  std::size_t levels = 0;
  IoStats io;
};

// A cut value in [c, (2 + eps) c].
ApproxCutResult mincut_approx(const Graph& g, double epsilon, BlockDevice& dev);

class AlphaMincutIndex {
 public:
  double alpha() const { return alpha_; }
  std::int64_t mincut() const { return c_; }
  std::size_t size() const { return count_; }
  // True iff `side` (either side of a partition) is a stored alpha-minimum cut.
  bool query(const std::vector<std::int64_t>& side) const;
  std::vector<CutRecord> records() const;

 private:
  friend AlphaMincutIndex build_alpha_index(const Graph&, double, BlockDevice&, double);
  void add(CutRecord rec);
  static std::uint64_t digest(const std::vector<std::int64_t>& side);

  double alpha_ = 1.0;
  std::int64_t c_ = 0;
  std::int64_t V_ = 0;
  std::size_t count_ = 0;
  std::unordered_map<std::uint64_t, std::vector<CutRecord>> table_;
};

// Index of every cut of value <= alpha * c that is 1- or 2-respected by a
// packed tree. Throws UnsupportedAlpha for alpha >= 3/2.
AlphaMincutIndex build_alpha_index(const Graph& g, double alpha, BlockDevice& dev, double epsilon = 0.3);

}  // namespace emkit
