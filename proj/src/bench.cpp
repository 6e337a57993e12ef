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

#include "emkit/bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <unordered_set>

#include "emkit/errors.hpp"

namespace emkit {

namespace {

struct KindName {
  GraphKind kind;
  const char* name;
};

constexpr KindName kKinds[] = {
    {GraphKind::random_gnm, "random-gnm"},   {GraphKind::cycle, "cycle"},
    {GraphKind::complete, "complete"},       {GraphKind::grid, "grid"},
    {GraphKind::tree, "tree"},               {GraphKind::interval_random, "interval-random"},
    {GraphKind::list_random, "list-random"},
};

std::int64_t below(std::mt19937_64& rng, std::int64_t n) {
  return std::uniform_int_distribution<std::int64_t>(0, n - 1)(rng);
}

double draw_weight(std::mt19937_64& rng, std::int64_t max_weight) {
  return max_weight <= 1 ? 1.0 : static_cast<double>(1 + below(rng, max_weight));
}

bool is_connected(const Graph& g) {
  if (g.V <= 1) return true;
  std::vector<std::int64_t> parent(g.V);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::int64_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::int64_t parts = g.V;
  for (const Edge& e : g.edges) {
    auto a = find(e.u), b = find(e.v);
    if (a != b) {
      parent[a] = b;
      --parts;
    }
  }
  return parts == 1;
}

Graph gnm(std::int64_t V, std::int64_t E, std::int64_t max_weight, std::mt19937_64& rng) {
  Graph g;
  g.V = V;
  const std::int64_t pairs = V * (V - 1) / 2;
  if (2 * E > pairs) {
    // Dense: shuffle all pairs and keep a prefix.
    std::vector<std::pair<std::int64_t, std::int64_t>> all;
    all.reserve(pairs);
    for (std::int64_t u = 0; u < V; ++u)
      for (std::int64_t v = u + 1; v < V; ++v) all.emplace_back(u, v);
    std::shuffle(all.begin(), all.end(), rng);
    for (std::int64_t i = 0; i < E; ++i) g.add_edge(all[i].first, all[i].second, draw_weight(rng, max_weight));
    return g;
  }
  std::unordered_set<std::uint64_t> seen;
  while (g.E() < E) {
    std::int64_t u = below(rng, V), v = below(rng, V);
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    if (!seen.insert(static_cast<std::uint64_t>(u) * static_cast<std::uint64_t>(V) + v).second) continue;
    g.add_edge(u, v, draw_weight(rng, max_weight));
  }
  return g;
}

void need(bool ok, const std::string& what) {
  if (!ok) throw SpecError(what);
}

}  // namespace

GraphKind parse_graph_kind(const std::string& name) {
  for (const auto& k : kKinds)
    if (name == k.name) return k.kind;
  throw SpecError("unknown graph kind: " + name);
}

std::string graph_kind_name(GraphKind k) {
  for (const auto& e : kKinds)
    if (e.kind == k) return e.name;
  return "?";
}

Generated generate(const GraphSpec& spec) {
  need(spec.max_weight >= 1, "max_weight must be at least 1");
  std::mt19937_64 rng(spec.seed);
  Generated out;
  Graph& g = out.graph;
  switch (spec.kind) {
    case GraphKind::random_gnm: {
      need(spec.V >= 1, "random-gnm needs V >= 1");
      need(spec.E >= 0 && spec.E <= spec.V * (spec.V - 1) / 2,
           "random-gnm: E exceeds V(V-1)/2 for a simple graph");
      need(!spec.connected || spec.E >= spec.V - 1, "random-gnm: too few edges to be connected");
      const std::size_t max_attempts = 1000;
      for (out.attempts = 1;; ++out.attempts) {
        g = gnm(spec.V, spec.E, spec.max_weight, rng);
        if (!spec.connected || is_connected(g)) break;
        need(out.attempts < max_attempts, "random-gnm: no connected sample within the attempt limit");
      }
      break;
    }
    case GraphKind::cycle:
      need(spec.V >= 3, "cycle needs V >= 3");
      g.V = spec.V;
      for (std::int64_t i = 0; i < spec.V; ++i) g.add_edge(i, (i + 1) % spec.V, draw_weight(rng, spec.max_weight));
      break;
    case GraphKind::complete:
      need(spec.V >= 1, "complete needs V >= 1");
      g.V = spec.V;
      for (std::int64_t u = 0; u < spec.V; ++u)
        for (std::int64_t v = u + 1; v < spec.V; ++v) g.add_edge(u, v, draw_weight(rng, spec.max_weight));
      break;
    case GraphKind::grid: {
      std::int64_t r = spec.rows, c = spec.cols;
      if (r <= 0 || c <= 0) {
        need(spec.V >= 1, "grid needs rows and cols, or V");
        r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(spec.V)));
        while (r > 1 && spec.V % r != 0) --r;
        c = spec.V / r;
      }
      g.V = r * c;
      for (std::int64_t i = 0; i < r; ++i)
        for (std::int64_t j = 0; j < c; ++j) {
          if (j + 1 < c) g.add_edge(i * c + j, i * c + j + 1, draw_weight(rng, spec.max_weight));
          if (i + 1 < r) g.add_edge(i * c + j, (i + 1) * c + j, draw_weight(rng, spec.max_weight));
        }
      break;
    }
    case GraphKind::tree: {
      need(spec.V >= 1, "tree needs V >= 1");
      g.V = spec.V;
      std::vector<std::int64_t> label(spec.V);
      std::iota(label.begin(), label.end(), 0);
      std::shuffle(label.begin(), label.end(), rng);
      for (std::int64_t i = 1; i < spec.V; ++i)
        g.add_edge(label[below(rng, i)], label[i], draw_weight(rng, spec.max_weight));
      break;
    }
    case GraphKind::interval_random: {
      need(spec.V >= 1, "interval-random needs V >= 1");
      // Integer endpoints drawn without repetition from [0, 4V); lengths are
      // short enough that the overlap graph is sparse but usually connected.
      const std::int64_t span = 4 * spec.V;
      std::unordered_set<std::int64_t> used;
      auto fresh = [&](std::int64_t lo, std::int64_t hi) {
        for (;;) {
          std::int64_t x = lo + below(rng, hi - lo + 1);
          if (used.insert(x).second) return x;
        }
      };
      for (std::int64_t i = 0; i < spec.V; ++i) {
        std::int64_t l = fresh(0, span - 1);
        std::int64_t len = 1 + below(rng, 8);
        std::int64_t r = l + len;
        while (!used.insert(r).second) ++r;
        out.intervals.push_back({static_cast<double>(l), static_cast<double>(r), draw_weight(rng, spec.max_weight)});
      }
      break;
    }
    case GraphKind::list_random: {
      need(spec.V >= 1, "list-random needs V >= 1");
      std::vector<std::int64_t> order(spec.V);
      std::iota(order.begin(), order.end(), 0);
      std::shuffle(order.begin(), order.end(), rng);
      out.succ.assign(spec.V, -1);
      for (std::int64_t i = 0; i + 1 < spec.V; ++i) out.succ[order[i]] = order[i + 1];
      break;
    }
  }
  return out;
}

Graph read_graph(std::istream& in) {
  Graph g;
  std::int64_t declared_V = -1, declared_E = -1, max_id = -1;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string first;
    if (!(ss >> first) || first[0] == '#' || first == "c") continue;
    if (first == "p") {
      std::string fmt;
      if (!(ss >> fmt >> declared_V >> declared_E) || declared_V < 0 || declared_E < 0)
        throw MalformedInput("line " + std::to_string(lineno) + ": bad header");
      continue;
    }
    std::int64_t u = 0, v = 0;
    double w = 1.0;
    try {
      std::size_t pos = 0;
      u = std::stoll(first, &pos);
      if (pos != first.size()) throw std::invalid_argument(first);
    } catch (const std::exception&) {
      throw MalformedInput("line " + std::to_string(lineno) + ": expected `u v [w]`");
    }
    if (!(ss >> v)) throw MalformedInput("line " + std::to_string(lineno) + ": expected `u v [w]`");
    if (!(ss >> w)) w = 1.0;
    if (u < 0 || v < 0) throw MalformedInput("line " + std::to_string(lineno) + ": negative vertex id");
    max_id = std::max({max_id, u, v});
    g.add_edge(u, v, w);
  }
  if (declared_V >= 0) {
    if (max_id >= declared_V) throw MalformedInput("vertex id beyond declared V");
    if (declared_E != g.E()) throw MalformedInput("edge count differs from header");
    g.V = declared_V;
  } else {
    g.V = max_id + 1;
  }
  return g;
}

Graph read_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedInput("cannot open " + path);
  return read_graph(in);
}

void write_graph(std::ostream& out, const Graph& g) {
  out << "p edge " << g.V << ' ' << g.E() << '\n';
  out << std::setprecision(17);
  for (const Edge& e : g.edges) out << e.u << ' ' << e.v << ' ' << e.w << '\n';
}

void write_intervals(std::ostream& out, const std::vector<Interval>& iv) {
  out << std::setprecision(17);
  for (const Interval& x : iv) out << x.left << ' ' << x.right << ' ' << x.weight << '\n';
}

void write_list(std::ostream& out, const std::vector<std::int64_t>& succ) {
  for (auto s : succ) out << s << '\n';
}

std::vector<std::int64_t> read_list(std::istream& in) {
  std::vector<std::int64_t> succ;
  std::int64_t s;
  while (in >> s) succ.push_back(s);
  if (!in.eof()) throw MalformedInput("list file: expected one integer per line");
  return succ;
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::skipped: return "skipped";
  }
  return "?";
}

void write_report(std::ostream& out, const std::vector<ReportRow>& rows, bool with_wall_time) {
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  };
  out << "algorithm,params,result,measured,bound,ratio,verdict";
  if (with_wall_time) out << ",wall_ms";
  out << '\n';
  std::map<std::string, std::pair<double, double>> span;
  std::vector<std::string> order;
  for (const ReportRow& r : rows) {
    out << quote(r.algorithm) << ',' << quote(r.params) << ',' << quote(r.result) << ',' << r.measured << ','
        << r.bound << ',' << std::setprecision(4) << r.ratio() << std::setprecision(6) << ','
        << verdict_name(r.verdict);
    if (with_wall_time) out << ',' << std::fixed << std::setprecision(2) << r.wall_ms << std::defaultfloat;
    out << '\n';
    if (r.bound <= 0) continue;
    auto [it, fresh] = span.emplace(r.algorithm, std::make_pair(r.ratio(), r.ratio()));
    if (fresh) order.push_back(r.algorithm);
    it->second.first = std::min(it->second.first, r.ratio());
    it->second.second = std::max(it->second.second, r.ratio());
  }
  for (const auto& a : order)
    out << "# " << a << " ratio min " << std::setprecision(4) << span[a].first << " max " << span[a].second
        << std::setprecision(6) << '\n';
}

}  // namespace emkit
