#pragma once

// Test-only oracles. Nothing here shares code paths with the algorithms
// it is used to check.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sleepcolor/graph.hpp"
#include "sleepcolor/rng.hpp"

namespace sleepcolor::testing {

/// Centralized greedy: nodes in (interim class, id) order pick the smallest
/// list color not used by an already colored neighbor.
inline Coloring sequential_greedy(const ColoringInstance& inst,
                                  const std::vector<std::uint64_t>& interim) {
  std::vector<NodeIndex> order(inst.size());
  for (NodeIndex v = 0; v < inst.size(); ++v) order[v] = v;
  std::stable_sort(order.begin(), order.end(),
                   [&](NodeIndex a, NodeIndex b) { return interim[a] < interim[b]; });
  Coloring c(inst.size(), kNoColor);
  for (NodeIndex v : order) {
    std::set<Color> used;
    for (NodeIndex u : inst.graph.neighbors(v))
      if (c[u] != kNoColor) used.insert(c[u]);
    for (Color x : inst.lists[v]) {
      if (!used.contains(x)) {
        c[v] = x;
        break;
      }
    }
  }
  return c;
}

/// Second, file-based properness check: parses the written instance text
/// directly (no library reader) and scans every edge.
inline bool recheck_proper_total(const std::string& instance_path,
                                 const std::map<std::uint64_t, Color>& colors) {
  std::ifstream in(instance_path);
  std::string line;
  std::map<std::uint64_t, std::set<Color>> lists;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> edges;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "node") {
      std::uint64_t id;
      ss >> id;
      Color c;
      while (ss >> c) lists[id].insert(c);
      lists[id];
    } else if (tag == "edge") {
      std::uint64_t u, v;
      ss >> u >> v;
      edges.emplace_back(u, v);
    }
  }
  for (const auto& [id, list] : lists) {
    const auto it = colors.find(id);
    if (it == colors.end() || !list.contains(it->second)) return false;
  }
  for (auto [u, v] : edges) {
    if (colors.at(u) == colors.at(v)) return false;
  }
  return true;
}

/// Random admissible instance: G(n, p) plus lists of size deg+1+slack
/// drawn from {1..palette}.
inline ColoringInstance random_instance(std::size_t n, double p, std::uint64_t seed,
                                        std::size_t slack = 0, Color palette_extra = 3) {
  Rng rng(seed);
  std::vector<std::pair<std::uint64_t, std::uint64_t>> edges;
  std::vector<std::uint64_t> ids;
  // Sparse, non-contiguous identifiers.
  std::uint64_t next_id = rng.uniform(5);
  for (std::size_t i = 0; i < n; ++i) {
    ids.push_back(next_id);
    next_id += 1 + rng.uniform(7);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (rng.unit() < p) edges.emplace_back(ids[i], ids[j]);
  Graph g = Graph::build(std::span<const std::pair<std::uint64_t, std::uint64_t>>(edges), ids);
  std::vector<ColorList> lists(n);
  for (NodeIndex v = 0; v < n; ++v) {
    const std::size_t want = g.degree(v) + 1 + slack;
    const auto palette = static_cast<Color>(want + palette_extra);
    std::set<Color> chosen;
    while (chosen.size() < want) chosen.insert(1 + static_cast<Color>(rng.uniform(palette)));
    lists[v].assign(chosen.begin(), chosen.end());
  }
  return ColoringInstance{std::move(g), std::move(lists)};
}

/// `copies` disjoint copies of `inst`; copy k's node i gets id k*stride+id.
inline ColoringInstance disjoint_copies(const ColoringInstance& inst, std::size_t copies) {
  const std::uint64_t stride = inst.graph.ids().back().value + 1;
  std::vector<Edge> edges;
  std::vector<NodeId> ids;
  std::vector<ColorList> lists;
  for (std::size_t k = 0; k < copies; ++k) {
    for (NodeIndex v = 0; v < inst.size(); ++v) {
      ids.push_back(NodeId{k * stride + inst.graph.id(v).value});
      lists.push_back(inst.lists[v]);
    }
    for (const Edge& e : inst.graph.edges()) {
      edges.push_back({NodeId{k * stride + e.u.value}, NodeId{k * stride + e.v.value}});
    }
  }
  return ColoringInstance{Graph::build(edges, ids), std::move(lists)};
}

}  // namespace sleepcolor::testing
