#pragma once

#include <algorithm>
#include <bit>
#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "sleepcolor/errors.hpp"

namespace sleepcolor {

/// Identifier handed to a node as its only initial knowledge.
struct NodeId {
  std::uint64_t value = 0;

  friend constexpr auto operator<=>(NodeId, NodeId) = default;
  friend std::ostream& operator<<(std::ostream& os, NodeId id) { return os << id.value; }
};

/// Dense position of a node inside a Graph (0..n-1, ordered by NodeId).
using NodeIndex = std::uint32_t;

using Color = std::uint32_t;

/// Sentinel for "no color": the tentative 0 of the randomized step and the
/// value of an uncolored entry in a Coloring.
inline constexpr Color kNoColor = 0;

/// Sorted list of distinct positive colors.
using ColorList = std::vector<Color>;

/// Indexed by NodeIndex; kNoColor marks uncolored nodes.
using Coloring = std::vector<Color>;

struct Edge {
  NodeId u;
  NodeId v;

  friend constexpr auto operator<=>(const Edge&, const Edge&) = default;
};

/// Immutable undirected simple graph in compressed adjacency form.
///
/// Nodes are stored in increasing NodeId order, so NodeIndex order and NodeId
/// order agree and every neighbor span is sorted in both senses.
class Graph {
 public:
  Graph() = default;

  /// Builds a graph from an edge list over the given node ids.
  /// Throws InstanceError on duplicate ids, self-loops, duplicate edges
  /// (in either orientation) and endpoints missing from `node_ids`.
  static Graph build(std::span<const Edge> edges, std::span<const NodeId> node_ids) {
    Graph g;
    g.ids_.assign(node_ids.begin(), node_ids.end());
    std::sort(g.ids_.begin(), g.ids_.end());
    if (std::adjacent_find(g.ids_.begin(), g.ids_.end()) != g.ids_.end()) {
      throw InstanceError("duplicate node id");
    }

    std::vector<std::pair<NodeIndex, NodeIndex>> arcs;
    arcs.reserve(edges.size() * 2);
    for (const Edge& e : edges) {
      if (e.u == e.v) throw InstanceError("self-loop at node " + std::to_string(e.u.value));
      const auto a = g.index_of(e.u);
      const auto b = g.index_of(e.v);
      if (!a || !b) {
        throw InstanceError("edge endpoint not among node ids: " + std::to_string(e.u.value) +
                            "-" + std::to_string(e.v.value));
      }
      arcs.emplace_back(*a, *b);
      arcs.emplace_back(*b, *a);
    }
    std::sort(arcs.begin(), arcs.end());
    if (const auto dup = std::adjacent_find(arcs.begin(), arcs.end()); dup != arcs.end()) {
      throw InstanceError("duplicate edge " + std::to_string(g.ids_[dup->first].value) + "-" +
                          std::to_string(g.ids_[dup->second].value));
    }

    const std::size_t n = g.ids_.size();
    g.offsets_.assign(n + 1, 0);
    for (const auto& [from, to] : arcs) ++g.offsets_[from + 1];
    for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] += g.offsets_[i];
    g.targets_.reserve(arcs.size());
    for (const auto& arc : arcs) g.targets_.push_back(arc.second);

    for (NodeIndex v = 0; v < n; ++v) g.max_degree_ = std::max(g.max_degree_, g.degree(v));
    g.id_bit_size_ = g.ids_.empty() ? 0U : static_cast<unsigned>(std::bit_width(g.ids_.back().value));
    return g;
  }

  /// Convenience overload for plain integer ids.
  static Graph build(std::span<const std::pair<std::uint64_t, std::uint64_t>> edges,
                     std::span<const std::uint64_t> node_ids) {
    std::vector<Edge> e;
    e.reserve(edges.size());
    for (auto [u, v] : edges) e.push_back({NodeId{u}, NodeId{v}});
    std::vector<NodeId> ids;
    ids.reserve(node_ids.size());
    for (auto id : node_ids) ids.push_back(NodeId{id});
    return build(e, ids);
  }

  [[nodiscard]] std::size_t size() const noexcept { return ids_.size(); }
  [[nodiscard]] std::size_t edge_count() const noexcept { return targets_.size() / 2; }
  [[nodiscard]] std::size_t max_degree() const noexcept { return max_degree_; }

  /// Bits needed to write the largest identifier: ceil(log2(max id + 1)).
  [[nodiscard]] unsigned id_bit_size() const noexcept { return id_bit_size_; }

  [[nodiscard]] NodeId id(NodeIndex v) const { return ids_[v]; }
  [[nodiscard]] std::span<const NodeId> ids() const noexcept { return ids_; }

  [[nodiscard]] std::optional<NodeIndex> index_of(NodeId id) const {
    const auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
    if (it == ids_.end() || *it != id) return std::nullopt;
    return static_cast<NodeIndex>(it - ids_.begin());
  }

  [[nodiscard]] std::span<const NodeIndex> neighbors(NodeIndex v) const {
    return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
  }

  [[nodiscard]] std::size_t degree(NodeIndex v) const { return offsets_[v + 1] - offsets_[v]; }

  [[nodiscard]] bool adjacent(NodeIndex u, NodeIndex v) const {
    const auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  /// Edges with u < v, sorted lexicographically by id.
  [[nodiscard]] std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count());
    for (NodeIndex u = 0; u < size(); ++u) {
      for (NodeIndex v : neighbors(u)) {
        if (u < v) out.push_back({ids_[u], ids_[v]});
      }
    }
    return out;
  }

  /// Subgraph induced by `keep` (indices into this graph, any order).
  /// The result keeps the original identifiers.
  [[nodiscard]] Graph induced(std::span<const NodeIndex> keep) const {
    std::vector<char> in(size(), 0);
    std::vector<NodeId> ids;
    ids.reserve(keep.size());
    for (NodeIndex v : keep) {
      in[v] = 1;
      ids.push_back(ids_[v]);
    }
    std::vector<Edge> es;
    for (NodeIndex u : keep) {
      for (NodeIndex v : neighbors(u)) {
        if (u < v && in[v]) es.push_back({ids_[u], ids_[v]});
      }
    }
    return build(es, ids);
  }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.ids_ == b.ids_ && a.offsets_ == b.offsets_ && a.targets_ == b.targets_;
  }

 private:
  std::vector<NodeId> ids_;
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeIndex> targets_;
  std::size_t max_degree_ = 0;
  unsigned id_bit_size_ = 0;
};

/// One (deg+1)-list-coloring problem: a graph and a color list per node.
struct ColoringInstance {
  Graph graph;
  std::vector<ColorList> lists;  // indexed by NodeIndex

  [[nodiscard]] std::size_t size() const noexcept { return graph.size(); }

  friend bool operator==(const ColoringInstance&, const ColoringInstance&) = default;
};

/// Sorts and checks a list: positive, distinct colors.
inline ColorList normalize_list(ColorList list) {
  std::sort(list.begin(), list.end());
  if (!list.empty() && list.front() == kNoColor) throw InstanceError("color 0 is reserved");
  if (std::adjacent_find(list.begin(), list.end()) != list.end()) {
    throw InstanceError("repeated color in list");
  }
  return list;
}

/// Throws InstanceError unless every list is sorted, positive, duplicate-free
/// and has at least deg(v)+1 entries.
inline void validate_instance(const ColoringInstance& inst) {
  if (inst.lists.size() != inst.graph.size()) {
    throw InstanceError("list count " + std::to_string(inst.lists.size()) +
                        " does not match node count " + std::to_string(inst.graph.size()));
  }
  for (NodeIndex v = 0; v < inst.graph.size(); ++v) {
    const ColorList& l = inst.lists[v];
    if (!std::is_sorted(l.begin(), l.end()) ||
        std::adjacent_find(l.begin(), l.end()) != l.end() ||
        (!l.empty() && l.front() == kNoColor)) {
      throw InstanceError("list of node " + std::to_string(inst.graph.id(v).value) +
                          " is not a set of positive colors");
    }
    if (l.size() < inst.graph.degree(v) + 1) {
      throw InstanceError("list of node " + std::to_string(inst.graph.id(v).value) + " has " +
                          std::to_string(l.size()) + " colors but degree " +
                          std::to_string(inst.graph.degree(v)));
    }
  }
}

inline ColoringInstance make_instance(Graph graph, std::vector<ColorList> lists) {
  ColoringInstance inst{std::move(graph), std::move(lists)};
  validate_instance(inst);
  return inst;
}

/// The (deg+1)-coloring special case: L_v = {1, ..., deg(v)+1}.
inline ColoringInstance make_default_instance(const Graph& graph) {
  std::vector<ColorList> lists(graph.size());
  for (NodeIndex v = 0; v < graph.size(); ++v) {
    lists[v].resize(graph.degree(v) + 1);
    for (std::size_t i = 0; i < lists[v].size(); ++i) lists[v][i] = static_cast<Color>(i + 1);
  }
  return ColoringInstance{graph, std::move(lists)};
}

enum class Validity { ProperTotal, ProperPartial, Invalid };

inline const char* to_string(Validity v) {
  switch (v) {
    case Validity::ProperTotal: return "PROPER_TOTAL";
    case Validity::ProperPartial: return "PROPER_PARTIAL";
    case Validity::Invalid: return "INVALID";
  }
  return "?";
}

/// Exhaustive scan: every assigned color must come from the node's list and
/// differ from every assigned neighbor color.
inline Validity check_coloring(const ColoringInstance& inst, const Coloring& coloring) {
  if (coloring.size() != inst.size()) return Validity::Invalid;
  bool total = true;
  for (NodeIndex v = 0; v < inst.size(); ++v) {
    const Color c = coloring[v];
    if (c == kNoColor) {
      total = false;
      continue;
    }
    const ColorList& l = inst.lists[v];
    if (!std::binary_search(l.begin(), l.end(), c)) return Validity::Invalid;
    for (NodeIndex u : inst.graph.neighbors(v)) {
      if (coloring[u] == c) return Validity::Invalid;
    }
  }
  return total ? Validity::ProperTotal : Validity::ProperPartial;
}

/// Sub-instance induced by `keep`, with the given (possibly pruned) lists.
inline ColoringInstance induced_instance(const ColoringInstance& inst,
                                         std::span<const NodeIndex> keep,
                                         std::span<const ColorList> lists_by_index) {
  std::vector<NodeIndex> sorted(keep.begin(), keep.end());
  std::sort(sorted.begin(), sorted.end());
  ColoringInstance out;
  out.graph = inst.graph.induced(sorted);
  out.lists.reserve(sorted.size());
  for (NodeIndex v : sorted) out.lists.push_back(lists_by_index[v]);
  return out;
}

}  // namespace sleepcolor
