#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "sleepcolor/errors.hpp"
#include "sleepcolor/graph.hpp"

namespace sleepcolor {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

struct Choice {
  Color color;  // kNoColor for the "no pick" outcome
  Rational weight;
};

/// Outcome distribution of one node's pick in a randomized iteration:
/// 0 with weight 1/2, each list color with weight 1/(2|L|).
inline std::vector<Choice> choice_space(const ColorList& list) {
  if (list.empty()) throw InstanceError("empty list has no choice space");
  std::vector<Choice> out;
  out.reserve(list.size() + 1);
  out.push_back({kNoColor, Rational(1, 2)});
  const Rational each(1, 2 * static_cast<long long>(list.size()));
  for (Color c : list) out.push_back({c, each});
  return out;
}

inline constexpr std::uint64_t kOracleGuard = 10'000'000;

/// Exact probability that each node adopts its pick in one iteration,
/// by enumerating every joint outcome of all nodes' picks.
inline std::vector<Rational> exact_adoption_probabilities(const ColoringInstance& inst,
                                                          std::uint64_t guard = kOracleGuard) {
  const std::size_t n = inst.size();
  std::uint64_t outcomes = 1;
  for (const ColorList& l : inst.lists) {
    if (l.empty()) throw InstanceError("empty list has no choice space");
    outcomes *= l.size() + 1;
    if (outcomes > guard) {
      throw TooLargeForOracle("joint choice space exceeds " + std::to_string(guard) + " outcomes");
    }
  }

  // Integer weights over the common denominator prod(2|L_v|):
  // "no pick" has numerator |L_v|, every color numerator 1.
  std::vector<BigInt> hits(n, 0);
  std::vector<std::size_t> digit(n, 0);  // 0 = no pick, k = list[k-1]
  std::vector<Color> pick(n, kNoColor);
  for (std::uint64_t step = 0; step < outcomes; ++step) {
    BigInt weight = 1;
    for (NodeIndex v = 0; v < n; ++v) {
      pick[v] = digit[v] == 0 ? kNoColor : inst.lists[v][digit[v] - 1];
      if (digit[v] == 0) weight *= inst.lists[v].size();
    }
    for (NodeIndex v = 0; v < n; ++v) {
      if (pick[v] == kNoColor) continue;
      bool clash = false;
      for (NodeIndex u : inst.graph.neighbors(v)) clash = clash || pick[u] == pick[v];
      if (!clash) hits[v] += weight;
    }
    for (NodeIndex v = 0; v < n; ++v) {
      if (++digit[v] <= inst.lists[v].size()) break;
      digit[v] = 0;
    }
  }

  BigInt denominator = 1;
  for (const ColorList& l : inst.lists) denominator *= 2 * l.size();
  std::vector<Rational> out;
  out.reserve(n);
  for (NodeIndex v = 0; v < n; ++v) out.emplace_back(hits[v], denominator);
  return out;
}

/// Sum over nodes of the probability of staying uncolored in one iteration.
inline Rational exact_expected_uncolored_after_one_iteration(const ColoringInstance& inst,
                                                             std::uint64_t guard = kOracleGuard) {
  Rational total = 0;
  for (const Rational& p : exact_adoption_probabilities(inst, guard)) total += 1 - p;
  return total;
}

inline std::string to_string(const Rational& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

// ---------------------------------------------------------------------------
// Tiny-instance catalog

struct CatalogEntry {
  std::string name;
  ColoringInstance instance;
};

namespace detail {

// Edge bitmask over the pairs (i<j) of `n` nodes, in lexicographic order.
inline std::vector<std::pair<int, int>> node_pairs(int n) {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  return pairs;
}

inline unsigned canonical_mask(int n, unsigned mask) {
  const auto pairs = node_pairs(n);
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  unsigned best = ~0U;
  do {
    unsigned m = 0;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      if (!(mask >> k & 1U)) continue;
      int a = perm[static_cast<std::size_t>(pairs[k].first)];
      int b = perm[static_cast<std::size_t>(pairs[k].second)];
      if (a > b) std::swap(a, b);
      const auto idx = std::find(pairs.begin(), pairs.end(), std::pair{a, b}) - pairs.begin();
      m |= 1U << idx;
    }
    best = std::min(best, m);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace detail

/// All graphs on 1..max_nodes nodes up to isomorphism (max_nodes <= 5).
inline std::vector<Graph> nonisomorphic_graphs(int max_nodes) {
  std::vector<Graph> out;
  for (int n = 1; n <= max_nodes; ++n) {
    const auto pairs = detail::node_pairs(n);
    std::set<unsigned> seen;
    for (unsigned mask = 0; mask < (1U << pairs.size()); ++mask) {
      const unsigned canon = detail::canonical_mask(n, mask);
      if (!seen.insert(canon).second) continue;
      std::vector<std::pair<std::uint64_t, std::uint64_t>> edges;
      for (std::size_t k = 0; k < pairs.size(); ++k) {
        if (canon >> k & 1U) {
          edges.emplace_back(static_cast<std::uint64_t>(pairs[k].first),
                             static_cast<std::uint64_t>(pairs[k].second));
        }
      }
      std::vector<std::uint64_t> ids(static_cast<std::size_t>(n));
      std::iota(ids.begin(), ids.end(), 0);
      out.push_back(Graph::build(std::span<const std::pair<std::uint64_t, std::uint64_t>>(edges), ids));
    }
  }
  return out;
}

/// Every graph on at most 4 nodes, each with three list assignments:
///   minimal     L_v = {1..deg+1}
///   shifted     L_v = {v+1 .. v+deg+1}
///   asymmetric  even nodes {1..deg+1}, odd nodes {2..deg+2}, node 0 gets
///               one extra color when its list stays within 4 colors.
inline std::vector<CatalogEntry> tiny_catalog() {
  std::vector<CatalogEntry> out;
  int graph_no = 0;
  for (const Graph& g : nonisomorphic_graphs(4)) {
    const std::string base = "g" + std::to_string(graph_no++) + "_n" + std::to_string(g.size()) +
                             "_m" + std::to_string(g.edge_count());
    std::vector<ColorList> minimal(g.size());
    std::vector<ColorList> shifted(g.size());
    std::vector<ColorList> asymmetric(g.size());
    for (NodeIndex v = 0; v < g.size(); ++v) {
      const auto d = static_cast<Color>(g.degree(v));
      for (Color c = 1; c <= d + 1; ++c) {
        minimal[v].push_back(c);
        shifted[v].push_back(c + v);
        asymmetric[v].push_back(v % 2 == 0 ? c : c + 1);
      }
      if (v == 0 && d + 2 <= 4) asymmetric[v].push_back(d + 2);
    }
    out.push_back({base + "_minimal", make_instance(g, std::move(minimal))});
    out.push_back({base + "_shifted", make_instance(g, std::move(shifted))});
    out.push_back({base + "_asymmetric", make_instance(g, std::move(asymmetric))});
  }
  return out;
}

}  // namespace sleepcolor
