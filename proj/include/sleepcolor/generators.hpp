#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sleepcolor/errors.hpp"
#include "sleepcolor/graph.hpp"
#include "sleepcolor/rng.hpp"

namespace sleepcolor {

enum class Family { Path, Cycle, Clique, RandomRegular, Gnp, Star };

inline const char* to_string(Family f) {
  switch (f) {
    case Family::Path: return "path";
    case Family::Cycle: return "cycle";
    case Family::Clique: return "clique";
    case Family::RandomRegular: return "regular";
    case Family::Gnp: return "gnp";
    case Family::Star: return "star";
  }
  return "?";
}

inline std::optional<Family> parse_family(std::string_view s) {
  if (s == "path") return Family::Path;
  if (s == "cycle") return Family::Cycle;
  if (s == "clique") return Family::Clique;
  if (s == "regular" || s == "random_regular") return Family::RandomRegular;
  if (s == "gnp") return Family::Gnp;
  if (s == "star") return Family::Star;
  return std::nullopt;
}

/// Family plus its numeric parameter: degree for random_regular, edge
/// probability for gnp; ignored otherwise.
struct GraphSpec {
  Family family = Family::Gnp;
  std::size_t n = 1;
  double param = 0.0;
};

namespace detail {

using EdgeList = std::vector<std::pair<std::uint64_t, std::uint64_t>>;

inline Graph from_edges(std::size_t n, const EdgeList& edges) {
  std::vector<std::uint64_t> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = i;
  return Graph::build(std::span<const std::pair<std::uint64_t, std::uint64_t>>(edges), ids);
}

// G(n,p) by geometric skipping over the n(n-1)/2 candidate pairs.
inline EdgeList gnp_edges(std::size_t n, double p, Rng& rng) {
  EdgeList edges;
  if (p <= 0.0 || n < 2) return edges;
  if (p >= 1.0) {
    for (std::uint64_t u = 0; u < n; ++u)
      for (std::uint64_t v = u + 1; v < n; ++v) edges.emplace_back(u, v);
    return edges;
  }
  const double log_q = std::log1p(-p);
  std::int64_t v = 1;
  std::int64_t w = -1;
  const auto nn = static_cast<std::int64_t>(n);
  while (v < nn) {
    const double r = rng.unit();
    w += 1 + static_cast<std::int64_t>(std::floor(std::log1p(-r) / log_q));
    while (w >= v && v < nn) {
      w -= v;
      ++v;
    }
    if (v < nn) edges.emplace_back(static_cast<std::uint64_t>(w), static_cast<std::uint64_t>(v));
  }
  return edges;
}

// Pairing model with per-pair rejection of loops and multi-edges; restarts
// from scratch when the remaining points cannot be matched.
inline EdgeList regular_edges(std::size_t n, std::size_t d, Rng& rng) {
  constexpr int kMaxRestarts = 1000;
  for (int attempt = 0; attempt < kMaxRestarts; ++attempt) {
    std::vector<std::uint64_t> points;
    points.reserve(n * d);
    for (std::uint64_t v = 0; v < n; ++v)
      for (std::size_t k = 0; k < d; ++k) points.push_back(v);
    std::set<std::pair<std::uint64_t, std::uint64_t>> present;
    EdgeList edges;
    bool stuck = false;
    while (!points.empty() && !stuck) {
      std::size_t failures = 0;
      for (;;) {
        const std::size_t i = rng.uniform(points.size());
        const std::size_t j = rng.uniform(points.size());
        const std::uint64_t a = points[i];
        const std::uint64_t b = points[j];
        const auto key = std::minmax(a, b);
        if (i != j && a != b && !present.contains(key)) {
          present.insert(key);
          edges.emplace_back(key.first, key.second);
          const std::size_t hi = std::max(i, j);
          const std::size_t lo = std::min(i, j);
          points[hi] = points.back();
          points.pop_back();
          points[lo] = points.back();
          points.pop_back();
          break;
        }
        if (++failures > 50 * points.size() + 100) {
          stuck = true;
          break;
        }
      }
    }
    if (!stuck) return edges;
  }
  throw InstanceError("could not sample a " + std::to_string(d) + "-regular graph on " +
                      std::to_string(n) + " nodes");
}

}  // namespace detail

/// Deterministic in (spec, seed). Node ids are 0..n-1.
inline Graph generate(const GraphSpec& spec, std::uint64_t seed) {
  const std::size_t n = spec.n;
  if (n == 0) throw InstanceError("graph needs at least one node");
  detail::EdgeList edges;
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(spec.family) + 1));
  switch (spec.family) {
    case Family::Path:
      for (std::uint64_t v = 0; v + 1 < n; ++v) edges.emplace_back(v, v + 1);
      break;
    case Family::Cycle:
      if (n < 3) throw InstanceError("cycle needs n >= 3");
      for (std::uint64_t v = 0; v < n; ++v) edges.emplace_back(v, (v + 1) % n);
      break;
    case Family::Clique:
      for (std::uint64_t u = 0; u < n; ++u)
        for (std::uint64_t v = u + 1; v < n; ++v) edges.emplace_back(u, v);
      break;
    case Family::Star:
      for (std::uint64_t v = 1; v < n; ++v) edges.emplace_back(0, v);
      break;
    case Family::Gnp:
      if (!(spec.param >= 0.0 && spec.param <= 1.0)) {
        throw InstanceError("gnp probability must lie in [0, 1]");
      }
      edges = detail::gnp_edges(n, spec.param, rng);
      break;
    case Family::RandomRegular: {
      const double dp = spec.param;
      if (!(dp >= 0.0) || dp != std::floor(dp)) {
        throw InstanceError("regular degree must be a non-negative integer");
      }
      const auto d = static_cast<std::size_t>(dp);
      if (d >= n) throw InstanceError("regular degree must be below n");
      if ((n * d) % 2 != 0) throw InstanceError("regular graph needs n*d even");
      if (d + 1 == n) {
        for (std::uint64_t u = 0; u < n; ++u)
          for (std::uint64_t v = u + 1; v < n; ++v) edges.emplace_back(u, v);
      } else {
        edges = detail::regular_edges(n, d, rng);
      }
      break;
    }
  }
  return detail::from_edges(n, edges);
}

}  // namespace sleepcolor
