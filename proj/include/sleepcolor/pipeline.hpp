#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "sleepcolor/deterministic_coloring.hpp"
#include "sleepcolor/errors.hpp"
#include "sleepcolor/graph.hpp"
#include "sleepcolor/metrics.hpp"
#include "sleepcolor/random_coloring.hpp"
#include "sleepcolor/rng.hpp"
#include "sleepcolor/simcore.hpp"

namespace sleepcolor {

struct PipelineConfig {
  std::uint32_t k1 = 0;              // randomized iterations; 0 = derive from k1_coefficient
  double k1_coefficient = 3.0;       // K = max(1, ceil(coef * log2 log2 n))
  std::uint64_t phase2_threshold = 0;  // 0 = max(8, ceil(log2(n)^7))
  std::uint32_t phase2_iteration_cap = 32;
  bool phase3_enabled = true;
  std::uint64_t seed = 0;
  Round round_cap = 0;  // 0 = 10 * log2(n)^14 + 100
  bool record_messages = false;
};

namespace detail {

inline double log2_at_least_one(std::size_t n) {
  return std::log2(static_cast<double>(std::max<std::size_t>(n, 2)));
}

inline std::uint64_t saturating(double x) {
  constexpr double kMax = 1e18;
  return static_cast<std::uint64_t>(std::ceil(std::min(x, kMax)));
}

}  // namespace detail

inline std::uint32_t resolve_k1(const PipelineConfig& cfg, std::size_t n) {
  if (cfg.k1 > 0) return cfg.k1;
  if (!(cfg.k1_coefficient > 0.0)) throw UsageError("k1 coefficient must be positive");
  const double k = std::ceil(cfg.k1_coefficient * std::log2(detail::log2_at_least_one(n)));
  return static_cast<std::uint32_t>(std::clamp(k, 1.0, 1e6));
}

inline std::uint64_t resolve_threshold(const PipelineConfig& cfg, std::size_t n) {
  if (cfg.phase2_threshold > 0) return cfg.phase2_threshold;
  return std::max<std::uint64_t>(8, detail::saturating(std::pow(detail::log2_at_least_one(n), 7)));
}

inline Round resolve_round_cap(const PipelineConfig& cfg, std::size_t n) {
  if (cfg.round_cap > 0) return cfg.round_cap;
  const double lg = n <= 1 ? 0.0 : std::log2(static_cast<double>(n));
  return detail::saturating(10.0 * std::pow(lg, 14) + 100.0);
}

/// Flat `key=value` lines with every parameter resolved for `n` nodes.
inline std::string config_key_values(const PipelineConfig& cfg, std::size_t n) {
  std::ostringstream os;
  os << "k1=" << resolve_k1(cfg, n) << '\n'
     << "k1_coefficient=" << cfg.k1_coefficient << '\n'
     << "phase2_threshold=" << resolve_threshold(cfg, n) << '\n'
     << "phase2_iteration_cap=" << cfg.phase2_iteration_cap << '\n'
     << "phase3_enabled=" << (cfg.phase3_enabled ? 1 : 0) << '\n'
     << "seed=" << cfg.seed << '\n'
     << "round_cap=" << resolve_round_cap(cfg, n) << '\n';
  return os.str();
}

struct PipelineResult {
  Coloring coloring;
  RunMetrics metrics;
  Trace trace;
};

/// Three globally scheduled phases:
///   1. K randomized iterations on every node (rounds 1..2K);
///   2. degree reduction around nodes whose uncolored degree is at least
///      the threshold, starting right after phase 1;
///   3. interim coloring of what is left, then the tournament reduction.
/// Nodes colored in a phase terminate in it; the others sleep until the
/// next phase starts. Throws RunIncomplete when the round cap is hit.
inline PipelineResult run_pipeline(const ColoringInstance& inst, const PipelineConfig& cfg) {
  validate_instance(inst);
  const std::size_t n = inst.size();
  const std::uint32_t k1 = resolve_k1(cfg, n);
  const std::uint64_t threshold = resolve_threshold(cfg, n);
  const Round cap = resolve_round_cap(cfg, n);

  TraceComposer composer(inst.graph.ids(), cfg.record_messages);
  Coloring coloring(n, kNoColor);
  bool phase2_incomplete = false;
  std::uint32_t phase2_iterations = 0;
  std::uint64_t palette = 0;

  auto finish = [&] {
    PipelineResult out;
    out.coloring = coloring;
    out.trace = composer.take();
    out.metrics = collect(out.trace, out.coloring, inst, k1);
    out.metrics.phase2_incomplete = phase2_incomplete;
    out.metrics.phase2_iterations = phase2_iterations;
    out.metrics.interim_palette = palette;
    return out;
  };
  auto fail = [&] {
    PipelineResult partial = finish();
    throw RunIncomplete(cap, std::move(partial.coloring), std::move(partial.metrics));
  };
  auto sim_options = [&](Round offset) {
    SimOptions o;
    o.round_cap = offset >= cap ? 0 : cap - offset;
    o.record_messages = cfg.record_messages;
    return o;
  };

  // Phase 1.
  composer.mark("phase1", 1);
  PhaseResult p1 = phase1(inst, k1, derive_seed(cfg.seed, 1), sim_options(0));
  std::vector<NodeIndex> all(n);
  for (NodeIndex v = 0; v < n; ++v) all[v] = v;
  composer.append(p1.trace, 0, all);
  for (NodeIndex v = 0; v < n; ++v) coloring[v] = p1.coloring[v];
  if (!p1.complete) fail();

  // Phase 2.
  Round next_start = 2 * static_cast<Round>(k1) + 1;
  ColoringInstance residual = std::move(p1.residual);
  std::vector<NodeIndex> to_global = std::move(p1.residual_nodes);
  if (residual.size() > 0) {
    if (next_start > cap) fail();
    composer.mark("phase2", next_start);
    PhaseResult p2 = phase2_degree_reduction(residual, threshold, cfg.phase2_iteration_cap,
                                             derive_seed(cfg.seed, 2), sim_options(next_start - 1));
    composer.append(p2.trace, next_start - 1, to_global);
    for (NodeIndex i = 0; i < residual.size(); ++i) {
      if (p2.coloring[i] != kNoColor) coloring[to_global[i]] = p2.coloring[i];
    }
    phase2_incomplete = p2.metrics.phase2_incomplete;
    phase2_iterations = p2.metrics.phase2_iterations;
    if (!p2.complete) fail();
    next_start += p2.rounds;

    std::vector<NodeIndex> next_global;
    next_global.reserve(p2.residual_nodes.size());
    for (NodeIndex i : p2.residual_nodes) next_global.push_back(to_global[i]);
    residual = std::move(p2.residual);
    to_global = std::move(next_global);
  }

  // Phase 3.
  if (residual.size() > 0 && cfg.phase3_enabled) {
    if (next_start > cap) fail();
    composer.mark("phase3", next_start);
    InterimResult interim = phase3_interim_coloring(residual, inst.graph.id_bit_size(),
                                                    residual.graph.max_degree(),
                                                    sim_options(next_start - 1));
    palette = interim.palette;
    composer.append(interim.trace, next_start - 1, to_global);
    if (!interim.complete) fail();
    next_start += interim.rounds;

    if (next_start > cap) fail();
    composer.mark("phase3-reduction", next_start);
    TournamentResult reduction = phase3_tournament_reduction(
        residual, interim.colors, interim.palette, sim_options(next_start - 1));
    composer.append(reduction.trace, next_start - 1, to_global);
    for (NodeIndex i = 0; i < residual.size(); ++i) {
      if (reduction.coloring[i] != kNoColor) coloring[to_global[i]] = reduction.coloring[i];
    }
    if (!reduction.complete) fail();
  }

  return finish();
}

}  // namespace sleepcolor
