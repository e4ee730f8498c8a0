#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "sleepcolor/errors.hpp"
#include "sleepcolor/graph.hpp"
#include "sleepcolor/metrics.hpp"
#include "sleepcolor/rng.hpp"
#include "sleepcolor/simcore.hpp"

namespace sleepcolor {

/// Outcome of one phase run on a (sub-)instance.
struct PhaseResult {
  Coloring coloring;                       // indexed like the phase input
  ColoringInstance residual;               // uncolored nodes, current lists
  std::vector<NodeIndex> residual_nodes;   // residual index -> input index
  Trace trace;                             // phase-local rounds, starting at 1
  Round rounds = 0;                        // rounds the phase occupies
  bool complete = true;
  RunMetrics metrics;
};

struct ColorMessage {
  enum class Kind : std::uint8_t { Propose, Adopt };
  Kind kind = Kind::Propose;
  Color color = kNoColor;
};

/// The randomized trial-and-prune procedure, one node's view.
///
/// Each iteration takes two rounds. Round one: pick 0 with probability 1/2,
/// otherwise a uniform color of the current list, and send it. Round two: a
/// node whose pick is nonzero and unseen among its neighbors' picks adopts
/// it, tells its neighbors and terminates; every other node removes the
/// colors its neighbors adopted from its list.
///
/// Nodes still uncolored after `iterations` iterations terminate with
/// kNoColor and report their pruned list.
class RandomTrialColoring {
 public:
  enum class Subphase : std::uint8_t { Propose, Resolve };

  struct Input {
    ColorList list;
    bool may_propose = true;  // false: only listens for adoptions and prunes
  };

  struct State {
    ColorList list;
    Color tentative = kNoColor;
    std::vector<Color> seen;
    std::uint32_t iteration = 1;
    Subphase subphase = Subphase::Propose;
    bool may_propose = true;
  };

  struct Output {
    Color color = kNoColor;
    ColorList remaining;
  };

  using Message = ColorMessage;

  explicit RandomTrialColoring(std::uint32_t iterations) : iterations_(iterations) {
    if (iterations_ == 0) throw UsageError("iteration budget must be positive");
  }

  State init(NodeContext&, const Input& in) const {
    State s;
    s.list = in.list;
    s.may_propose = in.may_propose;
    return s;
  }

  void compose(State& s, NodeContext& ctx, Outbox<Message>& out) const {
    if (s.subphase == Subphase::Propose) {
      if (s.list.empty()) {
        throw AlgorithmInvariantViolation("empty color list at node " +
                                          std::to_string(ctx.id.value));
      }
      s.tentative = kNoColor;
      if (s.may_propose && ctx.rng.coin()) {
        s.tentative = s.list[ctx.rng.uniform(s.list.size())];
      }
      out.broadcast({Message::Kind::Propose, s.tentative});
    } else if (adopts(s)) {
      out.broadcast({Message::Kind::Adopt, s.tentative});
    }
  }

  Action<Output> decide(State& s, std::span<const Envelope<Message>> inbox,
                        NodeContext&) const {
    if (s.subphase == Subphase::Propose) {
      s.seen.clear();
      for (const auto& env : inbox) {
        if (env.payload.kind == Message::Kind::Propose) s.seen.push_back(env.payload.color);
      }
      std::sort(s.seen.begin(), s.seen.end());
      s.subphase = Subphase::Resolve;
      return Action<Output>::keep_awake();
    }

    if (adopts(s)) return Action<Output>::terminate({s.tentative, {}});

    for (const auto& env : inbox) {
      if (env.payload.kind != Message::Kind::Adopt) continue;
      const auto it = std::lower_bound(s.list.begin(), s.list.end(), env.payload.color);
      if (it != s.list.end() && *it == env.payload.color) s.list.erase(it);
    }
    if (s.iteration == iterations_) return Action<Output>::terminate({kNoColor, s.list});
    ++s.iteration;
    s.subphase = Subphase::Propose;
    return Action<Output>::keep_awake();
  }

 private:
  static bool adopts(const State& s) {
    return s.tentative != kNoColor &&
           !std::binary_search(s.seen.begin(), s.seen.end(), s.tentative);
  }

  std::uint32_t iterations_;
};

namespace detail {

inline PhaseResult split_residual(const ColoringInstance& inst, PhaseResult res,
                                  const std::vector<ColorList>& current_lists) {
  for (NodeIndex v = 0; v < inst.size(); ++v) {
    if (res.coloring[v] == kNoColor) res.residual_nodes.push_back(v);
  }
  res.residual = induced_instance(inst, res.residual_nodes, current_lists);
  return res;
}

}  // namespace detail

/// Runs `iterations` randomized iterations on every node of `inst`.
inline PhaseResult phase1(const ColoringInstance& inst, std::uint32_t iterations,
                          std::uint64_t seed, const SimOptions& opt = {}) {
  RandomTrialColoring program(iterations);
  std::vector<RandomTrialColoring::Input> inputs;
  inputs.reserve(inst.size());
  for (const ColorList& l : inst.lists) inputs.push_back({l, true});

  auto sim = run_simulation(inst.graph, program, std::span<const RandomTrialColoring::Input>(inputs),
                            seed, opt);

  PhaseResult res;
  res.complete = sim.complete;
  res.coloring.assign(inst.size(), kNoColor);
  std::vector<ColorList> lists(inst.size());
  for (NodeIndex v = 0; v < inst.size(); ++v) {
    res.coloring[v] = sim.outputs[v].color;
    lists[v] = sim.termination_round[v] == 0 ? inst.lists[v] : sim.outputs[v].remaining;
  }
  res.trace = std::move(sim.trace);
  res.trace.phases.push_back({"phase1", 1});
  res.rounds = sim.last_round;
  res.metrics = collect(res.trace, res.coloring, inst, iterations);
  return detail::split_residual(inst, std::move(res), lists);
}

/// Degree reduction: extra randomized iterations restricted to the part of
/// the graph around nodes whose uncolored degree is at least `threshold`.
///
/// Per iteration the proposers are the high-degree nodes and their uncolored
/// neighbors; the remaining uncolored neighbors of proposers only listen
/// for adoptions. Everyone else sleeps. Each iteration is a two-round
/// sub-run; iteration k occupies phase-local rounds 2k-1 and 2k.
/// `metrics.phase2_incomplete` is set when the cap is reached with a node
/// still at or above the threshold.
inline PhaseResult phase2_degree_reduction(const ColoringInstance& inst, std::size_t threshold,
                                           std::uint32_t iteration_cap, std::uint64_t seed,
                                           const SimOptions& opt = {}) {
  if (threshold == 0) throw UsageError("phase-2 threshold must be positive");
  const std::size_t n = inst.size();
  PhaseResult res;
  res.coloring.assign(n, kNoColor);
  std::vector<ColorList> lists = inst.lists;
  std::vector<std::size_t> live_degree(n);
  for (NodeIndex v = 0; v < n; ++v) live_degree[v] = inst.graph.degree(v);

  TraceComposer composer(inst.graph.ids(), opt.record_messages);
  composer.mark("phase2", 1);

  auto high_nodes = [&] {
    std::vector<NodeIndex> high;
    for (NodeIndex v = 0; v < n; ++v) {
      if (res.coloring[v] == kNoColor && live_degree[v] >= threshold) high.push_back(v);
    }
    return high;
  };

  RandomTrialColoring program(1);
  std::uint32_t iteration = 0;
  std::vector<char> role(n);  // 0 idle, 1 listener, 2 proposer
  for (; iteration < iteration_cap; ++iteration) {
    const auto high = high_nodes();
    if (high.empty()) break;
    const Round offset = 2 * static_cast<Round>(iteration);
    if (offset + 2 > opt.round_cap) {
      res.complete = false;
      break;
    }

    std::fill(role.begin(), role.end(), 0);
    for (NodeIndex h : high) {
      role[h] = 2;
      for (NodeIndex u : inst.graph.neighbors(h))
        if (res.coloring[u] == kNoColor) role[u] = 2;
    }
    for (NodeIndex v = 0; v < n; ++v) {
      if (role[v] != 2) continue;
      for (NodeIndex u : inst.graph.neighbors(v))
        if (res.coloring[u] == kNoColor && role[u] == 0) role[u] = 1;
    }
    std::vector<NodeIndex> members;
    for (NodeIndex v = 0; v < n; ++v)
      if (role[v] != 0) members.push_back(v);

    const Graph sub = inst.graph.induced(members);
    std::vector<RandomTrialColoring::Input> inputs;
    inputs.reserve(members.size());
    for (NodeIndex v : members) inputs.push_back({lists[v], role[v] == 2});

    SimOptions sub_opt = opt;
    sub_opt.round_cap = 2;
    auto sim = run_simulation(sub, program, std::span<const RandomTrialColoring::Input>(inputs),
                              derive_seed(seed, iteration + 1), sub_opt);
    composer.append(sim.trace, offset, members);
    for (std::size_t i = 0; i < members.size(); ++i) {
      const NodeIndex v = members[i];
      if (sim.outputs[i].color != kNoColor) {
        res.coloring[v] = sim.outputs[i].color;
        for (NodeIndex u : inst.graph.neighbors(v)) --live_degree[u];
      } else {
        lists[v] = sim.outputs[i].remaining;
      }
    }
    res.rounds = offset + sim.last_round;
  }

  res.trace = composer.take();
  res.metrics = collect(res.trace, res.coloring, inst, 0);
  res.metrics.phase2_iterations = iteration;
  res.metrics.phase2_incomplete = !high_nodes().empty();
  return detail::split_residual(inst, std::move(res), lists);
}

}  // namespace sleepcolor
