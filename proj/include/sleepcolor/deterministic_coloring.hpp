#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "sleepcolor/errors.hpp"
#include "sleepcolor/graph.hpp"
#include "sleepcolor/metrics.hpp"
#include "sleepcolor/simcore.hpp"

namespace sleepcolor {

// ---------------------------------------------------------------------------
// Interim coloring: Linial-style palette reduction with polynomial
// cover-free families.
//
// A color x < q^(d+1) is read as the polynomial P_x of degree <= d over
// GF(q) whose coefficients are the base-q digits of x. Two distinct colors
// agree on at most d points, so with q > d*Delta every node finds a point a
// where P_x(a) differs from all neighbors' values; its new color is
// a*q + P_x(a) < q^2.

struct LinialStep {
  std::uint64_t q = 0;  // prime field size
  unsigned degree = 0;  // polynomial degree d
};

struct LinialSchedule {
  std::vector<LinialStep> steps;
  std::uint64_t palette = 1;  // palette size after the last step
};

namespace detail {

inline bool is_prime(std::uint64_t x) {
  if (x < 2) return false;
  for (std::uint64_t p = 2; p * p <= x; ++p)
    if (x % p == 0) return false;
  return true;
}

inline std::uint64_t next_prime(std::uint64_t x) {
  while (!is_prime(x)) ++x;
  return x;
}

/// Smallest r with r^k >= m.
inline std::uint64_t ceil_root(unsigned __int128 m, unsigned k) {
  auto pow_at_least = [&](std::uint64_t r) {
    unsigned __int128 acc = 1;
    for (unsigned i = 0; i < k; ++i) {
      acc *= r;
      if (acc >= m) return true;
    }
    return acc >= m;
  };
  std::uint64_t lo = 1;
  std::uint64_t hi = 1;
  while (!pow_at_least(hi)) hi *= 2;
  while (lo < hi) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (pow_at_least(mid)) hi = mid;
    else lo = mid + 1;
  }
  return lo;
}

inline std::uint64_t eval_color_poly(std::uint64_t color, const LinialStep& step, std::uint64_t a) {
  // Horner over the base-q digits, most significant first.
  std::vector<std::uint64_t> digits(step.degree + 1, 0);
  for (unsigned i = 0; i <= step.degree; ++i) {
    digits[i] = color % step.q;
    color /= step.q;
  }
  std::uint64_t acc = 0;
  for (unsigned i = step.degree + 1; i-- > 0;) acc = (acc * a + digits[i]) % step.q;
  return acc;
}

}  // namespace detail

/// Reduction schedule for identifiers of `id_bits` bits on graphs of
/// maximum degree `max_degree`. Every step strictly shrinks the palette;
/// the final palette is at most 16 * max_degree^2 (max_degree >= 1), and 1
/// when max_degree == 0.
inline LinialSchedule linial_schedule(unsigned id_bits, std::size_t max_degree) {
  LinialSchedule s;
  if (max_degree == 0) return s;
  unsigned __int128 m = static_cast<unsigned __int128>(1) << id_bits;
  for (;;) {
    std::uint64_t best_q = 0;
    unsigned best_d = 0;
    for (unsigned d = 1; d < 64; ++d) {
      const std::uint64_t lo = std::max<std::uint64_t>(max_degree * d + 1, detail::ceil_root(m, d + 1));
      if (best_q != 0 && lo >= best_q) break;
      const std::uint64_t q = detail::next_prime(lo);
      if (best_q == 0 || q < best_q) {
        best_q = q;
        best_d = d;
      }
    }
    const unsigned __int128 next = static_cast<unsigned __int128>(best_q) * best_q;
    if (next >= m) break;
    s.steps.push_back({best_q, best_d});
    m = next;
  }
  s.palette = static_cast<std::uint64_t>(m);
  return s;
}

class LinialReduction {
 public:
  struct Input {
    std::uint64_t color;
  };
  struct State {
    std::uint64_t color;
    std::size_t step = 0;
  };
  using Message = std::uint64_t;
  using Output = std::uint64_t;

  explicit LinialReduction(std::span<const LinialStep> steps) : steps_(steps) {}

  State init(NodeContext&, const Input& in) const { return {in.color, 0}; }

  void compose(State& s, NodeContext&, Outbox<Message>& out) const { out.broadcast(s.color); }

  Action<Output> decide(State& s, std::span<const Envelope<Message>> inbox, NodeContext& ctx) const {
    const LinialStep& step = steps_[s.step];
    std::vector<std::uint64_t> taken;
    std::uint64_t next = 0;
    bool found = false;
    for (std::uint64_t a = 0; a < step.q && !found; ++a) {
      const std::uint64_t mine = detail::eval_color_poly(s.color, step, a);
      bool clash = false;
      for (const auto& env : inbox) {
        if (env.payload == s.color) {
          throw AlgorithmInvariantViolation("interim coloring not proper at node " +
                                            std::to_string(ctx.id.value));
        }
        if (detail::eval_color_poly(env.payload, step, a) == mine) {
          clash = true;
          break;
        }
      }
      if (!clash) {
        next = a * step.q + mine;
        found = true;
      }
    }
    if (!found) {
      throw AlgorithmInvariantViolation("no free evaluation point at node " +
                                        std::to_string(ctx.id.value));
    }
    s.color = next;
    ++s.step;
    if (s.step == steps_.size()) return Action<Output>::terminate(s.color);
    return Action<Output>::keep_awake();
  }

 private:
  std::span<const LinialStep> steps_;
};

struct InterimResult {
  std::vector<std::uint64_t> colors;  // indexed like the input instance
  std::uint64_t palette = 1;
  Trace trace;
  Round rounds = 0;
  bool complete = true;
};

/// Proper coloring with palette O(degree_bound^2) in O(log* N) rounds, all
/// participating nodes awake in each of them. `id_bits` is the identifier
/// size known to every node; `degree_bound` must be at least the graph's
/// maximum degree.
inline InterimResult phase3_interim_coloring(const ColoringInstance& inst, unsigned id_bits,
                                             std::size_t degree_bound, const SimOptions& opt = {}) {
  if (degree_bound < inst.graph.max_degree()) throw UsageError("degree bound below max degree");
  if (inst.size() > 0 && std::bit_width(inst.graph.ids().back().value) > id_bits) {
    throw UsageError("identifier does not fit the announced bit size");
  }
  InterimResult res;
  const LinialSchedule schedule = linial_schedule(id_bits, degree_bound);
  res.palette = schedule.palette;
  res.colors.assign(inst.size(), 0);
  res.trace.ids.assign(inst.graph.ids().begin(), inst.graph.ids().end());
  res.trace.messages_recorded = opt.record_messages;
  if (degree_bound == 0) return res;
  if (schedule.steps.empty()) {
    for (NodeIndex v = 0; v < inst.size(); ++v) res.colors[v] = inst.graph.id(v).value;
    return res;
  }
  LinialReduction program(schedule.steps);
  std::vector<LinialReduction::Input> inputs;
  inputs.reserve(inst.size());
  for (NodeIndex v = 0; v < inst.size(); ++v) inputs.push_back({inst.graph.id(v).value});
  auto sim = run_simulation(inst.graph, program, std::span<const LinialReduction::Input>(inputs), 0, opt);
  res.colors = std::move(sim.outputs);
  res.trace = std::move(sim.trace);
  res.rounds = sim.last_round;
  res.complete = sim.complete;
  return res;
}

// ---------------------------------------------------------------------------
// Tournament reduction over interim classes.
//
// Round 1: every node announces its interim class. Then the classes
// 0..C-1 are the leaves of a balanced binary tree, processed left to right.
// A leaf slot is the round where the nodes of that class pick the smallest
// list color no neighbor has announced. After the left subtree of an
// internal tree node is done there is one announce slot: nodes of the left
// subtree broadcast their final colors while nodes of the right subtree
// listen. Nodes sleep through every other slot. With C classes the
// reduction takes 2C rounds and a node is awake at most ceil(log2 C) + 2
// times.

enum class SlotRole : std::uint8_t { Exchange, Listen, Pick, Announce };

struct ScheduledSlot {
  Round round;
  SlotRole role;

  friend bool operator==(const ScheduledSlot&, const ScheduledSlot&) = default;
};

/// Awake schedule of a node of interim class `cls` among `classes` classes.
inline std::vector<ScheduledSlot> tournament_schedule(std::uint64_t cls, std::uint64_t classes) {
  if (cls >= classes) throw UsageError("interim class outside the palette");
  std::vector<ScheduledSlot> out{{1, SlotRole::Exchange}};
  std::vector<ScheduledSlot> announces;
  std::uint64_t lo = 0;
  std::uint64_t hi = classes;
  Round first_slot = 2;  // round of the first slot in [lo, hi)
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo + 1) / 2;
    const Round announce = first_slot + 2 * (mid - lo) - 1;
    if (cls < mid) {
      announces.push_back({announce, SlotRole::Announce});
      hi = mid;
    } else {
      out.push_back({announce, SlotRole::Listen});
      first_slot = announce + 1;
      lo = mid;
    }
  }
  out.push_back({first_slot, SlotRole::Pick});
  out.insert(out.end(), announces.rbegin(), announces.rend());
  return out;
}

struct TournamentMessage {
  enum class Kind : std::uint8_t { Interim, Final };
  Kind kind;
  std::uint64_t value;
};

class TournamentReduction {
 public:
  struct Input {
    ColorList list;
    std::uint64_t interim;
  };
  struct State {
    ColorList list;
    std::uint64_t interim = 0;
    std::vector<std::uint64_t> neighbor_interim;
    std::vector<Color> heard;
    std::vector<ScheduledSlot> schedule;
    std::size_t position = 0;
    Color color = kNoColor;
  };
  using Message = TournamentMessage;
  using Output = Color;

  explicit TournamentReduction(std::uint64_t classes) : classes_(classes) {}

  State init(NodeContext&, const Input& in) const {
    State s;
    s.list = in.list;
    s.interim = in.interim;
    s.schedule = tournament_schedule(in.interim, classes_);
    return s;
  }

  void compose(State& s, NodeContext& ctx, Outbox<Message>& out) const {
    const ScheduledSlot& slot = current(s, ctx);
    if (slot.role == SlotRole::Exchange) out.broadcast({Message::Kind::Interim, s.interim});
    if (slot.role == SlotRole::Announce) out.broadcast({Message::Kind::Final, s.color});
  }

  Action<Output> decide(State& s, std::span<const Envelope<Message>> inbox, NodeContext& ctx) const {
    const ScheduledSlot& slot = current(s, ctx);
    switch (slot.role) {
      case SlotRole::Exchange:
        for (const auto& env : inbox) {
          if (env.payload.value == s.interim) {
            throw AlgorithmInvariantViolation("interim coloring not proper at node " +
                                              std::to_string(ctx.id.value));
          }
          s.neighbor_interim.push_back(env.payload.value);
        }
        break;
      case SlotRole::Listen:
        for (const auto& env : inbox) {
          if (env.payload.kind == Message::Kind::Final) s.heard.push_back(static_cast<Color>(env.payload.value));
        }
        break;
      case SlotRole::Pick: {
        std::sort(s.heard.begin(), s.heard.end());
        for (Color c : s.list) {
          if (!std::binary_search(s.heard.begin(), s.heard.end(), c)) {
            s.color = c;
            break;
          }
        }
        if (s.color == kNoColor) {
          throw AlgorithmInvariantViolation("no free list color at node " +
                                            std::to_string(ctx.id.value));
        }
        break;
      }
      case SlotRole::Announce:
        break;
    }
    ++s.position;
    if (s.position == s.schedule.size()) return Action<Output>::terminate(s.color);
    return Action<Output>::resume_at(ctx.round, s.schedule[s.position].round);
  }

 private:
  static const ScheduledSlot& current(const State& s, const NodeContext& ctx) {
    const ScheduledSlot& slot = s.schedule[s.position];
    if (slot.round != ctx.round) throw InternalError("node awake outside its schedule");
    return slot;
  }

  std::uint64_t classes_;
};

struct TournamentResult {
  Coloring coloring;
  Trace trace;
  Round rounds = 0;
  bool complete = true;
  std::vector<std::uint64_t> awake_rounds;
};

/// Turns a proper interim coloring with `classes` classes into a list
/// coloring. Deterministic; the result matches sequential greedy in
/// interim-class order.
inline TournamentResult phase3_tournament_reduction(const ColoringInstance& inst,
                                                    std::span<const std::uint64_t> interim,
                                                    std::uint64_t classes,
                                                    const SimOptions& opt = {}) {
  if (interim.size() != inst.size()) throw UsageError("one interim color per node required");
  TournamentReduction program(classes);
  std::vector<TournamentReduction::Input> inputs;
  inputs.reserve(inst.size());
  for (NodeIndex v = 0; v < inst.size(); ++v) inputs.push_back({inst.lists[v], interim[v]});
  auto sim = run_simulation(inst.graph, program, std::span<const TournamentReduction::Input>(inputs),
                            0, opt);
  return {std::move(sim.outputs), std::move(sim.trace), sim.last_round, sim.complete,
          std::move(sim.awake_rounds)};
}

/// Overload that sizes the tree to the classes actually present.
inline TournamentResult phase3_tournament_reduction(const ColoringInstance& inst,
                                                    std::span<const std::uint64_t> interim,
                                                    const SimOptions& opt = {}) {
  std::uint64_t classes = 1;
  for (auto c : interim) classes = std::max(classes, c + 1);
  return phase3_tournament_reduction(inst, interim, classes, opt);
}

}  // namespace sleepcolor
