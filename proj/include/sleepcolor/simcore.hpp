#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sleepcolor/errors.hpp"
#include "sleepcolor/graph.hpp"
#include "sleepcolor/rng.hpp"

namespace sleepcolor {

/// Round index. Rounds are numbered from 1.
using Round = std::uint64_t;

enum class StatusKind : std::uint8_t { Awake, Sleeping, Terminated };

struct NodeStatus {
  StatusKind kind = StatusKind::Awake;
  Round wake_round = 0;  // meaningful only while Sleeping

  static constexpr NodeStatus awake() { return {StatusKind::Awake, 0}; }
  static constexpr NodeStatus sleeping(Round wake) { return {StatusKind::Sleeping, wake}; }
  static constexpr NodeStatus terminated() { return {StatusKind::Terminated, 0}; }

  friend constexpr bool operator==(NodeStatus, NodeStatus) = default;
};

/// A message crosses an edge in a round only if both endpoints are awake in it.
[[nodiscard]] constexpr bool deliverable(NodeStatus sender, NodeStatus receiver) noexcept {
  return sender.kind == StatusKind::Awake && receiver.kind == StatusKind::Awake;
}

template <class Msg>
struct Envelope {
  NodeIndex from;
  Msg payload;
};

/// Messages a node emits in the send step of a round.
template <class Msg>
class Outbox {
 public:
  void broadcast(Msg m) { broadcast_ = std::move(m); }
  void send(NodeIndex to, Msg m) { direct_.emplace_back(to, std::move(m)); }

  void clear() {
    broadcast_.reset();
    direct_.clear();
  }
  [[nodiscard]] bool empty() const noexcept { return !broadcast_ && direct_.empty(); }
  [[nodiscard]] const std::optional<Msg>& broadcast_message() const noexcept { return broadcast_; }
  [[nodiscard]] const std::vector<std::pair<NodeIndex, Msg>>& direct() const noexcept {
    return direct_;
  }

 private:
  std::optional<Msg> broadcast_;
  std::vector<std::pair<NodeIndex, Msg>> direct_;
};

enum class ActionKind : std::uint8_t { Continue, Sleep, Terminate };

/// What a node does at the end of a round, after it has received.
template <class Output>
struct Action {
  ActionKind kind = ActionKind::Continue;
  Round sleep_rounds = 0;
  Output output{};

  static Action keep_awake() { return {}; }
  static Action sleep(Round r) { return {ActionKind::Sleep, r, Output{}}; }
  static Action terminate(Output out) { return {ActionKind::Terminate, 0, std::move(out)}; }

  /// Sleeps until `target` (> now), or stays awake if target is the next round.
  static Action resume_at(Round now, Round target) {
    return target == now + 1 ? keep_awake() : sleep(target - now - 1);
  }
};

/// View of the world a node is allowed to see during a round.
struct NodeContext {
  NodeIndex index;
  NodeId id;
  Round round;
  std::span<const NodeIndex> neighbors;
  Rng& rng;
};

/// A node program is a state machine with a send step and a receive/decide
/// step per awake round. It must not keep per-node data outside State.
template <class P>
concept NodeProgram = requires(P& p, typename P::State& s, const typename P::Input& in,
                               NodeContext& ctx, Outbox<typename P::Message>& out,
                               std::span<const Envelope<typename P::Message>> inbox) {
  { p.init(ctx, in) } -> std::same_as<typename P::State>;
  p.compose(s, ctx, out);
  { p.decide(s, inbox, ctx) } -> std::same_as<Action<typename P::Output>>;
};

// ---------------------------------------------------------------------------
// Trace

enum class TraceAct : std::uint8_t { Send, Sleep, Terminate, Continue };

/// One awake (round, node) pair. `status` is the node's status after the
/// round's action has been applied.
struct NodeEvent {
  Round round;
  NodeIndex node;
  StatusKind status;
  TraceAct act;
  Round sleep_rounds;
  bool sent;  // the node emitted at least one message this round

  friend bool operator==(const NodeEvent&, const NodeEvent&) = default;
};

struct MessageEvent {
  Round round;
  NodeIndex from;
  NodeIndex to;
  bool delivered;

  friend bool operator==(const MessageEvent&, const MessageEvent&) = default;
};

struct PhaseMark {
  std::string name;
  Round start;

  friend bool operator==(const PhaseMark&, const PhaseMark&) = default;
};

struct Trace {
  std::vector<NodeId> ids;  // NodeIndex -> NodeId, for printing
  std::vector<NodeEvent> events;
  std::vector<MessageEvent> messages;
  std::vector<PhaseMark> phases;
  bool messages_recorded = false;

  friend bool operator==(const Trace&, const Trace&) = default;
};

inline char status_letter(StatusKind k) {
  switch (k) {
    case StatusKind::Awake: return 'A';
    case StatusKind::Sleeping: return 'S';
    case StatusKind::Terminated: return 'T';
  }
  return '?';
}

/// Text form:
///   t=<round> v=<id> status=<A|S|T> act=<send|sleep:r|term|cont>
///   msg t=<round> <u>-><v> delivered=<0|1>
/// Events are grouped by round; node lines precede message lines.
inline void write_trace(const Trace& trace, std::ostream& os) {
  for (const PhaseMark& p : trace.phases) os << "# " << p.name << " start=" << p.start << '\n';
  std::size_t ei = 0;
  std::size_t mi = 0;
  while (ei < trace.events.size() || mi < trace.messages.size()) {
    Round r = ei < trace.events.size() ? trace.events[ei].round : trace.messages[mi].round;
    if (mi < trace.messages.size()) r = std::min(r, trace.messages[mi].round);
    for (; ei < trace.events.size() && trace.events[ei].round == r; ++ei) {
      const NodeEvent& e = trace.events[ei];
      os << "t=" << e.round << " v=" << trace.ids[e.node] << " status=" << status_letter(e.status)
         << " act=";
      switch (e.act) {
        case TraceAct::Send: os << "send"; break;
        case TraceAct::Sleep: os << "sleep:" << e.sleep_rounds; break;
        case TraceAct::Terminate: os << "term"; break;
        case TraceAct::Continue: os << "cont"; break;
      }
      os << '\n';
    }
    for (; mi < trace.messages.size() && trace.messages[mi].round == r; ++mi) {
      const MessageEvent& m = trace.messages[mi];
      os << "msg t=" << m.round << ' ' << trace.ids[m.from] << "->" << trace.ids[m.to]
         << " delivered=" << (m.delivered ? 1 : 0) << '\n';
    }
  }
}

// ---------------------------------------------------------------------------
// Kernel

struct SimOptions {
  Round round_cap = 1'000'000;
  bool record_messages = false;
  /// Test hook: visit the awake nodes of every round in a shuffled order.
  std::optional<std::uint64_t> shuffle_seed{};
};

template <class Output>
struct SimResult {
  std::vector<Output> outputs;  // default value for nodes that never terminated
  std::vector<Round> termination_round;  // 0 = not terminated
  std::vector<std::uint64_t> awake_rounds;
  Trace trace;
  Round last_round = 0;  // last round in which some node was awake
  bool complete = false;
};

/// Runs `program` on every node of `graph` in the SLEEPING model.
///
/// Every round: all awake nodes compose their messages, messages between
/// awake endpoints are delivered (others are dropped), then every awake node
/// decides. Rounds in which nobody is awake are skipped but still counted.
/// Stops when all nodes terminated or the next round would exceed the cap;
/// the latter yields `complete == false`.
template <NodeProgram P>
SimResult<typename P::Output> run_simulation(const Graph& graph, P& program,
                                             std::span<const typename P::Input> inputs,
                                             std::uint64_t seed, const SimOptions& opt = {}) {
  using Msg = typename P::Message;
  using State = typename P::State;
  using Output = typename P::Output;

  const std::size_t n = graph.size();
  if (inputs.size() != n) throw ProgramError("one input per node required");
  if (opt.round_cap == 0) throw ProgramError("round cap must be positive");

  SimResult<Output> res;
  res.outputs.resize(n);
  res.termination_round.assign(n, 0);
  res.awake_rounds.assign(n, 0);
  res.trace.ids.assign(graph.ids().begin(), graph.ids().end());
  res.trace.messages_recorded = opt.record_messages;

  std::vector<Rng> rngs;
  rngs.reserve(n);
  for (NodeIndex v = 0; v < n; ++v) rngs.push_back(node_rng(seed, graph.id(v).value));

  auto context = [&](NodeIndex v, Round r) {
    return NodeContext{v, graph.id(v), r, graph.neighbors(v), rngs[v]};
  };

  std::vector<State> states;
  states.reserve(n);
  for (NodeIndex v = 0; v < n; ++v) {
    NodeContext ctx = context(v, 0);
    states.push_back(program.init(ctx, inputs[v]));
  }

  std::vector<NodeStatus> status(n, NodeStatus::awake());
  std::vector<NodeIndex> awake(n);
  for (NodeIndex v = 0; v < n; ++v) awake[v] = v;
  std::map<Round, std::vector<NodeIndex>> wakeups;
  std::vector<Outbox<Msg>> outbox(n);
  std::vector<std::vector<Envelope<Msg>>> inbox(n);
  std::vector<NodeIndex> order;
  std::vector<NodeIndex> next_awake;
  std::optional<Rng> shuffler;
  if (opt.shuffle_seed) shuffler.emplace(*opt.shuffle_seed);

  std::size_t live = n;
  Round round = 1;
  while (live > 0) {
    if (awake.empty()) round = wakeups.begin()->first;
    if (round > opt.round_cap) break;
    if (auto it = wakeups.find(round); it != wakeups.end()) {
      for (NodeIndex v : it->second) {
        status[v] = NodeStatus::awake();
        awake.push_back(v);
      }
      wakeups.erase(it);
      std::sort(awake.begin(), awake.end());
    }

    order = awake;
    if (shuffler) {
      for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[shuffler->uniform(i)]);
    }

    for (NodeIndex v : order) {
      outbox[v].clear();
      NodeContext ctx = context(v, round);
      program.compose(states[v], ctx, outbox[v]);
    }

    const std::size_t first_msg = res.trace.messages.size();
    auto deliver = [&](NodeIndex from, NodeIndex to, const Msg& m) {
      const bool ok = deliverable(status[from], status[to]);
      if (ok) inbox[to].push_back(Envelope<Msg>{from, m});
      if (opt.record_messages) res.trace.messages.push_back({round, from, to, ok});
    };
    for (NodeIndex v : awake) {
      const Outbox<Msg>& out = outbox[v];
      if (const auto& b = out.broadcast_message()) {
        for (NodeIndex u : graph.neighbors(v)) deliver(v, u, *b);
      }
      for (const auto& [to, m] : out.direct()) {
        if (to >= n || !graph.adjacent(v, to)) {
          throw ProgramError("node " + std::to_string(graph.id(v).value) +
                             " sent to a non-neighbor at round " + std::to_string(round));
        }
        deliver(v, to, m);
      }
    }
    if (opt.record_messages) {
      std::stable_sort(res.trace.messages.begin() + static_cast<std::ptrdiff_t>(first_msg),
                       res.trace.messages.end(), [](const MessageEvent& a, const MessageEvent& b) {
                         return std::pair(a.from, a.to) < std::pair(b.from, b.to);
                       });
    }
    for (NodeIndex v : awake) {
      std::sort(inbox[v].begin(), inbox[v].end(),
                [](const Envelope<Msg>& a, const Envelope<Msg>& b) { return a.from < b.from; });
    }

    const std::size_t first_event = res.trace.events.size();
    next_awake.clear();
    for (NodeIndex v : order) {
      NodeContext ctx = context(v, round);
      Action<Output> action =
          program.decide(states[v], std::span<const Envelope<Msg>>(inbox[v]), ctx);
      ++res.awake_rounds[v];
      const bool sent = !outbox[v].empty() &&
                        (outbox[v].broadcast_message() ? !graph.neighbors(v).empty()
                                                       : !outbox[v].direct().empty());
      NodeEvent ev{round, v, StatusKind::Awake, sent ? TraceAct::Send : TraceAct::Continue, 0, sent};
      switch (action.kind) {
        case ActionKind::Continue:
          next_awake.push_back(v);
          break;
        case ActionKind::Sleep:
          if (action.sleep_rounds == 0) {
            throw ProgramError("sleep duration must be positive");
          }
          status[v] = NodeStatus::sleeping(round + action.sleep_rounds + 1);
          wakeups[round + action.sleep_rounds + 1].push_back(v);
          ev.status = StatusKind::Sleeping;
          ev.act = TraceAct::Sleep;
          ev.sleep_rounds = action.sleep_rounds;
          break;
        case ActionKind::Terminate:
          status[v] = NodeStatus::terminated();
          res.outputs[v] = std::move(action.output);
          res.termination_round[v] = round;
          --live;
          ev.status = StatusKind::Terminated;
          ev.act = TraceAct::Terminate;
          break;
      }
      res.trace.events.push_back(ev);
    }
    std::sort(res.trace.events.begin() + static_cast<std::ptrdiff_t>(first_event),
              res.trace.events.end(),
              [](const NodeEvent& a, const NodeEvent& b) { return a.node < b.node; });
    for (NodeIndex v : awake) inbox[v].clear();

    res.last_round = round;
    std::sort(next_awake.begin(), next_awake.end());
    awake.swap(next_awake);
    ++round;
  }
  res.complete = live == 0;
  return res;
}

/// Stitches the traces of consecutive sub-runs (phases, iterations) into one
/// global trace. A node that ended a sub-run with `term` but shows up in a
/// later one did not really terminate: that event is rewritten to the sleep
/// (or plain continue) that bridges the gap.
class TraceComposer {
 public:
  explicit TraceComposer(std::span<const NodeId> ids, bool messages_recorded)
      : last_event_(ids.size(), kNone) {
    trace_.ids.assign(ids.begin(), ids.end());
    trace_.messages_recorded = messages_recorded;
  }

  void mark(std::string name, Round start) { trace_.phases.push_back({std::move(name), start}); }

  /// Appends `local`, shifting rounds by `offset` and mapping local node
  /// indices through `to_global`. Sub-runs must be appended in time order.
  void append(const Trace& local, Round offset, std::span<const NodeIndex> to_global) {
    for (const NodeEvent& e : local.events) {
      const NodeIndex g = to_global[e.node];
      const Round r = e.round + offset;
      if (last_event_[g] != kNone) {
        NodeEvent& prev = trace_.events[last_event_[g]];
        if (prev.act == TraceAct::Terminate) {
          if (r <= prev.round) throw InternalError("sub-run traces appended out of order");
          const Round gap = r - prev.round - 1;
          if (gap == 0) {
            prev.status = StatusKind::Awake;
            prev.act = prev.sent ? TraceAct::Send : TraceAct::Continue;
          } else {
            prev.status = StatusKind::Sleeping;
            prev.act = TraceAct::Sleep;
            prev.sleep_rounds = gap;
          }
        }
      }
      NodeEvent out = e;
      out.node = g;
      out.round = r;
      last_event_[g] = trace_.events.size();
      trace_.events.push_back(out);
    }
    for (const MessageEvent& m : local.messages) {
      trace_.messages.push_back({m.round + offset, to_global[m.from], to_global[m.to], m.delivered});
    }
  }

  [[nodiscard]] const Trace& trace() const noexcept { return trace_; }
  Trace take() { return std::move(trace_); }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  Trace trace_;
  std::vector<std::size_t> last_event_;
};

}  // namespace sleepcolor
