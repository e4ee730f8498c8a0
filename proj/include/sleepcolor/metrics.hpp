#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "sleepcolor/errors.hpp"
#include "sleepcolor/graph.hpp"
#include "sleepcolor/simcore.hpp"

namespace sleepcolor {

using AwakeAverage = boost::rational<std::int64_t>;

struct NodeMetrics {
  std::uint64_t awake_rounds = 0;
  Round termination_round = 0;  // 0 = never terminated
  std::string phase;            // name of the phase window it terminated in

  friend bool operator==(const NodeMetrics&, const NodeMetrics&) = default;
};

struct PhaseStats {
  std::string name;
  Round start = 0;
  Round rounds = 0;  // from start to the last awake round inside the window
  std::size_t participants = 0;
  std::uint64_t worst_awake = 0;

  friend bool operator==(const PhaseStats&, const PhaseStats&) = default;
};

struct RunMetrics {
  std::vector<NodeMetrics> per_node;
  std::uint64_t worst_case_awake = 0;
  AwakeAverage average_awake{0};
  Round total_rounds = 0;
  /// Entry i-1 counts nodes colored during randomized iteration i.
  std::vector<std::uint64_t> decay_histogram;
  std::size_t survived_phase1 = 0;
  Validity validity = Validity::Invalid;
  bool phase2_incomplete = false;
  std::uint32_t phase2_iterations = 0;
  std::uint64_t interim_palette = 0;
  std::vector<PhaseStats> phases;

  [[nodiscard]] double average_awake_value() const {
    return boost::rational_cast<double>(average_awake);
  }

  /// "num/den" exact form.
  [[nodiscard]] std::string average_awake_exact() const {
    return std::to_string(average_awake.numerator()) + "/" +
           std::to_string(average_awake.denominator());
  }

  /// Six-digit decimal form.
  [[nodiscard]] std::string average_awake_decimal() const {
    std::ostringstream os;
    os << std::fixed << std::setprecision(6) << average_awake_value();
    return os.str();
  }

  /// Nodes still uncolored after randomized iteration i (1-based).
  [[nodiscard]] std::uint64_t uncolored_after(std::size_t i) const {
    std::uint64_t colored = 0;
    for (std::size_t k = 0; k < std::min(i, decay_histogram.size()); ++k) colored += decay_histogram[k];
    return per_node.size() - colored;
  }

  friend bool operator==(const RunMetrics&, const RunMetrics&) = default;
};

/// Raised when the round cap is hit before every node terminated. Carries
/// whatever was computed up to that point.
class RunIncomplete : public Error {
 public:
  RunIncomplete(Round cap, Coloring partial, RunMetrics metrics)
      : Error("incomplete: round cap " + std::to_string(cap) + " reached"),
        partial_(std::move(partial)),
        metrics_(std::move(metrics)) {}

  [[nodiscard]] const Coloring& partial() const noexcept { return partial_; }
  [[nodiscard]] const RunMetrics& metrics() const noexcept { return metrics_; }

 private:
  Coloring partial_;
  RunMetrics metrics_;
};

/// Derives the run's complexity figures from the trace alone; the coloring
/// is only used for the validity verdict and consistency checks.
///
/// Phase windows come from the trace's phase marks. The window named
/// "phase1" feeds the decay histogram of length `phase1_iterations`.
inline RunMetrics collect(const Trace& trace, const Coloring& coloring,
                          const ColoringInstance& instance, std::uint32_t phase1_iterations) {
  const std::size_t n = instance.size();
  if (trace.ids.size() != n || coloring.size() != n ||
      !std::equal(trace.ids.begin(), trace.ids.end(), instance.graph.ids().begin())) {
    throw InternalError("trace, coloring and instance disagree on the node set");
  }

  RunMetrics m;
  m.per_node.resize(n);
  m.phases.reserve(trace.phases.size());
  for (const PhaseMark& p : trace.phases) m.phases.push_back({p.name, p.start, 0, 0, 0});

  auto window_of = [&](Round r) -> std::size_t {
    std::size_t w = m.phases.size();
    for (std::size_t i = 0; i < m.phases.size(); ++i) {
      if (m.phases[i].start <= r) w = i;
    }
    return w;
  };

  std::vector<std::vector<std::uint64_t>> awake_in(m.phases.size(), std::vector<std::uint64_t>(n, 0));
  std::uint64_t total_awake = 0;
  for (const NodeEvent& e : trace.events) {
    NodeMetrics& nm = m.per_node[e.node];
    if (nm.termination_round != 0) throw InternalError("event after termination");
    ++nm.awake_rounds;
    ++total_awake;
    m.total_rounds = std::max(m.total_rounds, e.round);
    if (e.act == TraceAct::Terminate) nm.termination_round = e.round;
    if (const std::size_t w = window_of(e.round); w < m.phases.size()) {
      ++awake_in[w][e.node];
      m.phases[w].rounds = std::max(m.phases[w].rounds, e.round - m.phases[w].start + 1);
    }
  }

  const std::size_t phase1 = [&] {
    for (std::size_t i = 0; i < m.phases.size(); ++i)
      if (m.phases[i].name == "phase1") return i;
    return m.phases.size();
  }();
  m.decay_histogram.assign(phase1_iterations, 0);

  for (NodeIndex v = 0; v < n; ++v) {
    NodeMetrics& nm = m.per_node[v];
    m.worst_case_awake = std::max(m.worst_case_awake, nm.awake_rounds);
    if (coloring[v] != kNoColor && nm.termination_round == 0) {
      throw InternalError("node " + std::to_string(instance.graph.id(v).value) +
                          " is colored but never terminated");
    }
    if (nm.termination_round != 0) {
      const std::size_t w = window_of(nm.termination_round);
      if (w < m.phases.size()) nm.phase = m.phases[w].name;
      if (phase1 < m.phases.size() && w == phase1 && coloring[v] != kNoColor) {
        const std::uint64_t iteration = (awake_in[w][v] + 1) / 2;
        if (iteration == 0 || iteration > phase1_iterations) {
          throw InternalError("phase-1 termination outside the iteration budget");
        }
        ++m.decay_histogram[iteration - 1];
      }
    }
    for (std::size_t w = 0; w < m.phases.size(); ++w) {
      if (awake_in[w][v] > 0) {
        ++m.phases[w].participants;
        m.phases[w].worst_awake = std::max(m.phases[w].worst_awake, awake_in[w][v]);
      }
    }
  }

  std::uint64_t colored_in_phase1 = 0;
  for (auto x : m.decay_histogram) colored_in_phase1 += x;
  m.survived_phase1 = n - colored_in_phase1;
  m.average_awake = n == 0 ? AwakeAverage(0)
                           : AwakeAverage(static_cast<std::int64_t>(total_awake),
                                          static_cast<std::int64_t>(n));
  m.validity = check_coloring(instance, coloring);
  return m;
}

// ---------------------------------------------------------------------------
// Aggregation over runs

struct FieldSummary {
  double mean = 0;
  double min = 0;
  double max = 0;
  double p50 = 0;
  double p95 = 0;
};

struct RunSummary {
  std::size_t runs = 0;
  FieldSummary worst_awake;
  FieldSummary average_awake;
  FieldSummary total_rounds;
};

/// Nearest-rank quantile: the ceil(q*N)-th smallest value (1-based).
inline double nearest_rank(std::vector<double> values, double q) {
  if (values.empty()) throw UsageError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

inline FieldSummary summarize(const std::vector<double>& values) {
  FieldSummary s;
  double sum = 0;
  for (double x : values) sum += x;
  s.mean = sum / static_cast<double>(values.size());
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  s.p50 = nearest_rank(values, 0.50);
  s.p95 = nearest_rank(values, 0.95);
  return s;
}

inline RunSummary aggregate(const std::vector<RunMetrics>& runs) {
  if (runs.empty()) throw UsageError("cannot aggregate zero runs");
  std::vector<double> worst;
  std::vector<double> avg;
  std::vector<double> rounds;
  for (const RunMetrics& r : runs) {
    worst.push_back(static_cast<double>(r.worst_case_awake));
    avg.push_back(r.average_awake_value());
    rounds.push_back(static_cast<double>(r.total_rounds));
  }
  return {runs.size(), summarize(worst), summarize(avg), summarize(rounds)};
}

}  // namespace sleepcolor
