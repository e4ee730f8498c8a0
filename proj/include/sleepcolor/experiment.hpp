#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sleepcolor/errors.hpp"
#include "sleepcolor/generators.hpp"
#include "sleepcolor/graph.hpp"
#include "sleepcolor/instance_io.hpp"
#include "sleepcolor/metrics.hpp"
#include "sleepcolor/oracle.hpp"
#include "sleepcolor/pipeline.hpp"

namespace sleepcolor {

/// Experiment harness behind the command line tool. Every entry point
/// returns the process exit code: 0 success, 1 usage or instance error,
/// 2 when some run hit the round cap.
struct ExperimentOptions {
  std::optional<Family> family;
  std::size_t n = 0;
  std::optional<double> param;
  std::optional<std::string> instance_path;
  std::uint64_t seeds = 1;
  std::uint64_t seed_base = 0;
  double k1_coefficient = 3.0;
  std::uint64_t phase2_threshold = 0;
  std::uint32_t phase2_cap = 32;
  Round round_cap = 0;
  std::optional<std::string> out_path;
  std::optional<std::string> trace_path;
  std::vector<std::size_t> sizes;
  /// Per-size round cap for sweeps; overrides round_cap when set.
  std::function<Round(std::size_t)> round_cap_for;
};

inline constexpr std::size_t kCsvDecayColumns = 12;

struct RunRecord {
  std::uint64_t seed = 0;
  std::string family;
  std::size_t n = 0;
  double param = 0.0;
  std::uint32_t k1 = 0;
  std::uint64_t threshold = 0;
  bool complete = true;
  RunMetrics metrics;

  [[nodiscard]] bool valid() const { return complete && metrics.validity == Validity::ProperTotal; }
};

/// gnp defaults to expected degree 8, regular to degree 4.
inline double effective_param(const ExperimentOptions& o, std::size_t n) {
  if (o.param) return *o.param;
  if (o.family == Family::Gnp) return n <= 1 ? 0.0 : std::min(1.0, 8.0 / static_cast<double>(n));
  if (o.family == Family::RandomRegular) return 4.0;
  return 0.0;
}

inline PipelineConfig make_config(const ExperimentOptions& o, std::size_t n, std::uint64_t seed) {
  PipelineConfig cfg;
  cfg.k1_coefficient = o.k1_coefficient;
  cfg.phase2_threshold = o.phase2_threshold;
  cfg.phase2_iteration_cap = o.phase2_cap;
  cfg.round_cap = o.round_cap_for ? o.round_cap_for(n) : o.round_cap;
  cfg.seed = seed;
  cfg.record_messages = o.trace_path.has_value();
  return cfg;
}

inline std::string format_param(double p) {
  std::ostringstream os;
  os << std::setprecision(10) << p;
  return os.str();
}

inline std::string csv_header() {
  std::string h = "seed,family,n,param,K,threshold,worst_awake,avg_awake,total_rounds,valid,phase2_incomplete";
  for (std::size_t i = 1; i <= kCsvDecayColumns; ++i) h += ",x" + std::to_string(i);
  return h;
}

inline std::string csv_row(const RunRecord& r) {
  std::ostringstream os;
  os << r.seed << ',' << r.family << ',' << r.n << ',' << format_param(r.param) << ',' << r.k1 << ','
     << r.threshold << ',' << r.metrics.worst_case_awake << ',' << r.metrics.average_awake_decimal()
     << ',' << r.metrics.total_rounds << ',' << (r.valid() ? 1 : 0) << ','
     << (r.metrics.phase2_incomplete ? 1 : 0);
  for (std::size_t i = 0; i < kCsvDecayColumns; ++i) {
    os << ',' << (i < r.metrics.decay_histogram.size() ? r.metrics.decay_histogram[i] : 0);
  }
  return os.str();
}

/// One pipeline run. A run that hits the round cap is reported with
/// complete == false and its partial metrics.
inline RunRecord run_once(const ColoringInstance& inst, const PipelineConfig& cfg,
                          std::string family, double param, Trace* trace = nullptr) {
  RunRecord rec;
  rec.seed = cfg.seed;
  rec.family = std::move(family);
  rec.n = inst.size();
  rec.param = param;
  rec.k1 = resolve_k1(cfg, inst.size());
  rec.threshold = resolve_threshold(cfg, inst.size());
  try {
    PipelineResult res = run_pipeline(inst, cfg);
    rec.metrics = std::move(res.metrics);
    if (trace) *trace = std::move(res.trace);
  } catch (const RunIncomplete& e) {
    rec.complete = false;
    rec.metrics = e.metrics();
  }
  return rec;
}

namespace detail {

struct OutputTarget {
  std::ofstream file;
  std::ostream* stream;

  OutputTarget(const std::optional<std::string>& path, std::ostream& fallback) : stream(&fallback) {
    if (path) {
      file.open(*path);
      if (!file) throw UsageError("cannot write " + *path);
      stream = &file;
    }
  }
};

inline void write_config_block(std::ostream& os, const PipelineConfig& cfg, std::size_t n) {
  std::istringstream lines(config_key_values(cfg, n));
  std::string line;
  while (std::getline(lines, line)) os << "# " << line << '\n';
}

}  // namespace detail

/// `run`: one instance (file or generated family) per seed.
inline int cmd_run(const ExperimentOptions& o, std::ostream& out, std::ostream& err) {
  try {
    if (o.instance_path.has_value() == o.family.has_value()) {
      throw UsageError("give exactly one of --instance or --family");
    }
    if (o.seeds == 0) throw UsageError("--seeds must be positive");
    if (o.family && o.n == 0) throw UsageError("--n must be positive");

    std::optional<ColoringInstance> fixed;
    if (o.instance_path) fixed = read_instance_file(*o.instance_path);
    const std::size_t n = fixed ? fixed->size() : o.n;
    const double param = fixed ? 0.0 : effective_param(o, n);
    const std::string family = fixed ? "instance" : to_string(*o.family);

    detail::OutputTarget csv(o.out_path, out);
    std::optional<std::ofstream> trace_file;
    if (o.trace_path) {
      trace_file.emplace(*o.trace_path);
      if (!*trace_file) throw UsageError("cannot write " + *o.trace_path);
    }

    detail::write_config_block(*csv.stream, make_config(o, n, o.seed_base), n);
    *csv.stream << csv_header() << '\n';
    std::vector<RunMetrics> all;
    std::size_t incomplete = 0;
    std::size_t invalid = 0;
    for (std::uint64_t s = o.seed_base; s < o.seed_base + o.seeds; ++s) {
      const ColoringInstance inst =
          fixed ? *fixed : make_default_instance(generate({*o.family, n, param}, s));
      Trace trace;
      const RunRecord rec = run_once(inst, make_config(o, n, s), family, param, &trace);
      *csv.stream << csv_row(rec) << '\n';
      if (trace_file) {
        *trace_file << "# seed=" << s << '\n';
        write_trace(trace, *trace_file);
      }
      incomplete += rec.complete ? 0 : 1;
      invalid += rec.valid() || !rec.complete ? 0 : 1;
      all.push_back(rec.metrics);
    }

    std::ostream& summary = o.out_path ? out : err;
    const RunSummary sum = aggregate(all);
    summary << "runs=" << sum.runs << " incomplete=" << incomplete << " invalid=" << invalid
            << " worst_awake_max=" << sum.worst_awake.max
            << " avg_awake_mean=" << std::fixed << std::setprecision(6) << sum.average_awake.mean
            << " total_rounds_max=" << std::setprecision(0) << sum.total_rounds.max << '\n'
            << std::defaultfloat;
    if (incomplete > 0) return 2;
    return invalid > 0 ? 1 : 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

struct SizeAggregate {
  std::size_t n = 0;
  double loglog = 0;
  std::size_t runs = 0;
  std::size_t incomplete = 0;
  std::size_t invalid = 0;
  double worst_awake_max = 0;
  double worst_awake_mean = 0;
  double avg_awake_mean = 0;
  double avg_awake_max = 0;
  double total_rounds_max = 0;
  double total_rounds_p95 = 0;
  Round round_cap = 0;
};

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double max_abs_residual = 0;
  std::vector<double> residuals;
};

/// Ordinary least squares y = slope * x + intercept.
inline LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.empty()) throw UsageError("fit needs matching, non-empty samples");
  const auto k = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  LinearFit f;
  const double denom = k * sxx - sx * sx;
  f.slope = denom == 0 ? 0.0 : (k * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / k;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.slope * x[i] + f.intercept);
    f.residuals.push_back(r);
    f.max_abs_residual = std::max(f.max_abs_residual, std::abs(r));
  }
  return f;
}

struct ScalingReport {
  std::vector<SizeAggregate> sizes;
  std::vector<RunRecord> runs;
  LinearFit worst_fit;    // worst_awake_max against log2 log2 n
  LinearFit average_fit;  // avg_awake_mean against log2 log2 n
};

inline ScalingReport run_scaling(const ExperimentOptions& o) {
  if (o.sizes.empty()) throw UsageError("--sizes must list at least one size");
  if (!o.family) throw UsageError("scaling needs --family");
  if (o.seeds == 0) throw UsageError("--seeds must be positive");
  ScalingReport rep;
  std::vector<double> xs, worst, avg;
  for (std::size_t n : o.sizes) {
    if (n == 0) throw UsageError("sizes must be positive");
    const double param = effective_param(o, n);
    std::vector<RunMetrics> ms;
    SizeAggregate agg;
    agg.n = n;
    agg.loglog = std::log2(std::log2(static_cast<double>(std::max<std::size_t>(n, 2))));
    for (std::uint64_t s = o.seed_base; s < o.seed_base + o.seeds; ++s) {
      const ColoringInstance inst = make_default_instance(generate({*o.family, n, param}, s));
      const PipelineConfig cfg = make_config(o, n, s);
      agg.round_cap = resolve_round_cap(cfg, n);
      RunRecord rec = run_once(inst, cfg, to_string(*o.family), param);
      agg.incomplete += rec.complete ? 0 : 1;
      agg.invalid += rec.valid() || !rec.complete ? 0 : 1;
      ms.push_back(rec.metrics);
      rep.runs.push_back(std::move(rec));
    }
    const RunSummary sum = aggregate(ms);
    agg.runs = sum.runs;
    agg.worst_awake_max = sum.worst_awake.max;
    agg.worst_awake_mean = sum.worst_awake.mean;
    agg.avg_awake_mean = sum.average_awake.mean;
    agg.avg_awake_max = sum.average_awake.max;
    agg.total_rounds_max = sum.total_rounds.max;
    agg.total_rounds_p95 = sum.total_rounds.p95;
    xs.push_back(agg.loglog);
    worst.push_back(agg.worst_awake_max);
    avg.push_back(agg.avg_awake_mean);
    rep.sizes.push_back(agg);
  }
  rep.worst_fit = fit_line(xs, worst);
  rep.average_fit = fit_line(xs, avg);
  return rep;
}

/// `scaling`: per-size aggregates plus the log log n fits.
inline int cmd_scaling(const ExperimentOptions& o, std::ostream& out, std::ostream& err) {
  try {
    const ScalingReport rep = run_scaling(o);
    detail::OutputTarget csv(o.out_path, out);
    std::ostream& os = *csv.stream;
    os << "n,loglog_n,runs,incomplete,invalid,worst_awake_max,worst_awake_mean,avg_awake_mean,"
          "avg_awake_max,total_rounds_max,total_rounds_p95,round_cap\n";
    os << std::fixed;
    for (const SizeAggregate& a : rep.sizes) {
      os << a.n << ',' << std::setprecision(6) << a.loglog << ',' << a.runs << ',' << a.incomplete
         << ',' << a.invalid << ',' << std::setprecision(0) << a.worst_awake_max << ','
         << std::setprecision(6) << a.worst_awake_mean << ',' << a.avg_awake_mean << ','
         << a.avg_awake_max << ',' << std::setprecision(0) << a.total_rounds_max << ','
         << a.total_rounds_p95 << ',' << a.round_cap << '\n';
    }
    out << std::fixed << std::setprecision(6) << "fit worst_awake_max = a*log2(log2(n)) + b: a="
        << rep.worst_fit.slope << " b=" << rep.worst_fit.intercept
        << " max_residual=" << rep.worst_fit.max_abs_residual << " residuals=";
    for (std::size_t i = 0; i < rep.worst_fit.residuals.size(); ++i) {
      out << (i ? ";" : "") << rep.worst_fit.residuals[i];
    }
    out << "\nfit avg_awake_mean = a*log2(log2(n)) + b: a=" << rep.average_fit.slope
        << " b=" << rep.average_fit.intercept << '\n'
        << std::defaultfloat;
    for (const SizeAggregate& a : rep.sizes) {
      if (a.incomplete > 0) return 2;
    }
    for (const SizeAggregate& a : rep.sizes) {
      if (a.invalid > 0) return 1;
    }
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

/// `oracle`: exact single-iteration adoption probabilities; exit 0 iff all
/// of them are at least 1/4.
inline int cmd_oracle(const ExperimentOptions& o, std::ostream& out, std::ostream& err) {
  try {
    std::vector<CatalogEntry> entries;
    if (o.instance_path) {
      entries.push_back({*o.instance_path, read_instance_file(*o.instance_path)});
    } else {
      entries = tiny_catalog();
    }
    bool all_ok = true;
    const Rational quarter(1, 4);
    for (const CatalogEntry& e : entries) {
      const auto probs = exact_adoption_probabilities(e.instance);
      for (NodeIndex v = 0; v < e.instance.size(); ++v) {
        const bool ok = probs[v] >= quarter;
        all_ok = all_ok && ok;
        out << e.name << " v=" << e.instance.graph.id(v) << " p=" << to_string(probs[v])
            << (ok ? "" : " BELOW_1/4") << '\n';
      }
      out << e.name << " expected_uncolored=" << to_string(exact_expected_uncolored_after_one_iteration(e.instance))
          << '\n';
    }
    out << "instances=" << entries.size() << " all_at_least_1/4=" << (all_ok ? "yes" : "no") << '\n';
    return all_ok ? 0 : 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace sleepcolor
