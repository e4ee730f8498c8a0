// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "sleepcolor/sleepcolor.hpp"
#include "support.hpp"

namespace sc = sleepcolor;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x, int digits = 3) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << x;
  return os.str();
}

// Independent properness check: every node colored from its original list,
// no edge monochromatic.
bool proper_total(const sc::ColoringInstance& inst, const sc::Coloring& c) {
  for (sc::NodeIndex v = 0; v < inst.size(); ++v) {
    const auto& l = inst.lists[v];
    if (std::find(l.begin(), l.end(), c[v]) == l.end()) return false;
    for (sc::NodeIndex u : inst.graph.neighbors(v))
      if (c[u] == c[v]) return false;
  }
  return true;
}

// 1. Las Vegas safety over mixed families.
Outcome safety() {
  constexpr std::size_t kRuns = 10000;
  const std::vector<sc::Family> families{sc::Family::Gnp,  sc::Family::RandomRegular,
                                         sc::Family::Path, sc::Family::Cycle,
                                         sc::Family::Star, sc::Family::Clique};
  sc::Rng rng(0xC0FFEE);
  std::size_t completed = 0;
  std::size_t bad = 0;
  std::size_t max_n = 0;
  std::size_t min_n = SIZE_MAX;
  for (std::size_t run = 0; run < kRuns; ++run) {
    const sc::Family fam = families[run % families.size()];
    // Log-uniform n in [4, 4096]; cliques stay small.
    const double lg = 2.0 + 10.0 * rng.unit();
    std::size_t n = static_cast<std::size_t>(std::llround(std::exp2(lg)));
    n = std::clamp<std::size_t>(n, 4, 4096);
    if (fam == sc::Family::Clique) n = std::min<std::size_t>(n, 64);
    double param = 0;
    if (fam == sc::Family::Gnp) param = std::min(1.0, (2.0 + 14.0 * rng.unit()) / static_cast<double>(n));
    if (fam == sc::Family::RandomRegular) {
      param = static_cast<double>(1 + rng.uniform(std::min<std::size_t>(n - 1, 12)));
      if ((n * static_cast<std::size_t>(param)) % 2 == 1) n += 1;
    }
    const auto inst = sc::make_default_instance(sc::generate({fam, n, param}, run));
    min_n = std::min(min_n, n);
    max_n = std::max(max_n, n);
    sc::PipelineConfig cfg;
    cfg.seed = run;
    try {
      const auto res = sc::run_pipeline(inst, cfg);
      ++completed;
      if (!proper_total(inst, res.coloring) ||
          res.metrics.validity != sc::Validity::ProperTotal) {
        ++bad;
      }
    } catch (const sc::RunIncomplete&) {
    }
  }
  return {completed > 0 && bad == 0,
          "runs=" + std::to_string(kRuns) + " completed=" + std::to_string(completed) +
              " improper=" + std::to_string(bad) + " n_range=[" + std::to_string(min_n) + "," +
              std::to_string(max_n) + "]"};
}

// 2. Exact single-iteration bound on the tiny catalog.
Outcome exact_bound() {
  const sc::Rational quarter(1, 4);
  std::size_t nodes = 0;
  std::size_t below = 0;
  sc::Rational min_p = 1;
  const auto cat = sc::tiny_catalog();
  for (const auto& e : cat) {
    for (const auto& p : sc::exact_adoption_probabilities(e.instance)) {
      ++nodes;
      if (p < quarter) ++below;
      min_p = std::min(min_p, p);
    }
  }
  return {below == 0, "instances=" + std::to_string(cat.size()) + " nodes=" + std::to_string(nodes) +
                          " min_p=" + sc::to_string(min_p) + " below_1/4=" + std::to_string(below)};
}

// 3. Monte Carlo frequencies vs. the oracle. 10^5 samples per node, taken
// as one iteration on 10^4 disjoint copies, repeated with 10 seeds.
Outcome oracle_agreement() {
  constexpr std::size_t kCopies = 10000;
  constexpr std::size_t kRepeats = 10;
  constexpr double kSamples = static_cast<double>(kCopies * kRepeats);
  const auto cat = sc::tiny_catalog();
  std::size_t checks = 0;
  std::size_t retried = 0;
  std::size_t failed = 0;
  double worst_z = 0;
  for (std::size_t idx = 0; idx < cat.size(); ++idx) {
    const auto& inst = cat[idx].instance;
    const auto exact = sc::exact_adoption_probabilities(inst);
    const auto copies = sleepcolor::testing::disjoint_copies(inst, kCopies);
    auto z_scores = [&](std::uint64_t salt) {
      std::vector<std::uint64_t> hits(inst.size(), 0);
      for (std::size_t rep = 0; rep < kRepeats; ++rep) {
        const auto r = sc::phase1(copies, 1, sc::derive_seed(salt, idx * 1000 + rep));
        for (sc::NodeIndex v = 0; v < copies.size(); ++v)
          if (r.coloring[v] != sc::kNoColor) ++hits[v % inst.size()];
      }
      std::vector<double> z(inst.size());
      for (sc::NodeIndex v = 0; v < inst.size(); ++v) {
        const double p = static_cast<double>(exact[v]);
        const double sigma = std::sqrt(p * (1 - p) / kSamples);
        z[v] = std::abs(static_cast<double>(hits[v]) / kSamples - p) / sigma;
      }
      return z;
    };
    const auto first = z_scores(0xA11CE);
    for (sc::NodeIndex v = 0; v < inst.size(); ++v) {
      ++checks;
      double z = first[v];
      if (z > 4.0) {
        ++retried;
        z = z_scores(0xB0B)[v];
        if (z > 4.0) ++failed;
      }
      worst_z = std::max(worst_z, z);
    }
  }
  return {failed == 0, "instances=" + std::to_string(cat.size()) + " node_checks=" +
                           std::to_string(checks) + " retried=" + std::to_string(retried) +
                           " failed=" + std::to_string(failed) + " max_final_z=" + fmt(worst_z, 2)};
}

// 4. Geometric decay of the uncolored count.
Outcome decay() {
  constexpr std::size_t kN = 2048;
  constexpr std::size_t kSeeds = 200;
  std::vector<double> mean(9, 0.0);
  for (std::uint64_t s = 0; s < kSeeds; ++s) {
    const auto inst = sc::make_default_instance(sc::generate({sc::Family::Gnp, kN, 8.0 / kN}, s));
    sc::PipelineConfig cfg;
    cfg.seed = s;
    const auto res = sc::run_pipeline(inst, cfg);
    for (std::size_t i = 1; i <= 8; ++i)
      mean[i] += static_cast<double>(res.metrics.uncolored_after(i)) / kSeeds;
  }
  bool ok = true;
  std::string detail = "K=" + std::to_string(sc::resolve_k1({}, kN));
  for (std::size_t i = 1; i <= 8; ++i) {
    const double bound = kN * std::pow(0.75, static_cast<double>(i)) + 3 * std::sqrt(kN / 200.0);
    ok = ok && mean[i] <= bound;
    detail += " i" + std::to_string(i) + "=" + fmt(mean[i], 1) + "/" + fmt(bound, 1);
  }
  return {ok, detail};
}

// 5-7 share one sweep.
struct Sweep {
  sc::ScalingReport report;
};

sc::Round sweep_cap(std::size_t n) {
  const double lg = std::log2(static_cast<double>(n));
  return static_cast<sc::Round>(std::ceil(10 * lg * lg + 200));
}

Sweep run_sweep() {
  sc::ExperimentOptions o;
  o.family = sc::Family::Gnp;
  o.sizes = {1u << 8, 1u << 10, 1u << 12, 1u << 14};
  o.seeds = 50;
  o.round_cap_for = sweep_cap;
  return {sc::run_scaling(o)};
}

Outcome average_awake(const Sweep& s) {
  const auto& sz = s.report.sizes;
  const double diff = std::abs(sz.back().avg_awake_mean - sz.front().avg_awake_mean);
  const double slope = s.report.average_fit.slope;
  std::string detail;
  for (const auto& a : sz) detail += "n=" + std::to_string(a.n) + ":" + fmt(a.avg_awake_mean) + " ";
  detail += "diff=" + fmt(diff) + " slope=" + fmt(slope);
  return {diff <= 1.0 && slope >= -0.5 && slope <= 0.5, detail};
}

Outcome worst_awake(const Sweep& s) {
  const auto& f = s.report.worst_fit;
  std::string detail;
  for (const auto& a : s.report.sizes)
    detail += "n=" + std::to_string(a.n) + ":" + fmt(a.worst_awake_max, 0) + " ";
  detail += "a=" + fmt(f.slope) + " b=" + fmt(f.intercept) + " max_residual=" + fmt(f.max_abs_residual);
  return {f.slope <= 20.0 && f.max_abs_residual <= 5.0, detail};
}

Outcome round_cap(const Sweep& s) {
  bool ok = true;
  std::string detail;
  for (const auto& a : s.report.sizes) {
    ok = ok && a.incomplete == 0 && a.invalid == 0;
    detail += "n=" + std::to_string(a.n) + ":cap=" + std::to_string(a.round_cap) +
              ",max=" + fmt(a.total_rounds_max, 0) + ",incomplete=" + std::to_string(a.incomplete) +
              " ";
  }
  detail.pop_back();
  return {ok, detail};
}

// 8. Sleep semantics.
struct Script {
  struct Input {
    std::map<sc::Round, sc::Action<int>> plan;
    sc::Round stop;
  };
  struct State {
    Input in;
    std::vector<sc::Round> heard;
  };
  using Message = int;
  using Output = std::vector<sc::Round>;
  State init(sc::NodeContext&, const Input& in) { return {in, {}}; }
  void compose(State&, sc::NodeContext&, sc::Outbox<Message>& out) { out.broadcast(1); }
  sc::Action<Output> decide(State& s, std::span<const sc::Envelope<Message>> inbox,
                            sc::NodeContext& ctx) {
    if (!inbox.empty()) s.heard.push_back(ctx.round);
    if (auto it = s.in.plan.find(ctx.round); it != s.in.plan.end()) {
      return {it->second.kind, it->second.sleep_rounds, {}};
    }
    if (ctx.round >= s.in.stop) return sc::Action<Output>::terminate(s.heard);
    return sc::Action<Output>::keep_awake();
  }
};

Outcome sleep_semantics() {
  std::vector<std::string> failures;
  auto expect = [&](bool cond, const std::string& what) {
    if (!cond) failures.push_back(what);
  };

  // Truth table of delivery.
  const auto a = sc::NodeStatus::awake();
  const auto sl = sc::NodeStatus::sleeping(3);
  const auto t = sc::NodeStatus::terminated();
  expect(sc::deliverable(a, a), "awake->awake");
  for (auto x : {sl, t}) {
    expect(!sc::deliverable(a, x), "awake->absent");
    expect(!sc::deliverable(x, a), "absent->awake");
  }

  // SLEEP(r) at round t for several (t, r): absent t+1..t+r, awake t+r+1.
  const std::vector<std::pair<std::uint64_t, std::uint64_t>> edge{{1, 2}};
  const sc::Graph g = sc::Graph::build(std::span<const std::pair<std::uint64_t, std::uint64_t>>(edge),
                                       std::vector<std::uint64_t>{1, 2});
  for (sc::Round t0 = 1; t0 <= 4; ++t0) {
    for (sc::Round r = 1; r <= 5; ++r) {
      Script prog;
      std::vector<Script::Input> in(2);
      in[0].plan[t0] = sc::Action<int>::sleep(r);
      in[0].stop = t0 + r + 1;
      in[1].stop = t0 + r + 2;
      auto res = sc::run_simulation(g, prog, std::span<const Script::Input>(in), 0,
                                    {.round_cap = 100, .record_messages = true});
      std::vector<sc::Round> awake0;
      for (const auto& e : res.trace.events)
        if (e.node == 0) awake0.push_back(e.round);
      std::vector<sc::Round> want;
      for (sc::Round x = 1; x <= t0; ++x) want.push_back(x);
      want.push_back(t0 + r + 1);
      const std::string tag = "t=" + std::to_string(t0) + " r=" + std::to_string(r);
      expect(awake0 == want, "awake rounds " + tag);
      // Node 2 hears node 1 exactly when node 1 is awake.
      expect(res.outputs[1] == want, "receiver view " + tag);
      // Every message to or from the sleeper while absent is dropped.
      for (const auto& m : res.trace.messages) {
        const bool absent = m.round > t0 && m.round <= t0 + r;
        if (absent) expect(!m.delivered, "delivered while asleep " + tag);
        else if (m.round <= t0 + r + 1) expect(m.delivered, "dropped while awake " + tag);
      }
    }
  }

  // No message is ever sent by a node that is not awake: every message event
  // in a full pipeline trace has a matching awake event of its sender.
  const auto inst = sc::make_default_instance(sc::generate({sc::Family::Gnp, 400, 0.02}, 3));
  std::size_t messages = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    sc::PipelineConfig cfg;
    cfg.seed = seed;
    cfg.record_messages = true;
    cfg.k1 = 2;
    cfg.phase2_threshold = 4;
    const auto res = sc::run_pipeline(inst, cfg);
    std::set<std::pair<sc::Round, sc::NodeIndex>> awake;
    std::map<std::pair<sc::Round, sc::NodeIndex>, sc::StatusKind> after;
    for (const auto& e : res.trace.events) awake.insert({e.round, e.node});
    for (const auto& m : res.trace.messages) {
      ++messages;
      expect(awake.contains({m.round, m.from}), "message from absent sender");
      if (m.delivered) expect(awake.contains({m.round, m.to}), "delivered to absent receiver");
    }
    // Terminated nodes never reappear; sleepers reappear exactly on time.
    std::map<sc::NodeIndex, sc::NodeEvent> last;
    for (const auto& e : res.trace.events) {
      if (auto it = last.find(e.node); it != last.end()) {
        const auto& p = it->second;
        expect(p.act != sc::TraceAct::Terminate, "event after termination");
        if (p.act == sc::TraceAct::Sleep) expect(e.round == p.round + p.sleep_rounds + 1, "late wake-up");
        else expect(e.round == p.round + 1, "gap without sleep");
      }
      last[e.node] = e;
    }
  }
  return {failures.empty(),
          failures.empty() ? "sleep cases=20 pipeline_messages_checked=" + std::to_string(messages)
                           : "first failure: " + failures.front() + " (total " +
                                 std::to_string(failures.size()) + ")"};
}

// 9 and 10 share a corpus of residual instances.
struct Phase3Case {
  sc::ColoringInstance inst;
  sc::InterimResult interim;
  sc::TournamentResult result;
};

std::vector<Phase3Case> phase3_corpus() {
  std::vector<Phase3Case> out;
  for (std::uint64_t seed = 0; out.size() < 500; ++seed) {
    const std::size_t n = 4 + seed % 80;
    const auto full = sleepcolor::testing::random_instance(n, 0.08 + 0.3 * static_cast<double>(seed % 4) / 4,
                                                           seed, seed % 2);
    auto p1 = sc::phase1(full, 1, seed);
    if (p1.residual.size() == 0 || p1.residual.size() > 60) continue;
    Phase3Case c;
    c.inst = std::move(p1.residual);
    c.interim = sc::phase3_interim_coloring(c.inst, full.graph.id_bit_size(), c.inst.graph.max_degree());
    c.result = sc::phase3_tournament_reduction(c.inst, c.interim.colors, c.interim.palette,
                                               {.round_cap = 1'000'000, .record_messages = false});
    out.push_back(std::move(c));
  }
  return out;
}

Outcome greedy_equivalence(const std::vector<Phase3Case>& corpus) {
  std::size_t mismatches = 0;
  std::size_t max_n = 0;
  for (const auto& c : corpus) {
    max_n = std::max(max_n, c.inst.size());
    if (!c.result.complete || c.result.coloring != sleepcolor::testing::sequential_greedy(c.inst, c.interim.colors) ||
        !proper_total(c.inst, c.result.coloring)) {
      ++mismatches;
    }
  }
  return {corpus.size() == 500 && mismatches == 0, "instances=" + std::to_string(corpus.size()) + " max_n=" +
                               std::to_string(max_n) + " mismatches=" + std::to_string(mismatches)};
}

Outcome tournament_awake(const std::vector<Phase3Case>& corpus) {
  std::size_t violations = 0;
  std::uint64_t worst = 0;
  std::uint64_t worst_bound = 0;
  for (const auto& c : corpus) {
    const std::uint64_t C = c.interim.palette;
    const std::uint64_t bound = 2 * (C <= 1 ? 0 : std::bit_width(C - 1)) + 2;
    std::vector<std::uint64_t> awake(c.inst.size(), 0);
    for (const auto& e : c.result.trace.events) ++awake[e.node];
    for (auto x : awake) {
      if (x > bound) ++violations;
      if (x > worst) {
        worst = x;
        worst_bound = bound;
      }
    }
  }
  return {corpus.size() == 500 && violations == 0, "instances=" + std::to_string(corpus.size()) + " max_awake=" +
                               std::to_string(worst) + " (bound there " + std::to_string(worst_bound) +
                               ") violations=" + std::to_string(violations)};
}

// 11. Two invocations of the command line tool, byte for byte.
Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "sleepcolor_acceptance";
  fs::create_directories(dir);
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const std::vector<std::string> commands{
      "run --family gnp --n 500 --seeds 3 --seed-base 7",
      "run --family regular --n 200 --param 6 --seeds 2 --seed-base 1",
      "run --family clique --n 12 --seeds 2 --phase2-threshold 4 --k1-coef 0.5",
  };
  std::size_t identical = 0;
  std::string problem;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    std::string csv[2], trace[2];
    for (int k = 0; k < 2; ++k) {
      const fs::path c = dir / ("c" + std::to_string(i) + "_" + std::to_string(k) + ".csv");
      const fs::path t = dir / ("c" + std::to_string(i) + "_" + std::to_string(k) + ".trace");
      const std::string cmd = std::string("\"") + SLEEPCOLOR_CLI + "\" " + commands[i] + " --out \"" +
                              c.string() + "\" --trace \"" + t.string() + "\" > /dev/null 2>&1";
      if (std::system(cmd.c_str()) != 0) problem = "nonzero exit: " + commands[i];
      csv[k] = slurp(c);
      trace[k] = slurp(t);
    }
    if (!csv[0].empty() && !trace[0].empty() && csv[0] == csv[1] && trace[0] == trace[1]) ++identical;
    else if (problem.empty()) problem = "outputs differ: " + commands[i];
  }
  fs::remove_all(dir);
  return {identical == commands.size() && problem.empty(),
          "commands=" + std::to_string(commands.size()) + " identical=" + std::to_string(identical) +
              (problem.empty() ? "" : " " + problem)};
}

}  // namespace

int main() {
  using Clock = std::chrono::steady_clock;
  bool all = true;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& f) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    all = all && o.pass;
    std::cout << "criterion " << std::setw(2) << id << " " << (o.pass ? "PASS" : "FAIL") << "  "
              << name << ": " << o.detail << " [" << fmt(secs, 1) << "s]" << std::endl;
  };

  report(1, "Las Vegas safety", safety);
  report(2, "exact single-iteration bound", exact_bound);
  report(3, "oracle vs simulator", oracle_agreement);
  report(4, "geometric decay", decay);

  Sweep sweep;
  bool sweep_ok = true;
  std::string sweep_error;
  try {
    sweep = run_sweep();
  } catch (const std::exception& e) {
    sweep_ok = false;
    sweep_error = e.what();
  }
  auto from_sweep = [&](Outcome (*f)(const Sweep&)) {
    return [&, f]() -> Outcome {
      if (!sweep_ok) return {false, "sweep failed: " + sweep_error};
      return f(sweep);
    };
  };
  report(5, "constant average awake", from_sweep(average_awake));
  report(6, "worst-case awake trend", from_sweep(worst_awake));
  report(7, "round cap", from_sweep(round_cap));

  report(8, "sleep semantics", sleep_semantics);

  std::vector<Phase3Case> corpus;
  try {
    corpus = phase3_corpus();
  } catch (const std::exception& e) {
    std::cout << "phase-3 corpus failed: " << e.what() << std::endl;
  }
  report(9, "tournament equals greedy", [&] { return greedy_equivalence(corpus); });
  report(10, "tournament awake bound", [&] { return tournament_awake(corpus); });

  report(11, "determinism", determinism);

  std::cout << (all ? "ALL PASS" : "SOME CRITERIA FAILED") << std::endl;
  return all ? 0 : 1;
}
