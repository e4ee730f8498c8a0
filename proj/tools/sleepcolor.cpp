// Command line front end for the experiment harness.
//
//   sleepcolor run     --family gnp --n 4096 --seeds 100 --out runs.csv
//   sleepcolor scaling --family gnp --sizes 256,1024,4096,16384 --seeds 50
//   sleepcolor oracle  [--instance edge.dlc]

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sleepcolor/experiment.hpp"

namespace {

void add_common(CLI::App* cmd, sleepcolor::ExperimentOptions& o, std::string& family) {
  cmd->add_option("--family", family, "path|cycle|clique|gnp|regular|star");
  cmd->add_option("--n", o.n, "number of nodes");
  cmd->add_option("--param", o.param, "gnp edge probability or regular degree");
  cmd->add_option("--instance", o.instance_path, "instance file (dlc format)");
  cmd->add_option("--seeds", o.seeds, "number of seeds");
  cmd->add_option("--seed-base", o.seed_base, "first seed");
  cmd->add_option("--k1-coef", o.k1_coefficient, "randomized iterations = coef * log2 log2 n");
  cmd->add_option("--phase2-threshold", o.phase2_threshold, "degree threshold of phase 2");
  cmd->add_option("--phase2-cap", o.phase2_cap, "iteration cap of phase 2");
  cmd->add_option("--round-cap", o.round_cap, "global round cap");
  cmd->add_option("--out", o.out_path, "CSV output path");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sleeping-model (deg+1)-list-coloring simulator"};
  app.require_subcommand(1);

  sleepcolor::ExperimentOptions run_opts;
  std::string run_family;
  auto* run = app.add_subcommand("run", "run the pipeline over a seed range");
  add_common(run, run_opts, run_family);
  run->add_option("--trace", run_opts.trace_path, "write the round-by-round trace here");

  sleepcolor::ExperimentOptions scale_opts;
  std::string scale_family = "gnp";
  std::string sizes;
  auto* scaling = app.add_subcommand("scaling", "size sweep with log log n fits");
  add_common(scaling, scale_opts, scale_family);
  scaling->add_option("--sizes", sizes, "comma separated list of n")->required();

  sleepcolor::ExperimentOptions oracle_opts;
  auto* oracle = app.add_subcommand("oracle", "exact single-iteration adoption probabilities");
  oracle->add_option("--instance", oracle_opts.instance_path, "instance file (dlc format)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: usage: " << e.what() << '\n';
    return 1;
  }

  auto family_of = [](const std::string& name) -> std::optional<sleepcolor::Family> {
    if (name.empty()) return std::nullopt;
    auto f = sleepcolor::parse_family(name);
    if (!f) throw sleepcolor::UsageError("unknown family '" + name + "'");
    return f;
  };

  try {
    if (*run) {
      run_opts.family = family_of(run_family);
      return sleepcolor::cmd_run(run_opts, std::cout, std::cerr);
    }
    if (*scaling) {
      scale_opts.family = family_of(scale_family);
      std::size_t pos = 0;
      while (pos < sizes.size()) {
        const std::size_t comma = sizes.find(',', pos);
        const std::string item = sizes.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!item.empty()) scale_opts.sizes.push_back(std::stoull(item));
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
      return sleepcolor::cmd_scaling(scale_opts, std::cout, std::cerr);
    }
    return sleepcolor::cmd_oracle(oracle_opts, std::cout, std::cerr);
  } catch (const sleepcolor::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: usage: " << e.what() << '\n';
    return 1;
  }
}
