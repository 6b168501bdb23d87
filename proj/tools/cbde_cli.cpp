// cbde: island-model binary differential evolution for wrapper feature
// selection.
//
//   cbde run     --config exp.cfg [--out DIR] [--threads N] [--runs R] [--seed S] [--variant V]
//   cbde compare DIR... --out DIR
//   cbde bench   --config exp.cfg --threads 1,2,4 [--out DIR]
//   cbde synth   --samples 2000 --features 50 --informative 5 --noise 0.1 --seed 1 --out data.csv
//
// Exit codes: 0 success, 1 runtime failure, 2 config or usage error.

#include "cbde/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

struct Overrides {
  std::optional<std::string> out;
  std::optional<std::size_t> threads;
  std::optional<std::size_t> runs;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> variant;

  void add_to(CLI::App* cmd, bool with_threads) {
    cmd->add_option("--out", out, "Output directory");
    if (with_threads) cmd->add_option("--threads", threads, "Worker threads for the island runtime");
    cmd->add_option("--runs", runs, "Number of runs in the battery");
    cmd->add_option("--seed", seed, "Base seed; run r uses seed + r");
    cmd->add_option("--variant", variant, "bde, cbde-lm or cbde-tm");
  }

  void apply(cbde::ExperimentConfig& c) const {
    if (out) c.output_dir = *out;
    if (threads) c.engine.threads = *threads;
    if (runs) c.n_runs = *runs;
    if (seed) c.base_seed = *seed;
    if (variant) {
      try {
        c.engine.variant = cbde::parse_variant(*variant);
      } catch (const cbde::ConfigError&) {
        throw cbde::ConfigError("--variant", "expected bde, cbde-lm or cbde-tm");
      }
    }
    c.validate();
  }
};

int load_or_fail(const std::string& path, const Overrides& ov, cbde::ExperimentConfig& out) {
  try {
    out = cbde::load_config(path);
    ov.apply(out);
    return 0;
  } catch (const cbde::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Island-model (chaotic) binary differential evolution for feature subset selection"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides run_ov;
  auto* run_cmd = app.add_subcommand("run", "Run a battery of engine runs and write reports");
  run_cmd->add_option("--config", config_path, "Experiment config file")->required();
  run_ov.add_to(run_cmd, true);

  std::vector<std::string> dirs;
  std::string compare_out = ".";
  auto* compare_cmd = app.add_subcommand("compare", "Summarize and t-test batteries against each other");
  compare_cmd->add_option("dirs", dirs, "Battery directories holding run_*.json")->required();
  compare_cmd->add_option("--out", compare_out, "Output directory");

  std::vector<std::size_t> thread_counts{1};
  Overrides bench_ov;
  auto* bench_cmd = app.add_subcommand("bench", "Time the same battery at several thread counts");
  bench_cmd->add_option("--config", config_path, "Experiment config file")->required();
  bench_cmd->add_option("--threads", thread_counts, "Thread counts; must include 1")->delimiter(',');
  bench_ov.add_to(bench_cmd, false);

  cbde::SyntheticSpec spec;
  std::string synth_out;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a planted-feature CSV dataset");
  synth_cmd->add_option("--samples", spec.n_samples, "Rows");
  synth_cmd->add_option("--features", spec.n_features, "Columns");
  synth_cmd->add_option("--informative", spec.n_informative, "Planted informative columns");
  synth_cmd->add_option("--noise", spec.noise, "Std of the Gaussian logit noise");
  synth_cmd->add_option("--seed", spec.seed, "Generator seed");
  synth_cmd->add_option("--out", synth_out, "Output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*run_cmd) {
    cbde::ExperimentConfig config;
    if (const int rc = load_or_fail(config_path, run_ov, config)) return rc;
    return cbde::cmd_run(config);
  }
  if (*compare_cmd) {
    std::vector<std::filesystem::path> paths(dirs.begin(), dirs.end());
    return cbde::cmd_compare(paths, compare_out);
  }
  if (*bench_cmd) {
    cbde::ExperimentConfig config;
    if (const int rc = load_or_fail(config_path, bench_ov, config)) return rc;
    return cbde::cmd_bench(config, thread_counts);
  }
  if (*synth_cmd) {
    try {
      spec.validate();
    } catch (const cbde::ConfigError& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return 2;
    }
    return cbde::cmd_synth(spec, synth_out);
  }
  return 2;
}
