// kimflow: transport-map construction and stability-bound experiments.
//
// One subcommand per experiment; each takes a config file or a built-in
// preset, an optional seed override, and an output directory for the
// JSON/CSV report pair. Exit code 0 means every checked bound held, 2 means
// a bound check failed, 1 means the run itself errored.

#include <cstdio>
#include <exception>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kimflow/common.hpp"
#include "kimflow/config.hpp"
#include "kimflow/harness.hpp"

namespace {

struct CliArgs {
  std::string experiment;
  std::string config_path;
  std::string preset;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> stream;
  std::optional<int> threads;
};

std::string load_config_text(const CliArgs& args, std::string& origin) {
  if (!args.preset.empty()) {
    origin = "preset:" + args.preset;
    return kimflow::preset_text(args.preset);
  }
  std::ifstream in(args.config_path);
  if (!in)
    throw kimflow::ConfigError("cannot open config file '" + args.config_path +
                               "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  origin = args.config_path;
  return buf.str();
}

int run(const CliArgs& args) {
  std::string origin;
  const std::string text = load_config_text(args, origin);
  const bool json = args.config_path.size() >= 5 &&
                    args.config_path.compare(args.config_path.size() - 5, 5,
                                             ".json") == 0;
  const kimflow::ConfigMap cm =
      json ? kimflow::ConfigMap::from_json_text(text, origin)
           : kimflow::ConfigMap::from_ini_text(text, origin);
  kimflow::ExperimentConfig cfg = kimflow::parse_experiment(cm);
  if (cfg.experiment != args.experiment)
    throw kimflow::ConfigError("config declares experiment '" +
                               cfg.experiment + "' but subcommand is '" +
                               args.experiment + "'");
  cfg.config_hash = kimflow::fnv1a64(text);
  if (args.seed) cfg.seed = *args.seed;
  if (args.stream) cfg.stream = *args.stream;
  if (args.threads) cfg.flow.threads = *args.threads;

  const bool pass = kimflow::run_experiment(cfg, args.out_dir);
  std::printf("%s: %s", cfg.experiment.c_str(), pass ? "pass" : "FAIL");
  if (!args.out_dir.empty())
    std::printf(" (reports in %s)", args.out_dir.c_str());
  std::printf("\n");
  return pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"transport-map stability experiments"};
  app.require_subcommand(0, 1);

  bool list_presets = false;
  app.add_flag("--list-presets", list_presets,
               "print built-in preset names and exit");

  CliArgs args;
  const std::vector<std::string> experiments = {
      "stability_l2", "stability_linf", "fi_decay", "theta_check",
      "constants_table"};
  for (const auto& name : experiments) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
    auto* config_opt =
        sub->add_option("--config", args.config_path, "config file (.ini or .json)");
    auto* preset_opt =
        sub->add_option("--preset", args.preset, "built-in preset name");
    config_opt->excludes(preset_opt);
    sub->add_option("--out", args.out_dir,
                    "directory for the JSON/CSV report pair");
    sub->add_option("--seed", args.seed, "override the config seed");
    sub->add_option("--stream", args.stream, "override the config stream");
    sub->add_option("--threads", args.threads, "override flow threads");
    sub->callback([&args, name] { args.experiment = name; });
  }

  CLI11_PARSE(app, argc, argv);

  if (list_presets) {
    for (const auto& [name, text] : kimflow::presets())
      std::printf("%s\n", name.c_str());
    return 0;
  }
  if (args.experiment.empty()) {
    std::fprintf(stderr, "%s\n", app.help().c_str());
    return 1;
  }
  if (args.config_path.empty() && args.preset.empty()) {
    std::fprintf(stderr, "error: need --config or --preset\n");
    return 1;
  }

  try {
    return run(args);
  } catch (const kimflow::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
