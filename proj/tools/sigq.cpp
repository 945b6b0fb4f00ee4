// sigq: signature/keystroke template quality toolkit.
//
// Subcommands: synth, extract, quality, eval, import-scores. Every run is a
// pure function of its config + seed: identical inputs give identical output
// bytes, regardless of worker count.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sigq/pipeline.hpp"

namespace {

struct CliOptions {
  std::string config_path;
  std::vector<std::string> sets;  // key=value overrides, applied after config
};

void apply_options(sigq::RunConfig& config, const CliOptions& opts) {
  if (!opts.config_path.empty()) config = sigq::load_config(opts.config_path);
  for (const auto& kv : opts.sets) {
    size_t eq = kv.find('=');
    if (eq == std::string::npos)
      throw sigq::ConfigError("--set expects key=value, got '" + kv + "'");
    auto trim = [](std::string s) {
      size_t a = s.find_first_not_of(" \t");
      size_t b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    config.set(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
  }
}

void add_common_flags(CLI::App* cmd, CliOptions& opts) {
  cmd->add_option("--config", opts.config_path, "key = value config file (flags win)");
  cmd->add_option("--set", opts.sets, "override any config key, e.g. --set seed=7")
      ->take_all();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"online-signature template quality toolkit"};
  app.require_subcommand(1);

  CliOptions opts;
  std::string root, out, verifier, scores, selection, imposter_source;
  uint64_t seed = 0;
  bool seed_set = false;
  int workers = 0;

  auto add_io_flags = [&](CLI::App* cmd) {
    add_common_flags(cmd, opts);
    cmd->add_option("--root", root, "dataset root containing manifest.json");
    cmd->add_option("--out", out, "output directory");
    cmd->add_option_function<uint64_t>(
           "--seed", [&](uint64_t v) { seed = v; seed_set = true; }, "master RNG seed");
  };

  auto* synth = app.add_subcommand("synth", "generate a seeded synthetic corpus");
  add_io_flags(synth);
  int users = 0, samples = 0, sessions = 0, forgeries = -1;
  double consistency = -1.0, knob = -1.0;
  synth->add_option("--users", users, "number of users (>= 2)");
  synth->add_option("--samples-per-user", samples, "genuine samples per user (>= 6)");
  synth->add_option("--sessions", sessions, "sessions per user");
  synth->add_option("--consistency", consistency, "per-user sample consistency in (0, 1]");
  synth->add_option("--complexity-knob", knob, "trajectory complexity scale (>= 0)");
  synth->add_option("--forgeries-per-user", forgeries, "skilled-forgery stand-ins per user");

  auto* extract = app.add_subcommand("extract", "write per-user feature CSV files");
  add_io_flags(extract);

  auto* quality = app.add_subcommand("quality", "per-template quality scores");
  add_io_flags(quality);

  auto* eval = app.add_subcommand("eval", "run the evaluation protocol and reports");
  add_io_flags(eval);
  eval->add_option("--verifier", verifier, "histogram | dtw");
  eval->add_option("--selection", selection, "random_repeated | first_session");
  eval->add_option("--imposter-source", imposter_source, "random_forgery | skilled_forgery");
  eval->add_option("--workers", workers, "worker threads (output is worker-count invariant)");

  auto* import_scores =
      app.add_subcommand("import-scores", "evaluate an external score matrix CSV");
  add_common_flags(import_scores, opts);
  import_scores->add_option("--scores", scores, "score CSV path")->required();
  import_scores->add_option("--out", out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage errors exit 2
  }

  try {
    sigq::RunConfig config;
    apply_options(config, opts);
    if (!root.empty()) config.root = root;
    if (!out.empty()) config.out_dir = out;
    if (seed_set) config.seed = seed;
    if (!verifier.empty()) config.set("verifier", verifier);
    if (!selection.empty()) config.set("selection", selection);
    if (!imposter_source.empty()) config.set("imposter_source", imposter_source);
    if (workers > 0) config.workers = workers;
    if (users > 0) config.synth.n_users = users;
    if (samples > 0) config.synth.samples_per_user = samples;
    if (sessions > 0) config.synth.sessions = sessions;
    if (consistency >= 0.0) config.synth.consistency = consistency;
    if (knob >= 0.0) config.synth.complexity_knob = knob;
    if (forgeries >= 0) config.synth.forgeries_per_user = forgeries;
    if (!scores.empty()) config.scores_csv = scores;

    sigq::CmdStatus status;
    if (*synth)
      status = sigq::cmd_synth(config, std::cout);
    else if (*extract)
      status = sigq::cmd_extract(config, std::cout);
    else if (*quality)
      status = sigq::cmd_quality(config, std::cout);
    else if (*eval || *import_scores)
      status = sigq::cmd_eval(config, std::cout);
    return status.warnings ? 1 : 0;
  } catch (const sigq::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
