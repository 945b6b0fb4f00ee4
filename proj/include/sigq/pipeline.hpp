#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "sigq/eval.hpp"
#include "sigq/synth.hpp"

namespace sigq {

// Batch run configuration: one flat key=value config file, every key
// overridable from the command line (flags win). Unknown keys are rejected.
struct RunConfig {
  std::filesystem::path root;        // dataset root (manifest.json inside)
  std::filesystem::path manifest;    // optional explicit manifest path
  std::filesystem::path out_dir = "out";
  std::filesystem::path scores_csv;  // external score matrix, bypasses the verifier

  VerifierKind verifier = VerifierKind::histogram;
  HistogramSpec spec;
  Protocol protocol;
  uint64_t seed = 7;
  int l_pop = 147;
  enum class PopSource { generic, empirical };
  PopSource pop_source = PopSource::generic;
  double gate_fraction = 0.10;
  int workers = 1;
  size_t max_thresholds = 20001;

  // keystroke protocol (used when the manifest modality is keystroke)
  KeystrokeProtocol keystroke;

  SynthParams synth;

  // applies `key = value`; throws ConfigError on unknown keys or bad values
  void set(const std::string& key, const std::string& value);
};

RunConfig load_config(const std::filesystem::path& path);

struct CmdStatus {
  bool warnings = false;  // data-quality warnings occurred (exit code 1)
};

// extract: one feature CSV per user under <out>/features/.
CmdStatus cmd_extract(const RunConfig& config, std::ostream& log);
// quality: per-template distinctiveness/complexity/repeatability rows,
// quality.csv + quality.json under <out>/.
CmdStatus cmd_quality(const RunConfig& config, std::ostream& log);
// eval: protocol run (or imported scores), curves/ranks/gating/roc reports.
CmdStatus cmd_eval(const RunConfig& config, std::ostream& log);
// synth: writes the synthetic corpus to <out>/.
CmdStatus cmd_synth(const RunConfig& config, std::ostream& log);

}  // namespace sigq
