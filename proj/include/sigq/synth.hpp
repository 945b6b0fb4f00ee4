#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "sigq/manifest.hpp"

namespace sigq {

// Seeded synthetic signature corpus. Each user is a smooth trajectory (a sum
// of 3-6 random-phase sinusoids per axis); samples of a user differ by jitter
// scaled by (1 - consistency), sessions differ by a drift also scaled by
// (1 - consistency); pressure is synthesized in [0, 1023]. The generator is a
// pure function of its parameters.
struct SynthParams {
  uint64_t seed = 7;
  int n_users = 20;             // >= 2
  int samples_per_user = 20;    // >= 6, split across sessions
  int sessions = 2;             // >= 1
  double consistency = 0.8;     // (0, 1]
  double complexity_knob = 1.0; // >= 0, scales harmonic count/amplitude
  int forgeries_per_user = 0;   // skilled-forgery stand-ins, heavier jitter
  std::string user_prefix = "u";
};

struct SynthCorpus {
  DatasetManifest manifest;
  std::map<std::string, std::string> files;  // relative path -> SVC text
  SignatureDataset dataset;                  // same content, in memory
};

SynthCorpus synth_corpus(const SynthParams& params);

// Concatenates two corpora; user id sets must be disjoint.
SynthCorpus merge_corpora(const SynthCorpus& a, const SynthCorpus& b);

// Writes every SVC file plus manifest.json under root.
void write_corpus(const SynthCorpus& corpus, const std::filesystem::path& root);

}  // namespace sigq
