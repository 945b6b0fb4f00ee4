#pragma once

#include <span>
#include <string>
#include <vector>

#include "sigq/quality.hpp"
#include "sigq/sample.hpp"

namespace sigq {

enum class VerifierKind { histogram, dtw, keystroke_euclidean };

const char* verifier_name(VerifierKind kind);
VerifierKind verifier_from_name(const std::string& name);

// Histogram verifier: template mean quantized by the per-feature enrollment
// std (floored at kQuantizationFloor), scored by Manhattan distance in
// quantized space. Enrollment is make_template(); the quantization vector Q
// lives on the Template.
Template histogram_enroll(std::string user_id, std::vector<FeatureVector> enrolled,
                          const HistogramSpec& spec);
double histogram_score(const Template& tmpl, const FeatureVector& test);

// DTW over 4-sequence frames (x - x0, y - y0, dx, dy) built from the pen-down
// points, first coordinate translated to the origin, derivatives by forward
// difference with the last frame repeating the previous derivative. Classic
// DP with steps {(1,0),(0,1),(1,1)}, Euclidean local cost, no window; the
// total path cost is divided by the shorter frame count.
double dtw_distance(const SignatureSample& a, const SignatureSample& b);

inline constexpr double kDtwDenominatorFloor = 1e-9;

// Mean DTW distance from the enrolled samples to the test, divided by the
// mean pairwise DTW distance between enrolled samples. An all-identical
// enrollment floors the denominator at kDtwDenominatorFloor and sets the flag.
double dtw_score(const std::vector<SignatureSample>& enrolled, const SignatureSample& test,
                 bool* degenerate_enrollment = nullptr);

// Keystroke verifier: squared Euclidean distance to the enrollment mean.
std::array<double, kKeystrokeFeatureCount> keystroke_enroll(
    const std::vector<KeystrokeSample>& enrolled);
double keystroke_score(std::span<const double> template_mean, const KeystrokeSample& test);

// Long-form dissimilarity score matrix: one entry per (test sample, target
// template) pair. Lower score means more similar.
struct ScoreEntry {
  std::string test_user;
  int test_session = 0;
  Label test_label = Label::genuine;
  std::string target_user;
  int rep = 0;  // protocol repetition, kept in memory, not exported
  double score = 0.0;

  friend bool operator==(const ScoreEntry&, const ScoreEntry&) = default;
};

struct ScoreMatrix {
  std::vector<ScoreEntry> entries;

  // Genuine: the target's own genuine test samples. Imposter: everything else
  // (other users' genuines standing in as random forgeries, or skilled
  // forgeries of the target).
  static bool is_genuine(const ScoreEntry& e) {
    return e.test_user == e.target_user && e.test_label == Label::genuine;
  }
  std::vector<double> genuine_scores(const std::string& target_user) const;
  std::vector<double> imposter_scores(const std::string& target_user) const;
  std::vector<double> pooled_genuine() const;
  std::vector<double> pooled_imposter() const;
  std::vector<std::string> target_users() const;  // sorted, unique
};

// CSV schema: test_user,test_session,test_label,target_user,score
std::string render_score_csv(const ScoreMatrix& matrix);
ScoreMatrix parse_score_csv(std::string_view text);

}  // namespace sigq
