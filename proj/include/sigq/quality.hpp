#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sigq/histogram.hpp"

namespace sigq {

// Per-feature mean/std of the random-signature population model (or of an
// actual dataset), aligned with FeatureVector::flat().
struct PopulationStats {
  enum class Source { generic_assumption, dataset_empirical };
  std::vector<double> mu;
  std::vector<double> sigma;
  int l_pop = 147;
  Source source = Source::generic_assumption;
};

// Binomial random-signature model for relative-frequency histograms: every
// bin of an N-bin histogram gets mu = 1/N and sigma = sqrt((1/L) * (N-1)/N^2).
// The speed-angle histogram counts as one histogram of M*N_a bins.
PopulationStats generic_population_stats(const HistogramSpec& spec, int l_pop,
                                         bool with_pressure = true);

// Mean/std of each feature over all provided samples (sample std, divisor n-1).
PopulationStats empirical_population_stats(const std::vector<FeatureVector>& samples);

// A user's enrolled template: per-feature statistics over E >= 2 enrolled
// feature vectors, the min-pooled speed-angle histograms, and the
// quantization vector used by the histogram verifier.
struct Template {
  std::string user_id;
  FeatureLayout layout;
  std::vector<FeatureVector> enrolled;
  std::vector<double> mu;              // per-feature mean
  std::vector<double> sigma;           // per-feature sample std (divisor E-1)
  std::vector<double> sa_min_first;    // min-pooled speed-angle, first half
  std::vector<double> sa_min_second;
  std::vector<double> quantization;    // sigma floored at kQuantizationFloor
  std::vector<double> quantized_mean;  // mu / quantization

  int enrolled_count() const { return static_cast<int>(enrolled.size()); }
};

inline constexpr double kQuantizationFloor = 1e-6;
inline constexpr double kInverseDispersionClamp = 1e3;

Template make_template(std::string user_id, std::vector<FeatureVector> enrolled,
                       const HistogramSpec& spec);

// Decidability index of one feature: |mu_T - mu_P| / sqrt((sigma_T + sigma_P)/2).
// The standard deviations (not variances) are averaged under the root.
double decidability(double mu_t, double sigma_t, double mu_p, double sigma_p);

struct DistinctivenessResult {
  double total = 0.0;
  std::vector<double> per_feature;
  int degenerate_count = 0;  // features with sigma_T + sigma_P == 0, counted as 0
};
DistinctivenessResult distinctiveness(const Template& tmpl, const PopulationStats& pop);

struct EmdResult {
  double value = 0.0;
  bool empty_half = false;  // a half whose min-pooled histogram is all zero
};
// Earth-moving distance from the min-pooled speed-angle histogram to a point
// mass at its own argmax bin, per half, halves summed. Bin weights are
// w(i,j) = sqrt((i_ref-i)^2/M + (j_ref-j)^2/N) on (speed, angle) indices.
EmdResult emd_complexity(const Template& tmpl);

struct InverseDispersionResult {
  double value = 0.0;
  int eligible = 0;   // K: speed-angle features with nonzero mean
  int clamped = 0;    // features whose inverse dispersion hit the clamp
};
InverseDispersionResult inverse_dispersion(const Template& tmpl);

struct ComplexityResult {
  double value = 0.0;
  EmdResult emd;
  InverseDispersionResult invd;
};
ComplexityResult complexity(const Template& tmpl);

struct RepeatabilityResult {
  double value = 0.0;   // +inf when every validation score is zero
  bool infinite = false;
};
// n over the sum of validation dissimilarity scores.
RepeatabilityResult repeatability(const std::vector<double>& validation_scores);

struct QualityReport {
  std::string user_id;
  double distinctiveness = 0.0;
  std::vector<double> per_feature_d;
  int degenerate_features = 0;
  double emd = 0.0;
  bool emd_empty_half = false;
  double inv_dispersion = 0.0;
  int k = 0;
  int clamped_features = 0;
  double complexity = 0.0;
  std::optional<double> repeatability;
  bool repeatability_infinite = false;

  std::string to_json() const;
  static std::string csv_header();
  std::string csv_row() const;
};

QualityReport compute_quality(const Template& tmpl, const PopulationStats& pop,
                              const std::optional<std::vector<double>>& validation_scores);

}  // namespace sigq
