#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sigq/manifest.hpp"
#include "sigq/verify.hpp"

namespace sigq {

// ---------------------------------------------------------------------------
// error-rate machinery
// ---------------------------------------------------------------------------

// Accept rule: a test sample is accepted when its dissimilarity score <= t.
// FAR(t) = fraction of imposter scores <= t; FRR(t) = fraction of genuine
// scores > t. FAR is non-decreasing and FRR non-increasing in t by counting.
struct ErrorCurve {
  std::vector<double> thresholds;  // ascending
  std::vector<double> far;
  std::vector<double> frr;
};

double far_at(const std::vector<double>& sorted_imposter, double threshold);
double frr_at(const std::vector<double>& sorted_genuine, double threshold);

ErrorCurve far_frr(const std::vector<double>& genuine, const std::vector<double>& imposter,
                   const std::vector<double>& thresholds);

// All distinct observed scores plus midpoints between neighbours. When
// max_points > 0 and the exact grid would exceed it, the grid is thinned to
// evenly spaced quantiles of the distinct scores (deterministic).
std::vector<double> threshold_grid(std::vector<double> scores, size_t max_points = 0);

struct EerPoint {
  double threshold = 0.0;
  double rate = 0.0;
};

// Linear interpolation at the FAR/FRR crossing. The curve must span one.
EerPoint eer(const ErrorCurve& curve);
// Convenience: builds a spanning grid (virtual endpoints included) first.
EerPoint eer_from_scores(const std::vector<double>& genuine,
                         const std::vector<double>& imposter);

double hter(double far, double frr);

struct RocPoint {
  double far = 0.0;
  double tar = 0.0;  // 1 - FRR
};
std::vector<RocPoint> roc(const std::vector<double>& genuine,
                          const std::vector<double>& imposter);

// ---------------------------------------------------------------------------
// quartile grouping
// ---------------------------------------------------------------------------

// Templates sorted by quality ascending and cut at n/4, n/2, 3n/4. A template
// joins the group of its score's first occurrence in the sorted order, so
// ties always fall into the lower group (all-equal scores collapse into
// group 0, reported via collapsed_ties).
struct QuartileSplit {
  std::array<std::vector<int>, 4> groups;  // indices, group 0 = lowest quality
  std::vector<int> group_of;
  bool collapsed_ties = false;
};
QuartileSplit split_quartiles(const std::vector<double>& quality,
                              const std::vector<std::string>& ids);

enum class RateKind { far, frr };

// Equal-weight mean of per-template rate curves within each quartile group.
// per_template_scores[i] holds the imposter (for FAR) or genuine (for FRR)
// scores of template i. Empty groups yield NaN rates.
std::array<std::vector<double>, 4> quartile_mean_rates(
    const QuartileSplit& split, const std::vector<std::vector<double>>& per_template_scores,
    const std::vector<double>& thresholds, RateKind kind);

// One trade-off curve per quality quartile: FAR averaged over each group's
// per-template imposter scores, FRR over its genuine scores.
std::array<ErrorCurve, 4> quartile_curves(const std::vector<double>& quality,
                                          const std::vector<std::string>& ids,
                                          const ScoreMatrix& scores,
                                          const std::vector<double>& thresholds,
                                          bool* collapsed_ties = nullptr);

// ---------------------------------------------------------------------------
// rank statistics
// ---------------------------------------------------------------------------

// Average ranks, 1-based; ties share the mean of the positions they occupy.
std::vector<double> average_ranks(const std::vector<double>& values);

// rho = 1 - 6*sum(d^2) / (n(n^2-1)) on average ranks; with ties present the
// formula is the usual approximation.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

struct GoldenStatistic {
  enum class Kind { mean_all, min_score, mean_k_lowest, max_score, mean_k_highest };
  Kind kind = Kind::mean_all;
  int k = 0;  // for the mean_k_* kinds

  static GoldenStatistic mean_all() { return {Kind::mean_all, 0}; }
  static GoldenStatistic min_score() { return {Kind::min_score, 0}; }
  static GoldenStatistic mean_k_lowest(int k) { return {Kind::mean_k_lowest, k}; }
  static GoldenStatistic max_score() { return {Kind::max_score, 0}; }
  static GoldenStatistic mean_k_highest(int k) { return {Kind::mean_k_highest, k}; }
  const char* name() const;
};

enum class ScorePartition { imposter, genuine };

// Ground-truth template ordering by a score statistic. Ranks are oriented so
// that a higher rank means a better-performing template: ascending in the
// statistic on the imposter partition, descending on the genuine partition.
// A predictive quality metric therefore correlates positively.
struct GoldenRank {
  GoldenStatistic statistic;
  ScorePartition partition = ScorePartition::imposter;
  std::vector<std::string> user_ids;  // sorted
  std::vector<double> values;         // statistic per template
  std::vector<double> ranks;
};
GoldenRank golden_rank(const ScoreMatrix& matrix, GoldenStatistic statistic,
                       ScorePartition partition);

// ---------------------------------------------------------------------------
// template gating
// ---------------------------------------------------------------------------

// Discards the floor(fraction * n) lowest-quality templates; ties broken by
// user id so the discard set is stable.
struct GateResult {
  std::vector<std::string> kept;       // sorted by id
  std::vector<std::string> discarded;  // sorted by id
};
GateResult gate_templates(const std::vector<std::string>& ids,
                          const std::vector<double>& quality, double fraction);
// Intersection gating: keep only templates discarded by no metric.
GateResult gate_union_discard(const std::vector<GateResult>& gates);

// ---------------------------------------------------------------------------
// experimental protocol
// ---------------------------------------------------------------------------

// random_repeated draws enroll_count genuines per repetition from the
// protocol seed; first_session enrolls every first-session sample
// (enroll_count ignored) and runs a single repetition.
struct Protocol {
  int enroll_count = 5;
  enum class Selection { random_repeated, first_session };
  Selection selection = Selection::random_repeated;
  int repeat_times = 100;  // first_session runs once regardless
  uint64_t seed = 1;
  int validation_count = 0;  // cross-session samples for repeatability
  enum class ImposterSource { random_forgery, skilled_forgery };
  ImposterSource imposter_source = ImposterSource::random_forgery;
  int imposters_per_target = 0;  // 0 = every available imposter sample
};

class Rng;

// One user's enroll/validation/test partition for one repetition. Validation
// samples come from sessions disjoint from the enrollment sessions; when none
// qualify the validation set stays empty and repeatability is reported absent.
struct ProtocolSplit {
  std::vector<int> enrolled;  // indices into user.genuine
  std::vector<int> validation;
  std::vector<int> test;
};
ProtocolSplit protocol_split(const SignatureDataset::User& user, const Protocol& protocol,
                             Rng& rng);

// Per-user aggregate over repetitions.
struct TemplateSummary {
  std::string user_id;
  int reps = 0;
  bool quality_available = false;
  double distinctiveness = 0.0;  // means over repetitions
  double complexity = 0.0;
  std::optional<double> repeatability;
  bool repeatability_infinite = false;
};

struct RepQuality {
  std::string user_id;
  int rep = 0;
  double distinctiveness = 0.0;
  double complexity = 0.0;
  std::optional<double> repeatability;
};

struct ProtocolRun {
  ScoreMatrix scores;
  std::vector<TemplateSummary> templates;  // sorted by user id
  std::vector<RepQuality> rep_quality;     // per (user, rep), when pop provided
};

// Enrolls per (user, repetition), scores held-out genuines and the designated
// imposter samples, and computes template quality when population stats are
// given. Deterministic for a fixed protocol seed, for any worker count.
ProtocolRun run_protocol(const SignatureDataset& dataset, const Protocol& protocol,
                         VerifierKind verifier, const HistogramSpec& spec,
                         const PopulationStats* pop, int workers = 1);

// Sequential per-user split used for keystroke data: the first enroll_count
// samples train the mean template, the next validation_count feed
// repeatability, the rest are genuine tests. Imposter scores come from other
// users' test partitions.
struct KeystrokeProtocol {
  int enroll_count = 200;
  int validation_count = 50;
  bool include_imposters = true;
};
ProtocolRun run_keystroke_protocol(const KeystrokeDataset& dataset,
                                   const KeystrokeProtocol& protocol);

}  // namespace sigq
