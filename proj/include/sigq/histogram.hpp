#pragma once

#include <string>
#include <vector>

#include "sigq/sample.hpp"

namespace sigq {

// Histogram feature configuration. Speeds are relative units (displacement
// magnitude over the sample's mean nonzero displacement magnitude), so the
// default edges are ratios against that mean.
struct HistogramSpec {
  int speed_bins = 4;                            // M
  int angle_bins = 16;                           // N_a, uniform over [-pi, pi)
  int pressure_bins = 16;                        // N_p, uniform over [0, 1]
  std::vector<double> speed_edges{0.5, 1.0, 2.0};  // interior edges, ascending
  bool divide_by_dt = false;   // divide displacement by delta-t before normalizing
  bool require_pressure = false;
  double pressure_max = 1023.0;  // device max used to normalize pressure

  void validate() const;  // throws InvalidParam
};

// Displacement between consecutive pen-down points within one stroke.
struct DrawingVector {
  double dx = 0.0;
  double dy = 0.0;
  double speed = 0.0;  // relative units, >= 0
  double angle = 0.0;  // atan2(dy, dx), wrapped into [-pi, pi)
};

// Flattened feature addressing: [sa_first | sa_second | pr_first | pr_second],
// speed-angle blocks row-major over (speed bin, angle bin).
struct FeatureLayout {
  int speed_bins = 4;
  int angle_bins = 16;
  int pressure_bins = 16;
  bool with_pressure = true;

  int sa_size() const { return speed_bins * angle_bins; }
  int total() const { return 2 * sa_size() + (with_pressure ? 2 * pressure_bins : 0); }

  struct Segment {
    int offset = 0;
    int bins = 0;  // bin count of the histogram, the N of the binomial model
  };
  // all histograms, speed-angle halves first
  std::vector<Segment> segments() const;

  friend bool operator==(const FeatureLayout&, const FeatureLayout&) = default;
};

// Relative-frequency histograms of one sample, per half.
struct FeatureVector {
  std::vector<double> sa_first;   // speed_bins x angle_bins, row-major
  std::vector<double> sa_second;
  std::vector<double> pr_first;   // empty when the sample has no pressure
  std::vector<double> pr_second;
  int l_first = 0;   // drawing vectors in the first half
  int l_second = 0;

  bool has_pressure() const { return !pr_first.empty(); }
  FeatureLayout layout(const HistogramSpec& spec) const;
  std::vector<double> flat() const;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

// One vector per consecutive pen-down point pair; pen lifts break the chain.
// Throws SampleTooShort when fewer than 2 pen-down points exist.
std::vector<DrawingVector> drawing_vectors(const SignatureSample& sample,
                                           bool divide_by_dt = false);

// Splits the drawing vectors at index floor(count/2) and histograms each half.
// Pressure values ride on the vectors (pressure at the vector's end point,
// normalized by pressure_max into [0, 1]) so both histograms of a half share
// one element count. Requires >= 2 drawing vectors.
FeatureVector extract_features(const SignatureSample& sample, const HistogramSpec& spec);

int speed_bin(const HistogramSpec& spec, double speed);
int angle_bin(const HistogramSpec& spec, double angle);
int pressure_bin(const HistogramSpec& spec, double normalized_pressure);

// Feature CSV: one row per sample, `user_id,session,label` then bin values in
// flat() order. Column names in the header spell out the documented order.
std::string feature_csv_header(const FeatureLayout& layout);
std::string feature_csv_row(const SignatureSample& sample, const FeatureVector& fv);

}  // namespace sigq
