// Test-only reference implementations, kept independent of the library code
// paths they check.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "sigq/histogram.hpp"
#include "sigq/quality.hpp"
#include "sigq/rng.hpp"
#include "sigq/sample.hpp"

namespace oracle {

constexpr double kPi = 3.141592653589793238;

// --- naive histogram binning -------------------------------------------------
// Places each (speed, angle) element by scanning bin intervals instead of
// arithmetic index computation.
struct NaiveHistogram {
  std::vector<double> sa_first, sa_second;
};

inline NaiveHistogram naive_speed_angle_histogram(const std::vector<double>& speeds,
                                                  const std::vector<double>& angles,
                                                  const sigq::HistogramSpec& spec) {
  const int m = spec.speed_bins, n = spec.angle_bins;
  NaiveHistogram h;
  h.sa_first.assign(static_cast<size_t>(m * n), 0.0);
  h.sa_second.assign(static_cast<size_t>(m * n), 0.0);
  const size_t count = speeds.size();
  const size_t mid = count / 2;

  auto speed_bin_scan = [&](double s) {
    for (int b = 0; b < m - 1; ++b)
      if (s < spec.speed_edges[static_cast<size_t>(b)]) return b;
    return m - 1;
  };
  auto angle_bin_scan = [&](double a) {
    if (a >= kPi) a -= 2.0 * kPi;
    double width = 2.0 * kPi / n;
    for (int b = 0; b < n; ++b) {
      double lo = -kPi + b * width;
      double hi = b == n - 1 ? kPi : -kPi + (b + 1) * width;
      if (a >= lo && a < hi) return b;
    }
    return n - 1;  // a == pi boundary artifacts
  };

  for (size_t i = 0; i < count; ++i) {
    int flat = speed_bin_scan(speeds[i]) * n + angle_bin_scan(angles[i]);
    (i < mid ? h.sa_first : h.sa_second)[static_cast<size_t>(flat)] += 1.0;
  }
  size_t first_count = mid, second_count = count - mid;
  if (first_count > 0)
    for (auto& v : h.sa_first) v /= static_cast<double>(first_count);
  if (second_count > 0)
    for (auto& v : h.sa_second) v /= static_cast<double>(second_count);
  return h;
}

// --- Monte-Carlo check of the binomial bin model ------------------------------
// Drops `length` uniform elements into `bins` bins `draws` times and returns
// the std of the relative frequency pooled over all bins.
inline double mc_relative_frequency_sigma(uint64_t seed, int length, int bins, int draws) {
  sigq::Rng rng(seed);
  std::vector<double> freqs;
  freqs.reserve(static_cast<size_t>(draws) * static_cast<size_t>(bins));
  std::vector<int> counts(static_cast<size_t>(bins));
  for (int d = 0; d < draws; ++d) {
    std::fill(counts.begin(), counts.end(), 0);
    for (int i = 0; i < length; ++i) counts[static_cast<size_t>(rng.uniform_int(0, bins - 1))]++;
    for (int b = 0; b < bins; ++b)
      freqs.push_back(static_cast<double>(counts[static_cast<size_t>(b)]) / length);
  }
  double mean = 0.0;
  for (double f : freqs) mean += f;
  mean /= static_cast<double>(freqs.size());
  double var = 0.0;
  for (double f : freqs) var += (f - mean) * (f - mean);
  var /= static_cast<double>(freqs.size() - 1);
  return std::sqrt(var);
}

// --- naive EMD ----------------------------------------------------------------
// Double loop straight from the definition: min-pool, argmax reference bin,
// index-distance weights.
inline double naive_emd(const sigq::Template& tmpl) {
  const int m = tmpl.layout.speed_bins, n = tmpl.layout.angle_bins;
  double total = 0.0;
  for (bool first_half : {true, false}) {
    // pooled minimum recomputed from the enrolled vectors
    std::vector<double> h(static_cast<size_t>(m * n));
    for (size_t k = 0; k < h.size(); ++k) {
      double lo = 1e300;
      for (const auto& fv : tmpl.enrolled)
        lo = std::min(lo, (first_half ? fv.sa_first : fv.sa_second)[k]);
      h[k] = lo;
    }
    int best_i = 0, best_j = 0;
    double best = -1.0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j)
        if (h[static_cast<size_t>(i * n + j)] > best) {
          best = h[static_cast<size_t>(i * n + j)];
          best_i = i;
          best_j = j;
        }
    if (best <= 0.0) continue;
    double half_total = 0.0;  // per half, halves summed afterwards
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) {
        double w = std::sqrt(static_cast<double>(best_i - i) * (best_i - i) / m +
                             static_cast<double>(best_j - j) * (best_j - j) / n);
        half_total += h[static_cast<size_t>(i * n + j)] * w;
      }
    total += half_total;
  }
  return total;
}

// --- brute-force DTW ------------------------------------------------------
// Enumerates every monotone warping path with steps (1,0), (0,1), (1,1).
inline std::vector<std::array<double, 4>> oracle_frames(const sigq::SignatureSample& s) {
  std::vector<std::array<double, 4>> frames;
  for (const auto& p : s.points)
    if (p.pen_down)
      frames.push_back({static_cast<double>(p.x), static_cast<double>(p.y), 0.0, 0.0});
  double x0 = frames.front()[0], y0 = frames.front()[1];
  for (auto& f : frames) {
    f[0] -= x0;
    f[1] -= y0;
  }
  for (size_t i = 0; i + 1 < frames.size(); ++i) {
    frames[i][2] = frames[i + 1][0] - frames[i][0];
    frames[i][3] = frames[i + 1][1] - frames[i][1];
  }
  frames[frames.size() - 1][2] = frames[frames.size() - 2][2];
  frames[frames.size() - 1][3] = frames[frames.size() - 2][3];
  return frames;
}

inline double brute_dtw(const sigq::SignatureSample& a, const sigq::SignatureSample& b) {
  auto fa = oracle_frames(a);
  auto fb = oracle_frames(b);
  auto cost = [&](size_t i, size_t j) {
    double s = 0.0;
    for (int k = 0; k < 4; ++k) {
      double d = fa[i][k] - fb[j][k];
      s += d * d;
    }
    return std::sqrt(s);
  };
  double best = 1e300;
  // recursive path enumeration
  std::function<void(size_t, size_t, double)> walk = [&](size_t i, size_t j, double acc) {
    acc += cost(i, j);
    if (acc >= best) return;  // paths only grow
    if (i + 1 == fa.size() && j + 1 == fb.size()) {
      best = std::min(best, acc);
      return;
    }
    if (i + 1 < fa.size()) walk(i + 1, j, acc);
    if (j + 1 < fb.size()) walk(i, j + 1, acc);
    if (i + 1 < fa.size() && j + 1 < fb.size()) walk(i + 1, j + 1, acc);
  };
  walk(0, 0, 0.0);
  return best / static_cast<double>(std::min(fa.size(), fb.size()));
}

// --- Pearson correlation ----------------------------------------------------
inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

// --- naive distance loops -----------------------------------------------------
inline double naive_manhattan(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] > b[i] ? a[i] - b[i] : b[i] - a[i];
  return s;
}

inline double naive_squared_euclidean(const std::vector<double>& a,
                                      const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

// --- random sample builders ---------------------------------------------------
inline sigq::SignatureSample random_sample(sigq::Rng& rng, int points, bool with_pressure,
                                           bool with_pen_up = false) {
  sigq::SignatureSample s;
  s.user_id = "r";
  int x = rng.uniform_int(-500, 500), y = rng.uniform_int(-500, 500);
  for (int i = 0; i < points; ++i) {
    sigq::PenPoint p;
    x += rng.uniform_int(-40, 40);
    y += rng.uniform_int(-40, 40);
    p.x = x;
    p.y = y;
    p.t = static_cast<int64_t>(i) * 10;
    if (with_pressure) p.pressure = rng.uniform_int(0, 1023);
    p.pen_down = !(with_pen_up && i > 1 && i + 2 < points && rng.uniform() < 0.1);
    s.points.push_back(p);
  }
  return s;
}

}  // namespace oracle
