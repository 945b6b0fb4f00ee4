#include "sigq/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sigq {

namespace {
constexpr double kPi = 3.141592653589793238;
}

void HistogramSpec::validate() const {
  if (speed_bins < 2) throw InvalidParam("speed_bins must be >= 2");
  if (angle_bins < 4) throw InvalidParam("angle_bins must be >= 4");
  if (pressure_bins < 2) throw InvalidParam("pressure_bins must be >= 2");
  if (static_cast<int>(speed_edges.size()) != speed_bins - 1)
    throw InvalidParam("speed_edges must have speed_bins - 1 entries");
  for (size_t i = 0; i < speed_edges.size(); ++i) {
    if (speed_edges[i] <= 0.0) throw InvalidParam("speed edges must be positive");
    if (i > 0 && speed_edges[i] <= speed_edges[i - 1])
      throw InvalidParam("speed edges must be strictly increasing");
  }
  if (pressure_max <= 0.0) throw InvalidParam("pressure_max must be positive");
}

std::vector<FeatureLayout::Segment> FeatureLayout::segments() const {
  std::vector<Segment> segs;
  segs.push_back({0, sa_size()});
  segs.push_back({sa_size(), sa_size()});
  if (with_pressure) {
    segs.push_back({2 * sa_size(), pressure_bins});
    segs.push_back({2 * sa_size() + pressure_bins, pressure_bins});
  }
  return segs;
}

FeatureLayout FeatureVector::layout(const HistogramSpec& spec) const {
  return FeatureLayout{spec.speed_bins, spec.angle_bins, spec.pressure_bins, has_pressure()};
}

std::vector<double> FeatureVector::flat() const {
  std::vector<double> out;
  out.reserve(sa_first.size() + sa_second.size() + pr_first.size() + pr_second.size());
  out.insert(out.end(), sa_first.begin(), sa_first.end());
  out.insert(out.end(), sa_second.begin(), sa_second.end());
  out.insert(out.end(), pr_first.begin(), pr_first.end());
  out.insert(out.end(), pr_second.begin(), pr_second.end());
  return out;
}

std::vector<DrawingVector> drawing_vectors(const SignatureSample& sample, bool divide_by_dt) {
  sample.validate();
  int pen_down_count = 0;
  for (const auto& p : sample.points) pen_down_count += p.pen_down ? 1 : 0;
  if (pen_down_count < 2)
    throw SampleTooShort("need >= 2 pen-down points, have " + std::to_string(pen_down_count));

  std::vector<DrawingVector> vectors;
  std::vector<double> magnitudes;
  for (size_t i = 0; i + 1 < sample.points.size(); ++i) {
    const auto& a = sample.points[i];
    const auto& b = sample.points[i + 1];
    if (!a.pen_down || !b.pen_down) continue;  // pen lift breaks the chain
    DrawingVector v;
    v.dx = static_cast<double>(b.x - a.x);
    v.dy = static_cast<double>(b.y - a.y);
    double mag = std::sqrt(v.dx * v.dx + v.dy * v.dy);
    if (divide_by_dt) {
      auto dt = static_cast<double>(std::max<int64_t>(b.t - a.t, 1));
      mag /= dt;
    }
    v.angle = std::atan2(v.dy, v.dx);
    if (v.angle >= kPi) v.angle -= 2.0 * kPi;  // atan2 may return +pi
    v.speed = mag;  // magnitude for now, normalized below
    vectors.push_back(v);
    magnitudes.push_back(mag);
  }

  double sum = 0.0;
  int nonzero = 0;
  double first_nonzero = 0.0;
  bool all_equal = true;
  for (double m : magnitudes)
    if (m > 0.0) {
      if (nonzero == 0)
        first_nonzero = m;
      else if (m != first_nonzero)
        all_equal = false;
      sum += m;
      ++nonzero;
    }
  if (nonzero > 0) {
    // the mean of equal magnitudes is that magnitude; bypassing the summation
    // keeps constant-speed samples at speed exactly 1
    double mean = all_equal ? first_nonzero : sum / nonzero;
    for (auto& v : vectors) v.speed = v.speed / mean;
  } else {
    for (auto& v : vectors) v.speed = 0.0;  // all displacements zero
  }
  return vectors;
}

int speed_bin(const HistogramSpec& spec, double speed) {
  auto it = std::upper_bound(spec.speed_edges.begin(), spec.speed_edges.end(), speed);
  return static_cast<int>(it - spec.speed_edges.begin());
}

int angle_bin(const HistogramSpec& spec, double angle) {
  double a = angle;
  if (a >= kPi) a -= 2.0 * kPi;
  int idx = static_cast<int>(std::floor((a + kPi) / (2.0 * kPi) * spec.angle_bins));
  return std::clamp(idx, 0, spec.angle_bins - 1);
}

int pressure_bin(const HistogramSpec& spec, double normalized_pressure) {
  double p = std::clamp(normalized_pressure, 0.0, 1.0);
  int idx = static_cast<int>(std::floor(p * spec.pressure_bins));
  return std::clamp(idx, 0, spec.pressure_bins - 1);
}

FeatureVector extract_features(const SignatureSample& sample, const HistogramSpec& spec) {
  spec.validate();
  if (spec.require_pressure && !sample.has_pressure())
    throw MissingPressure("sample for user '" + sample.user_id + "' lacks pressure");

  auto vectors = drawing_vectors(sample, spec.divide_by_dt);
  if (vectors.size() < 2)
    throw SampleTooShort("need >= 2 drawing vectors, have " + std::to_string(vectors.size()));

  // pressure of each vector's end point, aligned with `vectors`
  std::vector<double> pressures;
  if (sample.has_pressure()) {
    pressures.reserve(vectors.size());
    for (size_t i = 0; i + 1 < sample.points.size(); ++i) {
      const auto& a = sample.points[i];
      const auto& b = sample.points[i + 1];
      if (!a.pen_down || !b.pen_down) continue;
      pressures.push_back(static_cast<double>(*b.pressure) / spec.pressure_max);
    }
  }

  const size_t mid = vectors.size() / 2;
  FeatureVector fv;
  fv.l_first = static_cast<int>(mid);
  fv.l_second = static_cast<int>(vectors.size() - mid);
  fv.sa_first.assign(static_cast<size_t>(spec.speed_bins * spec.angle_bins), 0.0);
  fv.sa_second.assign(static_cast<size_t>(spec.speed_bins * spec.angle_bins), 0.0);
  if (sample.has_pressure()) {
    fv.pr_first.assign(static_cast<size_t>(spec.pressure_bins), 0.0);
    fv.pr_second.assign(static_cast<size_t>(spec.pressure_bins), 0.0);
  }

  for (size_t i = 0; i < vectors.size(); ++i) {
    const bool first = i < mid;
    auto& sa = first ? fv.sa_first : fv.sa_second;
    int flat = speed_bin(spec, vectors[i].speed) * spec.angle_bins +
               angle_bin(spec, vectors[i].angle);
    sa[static_cast<size_t>(flat)] += 1.0;
    if (!pressures.empty()) {
      auto& pr = first ? fv.pr_first : fv.pr_second;
      pr[static_cast<size_t>(pressure_bin(spec, pressures[i]))] += 1.0;
    }
  }

  auto normalize = [](std::vector<double>& h, int count) {
    if (count <= 0) return;
    for (auto& v : h) v /= count;
  };
  normalize(fv.sa_first, fv.l_first);
  normalize(fv.sa_second, fv.l_second);
  normalize(fv.pr_first, fv.l_first);
  normalize(fv.pr_second, fv.l_second);
  return fv;
}

std::string feature_csv_header(const FeatureLayout& layout) {
  std::ostringstream out;
  out << "user_id,session,label";
  for (const char* half : {"first", "second"})
    for (int s = 0; s < layout.speed_bins; ++s)
      for (int a = 0; a < layout.angle_bins; ++a) out << ",sa_" << half << "_s" << s << "_a" << a;
  if (layout.with_pressure)
    for (const char* half : {"first", "second"})
      for (int b = 0; b < layout.pressure_bins; ++b) out << ",pr_" << half << "_b" << b;
  out << '\n';
  return out.str();
}

std::string feature_csv_row(const SignatureSample& sample, const FeatureVector& fv) {
  std::ostringstream out;
  out.precision(17);
  out << sample.user_id << ',' << sample.session_id << ',' << label_name(sample.label);
  for (double v : fv.flat()) out << ',' << v;
  out << '\n';
  return out.str();
}

}  // namespace sigq
