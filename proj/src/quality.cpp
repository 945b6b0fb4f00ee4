#include "sigq/quality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace sigq {

PopulationStats generic_population_stats(const HistogramSpec& spec, int l_pop,
                                         bool with_pressure) {
  spec.validate();
  if (l_pop < 1) throw InvalidParam("l_pop must be >= 1");
  FeatureLayout layout{spec.speed_bins, spec.angle_bins, spec.pressure_bins, with_pressure};
  PopulationStats pop;
  pop.l_pop = l_pop;
  pop.source = PopulationStats::Source::generic_assumption;
  pop.mu.assign(static_cast<size_t>(layout.total()), 0.0);
  pop.sigma.assign(static_cast<size_t>(layout.total()), 0.0);
  for (const auto& seg : layout.segments()) {
    double n = seg.bins;
    if (seg.bins < 2) throw InvalidParam("histogram with < 2 bins has zero population spread");
    double mu = 1.0 / n;
    double sigma = std::sqrt((1.0 / l_pop) * (n - 1.0) / (n * n));
    for (int i = 0; i < seg.bins; ++i) {
      pop.mu[static_cast<size_t>(seg.offset + i)] = mu;
      pop.sigma[static_cast<size_t>(seg.offset + i)] = sigma;
    }
  }
  return pop;
}

namespace {

// mean and sample std (divisor n-1) per column
void column_stats(const std::vector<std::vector<double>>& rows, std::vector<double>& mu,
                  std::vector<double>& sigma) {
  const size_t n = rows.size();
  const size_t dim = rows.front().size();
  mu.assign(dim, 0.0);
  sigma.assign(dim, 0.0);
  for (const auto& r : rows)
    for (size_t i = 0; i < dim; ++i) mu[i] += r[i];
  for (auto& v : mu) v /= static_cast<double>(n);
  if (n < 2) return;
  for (const auto& r : rows)
    for (size_t i = 0; i < dim; ++i) {
      double d = r[i] - mu[i];
      sigma[i] += d * d;
    }
  for (auto& v : sigma) v = std::sqrt(v / static_cast<double>(n - 1));
}

}  // namespace

PopulationStats empirical_population_stats(const std::vector<FeatureVector>& samples) {
  if (samples.size() < 2) throw TooFewSamples("empirical stats need >= 2 samples");
  std::vector<std::vector<double>> rows;
  rows.reserve(samples.size());
  for (const auto& s : samples) {
    rows.push_back(s.flat());
    if (rows.back().size() != rows.front().size())
      throw FeatureCountMismatch("samples disagree on feature count");
  }
  PopulationStats pop;
  pop.source = PopulationStats::Source::dataset_empirical;
  pop.l_pop = 0;
  column_stats(rows, pop.mu, pop.sigma);
  return pop;
}

Template make_template(std::string user_id, std::vector<FeatureVector> enrolled,
                       const HistogramSpec& spec) {
  if (enrolled.size() < 2)
    throw TooFewSamples("template needs >= 2 enrolled samples, got " +
                        std::to_string(enrolled.size()));
  Template t;
  t.user_id = std::move(user_id);
  t.layout = enrolled.front().layout(spec);

  std::vector<std::vector<double>> rows;
  rows.reserve(enrolled.size());
  const auto sa_expected = static_cast<size_t>(t.layout.sa_size());
  const auto pr_expected =
      t.layout.with_pressure ? static_cast<size_t>(t.layout.pressure_bins) : size_t{0};
  for (const auto& fv : enrolled) {
    if (fv.layout(spec) != t.layout || fv.sa_first.size() != sa_expected ||
        fv.sa_second.size() != sa_expected || fv.pr_first.size() != pr_expected ||
        fv.pr_second.size() != pr_expected)
      throw FeatureCountMismatch("enrolled samples disagree on feature shape");
    rows.push_back(fv.flat());
  }
  column_stats(rows, t.mu, t.sigma);

  const auto sa_size = static_cast<size_t>(t.layout.sa_size());
  t.sa_min_first.assign(sa_size, std::numeric_limits<double>::infinity());
  t.sa_min_second.assign(sa_size, std::numeric_limits<double>::infinity());
  for (const auto& fv : enrolled) {
    for (size_t i = 0; i < sa_size; ++i) {
      t.sa_min_first[i] = std::min(t.sa_min_first[i], fv.sa_first[i]);
      t.sa_min_second[i] = std::min(t.sa_min_second[i], fv.sa_second[i]);
    }
  }

  t.quantization.resize(t.sigma.size());
  t.quantized_mean.resize(t.sigma.size());
  for (size_t i = 0; i < t.sigma.size(); ++i) {
    t.quantization[i] = std::max(t.sigma[i], kQuantizationFloor);
    t.quantized_mean[i] = t.mu[i] / t.quantization[i];
  }
  t.enrolled = std::move(enrolled);
  return t;
}

double decidability(double mu_t, double sigma_t, double mu_p, double sigma_p) {
  double spread = sigma_t + sigma_p;
  if (spread <= 0.0) throw DegenerateSpread("sigma_T + sigma_P must be positive");
  return std::abs(mu_t - mu_p) / std::sqrt(spread / 2.0);
}

DistinctivenessResult distinctiveness(const Template& tmpl, const PopulationStats& pop) {
  if (pop.mu.size() != tmpl.mu.size() || pop.sigma.size() != tmpl.sigma.size())
    throw FeatureCountMismatch("population stats cover " + std::to_string(pop.mu.size()) +
                               " features, template has " + std::to_string(tmpl.mu.size()));
  DistinctivenessResult res;
  res.per_feature.resize(tmpl.mu.size(), 0.0);
  for (size_t i = 0; i < tmpl.mu.size(); ++i) {
    double spread = tmpl.sigma[i] + pop.sigma[i];
    if (spread <= 0.0) {
      res.degenerate_count++;  // constant feature, no evidence either way
      continue;
    }
    res.per_feature[i] = decidability(tmpl.mu[i], tmpl.sigma[i], pop.mu[i], pop.sigma[i]);
    res.total += res.per_feature[i];
  }
  return res;
}

namespace {

double emd_half(const std::vector<double>& h_min, int speed_bins, int angle_bins,
                bool& empty_flag) {
  int ref = 0;
  for (int k = 1; k < static_cast<int>(h_min.size()); ++k)
    if (h_min[static_cast<size_t>(k)] > h_min[static_cast<size_t>(ref)]) ref = k;  // ties keep lowest index
  if (h_min[static_cast<size_t>(ref)] <= 0.0) {
    empty_flag = true;
    return 0.0;
  }
  const int i_ref = ref / angle_bins;
  const int j_ref = ref % angle_bins;
  double total = 0.0;
  for (int k = 0; k < static_cast<int>(h_min.size()); ++k) {
    int i = k / angle_bins;
    int j = k % angle_bins;
    double di = static_cast<double>(i_ref - i);
    double dj = static_cast<double>(j_ref - j);
    double w = std::sqrt(di * di / speed_bins + dj * dj / angle_bins);
    total += h_min[static_cast<size_t>(k)] * w;
  }
  return total;
}

}  // namespace

EmdResult emd_complexity(const Template& tmpl) {
  EmdResult res;
  res.value = emd_half(tmpl.sa_min_first, tmpl.layout.speed_bins, tmpl.layout.angle_bins,
                       res.empty_half) +
              emd_half(tmpl.sa_min_second, tmpl.layout.speed_bins, tmpl.layout.angle_bins,
                       res.empty_half);
  return res;
}

InverseDispersionResult inverse_dispersion(const Template& tmpl) {
  if (tmpl.enrolled_count() < 2) throw TooFewSamples("dispersion needs >= 2 enrolled samples");
  InverseDispersionResult res;
  double sum = 0.0;
  const int sa_total = 2 * tmpl.layout.sa_size();
  for (int k = 0; k < sa_total; ++k) {
    double mean = tmpl.mu[static_cast<size_t>(k)];
    if (mean <= 0.0) continue;  // zero-mean features are excluded
    res.eligible++;
    double var = tmpl.sigma[static_cast<size_t>(k)] * tmpl.sigma[static_cast<size_t>(k)];
    double inv = var > 0.0 ? mean / var : std::numeric_limits<double>::infinity();
    if (inv >= kInverseDispersionClamp) {
      inv = kInverseDispersionClamp;
      res.clamped++;
    }
    sum += inv;
  }
  if (res.eligible == 0) throw NoEligibleFeatures("every speed-angle feature has zero mean");
  res.value = sum / res.eligible;
  return res;
}

ComplexityResult complexity(const Template& tmpl) {
  ComplexityResult res;
  res.emd = emd_complexity(tmpl);
  res.invd = inverse_dispersion(tmpl);
  res.value = res.emd.value * res.invd.value;
  return res;
}

RepeatabilityResult repeatability(const std::vector<double>& validation_scores) {
  if (validation_scores.empty()) throw EmptyValidationSet("no validation scores");
  double sum = 0.0;
  for (double s : validation_scores) {
    if (s < 0.0) throw InvalidParam("dissimilarity scores must be >= 0");
    sum += s;
  }
  RepeatabilityResult res;
  if (sum <= 0.0) {
    res.value = std::numeric_limits<double>::infinity();
    res.infinite = true;
    return res;
  }
  res.value = static_cast<double>(validation_scores.size()) / sum;
  return res;
}

QualityReport compute_quality(const Template& tmpl, const PopulationStats& pop,
                              const std::optional<std::vector<double>>& validation_scores) {
  QualityReport r;
  r.user_id = tmpl.user_id;
  auto dist = distinctiveness(tmpl, pop);
  r.distinctiveness = dist.total;
  r.per_feature_d = std::move(dist.per_feature);
  r.degenerate_features = dist.degenerate_count;
  auto comp = complexity(tmpl);
  r.emd = comp.emd.value;
  r.emd_empty_half = comp.emd.empty_half;
  r.inv_dispersion = comp.invd.value;
  r.k = comp.invd.eligible;
  r.clamped_features = comp.invd.clamped;
  r.complexity = comp.value;
  if (validation_scores) {
    auto rep = repeatability(*validation_scores);
    r.repeatability = rep.value;
    r.repeatability_infinite = rep.infinite;
  }
  return r;
}

std::string QualityReport::to_json() const {
  nlohmann::json j;
  j["user_id"] = user_id;
  j["distinctiveness"] = distinctiveness;
  j["per_feature_d"] = per_feature_d;
  j["degenerate_features"] = degenerate_features;
  j["emd"] = emd;
  j["emd_empty_half"] = emd_empty_half;
  j["inv_dispersion"] = inv_dispersion;
  j["k"] = k;
  j["clamped_features"] = clamped_features;
  j["complexity"] = complexity;
  if (repeatability) {
    if (repeatability_infinite)
      j["repeatability"] = "inf";
    else
      j["repeatability"] = *repeatability;
  } else {
    j["repeatability"] = nullptr;
  }
  return j.dump(2);
}

std::string QualityReport::csv_header() {
  return "user_id,distinctiveness,complexity,emd,inv_dispersion,k,repeatability,"
         "degenerate_features,clamped_features,flags\n";
}

std::string QualityReport::csv_row() const {
  std::ostringstream out;
  out.precision(17);
  out << user_id << ',' << distinctiveness << ',' << complexity << ',' << emd << ','
      << inv_dispersion << ',' << k << ',';
  if (repeatability) {
    if (repeatability_infinite)
      out << "inf";
    else
      out << *repeatability;
  }
  out << ',' << degenerate_features << ',' << clamped_features << ',';
  if (emd_empty_half) out << "emd_empty_half";
  out << '\n';
  return out.str();
}

}  // namespace sigq
