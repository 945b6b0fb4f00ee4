#include <doctest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "sigq/quality.hpp"

using namespace sigq;

namespace {

// hand-built feature vector over the default 4x16 (+16 pressure) layout
FeatureVector blank_fv(bool with_pressure) {
  FeatureVector fv;
  fv.sa_first.assign(64, 0.0);
  fv.sa_second.assign(64, 0.0);
  if (with_pressure) {
    fv.pr_first.assign(16, 0.0);
    fv.pr_second.assign(16, 0.0);
  }
  fv.l_first = 8;
  fv.l_second = 8;
  return fv;
}

FeatureVector uniform_fv(bool with_pressure) {
  auto fv = blank_fv(with_pressure);
  for (auto& v : fv.sa_first) v = 1.0 / 64;
  for (auto& v : fv.sa_second) v = 1.0 / 64;
  for (auto& v : fv.pr_first) v = 1.0 / 16;
  for (auto& v : fv.pr_second) v = 1.0 / 16;
  return fv;
}

FeatureVector random_fv(Rng& rng, bool with_pressure) {
  auto fv = blank_fv(with_pressure);
  auto fill = [&](std::vector<double>& h) {
    double sum = 0.0;
    for (auto& v : h) {
      v = rng.uniform() < 0.6 ? 0.0 : rng.uniform();
      sum += v;
    }
    if (sum == 0.0) {
      h[0] = 1.0;
      return;
    }
    for (auto& v : h) v /= sum;
  };
  fill(fv.sa_first);
  fill(fv.sa_second);
  if (with_pressure) {
    fill(fv.pr_first);
    fill(fv.pr_second);
  }
  return fv;
}

const HistogramSpec kSpec{};

}  // namespace

TEST_CASE("generic population stats follow the binomial model") {
  auto pop = generic_population_stats(kSpec, 147, true);
  REQUIRE(pop.mu.size() == 160);  // 64 + 64 + 16 + 16
  // speed-angle histograms count as one 64-bin histogram
  CHECK(pop.mu[0] == 1.0 / 64);
  CHECK(pop.mu[127] == 1.0 / 64);
  CHECK(pop.mu[128] == 0.0625);  // pressure bins: 1/16
  CHECK(pop.sigma[0] == doctest::Approx(std::sqrt((1.0 / 147) * 63.0 / (64.0 * 64.0))));
  // frozen from the formula: N = 16, L = 147
  CHECK(pop.sigma[128] == doctest::Approx(0.019965).epsilon(1e-4));

  // per-histogram means sum to exactly 1 (power-of-two bin counts)
  FeatureLayout layout{4, 16, 16, true};
  for (const auto& seg : layout.segments()) {
    double sum = 0.0;
    for (int i = 0; i < seg.bins; ++i) sum += pop.mu[static_cast<size_t>(seg.offset + i)];
    CHECK(sum == 1.0);
  }
}

TEST_CASE("generic population stats reject degenerate parameters") {
  CHECK_THROWS_AS(generic_population_stats(kSpec, 0, true), InvalidParam);
  HistogramSpec bad;
  bad.angle_bins = 1;
  CHECK_THROWS_AS(generic_population_stats(bad, 147, true), InvalidParam);
}

TEST_CASE("monte-carlo relative-frequency sigma matches the formula within 2%") {
  // smaller than the acceptance run, same construction
  double analytic = std::sqrt((1.0 / 147) * 15.0 / 256.0);
  double simulated = oracle::mc_relative_frequency_sigma(123, 147, 16, 20000);
  CHECK(std::abs(simulated - analytic) / analytic < 0.02);
}

TEST_CASE("decidability evaluates the index formula") {
  CHECK(decidability(0.3, 0.1, 0.3, 0.1) == 0.0);
  CHECK(decidability(0.5, 0.1, 0.3, 0.1) == doctest::Approx(0.2 / std::sqrt(0.1)));
  double d1 = decidability(0.4, 0.07, 0.3, 0.08);
  double d2 = decidability(0.5, 0.07, 0.3, 0.08);
  CHECK(d2 == doctest::Approx(2.0 * d1));  // linear in the mean gap
  CHECK_THROWS_AS(decidability(0.5, 0.0, 0.3, 0.0), DegenerateSpread);
}

TEST_CASE("empirical population stats are per-feature mean and sample std") {
  auto a = blank_fv(false);
  auto b = blank_fv(false);
  a.sa_first[0] = 0.2;
  b.sa_first[0] = 0.4;
  auto pop = empirical_population_stats({a, b});
  CHECK(pop.source == PopulationStats::Source::dataset_empirical);
  CHECK(pop.mu[0] == doctest::Approx(0.3));
  CHECK(pop.sigma[0] == doctest::Approx(std::sqrt(0.02)));
  CHECK(pop.sigma[1] == 0.0);
  CHECK_THROWS_AS(empirical_population_stats({a}), TooFewSamples);
}

TEST_CASE("distinctiveness of uniform-histogram enrollment is zero") {
  auto pop = generic_population_stats(kSpec, 147, true);
  Template tmpl = make_template("u", {uniform_fv(true), uniform_fv(true)}, kSpec);
  auto res = distinctiveness(tmpl, pop);
  CHECK(res.total == 0.0);
  for (double d : res.per_feature) CHECK(d == 0.0);
}

TEST_CASE("distinctiveness sums per-feature decidability") {
  auto pop = generic_population_stats(kSpec, 147, false);
  Rng rng(7);
  Template tmpl = make_template("u", {random_fv(rng, false), random_fv(rng, false),
                                      random_fv(rng, false)}, kSpec);
  auto res = distinctiveness(tmpl, pop);
  double manual = 0.0;
  for (size_t i = 0; i < tmpl.mu.size(); ++i) {
    double spread = tmpl.sigma[i] + pop.sigma[i];
    if (spread <= 0.0) continue;
    manual += std::abs(tmpl.mu[i] - pop.mu[i]) / std::sqrt(spread / 2.0);
  }
  CHECK(res.total == doctest::Approx(manual).epsilon(1e-12));
  double sum = 0.0;
  for (double d : res.per_feature) sum += d;
  CHECK(res.total == doctest::Approx(sum).epsilon(1e-9));
  CHECK(res.total >= 0.0);
}

TEST_CASE("distinctiveness flags spread-degenerate features instead of erroring") {
  // empirical population with zero sigma in an all-zero feature
  auto a = blank_fv(false);
  auto b = blank_fv(false);
  a.sa_first[0] = 1.0;
  b.sa_first[0] = 1.0;  // sigma_T = 0 there
  auto pop = empirical_population_stats({a, b});  // sigma_P = 0 everywhere
  Template tmpl = make_template("u", {a, b}, kSpec);
  auto res = distinctiveness(tmpl, pop);
  CHECK(res.total == 0.0);
  CHECK(res.degenerate_count == 128);
}

TEST_CASE("distinctiveness requires matching feature counts") {
  auto pop = generic_population_stats(kSpec, 147, true);  // with pressure
  Template tmpl = make_template("u", {uniform_fv(false), uniform_fv(false)}, kSpec);
  CHECK_THROWS_AS(distinctiveness(tmpl, pop), FeatureCountMismatch);
}

TEST_CASE("shrinking enrollment variance never decreases distinctiveness") {
  auto pop = generic_population_stats(kSpec, 147, false);
  Rng rng(11);
  for (int c = 0; c < 20; ++c) {
    std::vector<FeatureVector> enrolled{random_fv(rng, false), random_fv(rng, false),
                                        random_fv(rng, false), random_fv(rng, false)};
    Template before = make_template("u", enrolled, kSpec);
    // pull every sample halfway to the mean: means fixed, spreads halved
    auto shrunk = enrolled;
    for (auto& fv : shrunk) {
      for (size_t i = 0; i < fv.sa_first.size(); ++i)
        fv.sa_first[i] = before.mu[i] + 0.5 * (fv.sa_first[i] - before.mu[i]);
      for (size_t i = 0; i < fv.sa_second.size(); ++i)
        fv.sa_second[i] =
            before.mu[64 + i] + 0.5 * (fv.sa_second[i] - before.mu[64 + i]);
    }
    Template after = make_template("u", shrunk, kSpec);
    CHECK(distinctiveness(after, pop).total >=
          distinctiveness(before, pop).total - 1e-9);
  }
}

TEST_CASE("template statistics use sample std and min-pooling") {
  auto a = blank_fv(false);
  auto b = blank_fv(false);
  a.sa_first[3] = 0.2;
  b.sa_first[3] = 0.4;
  Template tmpl = make_template("u", {a, b}, kSpec);
  CHECK(tmpl.mu[3] == doctest::Approx(0.3));
  CHECK(tmpl.sigma[3] == doctest::Approx(std::sqrt(0.02)));  // divisor E-1
  CHECK(tmpl.sa_min_first[3] == 0.2);
  for (const auto& fv : tmpl.enrolled)
    for (size_t i = 0; i < 64; ++i) CHECK(tmpl.sa_min_first[i] <= fv.sa_first[i]);
  CHECK_THROWS_AS(make_template("u", {a}, kSpec), TooFewSamples);
}

TEST_CASE("emd is zero for a point-mass template") {
  auto fv = blank_fv(false);
  fv.sa_first[10] = 1.0;
  fv.sa_second[20] = 1.0;
  Template tmpl = make_template("u", {fv, fv}, kSpec);
  auto res = emd_complexity(tmpl);
  CHECK(res.value == 0.0);
  CHECK(!res.empty_half);
}

TEST_CASE("emd moves mass at the printed index weights") {
  // ref bin (2,8), extra mass 0.5 one angle bin over: w = sqrt(1/16) = 1/4
  auto fv = blank_fv(false);
  fv.sa_first[2 * 16 + 8] = 0.5;
  fv.sa_first[2 * 16 + 9] = 0.5;  // tie resolves to the lower flat index
  fv.sa_second[0] = 1.0;          // second half contributes nothing
  Template tmpl = make_template("u", {fv, fv}, kSpec);
  auto res = emd_complexity(tmpl);
  CHECK(res.value == doctest::Approx(0.125).epsilon(1e-12));
}

TEST_CASE("emd strictly increases when mass moves to a farther bin") {
  auto near = blank_fv(false);
  near.sa_first[0] = 0.7;
  near.sa_first[1] = 0.3;  // one angle step from the reference
  near.sa_second[0] = 1.0;
  auto far_fv = near;
  far_fv.sa_first[1] = 0.0;
  far_fv.sa_first[5] = 0.3;  // five angle steps out
  Template t_near = make_template("u", {near, near}, kSpec);
  Template t_far = make_template("u", {far_fv, far_fv}, kSpec);
  CHECK(emd_complexity(t_far).value > emd_complexity(t_near).value);
}

TEST_CASE("all-zero min-pooled histogram flags instead of erroring") {
  auto a = blank_fv(false);
  auto b = blank_fv(false);
  a.sa_first[0] = 1.0;
  b.sa_first[1] = 1.0;  // disjoint support, min-pool vanishes
  a.sa_second[5] = 1.0;
  b.sa_second[5] = 1.0;
  Template tmpl = make_template("u", {a, b}, kSpec);
  auto res = emd_complexity(tmpl);
  CHECK(res.value == 0.0);
  CHECK(res.empty_half);
}

TEST_CASE("emd equals the naive double-loop oracle") {
  Rng rng(13);
  for (int c = 0; c < 100; ++c) {
    std::vector<FeatureVector> enrolled;
    int e = 2 + rng.uniform_int(0, 3);
    for (int i = 0; i < e; ++i) enrolled.push_back(random_fv(rng, false));
    Template tmpl = make_template("u", enrolled, kSpec);
    CHECK(emd_complexity(tmpl).value == oracle::naive_emd(tmpl));
  }
}

TEST_CASE("inverse dispersion averages inverse dispersion indices") {
  SUBCASE("one eligible feature with variance equal to mean") {
    auto a = blank_fv(false);
    auto b = blank_fv(false);
    a.sa_first[0] = 1.0;  // {1, 0}: mean 0.5, sample var 0.5 -> id = 1
    auto res = inverse_dispersion(make_template("u", {a, b}, kSpec));
    CHECK(res.eligible == 1);
    CHECK(res.value == doctest::Approx(1.0));
    CHECK(res.clamped == 0);
  }
  SUBCASE("features with id 2 average to one half") {
    auto a = blank_fv(false);
    auto b = blank_fv(false);
    a.sa_first[0] = 2.0;  // {2, 0}: mean 1, var 2 -> id = 2
    a.sa_second[4] = 2.0;
    auto res = inverse_dispersion(make_template("u", {a, b}, kSpec));
    CHECK(res.eligible == 2);
    CHECK(res.value == doctest::Approx(0.5));
  }
  SUBCASE("zero variance with nonzero mean hits the clamp") {
    auto a = blank_fv(false);
    a.sa_first[0] = 0.5;
    auto res = inverse_dispersion(make_template("u", {a, a}, kSpec));
    CHECK(res.eligible == 1);
    CHECK(res.clamped == 1);
    CHECK(res.value == 1e3);
  }
  SUBCASE("no eligible features") {
    auto a = blank_fv(false);
    CHECK_THROWS_AS(inverse_dispersion(make_template("u", {a, a}, kSpec)),
                    NoEligibleFeatures);
  }
}

TEST_CASE("complexity is the product of emd and inverse dispersion") {
  Rng rng(17);
  std::vector<FeatureVector> enrolled{random_fv(rng, false), random_fv(rng, false),
                                      random_fv(rng, false)};
  Template tmpl = make_template("u", enrolled, kSpec);
  auto comp = complexity(tmpl);
  CHECK(comp.value ==
        doctest::Approx(emd_complexity(tmpl).value * inverse_dispersion(tmpl).value)
            .epsilon(1e-12));

  // absorbing zero: min-pooled point mass
  auto fv = blank_fv(false);
  fv.sa_first[0] = 1.0;
  fv.sa_second[0] = 1.0;
  auto fv2 = fv;
  fv2.sa_first[0] = 0.9;
  fv2.sa_first[1] = 0.1;
  Template point = make_template("u", {fv, fv2}, kSpec);
  CHECK(emd_complexity(point).value == 0.0);
  CHECK(complexity(point).value == 0.0);
}

TEST_CASE("repeatability is n over the score sum") {
  CHECK(repeatability({2, 2, 2, 2, 2}).value == doctest::Approx(0.5));
  CHECK(repeatability({1}).value == doctest::Approx(1.0));
  CHECK_THROWS_AS(repeatability({}), EmptyValidationSet);
  CHECK_THROWS_AS(repeatability({1.0, -0.5}), InvalidParam);

  auto res = repeatability({0.0, 0.0});
  CHECK(res.infinite);
  CHECK(std::isinf(res.value));
}

TEST_CASE("repeatability strictly decreases when any score rises") {
  Rng rng(19);
  for (int c = 0; c < 100; ++c) {
    int n = 1 + rng.uniform_int(0, 9);
    std::vector<double> scores;
    for (int i = 0; i < n; ++i) scores.push_back(rng.uniform(0.1, 5.0));
    double before = repeatability(scores).value;
    auto bumped = scores;
    bumped[static_cast<size_t>(rng.uniform_int(0, n - 1))] += rng.uniform(0.01, 2.0);
    CHECK(repeatability(bumped).value < before);
  }
}

TEST_CASE("repeatability scales inversely with score scale") {
  std::vector<double> scores{0.5, 1.5, 2.5};
  double base = repeatability(scores).value;
  for (auto& s : scores) s *= 4.0;
  CHECK(repeatability(scores).value == doctest::Approx(base / 4.0).epsilon(1e-12));
}

TEST_CASE("quality metrics are invariant under enrollment permutation") {
  auto pop = generic_population_stats(kSpec, 147, false);
  Rng rng(23);
  std::vector<FeatureVector> enrolled{random_fv(rng, false), random_fv(rng, false),
                                      random_fv(rng, false), random_fv(rng, false),
                                      random_fv(rng, false)};
  Template t1 = make_template("u", enrolled, kSpec);
  auto shuffled = enrolled;
  rng.shuffle(shuffled);
  Template t2 = make_template("u", shuffled, kSpec);
  CHECK(distinctiveness(t1, pop).total ==
        doctest::Approx(distinctiveness(t2, pop).total).epsilon(1e-12));
  CHECK(complexity(t1).value == doctest::Approx(complexity(t2).value).epsilon(1e-12));
}

TEST_CASE("metric-level translation and scaling invariance") {
  auto pop = generic_population_stats(kSpec, 147, true);
  Rng rng(29);
  std::vector<SignatureSample> samples;
  for (int i = 0; i < 4; ++i) samples.push_back(oracle::random_sample(rng, 20, true));

  auto features_of = [&](const std::vector<SignatureSample>& set) {
    std::vector<FeatureVector> fvs;
    for (const auto& s : set) fvs.push_back(extract_features(s, kSpec));
    return fvs;
  };
  Template base = make_template("u", features_of(samples), kSpec);

  auto moved = samples;
  for (auto& s : moved)
    for (auto& p : s.points) {
      p.x += 1234;
      p.y -= 777;
    }
  auto scaled = samples;
  for (auto& s : scaled)
    for (auto& p : s.points) {
      p.x *= 4;
      p.y *= 4;
    }
  Template t_moved = make_template("u", features_of(moved), kSpec);
  Template t_scaled = make_template("u", features_of(scaled), kSpec);
  CHECK(distinctiveness(base, pop).total == distinctiveness(t_moved, pop).total);
  CHECK(distinctiveness(base, pop).total == distinctiveness(t_scaled, pop).total);
  CHECK(complexity(base).value == complexity(t_moved).value);
  CHECK(complexity(base).value == complexity(t_scaled).value);
}

TEST_CASE("quality report ties the pieces together") {
  auto pop = generic_population_stats(kSpec, 147, false);
  Rng rng(31);
  std::vector<FeatureVector> enrolled{random_fv(rng, false), random_fv(rng, false)};
  Template tmpl = make_template("u7", enrolled, kSpec);
  auto report = compute_quality(tmpl, pop, std::vector<double>{1.0, 3.0});
  CHECK(report.user_id == "u7");
  CHECK(report.complexity == doctest::Approx(report.emd * report.inv_dispersion).epsilon(1e-9));
  double sum = 0.0;
  for (double d : report.per_feature_d) sum += d;
  CHECK(report.distinctiveness == doctest::Approx(sum).epsilon(1e-9));
  CHECK(*report.repeatability == doctest::Approx(0.5));
  CHECK(report.csv_row().find("u7") == 0);
  CHECK(report.to_json().find("\"distinctiveness\"") != std::string::npos);
}
