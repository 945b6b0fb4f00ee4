#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sigq/verify.hpp"

using namespace sigq;

namespace {

const HistogramSpec kSpec{};

FeatureVector one_feature_fv(double value) {
  FeatureVector fv;
  fv.sa_first.assign(64, 0.0);
  fv.sa_second.assign(64, 0.0);
  fv.sa_first[0] = value;
  fv.l_first = 4;
  fv.l_second = 4;
  return fv;
}

}  // namespace

TEST_CASE("histogram enrollment floors zero stds at the quantization floor") {
  auto fv = one_feature_fv(0.5);
  Template tmpl = histogram_enroll("u", {fv, fv, fv}, kSpec);
  for (double q : tmpl.quantization) CHECK(q == kQuantizationFloor);
}

TEST_CASE("histogram enrollment computes mean and sample std") {
  Template tmpl = histogram_enroll("u", {one_feature_fv(0.2), one_feature_fv(0.4)}, kSpec);
  CHECK(tmpl.mu[0] == doctest::Approx(0.3));
  CHECK(tmpl.quantization[0] == doctest::Approx(std::sqrt(0.02)));  // 0.14142...
  CHECK(tmpl.quantized_mean[0] == doctest::Approx(0.3 / std::sqrt(0.02)));
  CHECK_THROWS_AS(histogram_enroll("u", {one_feature_fv(0.2)}, kSpec), TooFewSamples);
}

TEST_CASE("histogram enrollment order does not matter") {
  auto a = one_feature_fv(0.2);
  auto b = one_feature_fv(0.4);
  Template t1 = histogram_enroll("u", {a, b}, kSpec);
  Template t2 = histogram_enroll("u", {b, a}, kSpec);
  CHECK(t1.mu == t2.mu);
  CHECK(t1.quantization == t2.quantization);
  CHECK(t1.quantized_mean == t2.quantized_mean);
}

TEST_CASE("histogram score is zero at the template mean") {
  Template tmpl = histogram_enroll("u", {one_feature_fv(0.2), one_feature_fv(0.4)}, kSpec);
  auto mean_fv = one_feature_fv(tmpl.mu[0]);
  CHECK(histogram_score(tmpl, mean_fv) == 0.0);
}

TEST_CASE("one quantization step contributes one unit of score") {
  Template tmpl = histogram_enroll("u", {one_feature_fv(0.2), one_feature_fv(0.4)}, kSpec);
  auto test = one_feature_fv(tmpl.mu[0] + tmpl.quantization[0]);
  CHECK(histogram_score(tmpl, test) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("histogram score equals the naive manhattan loop") {
  Rng rng(41);
  for (int c = 0; c < 100; ++c) {
    std::vector<FeatureVector> enrolled;
    for (int e = 0; e < 3; ++e) {
      auto fv = one_feature_fv(0.0);
      for (auto& v : fv.sa_first) v = rng.uniform();
      for (auto& v : fv.sa_second) v = rng.uniform();
      enrolled.push_back(fv);
    }
    Template tmpl = histogram_enroll("u", enrolled, kSpec);
    auto test = one_feature_fv(0.0);
    for (auto& v : test.sa_first) v = rng.uniform();
    for (auto& v : test.sa_second) v = rng.uniform();

    auto flat = test.flat();
    std::vector<double> qt(flat.size()), qm(flat.size());
    for (size_t i = 0; i < flat.size(); ++i) {
      qt[i] = flat[i] / tmpl.quantization[i];
      qm[i] = tmpl.quantized_mean[i];
    }
    CHECK(histogram_score(tmpl, test) == oracle::naive_manhattan(qm, qt));
  }
}

TEST_CASE("histogram score demands matching feature counts") {
  Template tmpl = histogram_enroll("u", {one_feature_fv(0.2), one_feature_fv(0.4)}, kSpec);
  FeatureVector bigger;
  bigger.sa_first.assign(64, 0.0);
  bigger.sa_second.assign(64, 0.0);
  bigger.pr_first.assign(16, 0.0);  // extra pressure block
  bigger.pr_second.assign(16, 0.0);
  CHECK_THROWS_AS(histogram_score(tmpl, bigger), FeatureCountMismatch);
}

TEST_CASE("histogram score is invariant under consistent feature permutation") {
  Rng rng(43);
  auto a = one_feature_fv(0.0);
  auto b = one_feature_fv(0.0);
  auto test = one_feature_fv(0.0);
  for (auto* fv : {&a, &b, &test}) {
    for (auto& v : fv->sa_first) v = rng.uniform();
    for (auto& v : fv->sa_second) v = rng.uniform();
  }
  double base = histogram_score(histogram_enroll("u", {a, b}, kSpec), test);

  // swap two speed-angle bins everywhere
  for (auto* fv : {&a, &b, &test}) {
    std::swap(fv->sa_first[3], fv->sa_first[40]);
    std::swap(fv->sa_second[7], fv->sa_second[12]);
  }
  double permuted = histogram_score(histogram_enroll("u", {a, b}, kSpec), test);
  CHECK(base == doctest::Approx(permuted).epsilon(1e-12));
}

TEST_CASE("dtw distance of a sample to itself is zero") {
  Rng rng(47);
  for (int c = 0; c < 10; ++c) {
    auto s = oracle::random_sample(rng, 3 + rng.uniform_int(0, 20), false, true);
    CHECK(dtw_distance(s, s) == 0.0);
  }
}

TEST_CASE("dtw distance is symmetric") {
  Rng rng(53);
  for (int c = 0; c < 30; ++c) {
    auto a = oracle::random_sample(rng, 3 + rng.uniform_int(0, 15), false);
    auto b = oracle::random_sample(rng, 3 + rng.uniform_int(0, 15), false);
    CHECK(dtw_distance(a, b) == dtw_distance(b, a));
  }
}

TEST_CASE("dtw distance ignores translation") {
  Rng rng(59);
  for (int c = 0; c < 20; ++c) {
    auto a = oracle::random_sample(rng, 8, false);
    auto b = a;
    for (auto& p : b.points) {
      p.x += 5000;
      p.y -= 3000;
    }
    CHECK(dtw_distance(a, b) == 0.0);
    CHECK(dtw_distance(b, a) == 0.0);
  }
}

TEST_CASE("dtw matches brute-force path enumeration on short sequences") {
  Rng rng(61);
  for (int c = 0; c < 50; ++c) {
    auto a = oracle::random_sample(rng, 2 + rng.uniform_int(0, 3), false);
    auto b = oracle::random_sample(rng, 2 + rng.uniform_int(0, 3), false);
    CHECK(dtw_distance(a, b) == doctest::Approx(oracle::brute_dtw(a, b)).epsilon(1e-9));
  }
}

TEST_CASE("dtw needs two pen-down points per sample") {
  SignatureSample s;
  s.points = {{0, 0, 0, std::nullopt, true}, {1, 1, 10, std::nullopt, false}};
  SignatureSample ok;
  ok.points = {{0, 0, 0, std::nullopt, true}, {1, 1, 10, std::nullopt, true}};
  CHECK_THROWS_AS(dtw_distance(s, ok), SampleTooShort);
  CHECK_THROWS_AS(dtw_distance(ok, s), SampleTooShort);
}

TEST_CASE("dtw score of translated copies is zero with a degenerate flag") {
  Rng rng(67);
  auto base = oracle::random_sample(rng, 10, false);
  std::vector<SignatureSample> enrolled;
  for (int off : {0, 100, 200}) {
    auto s = base;
    for (auto& p : s.points) {
      p.x += off;
      p.y += off;
    }
    enrolled.push_back(s);
  }
  auto test = base;
  for (auto& p : test.points) p.x += 999;
  bool degenerate = false;
  CHECK(dtw_score(enrolled, test, &degenerate) == 0.0);
  CHECK(degenerate);
}

TEST_CASE("dtw score is the enrolled-to-test over enrolled-pairwise ratio") {
  Rng rng(71);
  std::vector<SignatureSample> enrolled;
  for (int i = 0; i < 3; ++i) enrolled.push_back(oracle::random_sample(rng, 5, false));
  auto test = oracle::random_sample(rng, 5, false);

  double num = (oracle::brute_dtw(enrolled[0], test) + oracle::brute_dtw(enrolled[1], test) +
                oracle::brute_dtw(enrolled[2], test)) /
               3.0;
  double den = (oracle::brute_dtw(enrolled[0], enrolled[1]) +
                oracle::brute_dtw(enrolled[0], enrolled[2]) +
                oracle::brute_dtw(enrolled[1], enrolled[2])) /
               3.0;
  CHECK(dtw_score(enrolled, test) == doctest::Approx(num / den).epsilon(1e-9));
  CHECK_THROWS_AS(dtw_score({enrolled[0]}, test), TooFewSamples);
}

TEST_CASE("dtw score does not depend on enrollment order") {
  Rng rng(73);
  std::vector<SignatureSample> enrolled;
  for (int i = 0; i < 4; ++i) enrolled.push_back(oracle::random_sample(rng, 8, false));
  auto test = oracle::random_sample(rng, 8, false);
  double base = dtw_score(enrolled, test);
  auto shuffled = enrolled;
  rng.shuffle(shuffled);
  CHECK(dtw_score(shuffled, test) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("keystroke scoring is squared euclidean to the mean") {
  std::vector<KeystrokeSample> enrolled(2);
  for (auto& s : enrolled) s.features.fill(0.2);
  enrolled[1].features[5] = 0.4;
  auto mean = keystroke_enroll(enrolled);
  CHECK(mean[5] == doctest::Approx(0.3));
  CHECK(mean[0] == doctest::Approx(0.2));

  KeystrokeSample test;
  test.features = mean;
  CHECK(keystroke_score(mean, test) == 0.0);

  test.features[10] += 0.1;
  CHECK(keystroke_score(mean, test) == doctest::Approx(0.01).epsilon(1e-12));

  std::vector<double> short_mean(30, 0.0);
  CHECK_THROWS_AS(keystroke_score(short_mean, test), FeatureCountMismatch);
  CHECK_THROWS_AS(keystroke_enroll({enrolled[0]}), TooFewSamples);
}

TEST_CASE("keystroke score is a symmetric form") {
  Rng rng(79);
  for (int c = 0; c < 50; ++c) {
    KeystrokeSample u, v;
    for (auto& f : u.features) f = rng.uniform(-0.1, 1.0);
    for (auto& f : v.features) f = rng.uniform(-0.1, 1.0);
    std::vector<double> u_mean(u.features.begin(), u.features.end());
    std::vector<double> v_mean(v.features.begin(), v.features.end());
    CHECK(keystroke_score(u_mean, v) == keystroke_score(v_mean, u));
    // naive loop oracle
    std::vector<double> vf(v.features.begin(), v.features.end());
    CHECK(keystroke_score(u_mean, v) == oracle::naive_squared_euclidean(u_mean, vf));
  }
}

TEST_CASE("score matrix partitions genuine and imposter entries") {
  ScoreMatrix m;
  m.entries = {
      {"a", 1, Label::genuine, "a", 0, 0.5},          // genuine
      {"b", 1, Label::genuine, "a", 0, 2.0},          // random forgery on a
      {"a", 1, Label::skilled_forgery, "a", 0, 1.5},  // skilled forgery on a
      {"a", 1, Label::genuine, "b", 0, 3.0},          // random forgery on b
  };
  CHECK(m.genuine_scores("a") == std::vector<double>{0.5});
  CHECK(m.imposter_scores("a") == std::vector<double>{2.0, 1.5});
  CHECK(m.pooled_genuine() == std::vector<double>{0.5});
  CHECK(m.pooled_imposter() == std::vector<double>{2.0, 1.5, 3.0});
  CHECK(m.target_users() == std::vector<std::string>{"a", "b"});
}

TEST_CASE("score csv round trips") {
  ScoreMatrix m;
  m.entries = {
      {"a", 1, Label::genuine, "a", 0, 0.5},
      {"b", 2, Label::genuine, "a", 0, 2.25},
      {"a", 1, Label::skilled_forgery, "a", 0, 1.0 / 3.0},
  };
  auto parsed = parse_score_csv(render_score_csv(m));
  CHECK(parsed.entries == m.entries);
  CHECK_THROWS_AS(parse_score_csv("bad,header\n"), InvalidParam);
  CHECK_THROWS_AS(
      parse_score_csv("test_user,test_session,test_label,target_user,score\na,1,genuine,a\n"),
      ColumnCountError);
  CHECK_THROWS_AS(
      parse_score_csv("test_user,test_session,test_label,target_user,score\na,1,genuine,a,-1\n"),
      InvalidParam);
}
