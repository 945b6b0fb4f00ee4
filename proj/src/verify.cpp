#include "sigq/verify.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

namespace sigq {

const char* verifier_name(VerifierKind kind) {
  switch (kind) {
    case VerifierKind::histogram: return "histogram";
    case VerifierKind::dtw: return "dtw";
    case VerifierKind::keystroke_euclidean: return "keystroke_euclidean";
  }
  return "histogram";
}

VerifierKind verifier_from_name(const std::string& name) {
  if (name == "histogram") return VerifierKind::histogram;
  if (name == "dtw") return VerifierKind::dtw;
  if (name == "keystroke_euclidean") return VerifierKind::keystroke_euclidean;
  throw InvalidParam("unknown verifier '" + name + "'");
}

Template histogram_enroll(std::string user_id, std::vector<FeatureVector> enrolled,
                          const HistogramSpec& spec) {
  return make_template(std::move(user_id), std::move(enrolled), spec);
}

double histogram_score(const Template& tmpl, const FeatureVector& test) {
  auto flat = test.flat();
  if (flat.size() != tmpl.quantized_mean.size())
    throw FeatureCountMismatch("test sample has " + std::to_string(flat.size()) +
                               " features, template has " +
                               std::to_string(tmpl.quantized_mean.size()));
  double total = 0.0;
  for (size_t i = 0; i < flat.size(); ++i)
    total += std::abs(tmpl.quantized_mean[i] - flat[i] / tmpl.quantization[i]);
  return total;
}

namespace {

// 4-D DTW frames from the pen-down points of a sample
std::vector<std::array<double, 4>> dtw_frames(const SignatureSample& sample) {
  std::vector<std::array<double, 4>> frames;
  for (const auto& p : sample.points)
    if (p.pen_down)
      frames.push_back({static_cast<double>(p.x), static_cast<double>(p.y), 0.0, 0.0});
  if (frames.size() < 2)
    throw SampleTooShort("DTW needs >= 2 pen-down points, have " +
                         std::to_string(frames.size()));
  const double x0 = frames.front()[0];
  const double y0 = frames.front()[1];
  for (auto& f : frames) {
    f[0] -= x0;
    f[1] -= y0;
  }
  for (size_t i = 0; i + 1 < frames.size(); ++i) {
    frames[i][2] = frames[i + 1][0] - frames[i][0];
    frames[i][3] = frames[i + 1][1] - frames[i][1];
  }
  frames.back()[2] = frames[frames.size() - 2][2];  // repeat previous derivative
  frames.back()[3] = frames[frames.size() - 2][3];
  return frames;
}

double frame_cost(const std::array<double, 4>& a, const std::array<double, 4>& b) {
  double s = 0.0;
  for (int k = 0; k < 4; ++k) {
    double d = a[k] - b[k];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

double dtw_distance(const SignatureSample& a, const SignatureSample& b) {
  auto fa = dtw_frames(a);
  auto fb = dtw_frames(b);
  const size_t n = fa.size(), m = fb.size();
  std::vector<double> prev(m), curr(m);
  for (size_t j = 0; j < m; ++j)
    prev[j] = frame_cost(fa[0], fb[j]) + (j > 0 ? prev[j - 1] : 0.0);
  for (size_t i = 1; i < n; ++i) {
    curr[0] = frame_cost(fa[i], fb[0]) + prev[0];
    for (size_t j = 1; j < m; ++j)
      curr[j] = frame_cost(fa[i], fb[j]) + std::min({prev[j], curr[j - 1], prev[j - 1]});
    std::swap(prev, curr);
  }
  return prev[m - 1] / static_cast<double>(std::min(n, m));
}

double dtw_score(const std::vector<SignatureSample>& enrolled, const SignatureSample& test,
                 bool* degenerate_enrollment) {
  if (enrolled.size() < 2) throw TooFewSamples("DTW score needs >= 2 enrolled samples");
  double num = 0.0;
  for (const auto& e : enrolled) num += dtw_distance(e, test);
  num /= static_cast<double>(enrolled.size());

  double den = 0.0;
  size_t pairs = 0;
  for (size_t i = 0; i < enrolled.size(); ++i)
    for (size_t j = i + 1; j < enrolled.size(); ++j) {
      den += dtw_distance(enrolled[i], enrolled[j]);
      ++pairs;
    }
  den /= static_cast<double>(pairs);

  bool degenerate = den <= 0.0;
  if (degenerate_enrollment) *degenerate_enrollment = degenerate;
  if (degenerate) den = kDtwDenominatorFloor;
  return num / den;
}

std::array<double, kKeystrokeFeatureCount> keystroke_enroll(
    const std::vector<KeystrokeSample>& enrolled) {
  if (enrolled.size() < 2) throw TooFewSamples("keystroke enrollment needs >= 2 samples");
  std::array<double, kKeystrokeFeatureCount> mean{};
  for (const auto& s : enrolled)
    for (size_t i = 0; i < mean.size(); ++i) mean[i] += s.features[i];
  for (auto& v : mean) v /= static_cast<double>(enrolled.size());
  return mean;
}

double keystroke_score(std::span<const double> template_mean, const KeystrokeSample& test) {
  if (template_mean.size() != kKeystrokeFeatureCount)
    throw FeatureCountMismatch("template mean has " + std::to_string(template_mean.size()) +
                               " features, want " + std::to_string(kKeystrokeFeatureCount));
  double total = 0.0;
  for (size_t i = 0; i < template_mean.size(); ++i) {
    double d = template_mean[i] - test.features[i];
    total += d * d;
  }
  return total;
}

std::vector<double> ScoreMatrix::genuine_scores(const std::string& target_user) const {
  std::vector<double> out;
  for (const auto& e : entries)
    if (e.target_user == target_user && is_genuine(e)) out.push_back(e.score);
  return out;
}

std::vector<double> ScoreMatrix::imposter_scores(const std::string& target_user) const {
  std::vector<double> out;
  for (const auto& e : entries)
    if (e.target_user == target_user && !is_genuine(e)) out.push_back(e.score);
  return out;
}

std::vector<double> ScoreMatrix::pooled_genuine() const {
  std::vector<double> out;
  for (const auto& e : entries)
    if (is_genuine(e)) out.push_back(e.score);
  return out;
}

std::vector<double> ScoreMatrix::pooled_imposter() const {
  std::vector<double> out;
  for (const auto& e : entries)
    if (!is_genuine(e)) out.push_back(e.score);
  return out;
}

std::vector<std::string> ScoreMatrix::target_users() const {
  std::set<std::string> users;
  for (const auto& e : entries) users.insert(e.target_user);
  return {users.begin(), users.end()};
}

std::string render_score_csv(const ScoreMatrix& matrix) {
  std::ostringstream out;
  out << "test_user,test_session,test_label,target_user,score\n";
  out.precision(17);
  for (const auto& e : matrix.entries)
    out << e.test_user << ',' << e.test_session << ',' << label_name(e.test_label) << ','
        << e.target_user << ',' << e.score << '\n';
  return out.str();
}

ScoreMatrix parse_score_csv(std::string_view text) {
  ScoreMatrix matrix;
  size_t pos = 0, row = 0;
  while (pos < text.size()) {
    size_t nl = text.find('\n', pos);
    std::string_view line =
        nl == std::string_view::npos ? text.substr(pos) : text.substr(pos, nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) {
      ++row;
      continue;
    }
    if (row++ == 0) {
      if (line != "test_user,test_session,test_label,target_user,score")
        throw InvalidParam("unexpected score CSV header: '" + std::string(line) + "'");
      continue;
    }
    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
      size_t comma = line.find(',', start);
      if (comma == std::string_view::npos) {
        fields.emplace_back(line.substr(start));
        break;
      }
      fields.emplace_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    if (fields.size() != 5)
      throw ColumnCountError("score CSV row " + std::to_string(row - 1) + " has " +
                             std::to_string(fields.size()) + " columns, want 5");
    ScoreEntry e;
    e.test_user = fields[0];
    auto [p1, ec1] = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(),
                                     e.test_session);
    e.test_label = label_from_name(fields[2]);
    e.target_user = fields[3];
    auto [p2, ec2] = std::from_chars(fields[4].data(), fields[4].data() + fields[4].size(),
                                     e.score);
    if (ec1 != std::errc{} || ec2 != std::errc{} || !std::isfinite(e.score) || e.score < 0.0)
      throw InvalidParam("bad score CSV row " + std::to_string(row - 1));
    matrix.entries.push_back(std::move(e));
  }
  return matrix;
}

}  // namespace sigq
