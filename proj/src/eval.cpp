#include "sigq/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>

#include "sigq/rng.hpp"

namespace sigq {

// ---------------------------------------------------------------------------
// error-rate machinery
// ---------------------------------------------------------------------------

double far_at(const std::vector<double>& sorted_imposter, double threshold) {
  auto it = std::upper_bound(sorted_imposter.begin(), sorted_imposter.end(), threshold);
  return static_cast<double>(it - sorted_imposter.begin()) /
         static_cast<double>(sorted_imposter.size());
}

double frr_at(const std::vector<double>& sorted_genuine, double threshold) {
  auto it = std::upper_bound(sorted_genuine.begin(), sorted_genuine.end(), threshold);
  return static_cast<double>(sorted_genuine.end() - it) /
         static_cast<double>(sorted_genuine.size());
}

ErrorCurve far_frr(const std::vector<double>& genuine, const std::vector<double>& imposter,
                   const std::vector<double>& thresholds) {
  if (genuine.empty() || imposter.empty()) throw EmptyScores("need genuine and imposter scores");
  auto gen = genuine;
  auto imp = imposter;
  std::sort(gen.begin(), gen.end());
  std::sort(imp.begin(), imp.end());
  ErrorCurve curve;
  curve.thresholds = thresholds;
  curve.far.reserve(thresholds.size());
  curve.frr.reserve(thresholds.size());
  for (double t : thresholds) {
    curve.far.push_back(far_at(imp, t));
    curve.frr.push_back(frr_at(gen, t));
  }
  return curve;
}

std::vector<double> threshold_grid(std::vector<double> scores, size_t max_points) {
  if (scores.empty()) throw EmptyScores("threshold grid needs scores");
  std::sort(scores.begin(), scores.end());
  scores.erase(std::unique(scores.begin(), scores.end()), scores.end());
  std::vector<double> grid;
  grid.reserve(scores.size() * 2);
  for (size_t i = 0; i < scores.size(); ++i) {
    grid.push_back(scores[i]);
    if (i + 1 < scores.size()) grid.push_back(0.5 * (scores[i] + scores[i + 1]));
  }
  if (max_points > 0 && grid.size() > max_points) {
    std::vector<double> thin;
    thin.reserve(max_points);
    for (size_t k = 0; k < max_points; ++k) {
      size_t idx = k * (grid.size() - 1) / (max_points - 1);
      thin.push_back(grid[idx]);
    }
    thin.erase(std::unique(thin.begin(), thin.end()), thin.end());
    return thin;
  }
  return grid;
}

EerPoint eer(const ErrorCurve& curve) {
  const size_t n = curve.thresholds.size();
  if (n == 0) throw NoCrossing("empty curve");
  // g = far - frr is non-decreasing; find its first non-negative point
  size_t i = 0;
  while (i < n && curve.far[i] - curve.frr[i] < 0.0) ++i;
  if (i == n) throw NoCrossing("FAR stays below FRR over the curve");
  if (i == 0) {
    if (curve.far[0] - curve.frr[0] == 0.0) return {curve.thresholds[0], curve.far[0]};
    throw NoCrossing("FAR already above FRR at the first threshold");
  }
  double g = curve.far[i] - curve.frr[i];
  if (g == 0.0) return {curve.thresholds[i], curve.far[i]};
  double far1 = curve.far[i - 1], far2 = curve.far[i];
  double frr1 = curve.frr[i - 1], frr2 = curve.frr[i];
  double denom = (far2 - far1) - (frr2 - frr1);
  double alpha = denom != 0.0 ? (frr1 - far1) / denom : 0.0;
  EerPoint p;
  p.threshold = curve.thresholds[i - 1] +
                alpha * (curve.thresholds[i] - curve.thresholds[i - 1]);
  p.rate = far1 + alpha * (far2 - far1);
  return p;
}

EerPoint eer_from_scores(const std::vector<double>& genuine,
                         const std::vector<double>& imposter) {
  if (genuine.empty() || imposter.empty()) throw EmptyScores("need genuine and imposter scores");
  std::vector<double> pooled = genuine;
  pooled.insert(pooled.end(), imposter.begin(), imposter.end());
  auto grid = threshold_grid(std::move(pooled));
  // virtual endpoints guarantee the crossing is bracketed
  grid.insert(grid.begin(), grid.front() - 1.0);
  grid.push_back(grid.back() + 1.0);
  return eer(far_frr(genuine, imposter, grid));
}

double hter(double far, double frr) {
  if (!(far >= 0.0 && far <= 1.0 && frr >= 0.0 && frr <= 1.0))
    throw OutOfRange("rates must be in [0, 1]");
  return 0.5 * (far + frr);
}

std::vector<RocPoint> roc(const std::vector<double>& genuine,
                          const std::vector<double>& imposter) {
  if (genuine.empty() || imposter.empty()) throw EmptyScores("need genuine and imposter scores");
  std::vector<double> thresholds = genuine;
  thresholds.insert(thresholds.end(), imposter.begin(), imposter.end());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  auto gen = genuine;
  auto imp = imposter;
  std::sort(gen.begin(), gen.end());
  std::sort(imp.begin(), imp.end());
  std::vector<RocPoint> points;
  points.reserve(thresholds.size());
  // TAR = fraction of genuine scores accepted, counted directly rather than
  // as 1 - FRR so identical score sets land exactly on the diagonal
  for (double t : thresholds) points.push_back({far_at(imp, t), far_at(gen, t)});
  return points;
}

// ---------------------------------------------------------------------------
// quartile grouping
// ---------------------------------------------------------------------------

QuartileSplit split_quartiles(const std::vector<double>& quality,
                              const std::vector<std::string>& ids) {
  const size_t n = quality.size();
  if (ids.size() != n) throw LengthMismatch("quality and id counts differ");
  if (n < 4) throw TooFewTemplates("quartile split needs >= 4 templates");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    auto sa = static_cast<size_t>(a);
    auto sb = static_cast<size_t>(b);
    if (quality[sa] != quality[sb]) return quality[sa] < quality[sb];
    return ids[sa] < ids[sb];
  });

  // first sorted position of each distinct score, so ties share a group
  std::map<double, size_t> first_pos;
  for (size_t p = 0; p < n; ++p)
    first_pos.emplace(quality[static_cast<size_t>(order[p])], p);

  const size_t b1 = n / 4, b2 = n / 2, b3 = 3 * n / 4;
  auto bucket = [&](size_t p) -> int { return p < b1 ? 0 : p < b2 ? 1 : p < b3 ? 2 : 3; };

  QuartileSplit split;
  split.group_of.assign(n, 0);
  for (size_t p = 0; p < n; ++p) {
    int idx = order[p];
    int g = bucket(first_pos.at(quality[static_cast<size_t>(idx)]));
    split.group_of[static_cast<size_t>(idx)] = g;
    split.groups[static_cast<size_t>(g)].push_back(idx);
  }
  for (const auto& g : split.groups)
    if (g.empty()) split.collapsed_ties = true;
  return split;
}

std::array<std::vector<double>, 4> quartile_mean_rates(
    const QuartileSplit& split, const std::vector<std::vector<double>>& per_template_scores,
    const std::vector<double>& thresholds, RateKind kind) {
  std::array<std::vector<double>, 4> out;
  for (size_t g = 0; g < 4; ++g) {
    out[g].assign(thresholds.size(), std::numeric_limits<double>::quiet_NaN());
    std::vector<std::vector<double>> member_scores;
    for (int idx : split.groups[g]) {
      const auto& s = per_template_scores[static_cast<size_t>(idx)];
      if (!s.empty()) {
        member_scores.push_back(s);
        std::sort(member_scores.back().begin(), member_scores.back().end());
      }
    }
    if (member_scores.empty()) continue;
    for (size_t ti = 0; ti < thresholds.size(); ++ti) {
      double sum = 0.0;
      for (const auto& s : member_scores)
        sum += kind == RateKind::far ? far_at(s, thresholds[ti]) : frr_at(s, thresholds[ti]);
      out[g][ti] = sum / static_cast<double>(member_scores.size());
    }
  }
  return out;
}

std::array<ErrorCurve, 4> quartile_curves(const std::vector<double>& quality,
                                          const std::vector<std::string>& ids,
                                          const ScoreMatrix& scores,
                                          const std::vector<double>& thresholds,
                                          bool* collapsed_ties) {
  auto split = split_quartiles(quality, ids);
  if (collapsed_ties) *collapsed_ties = split.collapsed_ties;
  std::vector<std::vector<double>> imposters(ids.size()), genuines(ids.size());
  for (const auto& e : scores.entries) {
    for (size_t i = 0; i < ids.size(); ++i) {
      if (e.target_user != ids[i]) continue;
      (ScoreMatrix::is_genuine(e) ? genuines[i] : imposters[i]).push_back(e.score);
      break;
    }
  }
  auto fars = quartile_mean_rates(split, imposters, thresholds, RateKind::far);
  auto frrs = quartile_mean_rates(split, genuines, thresholds, RateKind::frr);
  std::array<ErrorCurve, 4> curves;
  for (size_t g = 0; g < 4; ++g) {
    curves[g].thresholds = thresholds;
    curves[g].far = std::move(fars[g]);
    curves[g].frr = std::move(frrs[g]);
  }
  return curves;
}

// ---------------------------------------------------------------------------
// rank statistics
// ---------------------------------------------------------------------------

std::vector<double> average_ranks(const std::vector<double>& values) {
  const size_t n = values.size();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return values[static_cast<size_t>(a)] < values[static_cast<size_t>(b)];
  });
  std::vector<double> ranks(n, 0.0);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && values[static_cast<size_t>(order[j + 1])] ==
                            values[static_cast<size_t>(order[i])])
      ++j;
    double mean_rank = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based
    for (size_t k = i; k <= j; ++k) ranks[static_cast<size_t>(order[k])] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw LengthMismatch("input lengths differ");
  const size_t n = x.size();
  if (n < 2) throw DegenerateInput("need at least 2 observations");
  for (size_t i = 0; i < n; ++i)
    if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
      throw DegenerateInput("non-finite observation");
  bool all_x = std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; });
  bool all_y = std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; });
  if (all_x || all_y) throw DegenerateInput("an argument is constant");

  auto rx = average_ranks(x);
  auto ry = average_ranks(y);
  double sum_d2 = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double d = rx[i] - ry[i];
    sum_d2 += d * d;
  }
  double nn = static_cast<double>(n);
  return 1.0 - 6.0 * sum_d2 / (nn * (nn * nn - 1.0));
}

const char* GoldenStatistic::name() const {
  switch (kind) {
    case Kind::mean_all: return "mean_all";
    case Kind::min_score: return "min_score";
    case Kind::mean_k_lowest: return "mean_k_lowest";
    case Kind::max_score: return "max_score";
    case Kind::mean_k_highest: return "mean_k_highest";
  }
  return "mean_all";
}

namespace {

double apply_statistic(std::vector<double> scores, const GoldenStatistic& stat) {
  if (scores.empty()) throw EmptyScores("statistic over empty score list");
  std::sort(scores.begin(), scores.end());
  auto mean_of = [](auto first, auto last) {
    return std::accumulate(first, last, 0.0) / static_cast<double>(last - first);
  };
  switch (stat.kind) {
    case GoldenStatistic::Kind::mean_all:
      return mean_of(scores.begin(), scores.end());
    case GoldenStatistic::Kind::min_score:
      return scores.front();
    case GoldenStatistic::Kind::max_score:
      return scores.back();
    case GoldenStatistic::Kind::mean_k_lowest:
      if (stat.k < 1 || static_cast<size_t>(stat.k) > scores.size())
        throw KTooLarge("k = " + std::to_string(stat.k) + ", scores = " +
                        std::to_string(scores.size()));
      return mean_of(scores.begin(), scores.begin() + stat.k);
    case GoldenStatistic::Kind::mean_k_highest:
      if (stat.k < 1 || static_cast<size_t>(stat.k) > scores.size())
        throw KTooLarge("k = " + std::to_string(stat.k) + ", scores = " +
                        std::to_string(scores.size()));
      return mean_of(scores.end() - stat.k, scores.end());
  }
  throw InvalidParam("unknown statistic");
}

}  // namespace

GoldenRank golden_rank(const ScoreMatrix& matrix, GoldenStatistic statistic,
                       ScorePartition partition) {
  GoldenRank gr;
  gr.statistic = statistic;
  gr.partition = partition;
  gr.user_ids = matrix.target_users();
  if (gr.user_ids.empty()) throw EmptyScores("score matrix has no targets");
  for (const auto& user : gr.user_ids) {
    auto scores = partition == ScorePartition::imposter ? matrix.imposter_scores(user)
                                                        : matrix.genuine_scores(user);
    gr.values.push_back(apply_statistic(std::move(scores), statistic));
  }
  // higher rank = better template: high imposter scores are good, high genuine
  // scores are bad
  std::vector<double> oriented = gr.values;
  if (partition == ScorePartition::genuine)
    for (auto& v : oriented) v = -v;
  gr.ranks = average_ranks(oriented);
  return gr;
}

// ---------------------------------------------------------------------------
// template gating
// ---------------------------------------------------------------------------

GateResult gate_templates(const std::vector<std::string>& ids,
                          const std::vector<double>& quality, double fraction) {
  if (ids.size() != quality.size()) throw LengthMismatch("id and quality counts differ");
  if (!(fraction > 0.0 && fraction < 1.0)) throw InvalidFraction("fraction must be in (0, 1)");
  const size_t n = ids.size();
  auto discard_count = static_cast<size_t>(std::floor(fraction * static_cast<double>(n)));
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    auto sa = static_cast<size_t>(a);
    auto sb = static_cast<size_t>(b);
    if (quality[sa] != quality[sb]) return quality[sa] < quality[sb];
    return ids[sa] < ids[sb];
  });
  GateResult res;
  for (size_t p = 0; p < n; ++p) {
    const auto& id = ids[static_cast<size_t>(order[p])];
    (p < discard_count ? res.discarded : res.kept).push_back(id);
  }
  std::sort(res.kept.begin(), res.kept.end());
  std::sort(res.discarded.begin(), res.discarded.end());
  return res;
}

GateResult gate_union_discard(const std::vector<GateResult>& gates) {
  if (gates.empty()) throw InvalidParam("no gates given");
  std::set<std::string> discarded(gates.front().discarded.begin(),
                                  gates.front().discarded.end());
  std::set<std::string> all(gates.front().kept.begin(), gates.front().kept.end());
  all.insert(discarded.begin(), discarded.end());
  for (size_t i = 1; i < gates.size(); ++i)
    discarded.insert(gates[i].discarded.begin(), gates[i].discarded.end());
  GateResult res;
  for (const auto& id : all)
    (discarded.count(id) ? res.discarded : res.kept).push_back(id);
  return res;
}

// ---------------------------------------------------------------------------
// experimental protocol
// ---------------------------------------------------------------------------

ProtocolSplit protocol_split(const SignatureDataset::User& user, const Protocol& protocol,
                             Rng& rng) {
  const int n = static_cast<int>(user.genuine.size());
  ProtocolSplit split;
  if (protocol.selection == Protocol::Selection::random_repeated) {
    if (protocol.enroll_count > n)
      throw InsufficientSamples("user " + user.user_id + " has " + std::to_string(n) +
                                " genuines, protocol enrolls " +
                                std::to_string(protocol.enroll_count));
    split.enrolled = rng.sample_without_replacement(n, protocol.enroll_count);
  } else {
    int first_session = std::numeric_limits<int>::max();
    for (const auto& s : user.genuine) first_session = std::min(first_session, s.session_id);
    for (int i = 0; i < n; ++i)
      if (user.genuine[static_cast<size_t>(i)].session_id == first_session)
        split.enrolled.push_back(i);
    if (static_cast<int>(split.enrolled.size()) < 2)
      throw InsufficientSamples("user " + user.user_id + " has fewer than 2 first-session samples");
  }

  std::set<int> used(split.enrolled.begin(), split.enrolled.end());
  std::set<int> enrolled_sessions;
  for (int i : split.enrolled)
    enrolled_sessions.insert(user.genuine[static_cast<size_t>(i)].session_id);

  // validation: held-out genuines from sessions disjoint from enrollment
  if (protocol.validation_count > 0) {
    for (int i = 0; i < n && static_cast<int>(split.validation.size()) <
                                 protocol.validation_count; ++i) {
      if (used.count(i)) continue;
      if (enrolled_sessions.count(user.genuine[static_cast<size_t>(i)].session_id)) continue;
      split.validation.push_back(i);
      used.insert(i);
    }
  }
  for (int i = 0; i < n; ++i)
    if (!used.count(i)) split.test.push_back(i);
  return split;
}

namespace {

struct UnitResult {
  std::vector<ScoreEntry> entries;
  std::optional<RepQuality> quality;
};

// deterministic worker pool over independent (rep, user) units
void parallel_units(int unit_count, int workers,
                    const std::function<void(int)>& run_unit) {
  if (workers <= 1 || unit_count <= 1) {
    for (int u = 0; u < unit_count; ++u) run_unit(u);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  int thread_count = std::min(workers, unit_count);
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int w = 0; w < thread_count; ++w) {
    pool.emplace_back([&]() {
      while (true) {
        int u = next.fetch_add(1);
        if (u >= unit_count) break;
        try {
          run_unit(u);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

ProtocolRun run_protocol(const SignatureDataset& dataset, const Protocol& protocol,
                         VerifierKind verifier, const HistogramSpec& spec,
                         const PopulationStats* pop, int workers) {
  if (verifier == VerifierKind::keystroke_euclidean)
    throw InvalidParam("keystroke verifier cannot score signature datasets");
  if (dataset.users.size() < 2) throw InsufficientSamples("need >= 2 users");
  if (protocol.selection == Protocol::Selection::random_repeated && protocol.enroll_count < 2)
    throw InvalidParam("enroll_count must be >= 2");

  HistogramSpec eff_spec = spec;
  eff_spec.pressure_max = static_cast<double>(dataset.pressure_max);

  const int user_count = static_cast<int>(dataset.users.size());
  const int reps =
      protocol.selection == Protocol::Selection::first_session ? 1 : protocol.repeat_times;
  if (reps < 1) throw InvalidParam("repeat_times must be >= 1");

  // features are reused across repetitions; dtw scoring reads raw samples
  const bool need_features = verifier == VerifierKind::histogram || pop != nullptr;
  std::vector<std::vector<FeatureVector>> genuine_features(static_cast<size_t>(user_count));
  std::vector<std::vector<FeatureVector>> forgery_features(static_cast<size_t>(user_count));
  if (need_features) {
    for (int u = 0; u < user_count; ++u) {
      const auto& user = dataset.users[static_cast<size_t>(u)];
      for (const auto& s : user.genuine)
        genuine_features[static_cast<size_t>(u)].push_back(extract_features(s, eff_spec));
      if (protocol.imposter_source == Protocol::ImposterSource::skilled_forgery &&
          verifier == VerifierKind::histogram)
        for (const auto& s : user.forgery)
          forgery_features[static_cast<size_t>(u)].push_back(extract_features(s, eff_spec));
    }
  }

  const int unit_count = reps * user_count;
  std::vector<UnitResult> results(static_cast<size_t>(unit_count));

  auto run_unit = [&](int unit) {
    const int rep = unit / user_count;
    const int u = unit % user_count;
    const auto& user = dataset.users[static_cast<size_t>(u)];
    Rng rng(mix_seed(protocol.seed,
                     (static_cast<uint64_t>(rep) << 24) | static_cast<uint64_t>(u)));
    ProtocolSplit split = protocol_split(user, protocol, rng);

    // build the template for this repetition
    std::optional<Template> tmpl;
    std::vector<SignatureSample> enrolled_samples;
    if (need_features) {
      std::vector<FeatureVector> enrolled_features;
      for (int i : split.enrolled)
        enrolled_features.push_back(genuine_features[static_cast<size_t>(u)][static_cast<size_t>(i)]);
      tmpl = make_template(user.user_id, std::move(enrolled_features), eff_spec);
    }
    if (verifier == VerifierKind::dtw) {
      for (int i : split.enrolled)
        enrolled_samples.push_back(user.genuine[static_cast<size_t>(i)]);
    }

    auto score_genuine = [&](int owner, int genuine_index) {
      if (verifier == VerifierKind::histogram)
        return histogram_score(*tmpl, genuine_features[static_cast<size_t>(owner)]
                                                      [static_cast<size_t>(genuine_index)]);
      return dtw_score(enrolled_samples, dataset.users[static_cast<size_t>(owner)]
                                             .genuine[static_cast<size_t>(genuine_index)]);
    };

    UnitResult& out = results[static_cast<size_t>(unit)];

    // validation scores feed repeatability only
    std::vector<double> validation_scores;
    for (int i : split.validation) validation_scores.push_back(score_genuine(u, i));

    // held-out genuine tests
    for (int i : split.test) {
      const auto& s = user.genuine[static_cast<size_t>(i)];
      out.entries.push_back(
          {user.user_id, s.session_id, Label::genuine, user.user_id, rep, score_genuine(u, i)});
    }

    // imposters
    if (protocol.imposter_source == Protocol::ImposterSource::random_forgery) {
      std::vector<std::pair<int, int>> pool;  // (owner, genuine index)
      for (int v = 0; v < user_count; ++v) {
        if (v == u) continue;
        for (int i = 0; i < static_cast<int>(dataset.users[static_cast<size_t>(v)].genuine.size());
             ++i)
          pool.emplace_back(v, i);
      }
      if (protocol.imposters_per_target > 0 &&
          static_cast<int>(pool.size()) > protocol.imposters_per_target) {
        auto chosen = rng.sample_without_replacement(static_cast<int>(pool.size()),
                                                     protocol.imposters_per_target);
        std::vector<std::pair<int, int>> sub;
        for (int c : chosen) sub.push_back(pool[static_cast<size_t>(c)]);
        pool = std::move(sub);
      }
      for (auto [v, i] : pool) {
        const auto& s = dataset.users[static_cast<size_t>(v)].genuine[static_cast<size_t>(i)];
        out.entries.push_back(
            {s.user_id, s.session_id, Label::genuine, user.user_id, rep, score_genuine(v, i)});
      }
    } else {
      if (user.forgery.empty())
        throw InsufficientSamples("user " + user.user_id + " has no skilled forgeries");
      for (int f = 0; f < static_cast<int>(user.forgery.size()); ++f) {
        const auto& s = user.forgery[static_cast<size_t>(f)];
        double score = verifier == VerifierKind::histogram
                           ? histogram_score(*tmpl, forgery_features[static_cast<size_t>(u)]
                                                                    [static_cast<size_t>(f)])
                           : dtw_score(enrolled_samples, s);
        out.entries.push_back(
            {s.user_id, s.session_id, Label::skilled_forgery, user.user_id, rep, score});
      }
    }

    if (pop) {
      RepQuality q;
      q.user_id = user.user_id;
      q.rep = rep;
      auto dist = distinctiveness(*tmpl, *pop);
      q.distinctiveness = dist.total;
      q.complexity = complexity(*tmpl).value;
      if (!validation_scores.empty()) q.repeatability = repeatability(validation_scores).value;
      out.quality = std::move(q);
    }
  };

  parallel_units(unit_count, workers, run_unit);

  ProtocolRun run;
  for (auto& r : results) {
    for (auto& e : r.entries) run.scores.entries.push_back(std::move(e));
    if (r.quality) run.rep_quality.push_back(std::move(*r.quality));
  }

  // per-user aggregates over repetitions
  for (int u = 0; u < user_count; ++u) {
    const auto& user = dataset.users[static_cast<size_t>(u)];
    TemplateSummary s;
    s.user_id = user.user_id;
    double sum_d = 0.0, sum_c = 0.0, sum_r = 0.0;
    int n_q = 0, n_r = 0;
    bool r_inf = false;
    for (const auto& q : run.rep_quality) {
      if (q.user_id != user.user_id) continue;
      sum_d += q.distinctiveness;
      sum_c += q.complexity;
      ++n_q;
      if (q.repeatability) {
        if (std::isinf(*q.repeatability))
          r_inf = true;
        else {
          sum_r += *q.repeatability;
          ++n_r;
        }
      }
    }
    s.reps = reps;
    if (n_q > 0) {
      s.quality_available = true;
      s.distinctiveness = sum_d / n_q;
      s.complexity = sum_c / n_q;
    }
    if (r_inf && n_r == 0) {
      s.repeatability = std::numeric_limits<double>::infinity();
      s.repeatability_infinite = true;
    } else if (n_r > 0) {
      s.repeatability = sum_r / n_r;
    }
    run.templates.push_back(std::move(s));
  }
  std::sort(run.templates.begin(), run.templates.end(),
            [](const auto& a, const auto& b) { return a.user_id < b.user_id; });
  return run;
}

ProtocolRun run_keystroke_protocol(const KeystrokeDataset& dataset,
                                   const KeystrokeProtocol& protocol) {
  if (dataset.users.size() < 2) throw InsufficientSamples("need >= 2 users");
  if (protocol.enroll_count < 2) throw InvalidParam("enroll_count must be >= 2");
  if (protocol.validation_count < 1) throw InvalidParam("validation_count must be >= 1");

  struct UserState {
    std::array<double, kKeystrokeFeatureCount> mean{};
    std::vector<const KeystrokeSample*> test;
  };
  std::vector<UserState> states;
  ProtocolRun run;

  for (const auto& user : dataset.users) {
    const int n = static_cast<int>(user.samples.size());
    if (n < protocol.enroll_count + protocol.validation_count + 1)
      throw InsufficientSamples("user " + user.user_id + " has " + std::to_string(n) +
                                " samples, protocol needs more");
    UserState st;
    std::vector<KeystrokeSample> enrolled(user.samples.begin(),
                                          user.samples.begin() + protocol.enroll_count);
    st.mean = keystroke_enroll(enrolled);

    std::vector<double> validation_scores;
    for (int i = protocol.enroll_count; i < protocol.enroll_count + protocol.validation_count;
         ++i)
      validation_scores.push_back(
          keystroke_score(st.mean, user.samples[static_cast<size_t>(i)]));

    for (int i = protocol.enroll_count + protocol.validation_count; i < n; ++i)
      st.test.push_back(&user.samples[static_cast<size_t>(i)]);

    TemplateSummary summary;
    summary.user_id = user.user_id;
    summary.reps = 1;
    auto rep = repeatability(validation_scores);
    summary.repeatability = rep.value;
    summary.repeatability_infinite = rep.infinite;
    run.templates.push_back(std::move(summary));
    states.push_back(std::move(st));
  }

  for (size_t u = 0; u < dataset.users.size(); ++u) {
    const auto& user = dataset.users[u];
    for (const auto* s : states[u].test)
      run.scores.entries.push_back({s->user_id, s->session_id, Label::genuine, user.user_id, 0,
                                    keystroke_score(states[u].mean, *s)});
    if (protocol.include_imposters) {
      for (size_t v = 0; v < dataset.users.size(); ++v) {
        if (v == u) continue;
        for (const auto* s : states[v].test)
          run.scores.entries.push_back({s->user_id, s->session_id, Label::genuine, user.user_id,
                                        0, keystroke_score(states[u].mean, *s)});
      }
    }
  }
  return run;
}

}  // namespace sigq
