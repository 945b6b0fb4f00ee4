#include "sigq/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sigq/rng.hpp"
#include "sigq/svc.hpp"

namespace sigq {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

int to_int(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    int v = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + " expects an integer, got '" + value + "'");
  }
}

uint64_t to_u64(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    auto v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + " expects an unsigned integer, got '" + value + "'");
  }
}

double to_double(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + " expects a number, got '" + value + "'");
  }
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError(key + " expects true/false, got '" + value + "'");
}

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  if (key == "config_version") {
    if (to_int(key, value) != 1) throw ConfigError("unsupported config_version " + value);
  } else if (key == "root") {
    root = value;
  } else if (key == "manifest") {
    manifest = value;
  } else if (key == "out") {
    out_dir = value;
  } else if (key == "scores") {
    scores_csv = value;
  } else if (key == "verifier") {
    try {
      verifier = verifier_from_name(value);
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  } else if (key == "speed_bins") {
    spec.speed_bins = to_int(key, value);
  } else if (key == "angle_bins") {
    spec.angle_bins = to_int(key, value);
  } else if (key == "pressure_bins") {
    spec.pressure_bins = to_int(key, value);
  } else if (key == "speed_edges") {
    spec.speed_edges.clear();
    std::stringstream ss(value);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!trim(tok).empty()) spec.speed_edges.push_back(to_double(key, trim(tok)));
  } else if (key == "divide_by_dt") {
    spec.divide_by_dt = to_bool(key, value);
  } else if (key == "require_pressure") {
    spec.require_pressure = to_bool(key, value);
  } else if (key == "seed") {
    seed = to_u64(key, value);
  } else if (key == "l_pop") {
    l_pop = to_int(key, value);
  } else if (key == "pop_source") {
    if (value == "generic")
      pop_source = PopSource::generic;
    else if (value == "empirical")
      pop_source = PopSource::empirical;
    else
      throw ConfigError("pop_source must be generic or empirical, got '" + value + "'");
  } else if (key == "enroll_count") {
    protocol.enroll_count = to_int(key, value);
  } else if (key == "selection") {
    if (value == "random_repeated")
      protocol.selection = Protocol::Selection::random_repeated;
    else if (value == "first_session")
      protocol.selection = Protocol::Selection::first_session;
    else
      throw ConfigError("selection must be random_repeated or first_session, got '" + value +
                        "'");
  } else if (key == "repeat_times") {
    protocol.repeat_times = to_int(key, value);
  } else if (key == "validation_count") {
    protocol.validation_count = to_int(key, value);
  } else if (key == "imposter_source") {
    if (value == "random_forgery")
      protocol.imposter_source = Protocol::ImposterSource::random_forgery;
    else if (value == "skilled_forgery")
      protocol.imposter_source = Protocol::ImposterSource::skilled_forgery;
    else
      throw ConfigError("imposter_source must be random_forgery or skilled_forgery");
  } else if (key == "imposters_per_target") {
    protocol.imposters_per_target = to_int(key, value);
  } else if (key == "gate_fraction") {
    gate_fraction = to_double(key, value);
  } else if (key == "workers") {
    workers = to_int(key, value);
  } else if (key == "max_thresholds") {
    max_thresholds = static_cast<size_t>(to_u64(key, value));
  } else if (key == "keystroke_enroll_count") {
    keystroke.enroll_count = to_int(key, value);
  } else if (key == "keystroke_validation_count") {
    keystroke.validation_count = to_int(key, value);
  } else if (key == "users") {
    synth.n_users = to_int(key, value);
  } else if (key == "samples_per_user") {
    synth.samples_per_user = to_int(key, value);
  } else if (key == "sessions") {
    synth.sessions = to_int(key, value);
  } else if (key == "consistency") {
    synth.consistency = to_double(key, value);
  } else if (key == "complexity_knob") {
    synth.complexity_knob = to_double(key, value);
  } else if (key == "forgeries_per_user") {
    synth.forgeries_per_user = to_int(key, value);
  } else if (key == "user_prefix") {
    synth.user_prefix = value;
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  RunConfig config;
  std::stringstream ss(text);
  std::string line;
  size_t lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    config.set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return config;
}

namespace {

std::filesystem::path manifest_path(const RunConfig& config) {
  if (!config.manifest.empty()) return config.manifest;
  if (config.root.empty()) throw ConfigError("no dataset root or manifest configured");
  return config.root / "manifest.json";
}

std::filesystem::path dataset_root(const RunConfig& config) {
  if (!config.root.empty()) return config.root;
  return manifest_path(config).parent_path();
}

// loads each referenced file, reporting every failure instead of stopping at
// the first one
SignatureDataset load_reporting(const RunConfig& config, const DatasetManifest& manifest,
                                std::ostream& log, int& failures) {
  SignatureDataset ds;
  ds.pressure_max = manifest.pressure_max.value_or(1023);
  const auto root = dataset_root(config);
  for (const auto& u : manifest.users) {
    SignatureDataset::User user;
    user.user_id = u.user_id;
    auto load_one = [&](const std::string& rel, int session, Label label,
                        std::vector<SignatureSample>& dst) {
      try {
        SignatureSample s = parse_svc(read_text_file(root / rel));
        s.user_id = u.user_id;
        s.session_id = session;
        s.label = label;
        dst.push_back(std::move(s));
      } catch (const Error& e) {
        log << "error: " << rel << ": " << e.what() << "\n";
        ++failures;
      }
    };
    for (const auto& sess : u.genuine)
      for (const auto& rel : sess.files) load_one(rel, sess.session, Label::genuine, user.genuine);
    for (const auto& rel : u.forgery) load_one(rel, 0, Label::skilled_forgery, user.forgery);
    ds.users.push_back(std::move(user));
  }
  return ds;
}

PopulationStats build_population_stats(const RunConfig& config, const SignatureDataset& dataset,
                                       const HistogramSpec& spec, bool with_pressure) {
  if (config.pop_source == RunConfig::PopSource::generic)
    return generic_population_stats(spec, config.l_pop, with_pressure);
  std::vector<FeatureVector> all;
  for (const auto& u : dataset.users)
    for (const auto& s : u.genuine) all.push_back(extract_features(s, spec));
  return empirical_population_stats(all);
}

HistogramSpec effective_spec(const RunConfig& config, const SignatureDataset& dataset) {
  HistogramSpec spec = config.spec;
  spec.pressure_max = static_cast<double>(dataset.pressure_max);
  spec.validate();
  return spec;
}

bool dataset_has_pressure(const SignatureDataset& dataset) {
  for (const auto& u : dataset.users)
    for (const auto& s : u.genuine) return s.has_pressure();
  return false;
}

}  // namespace

CmdStatus cmd_synth(const RunConfig& config, std::ostream& log) {
  SynthParams params = config.synth;
  params.seed = config.seed;
  auto corpus = synth_corpus(params);
  write_corpus(corpus, config.out_dir);
  log << "wrote " << corpus.files.size() << " samples for " << corpus.dataset.users.size()
      << " users to " << config.out_dir.string() << "\n";
  return {};
}

CmdStatus cmd_extract(const RunConfig& config, std::ostream& log) {
  auto manifest = load_manifest(manifest_path(config));
  if (manifest.modality != DatasetManifest::Modality::signature)
    throw ConfigError("extract expects a signature dataset");
  int failures = 0;
  auto dataset = load_reporting(config, manifest, log, failures);
  auto spec = effective_spec(config, dataset);

  for (const auto& user : dataset.users) {
    std::ostringstream out;
    bool wrote_header = false;
    auto emit = [&](const SignatureSample& s) {
      FeatureVector fv = extract_features(s, spec);
      if (!wrote_header) {
        out << feature_csv_header(fv.layout(spec));
        wrote_header = true;
      }
      out << feature_csv_row(s, fv);
    };
    for (const auto& s : user.genuine) emit(s);
    for (const auto& s : user.forgery) emit(s);
    if (wrote_header)
      write_text_file(config.out_dir / "features" / (user.user_id + ".csv"), out.str());
  }
  if (failures > 0)
    throw InvalidParam(std::to_string(failures) + " file(s) failed to parse");
  log << "extracted features for " << dataset.users.size() << " users\n";
  return {};
}

CmdStatus cmd_quality(const RunConfig& config, std::ostream& log) {
  auto manifest = load_manifest(manifest_path(config));
  if (manifest.modality != DatasetManifest::Modality::signature)
    throw ConfigError("quality expects a signature dataset");
  auto dataset = load_signature_dataset(dataset_root(config), manifest);
  auto spec = effective_spec(config, dataset);
  auto pop = build_population_stats(config, dataset, spec, dataset_has_pressure(dataset));

  Protocol protocol = config.protocol;
  protocol.seed = config.seed;

  CmdStatus status;
  std::ostringstream csv;
  csv << QualityReport::csv_header();
  json reports = json::array();
  for (size_t u = 0; u < dataset.users.size(); ++u) {
    const auto& user = dataset.users[u];
    try {
      Rng rng(mix_seed(protocol.seed, static_cast<uint64_t>(u)));  // rep 0 stream
      auto split = protocol_split(user, protocol, rng);
      std::vector<FeatureVector> enrolled;
      for (int i : split.enrolled)
        enrolled.push_back(extract_features(user.genuine[static_cast<size_t>(i)], spec));
      Template tmpl = make_template(user.user_id, std::move(enrolled), spec);

      std::optional<std::vector<double>> validation_scores;
      if (!split.validation.empty()) {
        std::vector<double> scores;
        if (config.verifier == VerifierKind::dtw) {
          std::vector<SignatureSample> enrolled_samples;
          for (int i : split.enrolled)
            enrolled_samples.push_back(user.genuine[static_cast<size_t>(i)]);
          for (int i : split.validation)
            scores.push_back(dtw_score(enrolled_samples, user.genuine[static_cast<size_t>(i)]));
        } else {
          for (int i : split.validation)
            scores.push_back(histogram_score(
                tmpl, extract_features(user.genuine[static_cast<size_t>(i)], spec)));
        }
        validation_scores = std::move(scores);
      } else if (protocol.validation_count > 0) {
        log << "warning: user " << user.user_id
            << ": no cross-session validation samples, repeatability absent\n";
        status.warnings = true;
      }
      QualityReport report = compute_quality(tmpl, pop, validation_scores);
      csv << report.csv_row();
      reports.push_back(json::parse(report.to_json()));
    } catch (const InsufficientSamples& e) {
      log << "warning: user " << user.user_id << ": " << e.what() << "\n";
      status.warnings = true;
      csv << user.user_id << ",,,,,,,,,insufficient_samples\n";
      reports.push_back({{"user_id", user.user_id}, {"error", e.what()}});
    } catch (const TooFewSamples& e) {
      log << "warning: user " << user.user_id << ": " << e.what() << "\n";
      status.warnings = true;
      csv << user.user_id << ",,,,,,,,,too_few_samples\n";
      reports.push_back({{"user_id", user.user_id}, {"error", e.what()}});
    }
  }
  write_text_file(config.out_dir / "quality.csv", csv.str());
  write_text_file(config.out_dir / "quality.json", reports.dump(2) + "\n");
  log << "quality reports for " << dataset.users.size() << " users\n";
  return status;
}

namespace {

struct MetricColumn {
  std::string name;
  std::vector<std::string> ids;
  std::vector<double> values;
};

// collects the per-template quality columns that are actually available
std::vector<MetricColumn> metric_columns(const std::vector<TemplateSummary>& templates) {
  std::vector<MetricColumn> cols;
  MetricColumn d{"distinctiveness", {}, {}}, c{"complexity", {}, {}}, r{"repeatability", {}, {}};
  for (const auto& t : templates) {
    if (t.quality_available) {
      d.ids.push_back(t.user_id);
      d.values.push_back(t.distinctiveness);
      c.ids.push_back(t.user_id);
      c.values.push_back(t.complexity);
    }
    if (t.repeatability && !t.repeatability_infinite) {
      r.ids.push_back(t.user_id);
      r.values.push_back(*t.repeatability);
    }
  }
  if (d.ids.size() == templates.size()) cols.push_back(std::move(d));
  if (c.ids.size() == templates.size()) cols.push_back(std::move(c));
  if (r.ids.size() == templates.size()) cols.push_back(std::move(r));
  return cols;
}

struct RatesAtThreshold {
  double far = 0.0;
  double frr = 0.0;
};

RatesAtThreshold rates_for_users(const ScoreMatrix& scores, const std::set<std::string>& users,
                                 double threshold) {
  std::vector<double> gen, imp;
  for (const auto& e : scores.entries) {
    if (!users.count(e.target_user)) continue;
    (ScoreMatrix::is_genuine(e) ? gen : imp).push_back(e.score);
  }
  if (gen.empty() || imp.empty()) throw EmptyScores("gated partition has no scores");
  std::sort(gen.begin(), gen.end());
  std::sort(imp.begin(), imp.end());
  return {far_at(imp, threshold), frr_at(gen, threshold)};
}

}  // namespace

CmdStatus cmd_eval(const RunConfig& config, std::ostream& log) {
  CmdStatus status;
  ProtocolRun run;
  bool have_quality = false;

  if (!config.scores_csv.empty()) {
    // external verifier bypass: scores only, no quality metrics
    run.scores = parse_score_csv(read_text_file(config.scores_csv));
    for (const auto& user : run.scores.target_users())
      run.templates.push_back({user, 1, false, 0.0, 0.0, std::nullopt, false});
    log << "imported " << run.scores.entries.size() << " scores for "
        << run.templates.size() << " targets\n";
  } else {
    auto manifest = load_manifest(manifest_path(config));
    if (manifest.modality == DatasetManifest::Modality::keystroke) {
      auto dataset = load_keystroke_dataset(dataset_root(config), manifest);
      run = run_keystroke_protocol(dataset, config.keystroke);
    } else {
      auto dataset = load_signature_dataset(dataset_root(config), manifest);
      auto spec = effective_spec(config, dataset);
      auto pop = build_population_stats(config, dataset, spec, dataset_has_pressure(dataset));
      Protocol protocol = config.protocol;
      protocol.seed = config.seed;
      run = run_protocol(dataset, protocol, config.verifier, spec, &pop, config.workers);
      have_quality = true;
    }
    write_text_file(config.out_dir / "scores.csv", render_score_csv(run.scores));
  }

  auto pooled_genuine = run.scores.pooled_genuine();
  auto pooled_imposter = run.scores.pooled_imposter();

  json report;
  report["verifier"] = config.scores_csv.empty() ? verifier_name(config.verifier) : "imported";
  report["imposter_source"] =
      config.protocol.imposter_source == Protocol::ImposterSource::random_forgery
          ? "random_forgery"
          : "skilled_forgery";

  EerPoint pooled_eer{};
  bool have_eer = false;
  try {
    pooled_eer = eer_from_scores(pooled_genuine, pooled_imposter);
    have_eer = true;
    report["eer"] = {{"rate", pooled_eer.rate}, {"threshold", pooled_eer.threshold}};
  } catch (const Error& e) {
    log << "warning: pooled EER: " << e.what() << "\n";
    status.warnings = true;
    report["eer"] = nullptr;
  }

  // per-template pooled scores
  std::vector<std::string> ids;
  for (const auto& t : run.templates) ids.push_back(t.user_id);
  std::map<std::string, std::vector<double>> genuine_of, imposter_of;
  for (const auto& e : run.scores.entries)
    (ScoreMatrix::is_genuine(e) ? genuine_of : imposter_of)[e.target_user].push_back(e.score);

  auto metrics = metric_columns(run.templates);

  // quartile trade-off curves per metric
  if (!metrics.empty() && ids.size() >= 4) {
    std::vector<double> all_scores = pooled_genuine;
    all_scores.insert(all_scores.end(), pooled_imposter.begin(), pooled_imposter.end());
    auto grid = threshold_grid(all_scores, config.max_thresholds);
    std::ostringstream curves;
    curves << "metric,group,threshold,far,frr\n";
    curves.precision(17);
    for (const auto& metric : metrics) {
      auto split = split_quartiles(metric.values, metric.ids);
      if (split.collapsed_ties) {
        log << "warning: " << metric.name << ": tied scores collapsed a quartile group\n";
        status.warnings = true;
      }
      std::vector<std::vector<double>> imp_scores, gen_scores;
      for (const auto& id : metric.ids) {
        imp_scores.push_back(imposter_of.count(id) ? imposter_of.at(id) : std::vector<double>{});
        gen_scores.push_back(genuine_of.count(id) ? genuine_of.at(id) : std::vector<double>{});
      }
      auto fars = quartile_mean_rates(split, imp_scores, grid, RateKind::far);
      auto frrs = quartile_mean_rates(split, gen_scores, grid, RateKind::frr);
      for (size_t g = 0; g < 4; ++g)
        for (size_t ti = 0; ti < grid.size(); ++ti)
          curves << metric.name << ',' << g + 1 << ',' << grid[ti] << ',' << fars[g][ti] << ','
                 << frrs[g][ti] << '\n';
    }
    write_text_file(config.out_dir / "curves.csv", curves.str());
  }

  // golden ranks and Spearman validation; k-statistics are included only when
  // every target has at least k scores in the partition
  size_t min_genuine = std::numeric_limits<size_t>::max();
  size_t min_imposter = std::numeric_limits<size_t>::max();
  for (const auto& id : ids) {
    min_genuine = std::min(min_genuine,
                           genuine_of.count(id) ? genuine_of.at(id).size() : size_t{0});
    min_imposter = std::min(min_imposter,
                            imposter_of.count(id) ? imposter_of.at(id).size() : size_t{0});
  }

  struct StatSpec {
    GoldenStatistic stat;
    ScorePartition partition;
  };
  std::vector<StatSpec> stat_specs;
  if (min_imposter >= 1) {
    stat_specs.push_back({GoldenStatistic::mean_all(), ScorePartition::imposter});
    stat_specs.push_back({GoldenStatistic::min_score(), ScorePartition::imposter});
    if (min_imposter >= 3)
      stat_specs.push_back({GoldenStatistic::mean_k_lowest(3), ScorePartition::imposter});
  }
  if (min_genuine >= 1) {
    stat_specs.push_back({GoldenStatistic::mean_all(), ScorePartition::genuine});
    stat_specs.push_back({GoldenStatistic::max_score(), ScorePartition::genuine});
    if (min_genuine >= 5)
      stat_specs.push_back({GoldenStatistic::mean_k_highest(5), ScorePartition::genuine});
  }

  std::vector<GoldenRank> golden;
  for (const auto& ss : stat_specs) {
    try {
      golden.push_back(golden_rank(run.scores, ss.stat, ss.partition));
    } catch (const Error& e) {
      log << "warning: golden rank " << ss.stat.name() << ": " << e.what() << "\n";
      status.warnings = true;
    }
  }

  {
    std::ostringstream ranks;
    ranks.precision(17);
    ranks << "user_id";
    for (const auto& m : metrics) ranks << ',' << m.name;
    for (const auto& g : golden)
      ranks << ','
            << (g.partition == ScorePartition::imposter ? "imposter_" : "genuine_")
            << g.statistic.name() << "_value,"
            << (g.partition == ScorePartition::imposter ? "imposter_" : "genuine_")
            << g.statistic.name() << "_rank";
    ranks << '\n';
    for (size_t i = 0; i < ids.size(); ++i) {
      ranks << ids[i];
      for (const auto& m : metrics) ranks << ',' << m.values[i];
      for (const auto& g : golden) ranks << ',' << g.values[i] << ',' << g.ranks[i];
      ranks << '\n';
    }
    write_text_file(config.out_dir / "ranks.csv", ranks.str());
  }

  json spearman_table = json::array();
  {
    std::ostringstream sp;
    sp << "metric,partition,statistic,spearman\n";
    sp.precision(17);
    for (const auto& m : metrics) {
      for (const auto& g : golden) {
        try {
          double rho = spearman(m.values, g.ranks);
          sp << m.name << ','
             << (g.partition == ScorePartition::imposter ? "imposter" : "genuine") << ','
             << g.statistic.name() << ',' << rho << '\n';
          spearman_table.push_back({{"metric", m.name},
                                    {"partition", g.partition == ScorePartition::imposter
                                                      ? "imposter"
                                                      : "genuine"},
                                    {"statistic", g.statistic.name()},
                                    {"spearman", rho}});
        } catch (const Error& e) {
          log << "warning: spearman " << m.name << " vs " << g.statistic.name() << ": "
              << e.what() << "\n";
          status.warnings = true;
        }
      }
    }
    write_text_file(config.out_dir / "spearman.csv", sp.str());
  }
  report["spearman"] = spearman_table;

  // gating study at the pooled EER threshold
  if (!metrics.empty() && have_eer) {
    std::set<std::string> all_ids(ids.begin(), ids.end());
    json gating = json::array();
    std::ostringstream gcsv;
    gcsv << "constraint,templates,far,frr,hter\n";
    gcsv.precision(17);

    auto emit_row = [&](const std::string& name, const std::set<std::string>& kept) {
      auto rates = rates_for_users(run.scores, kept, pooled_eer.threshold);
      double h = hter(rates.far, rates.frr);
      gcsv << name << ',' << kept.size() << ',' << rates.far << ',' << rates.frr << ',' << h
           << '\n';
      gating.push_back({{"constraint", name},
                        {"templates", kept.size()},
                        {"far", rates.far},
                        {"frr", rates.frr},
                        {"hter", h}});
    };

    emit_row("none", all_ids);
    std::vector<GateResult> gates;
    for (const auto& m : metrics) {
      auto gate = gate_templates(m.ids, m.values, config.gate_fraction);
      emit_row(m.name, {gate.kept.begin(), gate.kept.end()});
      gates.push_back(std::move(gate));
    }
    if (gates.size() > 1) {
      auto combined = gate_union_discard(gates);
      emit_row("all_combined", {combined.kept.begin(), combined.kept.end()});

      // ROC of good templates (kept by every gate) vs bad (discarded by any)
      std::set<std::string> good(combined.kept.begin(), combined.kept.end());
      std::vector<double> good_gen, good_imp, bad_gen, bad_imp;
      for (const auto& e : run.scores.entries) {
        bool is_good = good.count(e.target_user) > 0;
        auto& dst = ScoreMatrix::is_genuine(e) ? (is_good ? good_gen : bad_gen)
                                               : (is_good ? good_imp : bad_imp);
        dst.push_back(e.score);
      }
      if (!good_gen.empty() && !good_imp.empty() && !bad_gen.empty() && !bad_imp.empty()) {
        std::ostringstream roc_csv;
        roc_csv << "set,far,tar\n";
        roc_csv.precision(17);
        for (const auto& p : roc(good_gen, good_imp))
          roc_csv << "good," << p.far << ',' << p.tar << '\n';
        for (const auto& p : roc(bad_gen, bad_imp))
          roc_csv << "bad," << p.far << ',' << p.tar << '\n';
        write_text_file(config.out_dir / "roc.csv", roc_csv.str());
        try {
          report["good_templates_eer"] = eer_from_scores(good_gen, good_imp).rate;
          report["bad_templates_eer"] = eer_from_scores(bad_gen, bad_imp).rate;
        } catch (const Error& e) {
          log << "warning: good/bad ROC EER: " << e.what() << "\n";
          status.warnings = true;
        }
      }
    }
    write_text_file(config.out_dir / "gating.csv", gcsv.str());
    report["gating"] = gating;
  }

  report["templates"] = run.templates.size();
  report["score_entries"] = run.scores.entries.size();
  report["quality_available"] = have_quality;
  write_text_file(config.out_dir / "report.json", report.dump(2) + "\n");
  log << "eval complete: " << run.scores.entries.size() << " scores, "
      << run.templates.size() << " templates";
  if (have_eer) log << ", pooled EER " << format_double(pooled_eer.rate);
  log << "\n";
  return status;
}

}  // namespace sigq
