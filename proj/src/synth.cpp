#include "sigq/synth.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "sigq/rng.hpp"
#include "sigq/svc.hpp"

namespace sigq {

namespace {

constexpr double kTwoPi = 6.283185307179586477;

struct Harmonic {
  double freq;   // cycles over the whole sample
  double amp;
  double phase;
};

struct UserModel {
  std::vector<Harmonic> hx, hy;
  int point_count = 0;
  double pressure_base = 0.0, pressure_amp = 0.0, pressure_freq = 0.0, pressure_phase = 0.0;
  std::vector<int> pen_up_indices;  // travel points between strokes
};

UserModel make_user_model(Rng& rng, const SynthParams& p) {
  UserModel m;
  double knob = std::clamp(p.complexity_knob, 0.0, 4.0);
  int base_count = 3 + rng.uniform_int(0, 3);
  int count = std::clamp(static_cast<int>(std::lround(base_count * std::max(0.4, knob))), 2, 12);
  double amp_scale = 0.5 + 0.5 * knob;

  auto make_axis = [&](double base_amp) {
    std::vector<Harmonic> hs;
    for (int h = 1; h <= count; ++h) {
      Harmonic hm;
      hm.freq = h * rng.uniform(0.7, 1.3);
      hm.amp = base_amp / std::pow(h, 0.8) * rng.uniform(0.6, 1.4) * (h == 1 ? 1.0 : amp_scale);
      hm.phase = rng.uniform(0.0, kTwoPi);
      hs.push_back(hm);
    }
    return hs;
  };
  m.hx = make_axis(2000.0);
  m.hy = make_axis(1200.0);

  m.point_count = 120 + rng.uniform_int(0, 54);
  m.pressure_base = rng.uniform(380.0, 620.0);
  m.pressure_amp = rng.uniform(140.0, 320.0);
  m.pressure_freq = rng.uniform(0.8, 2.2);
  m.pressure_phase = rng.uniform(0.0, kTwoPi);

  int strokes = 1 + rng.uniform_int(0, 2);
  std::set<int> breaks;
  for (int s = 1; s < strokes; ++s)
    breaks.insert(rng.uniform_int(m.point_count / 4, 3 * m.point_count / 4));
  m.pen_up_indices.assign(breaks.begin(), breaks.end());
  return m;
}

SignatureSample synth_sample(const UserModel& m, Rng& rng, double jitter, double session_dx,
                             double session_dy, const std::vector<double>& session_phase_x,
                             const std::vector<double>& session_phase_y) {
  // per-sample distortion of the user's trajectory
  std::vector<double> phx(m.hx.size()), phy(m.hy.size());
  std::vector<double> ampx(m.hx.size()), ampy(m.hy.size());
  for (size_t h = 0; h < m.hx.size(); ++h) {
    phx[h] = m.hx[h].phase + session_phase_x[h] + jitter * 0.20 * rng.normal();
    ampx[h] = m.hx[h].amp * (1.0 + jitter * 0.08 * rng.normal());
  }
  for (size_t h = 0; h < m.hy.size(); ++h) {
    phy[h] = m.hy[h].phase + session_phase_y[h] + jitter * 0.20 * rng.normal();
    ampy[h] = m.hy[h].amp * (1.0 + jitter * 0.08 * rng.normal());
  }
  double pressure_shift = jitter * 40.0 * rng.normal();

  SignatureSample s;
  s.points.reserve(static_cast<size_t>(m.point_count));
  for (int k = 0; k < m.point_count; ++k) {
    double tau = static_cast<double>(k) / (m.point_count - 1);
    double x = session_dx, y = session_dy;
    for (size_t h = 0; h < m.hx.size(); ++h)
      x += ampx[h] * std::cos(kTwoPi * m.hx[h].freq * tau + phx[h]);
    for (size_t h = 0; h < m.hy.size(); ++h)
      y += ampy[h] * std::cos(kTwoPi * m.hy[h].freq * tau + phy[h]);
    x += jitter * 8.0 * rng.normal();
    y += jitter * 8.0 * rng.normal();

    double pr = m.pressure_base + pressure_shift +
                m.pressure_amp * std::sin(kTwoPi * m.pressure_freq * tau + m.pressure_phase) +
                jitter * 20.0 * rng.normal();

    PenPoint p;
    p.x = static_cast<int>(std::lround(x));
    p.y = static_cast<int>(std::lround(y));
    p.t = static_cast<int64_t>(k) * 10;
    p.pressure = std::clamp(static_cast<int>(std::lround(pr)), 0, 1023);
    p.pen_down =
        std::find(m.pen_up_indices.begin(), m.pen_up_indices.end(), k) == m.pen_up_indices.end();
    s.points.push_back(p);
  }
  return s;
}

std::string two_digits(int v) {
  std::string s = std::to_string(v);
  return s.size() < 2 ? "0" + s : s;
}

std::string make_user_id(const SynthParams& p, int index) {
  int width = std::max(2, static_cast<int>(std::to_string(p.n_users - 1).size()));
  std::string n = std::to_string(index);
  while (static_cast<int>(n.size()) < width) n = "0" + n;
  return p.user_prefix + n;
}

}  // namespace

SynthCorpus synth_corpus(const SynthParams& p) {
  if (p.n_users < 2) throw InvalidParam("n_users must be >= 2");
  if (p.samples_per_user < 6) throw InvalidParam("samples_per_user must be >= 6");
  if (p.sessions < 1) throw InvalidParam("sessions must be >= 1");
  if (!(p.consistency > 0.0 && p.consistency <= 1.0))
    throw InvalidParam("consistency must be in (0, 1]");
  if (!(p.complexity_knob >= 0.0)) throw InvalidParam("complexity_knob must be >= 0");
  if (p.forgeries_per_user < 0) throw InvalidParam("forgeries_per_user must be >= 0");
  if (p.samples_per_user < p.sessions) throw InvalidParam("fewer samples than sessions");

  const double jitter = 1.0 - p.consistency;
  SynthCorpus corpus;
  corpus.manifest.modality = DatasetManifest::Modality::signature;
  corpus.manifest.pressure_max = 1023;
  corpus.dataset.pressure_max = 1023;

  for (int u = 0; u < p.n_users; ++u) {
    const std::string user_id = make_user_id(p, u);
    Rng model_rng(mix_seed(p.seed, static_cast<uint64_t>(u)));
    UserModel model = make_user_model(model_rng, p);

    DatasetManifest::UserRefs refs;
    refs.user_id = user_id;
    SignatureDataset::User user;
    user.user_id = user_id;

    // spread samples across sessions, earlier sessions take the remainder
    std::vector<int> per_session(static_cast<size_t>(p.sessions),
                                 p.samples_per_user / p.sessions);
    for (int s = 0; s < p.samples_per_user % p.sessions; ++s) per_session[static_cast<size_t>(s)]++;

    int sample_index = 0;
    for (int sess = 0; sess < p.sessions; ++sess) {
      Rng drift_rng(mix_seed(p.seed, (static_cast<uint64_t>(u) << 16) | 0x5E550000ULL |
                                         static_cast<uint64_t>(sess)));
      double drift = 0.35 * jitter;
      double session_dx = sess == 0 ? 0.0 : drift * 90.0 * drift_rng.normal();
      double session_dy = sess == 0 ? 0.0 : drift * 90.0 * drift_rng.normal();
      std::vector<double> sess_phase_x(model.hx.size(), 0.0), sess_phase_y(model.hy.size(), 0.0);
      if (sess > 0) {
        for (auto& v : sess_phase_x) v = drift * 0.5 * drift_rng.normal();
        for (auto& v : sess_phase_y) v = drift * 0.5 * drift_rng.normal();
      }

      DatasetManifest::SessionRefs sess_refs;
      sess_refs.session = sess + 1;
      for (int k = 0; k < per_session[static_cast<size_t>(sess)]; ++k, ++sample_index) {
        Rng sample_rng(mix_seed(p.seed, (static_cast<uint64_t>(u) << 32) |
                                            (static_cast<uint64_t>(sess) << 20) |
                                            static_cast<uint64_t>(k)));
        SignatureSample s =
            synth_sample(model, sample_rng, jitter, session_dx, session_dy, sess_phase_x,
                         sess_phase_y);
        s.user_id = user_id;
        s.session_id = sess + 1;
        s.label = Label::genuine;

        std::string rel = user_id + "/g_s" + std::to_string(sess + 1) + "_" +
                          two_digits(sample_index) + ".svc";
        corpus.files[rel] = render_svc(s);
        sess_refs.files.push_back(rel);
        user.genuine.push_back(std::move(s));
      }
      refs.genuine.push_back(std::move(sess_refs));
    }

    // forgery stand-ins: same trajectory, heavier distortion
    double forger_jitter = std::min(1.0, 0.35 + 1.8 * jitter);
    for (int f = 0; f < p.forgeries_per_user; ++f) {
      Rng forgery_rng(mix_seed(p.seed, (static_cast<uint64_t>(u) << 32) | 0xF0000000ULL |
                                           static_cast<uint64_t>(f)));
      std::vector<double> zero_x(model.hx.size(), 0.0), zero_y(model.hy.size(), 0.0);
      SignatureSample s =
          synth_sample(model, forgery_rng, forger_jitter, 0.0, 0.0, zero_x, zero_y);
      s.user_id = user_id;
      s.session_id = 0;
      s.label = Label::skilled_forgery;
      std::string rel = user_id + "/f_" + two_digits(f) + ".svc";
      corpus.files[rel] = render_svc(s);
      refs.forgery.push_back(rel);
      user.forgery.push_back(std::move(s));
    }

    corpus.manifest.users.push_back(std::move(refs));
    corpus.dataset.users.push_back(std::move(user));
  }
  return corpus;
}

SynthCorpus merge_corpora(const SynthCorpus& a, const SynthCorpus& b) {
  SynthCorpus out = a;
  for (const auto& u : b.manifest.users) {
    for (const auto& have : out.manifest.users)
      if (have.user_id == u.user_id) throw InvalidParam("duplicate user id " + u.user_id);
    out.manifest.users.push_back(u);
  }
  for (const auto& u : b.dataset.users) out.dataset.users.push_back(u);
  for (const auto& [rel, text] : b.files) out.files[rel] = text;
  std::sort(out.manifest.users.begin(), out.manifest.users.end(),
            [](const auto& x, const auto& y) { return x.user_id < y.user_id; });
  std::sort(out.dataset.users.begin(), out.dataset.users.end(),
            [](const auto& x, const auto& y) { return x.user_id < y.user_id; });
  return out;
}

void write_corpus(const SynthCorpus& corpus, const std::filesystem::path& root) {
  for (const auto& [rel, text] : corpus.files) write_text_file(root / rel, text);
  save_manifest(corpus.manifest, root / "manifest.json");
}

}  // namespace sigq
