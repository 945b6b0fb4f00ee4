#include "sigq/manifest.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "sigq/keystroke.hpp"
#include "sigq/svc.hpp"

namespace sigq {

using nlohmann::json;

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidParam("cannot open file: " + path.string());
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return content;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidParam("cannot write file: " + path.string());
  out << content;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw InvalidParam("manifest " + path.string() + ": " + e.what());
  }
  DatasetManifest m;
  try {
    if (j.value("schema_version", 1) != 1)
      throw InvalidParam("manifest schema_version unsupported");
    std::string modality = j.at("modality").get<std::string>();
    if (modality == "signature") {
      m.modality = DatasetManifest::Modality::signature;
    } else if (modality == "keystroke") {
      m.modality = DatasetManifest::Modality::keystroke;
    } else {
      throw InvalidParam("unknown modality '" + modality + "'");
    }
    if (j.contains("pressure_max")) m.pressure_max = j.at("pressure_max").get<int>();
    if (j.contains("keystroke_csv")) m.keystroke_csv = j.at("keystroke_csv").get<std::string>();
    for (const auto& ju : j.value("users", json::array())) {
      DatasetManifest::UserRefs u;
      u.user_id = ju.at("user_id").get<std::string>();
      for (const auto& js : ju.value("genuine", json::array())) {
        DatasetManifest::SessionRefs s;
        s.session = js.at("session").get<int>();
        for (const auto& f : js.at("files")) s.files.push_back(f.get<std::string>());
        u.genuine.push_back(std::move(s));
      }
      std::sort(u.genuine.begin(), u.genuine.end(),
                [](const auto& a, const auto& b) { return a.session < b.session; });
      for (const auto& f : ju.value("forgery", json::array()))
        u.forgery.push_back(f.get<std::string>());
      m.users.push_back(std::move(u));
    }
  } catch (const json::exception& e) {
    throw InvalidParam("manifest " + path.string() + ": " + e.what());
  }
  std::sort(m.users.begin(), m.users.end(),
            [](const auto& a, const auto& b) { return a.user_id < b.user_id; });
  return m;
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  json j;
  j["schema_version"] = 1;
  j["modality"] =
      manifest.modality == DatasetManifest::Modality::signature ? "signature" : "keystroke";
  if (manifest.pressure_max) j["pressure_max"] = *manifest.pressure_max;
  if (!manifest.keystroke_csv.empty()) j["keystroke_csv"] = manifest.keystroke_csv;
  j["users"] = json::array();
  for (const auto& u : manifest.users) {
    json ju;
    ju["user_id"] = u.user_id;
    ju["genuine"] = json::array();
    for (const auto& s : u.genuine)
      ju["genuine"].push_back({{"session", s.session}, {"files", s.files}});
    ju["forgery"] = u.forgery;
    j["users"].push_back(std::move(ju));
  }
  write_text_file(path, j.dump(2) + "\n");
}

namespace {

SignatureSample load_signature_file(const std::filesystem::path& root, const std::string& rel,
                                    const std::string& user_id, int session, Label label) {
  SignatureSample s;
  try {
    s = parse_svc(read_text_file(root / rel));
  } catch (const Error& e) {
    throw InvalidParam(rel + ": " + e.what());
  }
  s.user_id = user_id;
  s.session_id = session;
  s.label = label;
  return s;
}

}  // namespace

const SignatureDataset::User* SignatureDataset::find(const std::string& user_id) const {
  for (const auto& u : users)
    if (u.user_id == user_id) return &u;
  return nullptr;
}

SignatureDataset load_signature_dataset(const std::filesystem::path& root,
                                        const DatasetManifest& manifest) {
  if (manifest.modality != DatasetManifest::Modality::signature)
    throw InvalidParam("manifest is not a signature dataset");
  SignatureDataset ds;
  ds.pressure_max = manifest.pressure_max.value_or(1023);
  for (const auto& u : manifest.users) {
    SignatureDataset::User user;
    user.user_id = u.user_id;
    for (const auto& sess : u.genuine)
      for (const auto& rel : sess.files)
        user.genuine.push_back(
            load_signature_file(root, rel, u.user_id, sess.session, Label::genuine));
    for (const auto& rel : u.forgery)
      user.forgery.push_back(load_signature_file(root, rel, u.user_id, 0, Label::skilled_forgery));
    ds.users.push_back(std::move(user));
  }
  return ds;
}

KeystrokeDataset load_keystroke_dataset(const std::filesystem::path& root,
                                        const DatasetManifest& manifest) {
  if (manifest.modality != DatasetManifest::Modality::keystroke)
    throw InvalidParam("manifest is not a keystroke dataset");
  if (manifest.keystroke_csv.empty()) throw InvalidParam("manifest lacks keystroke_csv");
  auto samples = parse_keystroke_csv(read_text_file(root / manifest.keystroke_csv));
  std::map<std::string, std::vector<KeystrokeSample>> by_user;
  for (auto& s : samples) by_user[s.user_id].push_back(std::move(s));
  KeystrokeDataset ds;
  for (auto& [id, list] : by_user) ds.users.push_back({id, std::move(list)});
  return ds;
}

SignatureDataset load_signature_dataset(const std::filesystem::path& root) {
  return load_signature_dataset(root, load_manifest(root / "manifest.json"));
}

KeystrokeDataset load_keystroke_dataset(const std::filesystem::path& root) {
  return load_keystroke_dataset(root, load_manifest(root / "manifest.json"));
}

}  // namespace sigq
