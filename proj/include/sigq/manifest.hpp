#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sigq/sample.hpp"

namespace sigq {

// Dataset manifest: one JSON file at the dataset root listing relative sample
// paths per user/session/label. Schema (version 1):
//
// {
//   "schema_version": 1,
//   "modality": "signature",            // or "keystroke"
//   "pressure_max": 1023,               // optional, signature only
//   "users": [
//     { "user_id": "u000",
//       "genuine": [ {"session": 1, "files": ["u000/g_s1_00.svc", ...]}, ... ],
//       "forgery": ["u000/f_00.svc", ...] }
//   ],
//   "keystroke_csv": "data.csv"         // keystroke only
// }
struct DatasetManifest {
  enum class Modality { signature, keystroke };

  struct SessionRefs {
    int session = 0;
    std::vector<std::string> files;
  };
  struct UserRefs {
    std::string user_id;
    std::vector<SessionRefs> genuine;   // grouped by session, ascending
    std::vector<std::string> forgery;
  };

  Modality modality = Modality::signature;
  std::optional<int> pressure_max;      // device max, defaults applied downstream
  std::vector<UserRefs> users;
  std::string keystroke_csv;            // relative path, keystroke modality only
};

DatasetManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

// In-memory signature dataset. Users sorted by id, sessions ascending, samples
// in manifest order; immutable after loading.
struct SignatureDataset {
  struct User {
    std::string user_id;
    std::vector<SignatureSample> genuine;   // session_id set from manifest
    std::vector<SignatureSample> forgery;
  };
  std::vector<User> users;
  int pressure_max = 1023;

  const User* find(const std::string& user_id) const;
};

struct KeystrokeDataset {
  struct User {
    std::string user_id;
    std::vector<KeystrokeSample> samples;  // file order
  };
  std::vector<User> users;
};

// Loads every referenced file; parse errors propagate with the file path in
// the message.
SignatureDataset load_signature_dataset(const std::filesystem::path& root,
                                        const DatasetManifest& manifest);
KeystrokeDataset load_keystroke_dataset(const std::filesystem::path& root,
                                        const DatasetManifest& manifest);

// Convenience: reads <root>/manifest.json first.
SignatureDataset load_signature_dataset(const std::filesystem::path& root);
KeystrokeDataset load_keystroke_dataset(const std::filesystem::path& root);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace sigq
