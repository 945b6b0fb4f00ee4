#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sigq/errors.hpp"

namespace sigq {

// One digitizer point. Coordinates and pressure are raw device units.
struct PenPoint {
  int x = 0;
  int y = 0;
  int64_t t = 0;  // milliseconds, non-decreasing within a sample
  std::optional<int> pressure;
  bool pen_down = true;

  friend bool operator==(const PenPoint&, const PenPoint&) = default;
};

enum class Label { genuine, skilled_forgery, random_forgery_pool };

const char* label_name(Label label);
Label label_from_name(const std::string& name);

// One signing act. Either every point carries pressure or none does.
struct SignatureSample {
  std::vector<PenPoint> points;  // length >= 2
  std::string user_id;
  int session_id = 0;
  Label label = Label::genuine;

  bool has_pressure() const {
    return !points.empty() && points.front().pressure.has_value();
  }
  // Throws SampleTooShort / InvalidParam if the type invariants don't hold.
  void validate() const;

  friend bool operator==(const SignatureSample&, const SignatureSample&) = default;
};

inline constexpr int kKeystrokeFeatureCount = 31;

// One password-typing repetition: 31 timing features in seconds.
struct KeystrokeSample {
  std::array<double, kKeystrokeFeatureCount> features{};
  std::string user_id;
  int session_id = 0;
  int rep = 0;

  friend bool operator==(const KeystrokeSample&, const KeystrokeSample&) = default;
};

}  // namespace sigq
