#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sigq/sample.hpp"

namespace sigq {

// Keystroke timing CSV, header `subject,sessionIndex,rep,<31 feature names>`.
// Timings must be finite; a column whose header name starts with "UD" (up-down
// latency) may be negative, all other timings must be >= 0.
std::vector<KeystrokeSample> parse_keystroke_csv(std::string_view text);

std::string render_keystroke_csv(const std::vector<KeystrokeSample>& samples);

}  // namespace sigq
