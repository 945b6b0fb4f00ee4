#pragma once

#include <string>
#include <string_view>

#include "sigq/sample.hpp"

namespace sigq {

// SVC-style pen data. First line is the point count, each following line is
//   X Y T BUTTON            (4 columns)  or
//   X Y T BUTTON AZ ALT PR  (7 columns)
// Azimuth/altitude are parsed and discarded; BUTTON != 0 means pen down.
// All rows of a file must share the same arity. LF and CRLF both accepted.
SignatureSample parse_svc(std::string_view text);

// Inverse of parse_svc. Emits 7 columns when the sample carries pressure
// (azimuth/altitude written as 0), 4 columns otherwise. LF line endings.
std::string render_svc(const SignatureSample& sample);

}  // namespace sigq
