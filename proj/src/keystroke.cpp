#include "sigq/keystroke.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace sigq {

namespace {

std::vector<std::string> split_csv_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      break;
    }
    out.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

double parse_timing(const std::string& tok, size_t row, size_t col) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size() || !std::isfinite(value))
    throw NonNumericTiming("row " + std::to_string(row) + " column " + std::to_string(col) +
                           ": '" + tok + "'");
  return value;
}

int parse_id_int(const std::string& tok, const char* what, size_t row) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size())
    throw NonNumericTiming(std::string(what) + " at row " + std::to_string(row) + ": '" + tok + "'");
  return value;
}

}  // namespace

std::vector<KeystrokeSample> parse_keystroke_csv(std::string_view text) {
  std::vector<std::string_view> lines;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      if (pos < text.size()) lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  while (!lines.empty() && (lines.back().empty() || lines.back() == "\r")) lines.pop_back();

  if (lines.empty()) throw ColumnCountError("missing header row");
  const size_t want = 3 + kKeystrokeFeatureCount;
  auto header = split_csv_line(lines.front());
  if (header.size() != want)
    throw ColumnCountError("header has " + std::to_string(header.size()) + " columns, want " +
                           std::to_string(want));

  // Up-down latencies are the only timings allowed to be negative.
  std::vector<bool> may_be_negative(kKeystrokeFeatureCount, false);
  for (int i = 0; i < kKeystrokeFeatureCount; ++i)
    may_be_negative[static_cast<size_t>(i)] = header[static_cast<size_t>(3 + i)].rfind("UD", 0) == 0;

  std::vector<KeystrokeSample> samples;
  for (size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty() || lines[li] == "\r") continue;
    auto fields = split_csv_line(lines[li]);
    if (fields.size() != want)
      throw ColumnCountError("row " + std::to_string(li) + " has " +
                             std::to_string(fields.size()) + " columns, want " +
                             std::to_string(want));
    KeystrokeSample s;
    s.user_id = fields[0];
    s.session_id = parse_id_int(fields[1], "sessionIndex", li);
    s.rep = parse_id_int(fields[2], "rep", li);
    for (int i = 0; i < kKeystrokeFeatureCount; ++i) {
      double v = parse_timing(fields[static_cast<size_t>(3 + i)], li, static_cast<size_t>(3 + i));
      if (v < 0.0 && !may_be_negative[static_cast<size_t>(i)])
        throw InvalidParam("negative timing in non-UD column at row " + std::to_string(li));
      s.features[static_cast<size_t>(i)] = v;
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

std::string render_keystroke_csv(const std::vector<KeystrokeSample>& samples) {
  std::ostringstream out;
  out << "subject,sessionIndex,rep";
  for (int i = 0; i < kKeystrokeFeatureCount; ++i) out << ",UD.f" << i;
  out << '\n';
  out.precision(17);
  for (const auto& s : samples) {
    out << s.user_id << ',' << s.session_id << ',' << s.rep;
    for (double v : s.features) out << ',' << v;
    out << '\n';
  }
  return out.str();
}

}  // namespace sigq
