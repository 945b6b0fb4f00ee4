#include "sigq/svc.hpp"

#include <charconv>
#include <cstdint>
#include <sstream>
#include <vector>

namespace sigq {

namespace {

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

bool try_parse_int(std::string_view tok, int64_t& value) {
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  return ec == std::errc{} && ptr == tok.data() + tok.size();
}

int64_t parse_header_int(std::string_view tok) {
  int64_t value = 0;
  if (!try_parse_int(tok, value))
    throw MalformedHeader("point count is not an integer: '" + std::string(tok) + "'");
  return value;
}

int64_t parse_row_int(std::string_view tok, const char* what) {
  int64_t value = 0;
  if (!try_parse_int(tok, value))
    throw InvalidParam(std::string(what) + " is not an integer: '" + std::string(tok) + "'");
  return value;
}

}  // namespace

SignatureSample parse_svc(std::string_view text) {
  std::vector<std::string_view> lines;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      lines.push_back(strip_cr(text.substr(pos)));
      break;
    }
    lines.push_back(strip_cr(text.substr(pos, nl - pos)));
    pos = nl + 1;
  }
  // drop trailing blank lines
  while (!lines.empty() && split_ws(lines.back()).empty()) lines.pop_back();

  if (lines.empty()) throw MalformedHeader("empty input");
  auto header_toks = split_ws(lines.front());
  if (header_toks.size() != 1)
    throw MalformedHeader("expected a single point count, got " +
                          std::to_string(header_toks.size()) + " tokens");
  int64_t declared = parse_header_int(header_toks.front());
  if (declared < 0) throw MalformedHeader("negative point count");

  SignatureSample sample;
  size_t arity = 0;
  for (size_t li = 1; li < lines.size(); ++li) {
    auto toks = split_ws(lines[li]);
    if (toks.empty()) continue;  // interior blank line tolerated
    if (toks.size() != 4 && toks.size() != 7)
      throw RowArityError("row " + std::to_string(li) + " has " +
                          std::to_string(toks.size()) + " columns, want 4 or 7");
    if (arity == 0) arity = toks.size();
    if (toks.size() != arity)
      throw RowArityError("row " + std::to_string(li) + " arity differs from first row");

    PenPoint p;
    p.x = static_cast<int>(parse_row_int(toks[0], "x"));
    p.y = static_cast<int>(parse_row_int(toks[1], "y"));
    p.t = parse_row_int(toks[2], "t");
    p.pen_down = parse_row_int(toks[3], "button") != 0;
    if (arity == 7) {
      parse_row_int(toks[4], "azimuth");   // parsed, ignored
      parse_row_int(toks[5], "altitude");  // parsed, ignored
      p.pressure = static_cast<int>(parse_row_int(toks[6], "pressure"));
    }
    sample.points.push_back(p);
  }

  if (static_cast<int64_t>(sample.points.size()) != declared)
    throw CountMismatch("header declares " + std::to_string(declared) + " points, file has " +
                        std::to_string(sample.points.size()));
  sample.validate();
  return sample;
}

std::string render_svc(const SignatureSample& sample) {
  std::ostringstream out;
  out << sample.points.size() << '\n';
  const bool with_pressure = sample.has_pressure();
  for (const auto& p : sample.points) {
    out << p.x << ' ' << p.y << ' ' << p.t << ' ' << (p.pen_down ? 1 : 0);
    if (with_pressure) out << " 0 0 " << *p.pressure;
    out << '\n';
  }
  return out.str();
}

}  // namespace sigq
