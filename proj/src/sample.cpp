#include "sigq/sample.hpp"

namespace sigq {

void SignatureSample::validate() const {
  if (points.size() < 2)
    throw SampleTooShort("sample has " + std::to_string(points.size()) + " points, need >= 2");
  const bool with_pressure = points.front().pressure.has_value();
  int64_t prev_t = points.front().t;
  for (size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    if (p.pressure.has_value() != with_pressure)
      throw InvalidParam("mixed pressure presence at point " + std::to_string(i));
    if (p.pressure && *p.pressure < 0)
      throw InvalidParam("negative pressure at point " + std::to_string(i));
    if (p.t < prev_t)
      throw InvalidParam("timestamp decreases at point " + std::to_string(i));
    prev_t = p.t;
  }
}

const char* label_name(Label label) {
  switch (label) {
    case Label::genuine: return "genuine";
    case Label::skilled_forgery: return "skilled_forgery";
    case Label::random_forgery_pool: return "random_forgery_pool";
  }
  return "genuine";
}

Label label_from_name(const std::string& name) {
  if (name == "genuine") return Label::genuine;
  if (name == "skilled_forgery") return Label::skilled_forgery;
  if (name == "random_forgery_pool") return Label::random_forgery_pool;
  throw InvalidParam("unknown label '" + name + "'");
}

}  // namespace sigq
