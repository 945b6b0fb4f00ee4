#pragma once

#include <stdexcept>
#include <string>

namespace sigq {

// Base class for everything this library throws on bad input or bad state.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define SIGQ_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                     \
  public:                                                         \
    explicit Name(const std::string& msg) : Error(#Name ": " + msg) {} \
  }

// ingest
SIGQ_DEFINE_ERROR(MalformedHeader);
SIGQ_DEFINE_ERROR(RowArityError);
SIGQ_DEFINE_ERROR(CountMismatch);
SIGQ_DEFINE_ERROR(SampleTooShort);
SIGQ_DEFINE_ERROR(ColumnCountError);
SIGQ_DEFINE_ERROR(NonNumericTiming);
SIGQ_DEFINE_ERROR(InvalidParam);

// features
SIGQ_DEFINE_ERROR(MissingPressure);

// quality
SIGQ_DEFINE_ERROR(DegenerateSpread);
SIGQ_DEFINE_ERROR(FeatureCountMismatch);
SIGQ_DEFINE_ERROR(NoEligibleFeatures);
SIGQ_DEFINE_ERROR(EmptyValidationSet);

// verify
SIGQ_DEFINE_ERROR(TooFewSamples);

// eval
SIGQ_DEFINE_ERROR(InsufficientSamples);
SIGQ_DEFINE_ERROR(EmptyScores);
SIGQ_DEFINE_ERROR(NoCrossing);
SIGQ_DEFINE_ERROR(TooFewTemplates);
SIGQ_DEFINE_ERROR(LengthMismatch);
SIGQ_DEFINE_ERROR(DegenerateInput);
SIGQ_DEFINE_ERROR(KTooLarge);
SIGQ_DEFINE_ERROR(InvalidFraction);
SIGQ_DEFINE_ERROR(OutOfRange);

// cli / config
SIGQ_DEFINE_ERROR(ConfigError);

#undef SIGQ_DEFINE_ERROR

}  // namespace sigq
