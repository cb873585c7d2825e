#pragma once

#include <stdexcept>
#include <string>

namespace ssc {

/// Base of every error raised by the library. Each failure mode named in the
/// public contracts has its own subclass so callers can catch precisely.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define SSC_DEFINE_ERROR(Name)                 \
  class Name : public Error {                  \
   public:                                     \
    explicit Name(const std::string& what_arg) \
        : Error(#Name ": " + what_arg) {}      \
  }

SSC_DEFINE_ERROR(EmptySample);
SSC_DEFINE_ERROR(InvalidDelta);
SSC_DEFINE_ERROR(InvalidRequest);
SSC_DEFINE_ERROR(MissingEmpiricalRisk);
SSC_DEFINE_ERROR(DegenerateSample);
SSC_DEFINE_ERROR(NotSeparable);
SSC_DEFINE_ERROR(MaxIterations);
SSC_DEFINE_ERROR(DidNotConverge);
SSC_DEFINE_ERROR(DimensionMismatch);
SSC_DEFINE_ERROR(InvalidGamma);
SSC_DEFINE_ERROR(BudgetExceeded);
SSC_DEFINE_ERROR(NotRealizable);
SSC_DEFINE_ERROR(InfeasibleSpec);
SSC_DEFINE_ERROR(ConfigError);
SSC_DEFINE_ERROR(ParseError);

#undef SSC_DEFINE_ERROR

}  // namespace ssc
