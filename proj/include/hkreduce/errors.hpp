#pragma once

#include <stdexcept>
#include <string>

namespace hkreduce {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define HKREDUCE_DEFINE_ERROR(Name)           \
  class Name : public Error {                 \
   public:                                    \
    using Error::Error;                       \
  }

HKREDUCE_DEFINE_ERROR(InvalidArgument);
HKREDUCE_DEFINE_ERROR(ShapeError);
HKREDUCE_DEFINE_ERROR(NonConvergence);
HKREDUCE_DEFINE_ERROR(SmallStabilizer);
HKREDUCE_DEFINE_ERROR(FreenessError);
HKREDUCE_DEFINE_ERROR(ProjectionDivergence);
HKREDUCE_DEFINE_ERROR(NotBasic);
HKREDUCE_DEFINE_ERROR(ConstancyViolation);
HKREDUCE_DEFINE_ERROR(IllConditioned);
HKREDUCE_DEFINE_ERROR(FlowError);
HKREDUCE_DEFINE_ERROR(PoleError);
HKREDUCE_DEFINE_ERROR(ConventionError);
HKREDUCE_DEFINE_ERROR(TailTooLarge);
HKREDUCE_DEFINE_ERROR(NotInCartan);
HKREDUCE_DEFINE_ERROR(TraceNotZero);
HKREDUCE_DEFINE_ERROR(IOError);

#undef HKREDUCE_DEFINE_ERROR

/// Spec-file validation failure. Carries the offending line (0 when unknown)
/// and the dotted field name.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& field, int line, const std::string& what)
      : Error(format(field, line, what)), field_(field), line_(line) {}

  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  static std::string format(const std::string& field, int line, const std::string& what) {
    std::string s = "schema error";
    if (line > 0) s += " (line " + std::to_string(line) + ")";
    if (!field.empty()) s += " [" + field + "]";
    return s + ": " + what;
  }

  std::string field_;
  int line_;
};

}  // namespace hkreduce
