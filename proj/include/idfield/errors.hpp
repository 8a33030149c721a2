#ifndef IDFIELD_ERRORS_HPP
#define IDFIELD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace idfield {

// Base error carrying a stable machine-readable code (used by the CLI's
// error JSON) alongside the human-readable message.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

#define IDFIELD_DEFINE_ERROR(Name)                                    \
  class Name : public Error {                                         \
  public:                                                              \
    explicit Name(const std::string& what) : Error(#Name, what) {}     \
  }

IDFIELD_DEFINE_ERROR(InvalidElement);
IDFIELD_DEFINE_ERROR(InvalidSpec);
IDFIELD_DEFINE_ERROR(ZeroAtomMass);
IDFIELD_DEFINE_ERROR(Nonintegrable);
IDFIELD_DEFINE_ERROR(EmptySpec);
IDFIELD_DEFINE_ERROR(DuplicateCoords);
IDFIELD_DEFINE_ERROR(NoWitness);
IDFIELD_DEFINE_ERROR(OverflowGuard);
IDFIELD_DEFINE_ERROR(WindowUnderflow);
IDFIELD_DEFINE_ERROR(DimensionMismatch);
IDFIELD_DEFINE_ERROR(GroupMismatch);
IDFIELD_DEFINE_ERROR(NullModel);
IDFIELD_DEFINE_ERROR(NoInvariantEvent);
IDFIELD_DEFINE_ERROR(NotMeasurePreserving);
IDFIELD_DEFINE_ERROR(NotProbability);
IDFIELD_DEFINE_ERROR(IndexMismatch);
IDFIELD_DEFINE_ERROR(BudgetExceeded);
IDFIELD_DEFINE_ERROR(HypothesisViolation);
IDFIELD_DEFINE_ERROR(UnsupportedDescriptor);
IDFIELD_DEFINE_ERROR(ConfigError);

#undef IDFIELD_DEFINE_ERROR

}  // namespace idfield

#endif
