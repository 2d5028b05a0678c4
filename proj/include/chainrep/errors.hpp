#ifndef CHAINREP_ERRORS_HPP
#define CHAINREP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace chainrep {

// Base class for all library errors. `code()` is stable across releases and
// is what the CLI maps to exit codes.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& msg)
      : std::runtime_error(code + ": " + msg), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

#define CHAINREP_DEFINE_ERROR(NAME)                       \
  class NAME : public Error {                             \
   public:                                                \
    explicit NAME(const std::string& msg)                 \
        : Error(#NAME, msg) {}                            \
  };

CHAINREP_DEFINE_ERROR(NonPrime)
CHAINREP_DEFINE_ERROR(UnsupportedSize)
CHAINREP_DEFINE_ERROR(SpecMismatch)
CHAINREP_DEFINE_ERROR(ShapeMismatch)
CHAINREP_DEFINE_ERROR(NotAUnit)
CHAINREP_DEFINE_ERROR(BadLevel)
CHAINREP_DEFINE_ERROR(DeskScaleExceeded)
CHAINREP_DEFINE_ERROR(RegularityViolation)
CHAINREP_DEFINE_ERROR(BadParity)
CHAINREP_DEFINE_ERROR(NotSplit)
CHAINREP_DEFINE_ERROR(UnsupportedResidueChar)
CHAINREP_DEFINE_ERROR(NotAbelian)
CHAINREP_DEFINE_ERROR(NoExtension)
CHAINREP_DEFINE_ERROR(NotASubgroup)
CHAINREP_DEFINE_ERROR(BaseMismatch)
CHAINREP_DEFINE_ERROR(ResidueMismatch)
CHAINREP_DEFINE_ERROR(InsufficientData)
CHAINREP_DEFINE_ERROR(InvariantLagrangianNotFound)
CHAINREP_DEFINE_ERROR(ExtensionNormalizationFailed)
CHAINREP_DEFINE_ERROR(BadLiteral)

// A verified mathematical identity failed.  Always carries a witness.
CHAINREP_DEFINE_ERROR(CertificationFailure)

#undef CHAINREP_DEFINE_ERROR

inline void require(bool cond, const char* what) {
  if (!cond) throw CertificationFailure(what);
}

}  // namespace chainrep

#endif
