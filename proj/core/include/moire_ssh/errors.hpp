#pragma once

#include <stdexcept>
#include <string>

namespace moire_ssh {

/// Base for all domain failures raised by the library. Precondition
/// violations on arguments use std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* code() const noexcept = 0;
};

#define MOIRE_SSH_DEFINE_ERROR(Name, Code)                        \
  class Name : public Error {                                     \
   public:                                                        \
    using Error::Error;                                           \
    const char* code() const noexcept override { return Code; }   \
  };

// The half-filled projector is ambiguous (degenerate Fermi level).
MOIRE_SSH_DEFINE_ERROR(FermiDegeneracy, "fermi-degeneracy")
// min |det q(k)| fell below threshold on the k grid.
MOIRE_SSH_DEFINE_ERROR(GapClosure, "gap-closure")
// k grid too coarse for unambiguous phase unwrapping.
MOIRE_SSH_DEFINE_ERROR(ResolutionError, "resolution")
MOIRE_SSH_DEFINE_ERROR(EigensolverError, "eigensolver")
MOIRE_SSH_DEFINE_ERROR(EmptyRange, "empty-range")
MOIRE_SSH_DEFINE_ERROR(OnBoundary, "on-boundary")
MOIRE_SSH_DEFINE_ERROR(NoPeak, "no-peak")
MOIRE_SSH_DEFINE_ERROR(NonPositiveDelta, "non-positive-delta")
MOIRE_SSH_DEFINE_ERROR(FitError, "fit")

#undef MOIRE_SSH_DEFINE_ERROR

}  // namespace moire_ssh
