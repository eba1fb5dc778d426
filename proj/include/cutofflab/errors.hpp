#pragma once

#include <stdexcept>
#include <string>

namespace cutofflab {

/// Base class for every error the library raises on purpose.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define CUTOFFLAB_DEFINE_ERROR(Name)                       \
  struct Name : Error {                                    \
    explicit Name(const std::string& msg) : Error(msg) {}  \
  }

CUTOFFLAB_DEFINE_ERROR(NonPositiveChildrenCount);
CUTOFFLAB_DEFINE_ERROR(DegenerateTree);
CUTOFFLAB_DEFINE_ERROR(OracleTooLarge);
CUTOFFLAB_DEFINE_ERROR(InvalidPair);
CUTOFFLAB_DEFINE_ERROR(DimensionMismatch);
CUTOFFLAB_DEFINE_ERROR(EigensolveFailure);
CUTOFFLAB_DEFINE_ERROR(DecompositionMismatch);
CUTOFFLAB_DEFINE_ERROR(InvalidStart);
CUTOFFLAB_DEFINE_ERROR(ConstantTestFunction);
CUTOFFLAB_DEFINE_ERROR(SingularSystem);
CUTOFFLAB_DEFINE_ERROR(NoBranching);
CUTOFFLAB_DEFINE_ERROR(NonConvergence);
CUTOFFLAB_DEFINE_ERROR(PreconditionViolated);
CUTOFFLAB_DEFINE_ERROR(UsageError);

#undef CUTOFFLAB_DEFINE_ERROR

}  // namespace cutofflab
