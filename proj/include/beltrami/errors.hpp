#pragma once

#include <stdexcept>
#include <string>

namespace beltrami {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define BELTRAMI_DEFINE_ERROR(Name)        \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  }

BELTRAMI_DEFINE_ERROR(NoSuchEigenvalue);
BELTRAMI_DEFINE_ERROR(VanishingField);
BELTRAMI_DEFINE_ERROR(StepSizeUnderflow);
BELTRAMI_DEFINE_ERROR(NoCrossings);
BELTRAMI_DEFINE_ERROR(NotPositiveDefinite);
BELTRAMI_DEFINE_ERROR(WindowTouchesSpectrum);
BELTRAMI_DEFINE_ERROR(DegenerateDirection);
BELTRAMI_DEFINE_ERROR(IllConditionedContour);
BELTRAMI_DEFINE_ERROR(ClusterLeakage);
BELTRAMI_DEFINE_ERROR(ConfigInvalid);
BELTRAMI_DEFINE_ERROR(ComputeFailure);

#undef BELTRAMI_DEFINE_ERROR

}  // namespace beltrami
