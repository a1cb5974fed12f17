#pragma once

#include <stdexcept>
#include <string>

namespace percolab {

// One exception type per contract failure; the CLI maps these to exit code 2.
#define PERCOLAB_ERROR(Name)                               \
  struct Name : std::runtime_error {                       \
    explicit Name(const std::string& what)                 \
        : std::runtime_error(std::string(#Name ": ") + what) {} \
  }

PERCOLAB_ERROR(InvalidSpec);
PERCOLAB_ERROR(NonSummable);
PERCOLAB_ERROR(InfiniteMean);
PERCOLAB_ERROR(Diverges);
PERCOLAB_ERROR(DegenerateSupport);
PERCOLAB_ERROR(OutOfRange);
PERCOLAB_ERROR(BelowThreshold);
PERCOLAB_ERROR(WindowTooSmall);
PERCOLAB_ERROR(EnvTooShort);
PERCOLAB_ERROR(RectOutOfWindow);
PERCOLAB_ERROR(GridTooSmall);
PERCOLAB_ERROR(TooManyBadChildren);
PERCOLAB_ERROR(BadEventWindow);
PERCOLAB_ERROR(ConditioningFailed);
PERCOLAB_ERROR(NoResults);

#undef PERCOLAB_ERROR

}  // namespace percolab
