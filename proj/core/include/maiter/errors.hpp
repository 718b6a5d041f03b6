#pragma once

#include <stdexcept>
#include <string>

namespace maiter {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define MAITER_DEFINE_ERROR(Name)                                   \
  struct Name : Error {                                             \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  }

// convex body
MAITER_DEFINE_ERROR(DegenerateBody);
MAITER_DEFINE_ERROR(BarycenterNotAtOrigin);
MAITER_DEFINE_ERROR(OriginNotInterior);
MAITER_DEFINE_ERROR(ErosionEmpty);
MAITER_DEFINE_ERROR(UnsupportedDimension);
MAITER_DEFINE_ERROR(NonIntegralVertex);

// profile
MAITER_DEFINE_ERROR(DomainError);
MAITER_DEFINE_ERROR(DivisionByZero);
MAITER_DEFINE_ERROR(HypothesisViolated);
MAITER_DEFINE_ERROR(WrongProfile);

// potential
MAITER_DEFINE_ERROR(InactiveSite);
MAITER_DEFINE_ERROR(PositivityLost);
MAITER_DEFINE_ERROR(Unbounded);
MAITER_DEFINE_ERROR(BoundViolated);

// transport solver
MAITER_DEFINE_ERROR(NoConvergence);
MAITER_DEFINE_ERROR(EmptyCellPersistent);

// functionals / densities
MAITER_DEFINE_ERROR(NonPositivePotential);
MAITER_DEFINE_ERROR(MonotonicityViolated);
MAITER_DEFINE_ERROR(InequalityViolated);
MAITER_DEFINE_ERROR(TailTooHeavy);
MAITER_DEFINE_ERROR(GridMismatch);
MAITER_DEFINE_ERROR(TauNotPositive);

// oracles / affine geometry
MAITER_DEFINE_ERROR(ShootingFailed);
MAITER_DEFINE_ERROR(NonconvexSample);
MAITER_DEFINE_ERROR(PreconditionViolated);

#undef MAITER_DEFINE_ERROR

}  // namespace maiter
