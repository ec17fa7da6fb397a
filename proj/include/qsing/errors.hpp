#ifndef QSING_ERRORS_HPP
#define QSING_ERRORS_HPP

#include <stdexcept>

namespace qsing {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Structural precondition failure: shape mismatch, non-Hermitian data, bad POVM, bad config.
struct ValidationError : Error {
  using Error::Error;
};

// A state that must be full rank has an eigenvalue at or below the floor.
struct RankDeficientState : Error {
  using Error::Error;
};

// KL divergence undefined: reference distribution puts mass where the model vanishes.
struct SupportViolation : Error {
  using Error::Error;
};

struct OutOfDomain : Error {
  using Error::Error;
};

// Burn-in acceptance collapsed; step scale or domain is misconfigured.
struct AllProposalsRejected : Error {
  using Error::Error;
};

// Finite differences would step outside the parameter domain.
struct BoundaryTooClose : Error {
  using Error::Error;
};

struct NonFiniteDerivative : Error {
  using Error::Error;
};

struct SingularHessian : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace qsing

#endif
