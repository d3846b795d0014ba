#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace socv {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Base class of every error thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Mismatched vector/matrix dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Argument outside its mathematical domain (negative time, empty set, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A point required to belong to the control set does not.
class MembershipError : public Error {
 public:
  using Error::Error;
};

/// A direction required to be tangent to the control set is not.
class NotTangentError : public Error {
 public:
  using Error::Error;
};

/// An operation needs structure the coefficient family does not provide
/// (second derivatives, quadratic Hamiltonian, compactness, ...).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// Non-finite value produced while stepping a path.
class SimulationError : public Error {
 public:
  SimulationError(const std::string& what, int path, int step)
      : Error(what + " (path " + std::to_string(path) + ", step " +
              std::to_string(step) + ")"),
        path(path),
        step(step) {}
  int path;
  int step;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw DomainError(what);
}

inline void require_dims(bool cond, const std::string& what) {
  if (!cond) throw DimensionError(what);
}

}  // namespace socv
