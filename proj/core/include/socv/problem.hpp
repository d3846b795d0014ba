#pragma once

#include "socv/coefficients.hpp"
#include "socv/cones.hpp"
#include "socv/hilbert.hpp"
#include "socv/types.hpp"

#include <memory>

namespace socv {

/// Full description of one control problem on the truncated space.
struct ProblemSpec {
  TruncatedSpace space;
  int noise_dim = 1;
  int control_dim = 1;
  std::shared_ptr<const CoefficientFamily> coeffs;
  ControlSet control_set = ControlSet::whole_space(1);
  double horizon = 1.0;
  Vector x0;

  // Recorded constants from the standing assumptions; metadata only.
  double lipschitz_bound = 1.0;
  double integrability_eta = 1.0;
  int moment_exponent = 2;

  int state_dim() const { return space.dim(); }
  void validate() const;
};

}  // namespace socv
