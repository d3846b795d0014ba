#include "socv/problem.hpp"

namespace socv {

void ProblemSpec::validate() const {
  require(horizon > 0.0, "ProblemSpec: horizon must be positive");
  require(coeffs != nullptr, "ProblemSpec: missing coefficient family");
  require_dims(coeffs->state_dim() == space.dim(),
               "ProblemSpec: family state dim != space dim");
  require_dims(coeffs->noise_dim() == noise_dim,
               "ProblemSpec: family noise dim mismatch");
  require_dims(coeffs->control_dim() == control_dim,
               "ProblemSpec: family control dim mismatch");
  require_dims(control_set.dim() == control_dim,
               "ProblemSpec: control set dim mismatch");
  require_dims(x0.size() == space.dim(), "ProblemSpec: x0 dim mismatch");
}

}  // namespace socv
