#pragma once

#include "socv/cones.hpp"
#include "socv/types.hpp"

#include <functional>

namespace socv {

struct MaximizeResult {
  Vector argmax;
  double value = 0.0;
  bool unbounded = false;
};

/// Maximizes phi(u) = q . u + u' H u / 2 over the control set, exactly:
/// stationary/active-set enumeration for boxes and polytopes, a
/// trust-region-style boundary solve for balls, KKT for halfspaces, and
/// enumeration for finite sets. Candidate enumeration order is canonical
/// (faces lexicographic, subsets in combination order, points in list
/// order); the first maximizer within 1e-12 of the best value wins.
/// Returns unbounded = true when the supremum is +infinity over an
/// unbounded set.
MaximizeResult maximize_quadratic(const ControlSet& set, const Vector& q,
                                  const Matrix& h);

/// Grid-ladder maximization of a black-box objective over a compact set
/// (finite: enumeration; box/ball with d <= 2: dense grid with three local
/// refinement rounds). Throws CapabilityError otherwise.
MaximizeResult maximize_on_set(const ControlSet& set,
                               const std::function<double(const Vector&)>& fn);

}  // namespace socv
