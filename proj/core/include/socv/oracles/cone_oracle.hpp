#pragma once

#include "socv/cones.hpp"

#include <vector>

namespace socv::oracles {

/// Per-rung distance quotients dist(u + eps v, U)/eps and
/// dist(u + eps v + eps^2 h, U)/eps^2, computed with this module's own
/// projection arithmetic (deliberately duplicated; see the module notes).
struct ConeDistanceTable {
  std::vector<double> eps;
  std::vector<double> first;   // first-order quotients
  std::vector<double> second;  // second-order quotients
};

ConeDistanceTable brute_force_cone(const ControlSet& set, const Vector& u,
                                   const Vector& v, const Vector& h,
                                   const std::vector<double>& ladder);

/// Two-rung Richardson extrapolation of the smallest ladder entries,
/// removing the leading O(eps) bias of the quotients.
double extrapolate_limit(const std::vector<double>& eps,
                         const std::vector<double>& values);

/// Independent exact distance to the set (own projection code).
double oracle_distance(const ControlSet& set, const Vector& point);

/// Nearest-point search over a dense sample of the set; low-dimensional
/// cross-check of the exact projections (d <= 2 for box/ball).
double sampled_distance(const ControlSet& set, const Vector& point,
                        int resolution);

}  // namespace socv::oracles
