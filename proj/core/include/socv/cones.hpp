#pragma once

#include "socv/types.hpp"

#include <vector>

namespace socv {

/// Absolute membership tolerance; every family admits exact projection.
inline constexpr double kMembershipTol = 1e-9;

/// Tolerance under which a direction counts as tangent in second-order
/// queries.
inline constexpr double kTangentTol = 1e-6;

enum class SetFamily { Box, Ball, Halfspace, Polytope, Finite };

/// Nonempty closed control constraint set U with exact projection and
/// analytic cone residuals per family.
///
/// adjacent_cone_residual(u, v)      -> 0 iff v is in the adjacent cone T_U(u)
/// normal_cone_residual(u, xi)       -> 0 iff xi is in the normal cone N_U(u)
/// second_adjacent_residual(u, v, h) -> 0 iff h is in T^2_U(u, v)
class ControlSet {
 public:
  /// Axis-aligned box; entries of lower/upper may be -inf/+inf.
  static ControlSet box(Vector lower, Vector upper);
  /// All of R^d (box with infinite bounds).
  static ControlSet whole_space(int d);
  static ControlSet ball(Vector center, double radius);
  /// {u : <normal, u> <= offset}, normal != 0.
  static ControlSet halfspace(Vector normal, double offset);
  /// {u : A u <= b}; must be nonempty (checked constructively).
  static ControlSet polytope(Matrix a, Vector b);
  /// Convex hull of vertices; supported for d <= 2 (converted to
  /// inequality form). Use polytope(A, b) in higher dimension.
  static ControlSet polytope_hull(const std::vector<Vector>& vertices);
  static ControlSet finite(std::vector<Vector> points);

  SetFamily family() const { return family_; }
  int dim() const { return dim_; }

  /// Nearest point of U; ties broken by lexicographic minimum.
  Vector project(const Vector& u) const;
  double distance(const Vector& u) const;
  bool contains(const Vector& u, double tol = kMembershipTol) const;

  /// lim_{eps->0+} dist(u + eps v, U) / eps, evaluated analytically.
  /// Requires u in U (within kMembershipTol).
  double adjacent_cone_residual(const Vector& u, const Vector& v) const;

  /// sup over unit v in T_U(u) of <xi, v>, clipped below at zero; equals
  /// |proj of xi onto T_U(u)| for the convex families and 0 for Finite.
  double normal_cone_residual(const Vector& u, const Vector& xi) const;

  /// lim-sup of dist(u + eps v + eps^2 h, U) / eps^2; requires v tangent
  /// within tangent_tol (throws NotTangentError otherwise).
  double second_adjacent_residual(const Vector& u, const Vector& v,
                                  const Vector& h,
                                  double tangent_tol = kTangentTol) const;

  /// Projection of v onto the adjacent cone T_U(u).
  Vector project_tangent(const Vector& u, const Vector& v) const;

  // Parameter access (also used by the independent cone oracle).
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }
  const Vector& center() const { return center_; }
  double radius() const { return radius_; }
  const Vector& normal() const { return normal_; }
  double offset() const { return offset_; }
  const Matrix& ineq_matrix() const { return a_; }
  const Vector& ineq_rhs() const { return b_; }
  const std::vector<Vector>& points() const { return points_; }

 private:
  ControlSet() = default;
  void check_membership(const Vector& u) const;
  /// Rows of the inequality description active at u (Polytope only).
  std::vector<int> active_rows(const Vector& u, double tol) const;

  SetFamily family_ = SetFamily::Box;
  int dim_ = 0;
  Vector lower_, upper_;       // Box
  Vector center_;              // Ball
  double radius_ = 0.0;        // Ball
  Vector normal_;              // Halfspace
  double offset_ = 0.0;        // Halfspace
  Matrix a_;                   // Polytope rows
  Vector b_;
  Vector interior_point_;      // Polytope feasibility witness
  std::vector<Vector> points_; // Finite
};

/// Exact projection onto {y : A y <= b} by active-set enumeration; intended
/// for small systems (rows <= 24, enumerating candidate active sets of size
/// <= d). Ties broken lexicographically.
Vector project_polyhedron(const Matrix& a, const Vector& b, const Vector& u);

/// Exact projection onto the polyhedral cone {v : C v <= 0}.
Vector project_polyhedral_cone(const Matrix& c, const Vector& xi);

/// Fixed ladder eps = 2^-3 ... 2^-12 used by sampling-style residual
/// estimates and by the brute-force oracle.
std::vector<double> default_eps_ladder();

/// Ladder estimate max over the two smallest rungs of dist(u+eps v,U)/eps.
/// Sampling fallback; the analytic member functions are preferred.
double ladder_adjacent_residual(const ControlSet& set, const Vector& u,
                                const Vector& v);

/// Ladder estimate of the second-order residual dist(u+eps v+eps^2 h,U)/eps^2.
double ladder_second_residual(const ControlSet& set, const Vector& u,
                              const Vector& v, const Vector& h);

}  // namespace socv
