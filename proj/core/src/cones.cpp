#include "socv/cones.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace socv {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTieTol = 1e-12;

bool lex_less(const Vector& a, const Vector& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (a[i] < b[i] - 1e-15) return true;
    if (a[i] > b[i] + 1e-15) return false;
  }
  return false;
}

/// Enumerates all row subsets of size 1..max_size of {0..rows-1}.
void for_each_subset(int rows, int max_size,
                     const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> subset;
  // Iterative combinations per size.
  for (int size = 1; size <= std::min(rows, max_size); ++size) {
    std::vector<int> idx(size);
    for (int i = 0; i < size; ++i) idx[i] = i;
    while (true) {
      fn(idx);
      int i = size - 1;
      while (i >= 0 && idx[i] == rows - size + i) --i;
      if (i < 0) break;
      ++idx[i];
      for (int j = i + 1; j < size; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
}

struct Candidate {
  double dist2 = kInf;
  Vector point;
  void offer(const Vector& y, double d2) {
    if (point.size() == 0 || d2 < dist2 - kTieTol) {
      dist2 = d2;
      point = y;
    } else if (d2 <= dist2 + kTieTol && lex_less(y, point)) {
      dist2 = std::min(dist2, d2);
      point = y;
    }
  }
};

}  // namespace

std::vector<double> default_eps_ladder() {
  std::vector<double> ladder;
  for (int r = 3; r <= 12; ++r) ladder.push_back(std::ldexp(1.0, -r));
  return ladder;
}

// ---------------------------------------------------------------------------
// Polyhedral projections
// ---------------------------------------------------------------------------

Vector project_polyhedron(const Matrix& a, const Vector& b, const Vector& u) {
  const int rows = static_cast<int>(a.rows());
  const int d = static_cast<int>(a.cols());
  require_dims(b.size() == rows && u.size() == d,
               "project_polyhedron: shape mismatch");
  require(rows <= 24, "project_polyhedron: too many rows for enumeration");
  const double feas_tol = 1e-9;
  if (((a * u - b).array() <= feas_tol).all()) return u;

  Candidate best;
  for_each_subset(rows, d, [&](const std::vector<int>& subset) {
    const int s = static_cast<int>(subset.size());
    Matrix as(s, d);
    Vector bs(s);
    for (int i = 0; i < s; ++i) {
      as.row(i) = a.row(subset[i]);
      bs[i] = b[subset[i]];
    }
    const Matrix gram = as * as.transpose();
    Eigen::FullPivLU<Matrix> lu(gram);
    if (!lu.isInvertible()) return;
    const Vector mult = lu.solve(as * u - bs);
    const Vector y = u - as.transpose() * mult;
    if (((a * y - b).array() <= feas_tol).all()) {
      best.offer(y, (y - u).squaredNorm());
    }
  });
  require(best.point.size() > 0, "project_polyhedron: empty polytope");
  return best.point;
}

Vector project_polyhedral_cone(const Matrix& c, const Vector& xi) {
  const int rows = static_cast<int>(c.rows());
  const int d = static_cast<int>(c.cols());
  if (rows == 0) return xi;
  const double feas_tol = 1e-10;
  if (((c * xi).array() <= feas_tol).all()) return xi;

  Candidate best;
  // Origin is always feasible.
  best.offer(Vector::Zero(d), xi.squaredNorm());
  for_each_subset(rows, d, [&](const std::vector<int>& subset) {
    const int s = static_cast<int>(subset.size());
    Matrix cs(s, d);
    for (int i = 0; i < s; ++i) cs.row(i) = c.row(subset[i]);
    const Matrix gram = cs * cs.transpose();
    Eigen::FullPivLU<Matrix> lu(gram);
    if (!lu.isInvertible()) return;
    const Vector y = xi - cs.transpose() * lu.solve(cs * xi);
    if (((c * y).array() <= feas_tol).all()) {
      best.offer(y, (y - xi).squaredNorm());
    }
  });
  return best.point;
}

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

ControlSet ControlSet::box(Vector lower, Vector upper) {
  require_dims(lower.size() == upper.size(), "box: bounds shape mismatch");
  require(lower.size() >= 1, "box: dimension must be positive");
  for (int i = 0; i < lower.size(); ++i) {
    require(lower[i] <= upper[i], "box: lower bound exceeds upper bound");
    require(!std::isnan(lower[i]) && !std::isnan(upper[i]), "box: NaN bound");
  }
  ControlSet set;
  set.family_ = SetFamily::Box;
  set.dim_ = static_cast<int>(lower.size());
  set.lower_ = std::move(lower);
  set.upper_ = std::move(upper);
  return set;
}

ControlSet ControlSet::whole_space(int d) {
  return box(Vector::Constant(d, -kInf), Vector::Constant(d, kInf));
}

ControlSet ControlSet::ball(Vector center, double radius) {
  require(center.size() >= 1, "ball: dimension must be positive");
  require(radius >= 0.0 && std::isfinite(radius), "ball: bad radius");
  require(center.allFinite(), "ball: center must be finite");
  ControlSet set;
  set.family_ = SetFamily::Ball;
  set.dim_ = static_cast<int>(center.size());
  set.center_ = std::move(center);
  set.radius_ = radius;
  return set;
}

ControlSet ControlSet::halfspace(Vector normal, double offset) {
  require(normal.size() >= 1 && normal.norm() > 0.0,
          "halfspace: normal must be nonzero");
  require(normal.allFinite() && std::isfinite(offset), "halfspace: bad data");
  ControlSet set;
  set.family_ = SetFamily::Halfspace;
  set.dim_ = static_cast<int>(normal.size());
  set.normal_ = std::move(normal);
  set.offset_ = offset;
  return set;
}

ControlSet ControlSet::polytope(Matrix a, Vector b) {
  require_dims(a.rows() == b.size(), "polytope: A rows must match b size");
  require(a.cols() >= 1 && a.rows() >= 1, "polytope: empty description");
  require(a.cols() <= 8 && a.rows() <= 24,
          "polytope: active-set enumeration supports d <= 8, rows <= 24");
  require(a.allFinite() && b.allFinite(), "polytope: bad data");
  ControlSet set;
  set.family_ = SetFamily::Polytope;
  set.dim_ = static_cast<int>(a.cols());
  set.a_ = std::move(a);
  set.b_ = std::move(b);
  // Nonemptiness witness: project the origin; throws if infeasible.
  set.interior_point_ =
      project_polyhedron(set.a_, set.b_, Vector::Zero(set.dim_));
  return set;
}

ControlSet ControlSet::polytope_hull(const std::vector<Vector>& vertices) {
  require(!vertices.empty(), "polytope_hull: no vertices");
  const int d = static_cast<int>(vertices.front().size());
  require(d >= 1 && d <= 2,
          "polytope_hull: vertex form supported for d <= 2; use polytope(A,b)");
  for (const auto& v : vertices)
    require_dims(v.size() == d, "polytope_hull: ragged vertex list");

  if (d == 1) {
    double lo = kInf, hi = -kInf;
    for (const auto& v : vertices) {
      lo = std::min(lo, v[0]);
      hi = std::max(hi, v[0]);
    }
    Matrix a(2, 1);
    a << 1.0, -1.0;
    Vector b(2);
    b << hi, -lo;
    return polytope(a, b);
  }

  // d == 2: monotone-chain convex hull, edges become inequality rows.
  std::vector<Vector> pts = vertices;
  std::sort(pts.begin(), pts.end(), [](const Vector& p, const Vector& q) {
    return p[0] < q[0] || (p[0] == q[0] && p[1] < q[1]);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Vector& p, const Vector& q) {
                          return (p - q).norm() < 1e-14;
                        }),
            pts.end());
  require(pts.size() >= 3, "polytope_hull: need >= 3 distinct vertices in 2-D");
  auto cross = [](const Vector& o, const Vector& p, const Vector& q) {
    return (p[0] - o[0]) * (q[1] - o[1]) - (p[1] - o[1]) * (q[0] - o[0]);
  };
  std::vector<Vector> hull;
  for (const auto& p : pts) {
    while (hull.size() >= 2 &&
           cross(hull[hull.size() - 2], hull.back(), p) <= 0)
      hull.pop_back();
    hull.push_back(p);
  }
  const size_t lower_count = hull.size() + 1;
  for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
    while (hull.size() >= lower_count &&
           cross(hull[hull.size() - 2], hull.back(), *it) <= 0)
      hull.pop_back();
    hull.push_back(*it);
  }
  hull.pop_back();
  require(hull.size() >= 3, "polytope_hull: degenerate hull");

  Matrix a(static_cast<int>(hull.size()), 2);
  Vector b(static_cast<int>(hull.size()));
  for (size_t i = 0; i < hull.size(); ++i) {
    const Vector& p = hull[i];
    const Vector& q = hull[(i + 1) % hull.size()];
    // Counter-clockwise hull: outward normal is the right-hand rotation.
    Vector n(2);
    n << (q[1] - p[1]), -(q[0] - p[0]);
    n.normalize();
    a.row(i) = n.transpose();
    b[static_cast<int>(i)] = n.dot(p);
  }
  return polytope(std::move(a), std::move(b));
}

ControlSet ControlSet::finite(std::vector<Vector> points) {
  require(!points.empty(), "finite: empty point list");
  const int d = static_cast<int>(points.front().size());
  for (const auto& p : points) {
    require_dims(p.size() == d, "finite: ragged point list");
    require(p.allFinite(), "finite: bad point");
  }
  ControlSet set;
  set.family_ = SetFamily::Finite;
  set.dim_ = d;
  set.points_ = std::move(points);
  return set;
}

// ---------------------------------------------------------------------------
// Projection / distance
// ---------------------------------------------------------------------------

Vector ControlSet::project(const Vector& u) const {
  require_dims(u.size() == dim_, "project: dimension mismatch");
  switch (family_) {
    case SetFamily::Box:
      return u.cwiseMax(lower_).cwiseMin(upper_);
    case SetFamily::Ball: {
      const Vector w = u - center_;
      const double r = w.norm();
      if (r <= radius_) return u;
      return center_ + (radius_ / r) * w;
    }
    case SetFamily::Halfspace: {
      const double slack = normal_.dot(u) - offset_;
      if (slack <= 0.0) return u;
      return u - (slack / normal_.squaredNorm()) * normal_;
    }
    case SetFamily::Polytope:
      return project_polyhedron(a_, b_, u);
    case SetFamily::Finite: {
      const Vector* best = &points_.front();
      double best_d2 = (points_.front() - u).squaredNorm();
      for (const auto& p : points_) {
        const double d2 = (p - u).squaredNorm();
        if (d2 < best_d2 - kTieTol ||
            (d2 < best_d2 + kTieTol && lex_less(p, *best))) {
          best = &p;
          best_d2 = d2;
        }
      }
      return *best;
    }
  }
  throw Error("project: unknown family");
}

double ControlSet::distance(const Vector& u) const {
  return (u - project(u)).norm();
}

bool ControlSet::contains(const Vector& u, double tol) const {
  return distance(u) <= tol;
}

void ControlSet::check_membership(const Vector& u) const {
  if (!contains(u, kMembershipTol)) {
    throw MembershipError("point is not in the control set (dist = " +
                          std::to_string(distance(u)) + ")");
  }
}

std::vector<int> ControlSet::active_rows(const Vector& u, double tol) const {
  std::vector<int> act;
  for (int i = 0; i < a_.rows(); ++i) {
    if (a_.row(i).dot(u) >= b_[i] - tol) act.push_back(i);
  }
  return act;
}

// ---------------------------------------------------------------------------
// Cone residuals
// ---------------------------------------------------------------------------

namespace {

// Per-coordinate tangent structure of a box at u.
enum class BoxFace { Free, AtLower, AtUpper, Pinned };

BoxFace box_face(double lo, double hi, double u, double tol) {
  const bool at_lo = std::isfinite(lo) && u <= lo + tol;
  const bool at_hi = std::isfinite(hi) && u >= hi - tol;
  if (at_lo && at_hi) return BoxFace::Pinned;
  if (at_lo) return BoxFace::AtLower;
  if (at_hi) return BoxFace::AtUpper;
  return BoxFace::Free;
}

}  // namespace

Vector ControlSet::project_tangent(const Vector& u, const Vector& v) const {
  require_dims(v.size() == dim_, "project_tangent: dimension mismatch");
  check_membership(u);
  switch (family_) {
    case SetFamily::Box: {
      Vector w = v;
      for (int i = 0; i < dim_; ++i) {
        switch (box_face(lower_[i], upper_[i], u[i], kMembershipTol)) {
          case BoxFace::Free:
            break;
          case BoxFace::AtLower:
            w[i] = std::max(0.0, v[i]);
            break;
          case BoxFace::AtUpper:
            w[i] = std::min(0.0, v[i]);
            break;
          case BoxFace::Pinned:
            w[i] = 0.0;
            break;
        }
      }
      return w;
    }
    case SetFamily::Ball: {
      if (radius_ - (u - center_).norm() > kMembershipTol) return v;
      if (radius_ == 0.0) return Vector::Zero(dim_);
      const Vector n = (u - center_).normalized();
      return v - std::max(0.0, n.dot(v)) * n;
    }
    case SetFamily::Halfspace: {
      if (offset_ - normal_.dot(u) > kMembershipTol * normal_.norm()) return v;
      const Vector n = normal_.normalized();
      return v - std::max(0.0, n.dot(v)) * n;
    }
    case SetFamily::Polytope: {
      const auto act = active_rows(u, kMembershipTol);
      if (act.empty()) return v;
      Matrix c(static_cast<int>(act.size()), dim_);
      for (size_t i = 0; i < act.size(); ++i) c.row(static_cast<int>(i)) = a_.row(act[i]);
      return project_polyhedral_cone(c, v);
    }
    case SetFamily::Finite:
      return Vector::Zero(dim_);
  }
  throw Error("project_tangent: unknown family");
}

double ControlSet::adjacent_cone_residual(const Vector& u,
                                          const Vector& v) const {
  require_dims(v.size() == dim_, "adjacent_cone_residual: dimension mismatch");
  check_membership(u);
  if (family_ == SetFamily::Finite) return v.norm();
  return (v - project_tangent(u, v)).norm();
}

double ControlSet::normal_cone_residual(const Vector& u,
                                        const Vector& xi) const {
  require_dims(xi.size() == dim_, "normal_cone_residual: dimension mismatch");
  check_membership(u);
  // sup over unit tangent v of <xi, v>, clipped at zero, equals the norm of
  // the projection of xi onto the tangent cone (Moreau decomposition).
  if (family_ == SetFamily::Finite) return 0.0;
  return project_tangent(u, xi).norm();
}

double ControlSet::second_adjacent_residual(const Vector& u, const Vector& v,
                                            const Vector& h,
                                            double tangent_tol) const {
  require_dims(h.size() == dim_, "second_adjacent_residual: dim mismatch");
  const double tangent_residual = adjacent_cone_residual(u, v);
  if (tangent_residual > tangent_tol) {
    throw NotTangentError(
        "second_adjacent_residual: v is not tangent (residual = " +
        std::to_string(tangent_residual) + ")");
  }

  const double active_tol = 1e-12;
  switch (family_) {
    case SetFamily::Box: {
      Vector viol = Vector::Zero(dim_);
      for (int i = 0; i < dim_; ++i) {
        switch (box_face(lower_[i], upper_[i], u[i], kMembershipTol)) {
          case BoxFace::Free:
            break;
          case BoxFace::AtLower:
            // v_i > 0 leaves the face at first order; only v_i == 0 binds.
            if (std::abs(v[i]) <= active_tol) viol[i] = std::min(0.0, h[i]);
            break;
          case BoxFace::AtUpper:
            if (std::abs(v[i]) <= active_tol) viol[i] = std::max(0.0, h[i]);
            break;
          case BoxFace::Pinned:
            viol[i] = h[i];
            break;
        }
      }
      return viol.norm();
    }
    case SetFamily::Ball: {
      if (radius_ - (u - center_).norm() > kMembershipTol) return 0.0;
      if (radius_ == 0.0) return h.norm();
      const Vector n = (u - center_).normalized();
      const double s = n.dot(v);
      if (s < -active_tol) return 0.0;  // strictly inward first-order term
      const double curvature = (v.squaredNorm() + 2.0 * radius_ * n.dot(h) -
                                s * s) /
                               (2.0 * radius_);
      return std::max(0.0, curvature);
    }
    case SetFamily::Halfspace: {
      if (offset_ - normal_.dot(u) > kMembershipTol * normal_.norm())
        return 0.0;
      const Vector n = normal_.normalized();
      if (n.dot(v) < -active_tol) return 0.0;
      return std::max(0.0, n.dot(h));
    }
    case SetFamily::Polytope: {
      const auto act = active_rows(u, kMembershipTol);
      std::vector<int> binding;
      for (int i : act) {
        if (a_.row(i).dot(v) >= -active_tol * std::max(1.0, v.norm()))
          binding.push_back(i);
      }
      if (binding.empty()) return 0.0;
      Matrix c(static_cast<int>(binding.size()), dim_);
      for (size_t i = 0; i < binding.size(); ++i)
        c.row(static_cast<int>(i)) = a_.row(binding[i]);
      return (h - project_polyhedral_cone(c, h)).norm();
    }
    case SetFamily::Finite:
      // With v == 0, the defect is the full second-order step.
      return h.norm();
  }
  throw Error("second_adjacent_residual: unknown family");
}

// ---------------------------------------------------------------------------
// Ladder fallbacks
// ---------------------------------------------------------------------------

double ladder_adjacent_residual(const ControlSet& set, const Vector& u,
                                const Vector& v) {
  const auto ladder = default_eps_ladder();
  double res = 0.0;
  for (size_t i = ladder.size() - 2; i < ladder.size(); ++i) {
    const double eps = ladder[i];
    res = std::max(res, set.distance(u + eps * v) / eps);
  }
  return res;
}

double ladder_second_residual(const ControlSet& set, const Vector& u,
                              const Vector& v, const Vector& h) {
  const auto ladder = default_eps_ladder();
  double res = 0.0;
  for (size_t i = ladder.size() - 2; i < ladder.size(); ++i) {
    const double eps = ladder[i];
    res = std::max(res, set.distance(u + eps * v + eps * eps * h) / (eps * eps));
  }
  return res;
}

}  // namespace socv
