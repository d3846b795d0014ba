#include "socv/umax.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>

namespace socv {
namespace {

constexpr double kTieTol = 1e-12;

struct Best {
  double value = -std::numeric_limits<double>::infinity();
  Vector point;
  void offer(const Vector& u, double v) {
    // Strictly-better wins; ties keep the earliest candidate.
    if (v > value + kTieTol) {
      value = v;
      point = u;
    }
  }
};

double quad(const Vector& q, const Matrix& h, const Vector& u) {
  return q.dot(u) + 0.5 * u.dot(h * u);
}

MaximizeResult maximize_quadratic_box(const ControlSet& set, const Vector& q,
                                      const Matrix& h) {
  const int d = set.dim();
  const Vector& lo = set.lower();
  const Vector& hi = set.upper();

  // Unboundedness: positive curvature along any unconstrained coordinate
  // subspace makes the supremum infinite.
  std::vector<int> unbounded_coords;
  for (int i = 0; i < d; ++i) {
    if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]))
      unbounded_coords.push_back(i);
  }
  if (!unbounded_coords.empty()) {
    Matrix huu(static_cast<int>(unbounded_coords.size()),
               static_cast<int>(unbounded_coords.size()));
    for (size_t a = 0; a < unbounded_coords.size(); ++a)
      for (size_t b = 0; b < unbounded_coords.size(); ++b)
        huu(static_cast<int>(a), static_cast<int>(b)) =
            h(unbounded_coords[a], unbounded_coords[b]);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(huu);
    if (eig.eigenvalues().maxCoeff() >= -1e-14) {
      return {Vector(), 0.0, true};
    }
  }

  require(d <= 10, "maximize_quadratic: box dimension too large to enumerate");
  Best best;
  // Face patterns, ternary digits per coordinate: 0 free, 1 lower, 2 upper.
  std::vector<int> pattern(d, 0);
  const long total = static_cast<long>(std::pow(3.0, d));
  for (long code = 0; code < total; ++code) {
    long rest = code;
    bool valid = true;
    for (int i = 0; i < d; ++i) {
      pattern[i] = static_cast<int>(rest % 3);
      rest /= 3;
      if (pattern[i] == 1 && !std::isfinite(lo[i])) valid = false;
      if (pattern[i] == 2 && !std::isfinite(hi[i])) valid = false;
    }
    if (!valid) continue;

    std::vector<int> free_idx;
    Vector u = Vector::Zero(d);
    for (int i = 0; i < d; ++i) {
      if (pattern[i] == 0)
        free_idx.push_back(i);
      else
        u[i] = pattern[i] == 1 ? lo[i] : hi[i];
    }
    if (!free_idx.empty()) {
      const int nf = static_cast<int>(free_idx.size());
      Matrix hff(nf, nf);
      Vector rhs(nf);
      for (int a = 0; a < nf; ++a) {
        rhs[a] = -q[free_idx[a]];
        for (int b = 0; b < nf; ++b) hff(a, b) = h(free_idx[a], free_idx[b]);
        for (int i = 0; i < d; ++i) {
          if (pattern[i] != 0) rhs[a] -= h(free_idx[a], i) * u[i];
        }
      }
      Eigen::FullPivLU<Matrix> lu(hff);
      if (!lu.isInvertible()) continue;
      const Vector uf = lu.solve(rhs);
      bool feasible = true;
      for (int a = 0; a < nf; ++a) {
        const int i = free_idx[a];
        if (uf[a] < lo[i] - 1e-10 || uf[a] > hi[i] + 1e-10) feasible = false;
        u[i] = uf[a];
      }
      if (!feasible) continue;
    }
    best.offer(u, quad(q, h, u));
  }
  require(best.point.size() > 0, "maximize_quadratic: no box candidate");
  return {best.point, best.value, false};
}

MaximizeResult maximize_quadratic_ball(const ControlSet& set, const Vector& q,
                                       const Matrix& h) {
  const int d = set.dim();
  const Vector& c = set.center();
  const double r = set.radius();
  // phi(c + w) = phi(c) + g . w + w' H w / 2 with g = q + H c.
  const Vector g = q + h * c;
  const double base = quad(q, h, c);
  if (r == 0.0) return {c, base, false};

  Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
  const Vector lambda = eig.eigenvalues();
  const Matrix v = eig.eigenvectors();
  const Vector gt = v.transpose() * g;
  const double lmax = lambda.maxCoeff();

  Best best;
  // Interior stationary point (strictly concave case only).
  if (lmax < 0.0) {
    const Vector w = -h.ldlt().solve(g);
    if (w.norm() <= r) best.offer(c + w, base + g.dot(w) + 0.5 * w.dot(h * w));
  }

  // Boundary: w(mu) = (mu I - H)^{-1} g with |w(mu)| = r, mu > lambda_max.
  auto norm2_at = [&](double mu) {
    double acc = 0.0;
    for (int i = 0; i < d; ++i) {
      const double den = mu - lambda[i];
      acc += (gt[i] / den) * (gt[i] / den);
    }
    return acc;
  };
  // Limit of |w(mu)| as mu -> lambda_max+ is finite iff g has no component
  // on the top eigenspace (hard case).
  double limit2 = 0.0;
  bool hard_case = true;
  for (int i = 0; i < d; ++i) {
    if (lmax - lambda[i] < 1e-12 * std::max(1.0, std::abs(lmax))) {
      if (std::abs(gt[i]) > 1e-13 * std::max(1.0, g.norm())) hard_case = false;
    } else {
      limit2 += (gt[i] / (lmax - lambda[i])) * (gt[i] / (lmax - lambda[i]));
    }
  }

  if (!hard_case || limit2 >= r * r) {
    double mu_lo = lmax + 1e-14 * std::max(1.0, std::abs(lmax)) + 1e-300;
    double mu_hi = lmax + g.norm() / r + 1.0;
    while (norm2_at(mu_hi) > r * r) mu_hi = lmax + 2.0 * (mu_hi - lmax);
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (mu_lo + mu_hi);
      if (norm2_at(mid) > r * r)
        mu_lo = mid;
      else
        mu_hi = mid;
    }
    const double mu = 0.5 * (mu_lo + mu_hi);
    Vector wt(d);
    for (int i = 0; i < d; ++i) wt[i] = gt[i] / (mu - lambda[i]);
    const Vector w = v * wt;
    best.offer(c + w, base + g.dot(w) + 0.5 * w.dot(h * w));
  } else {
    // Hard case: pseudo-inverse part plus a top-eigenvector component to
    // reach the boundary.
    Vector wt = Vector::Zero(d);
    int top = 0;
    for (int i = 0; i < d; ++i) {
      if (lmax - lambda[i] < 1e-12 * std::max(1.0, std::abs(lmax)))
        top = i;
      else
        wt[i] = gt[i] / (lmax - lambda[i]);
    }
    const double tail = std::sqrt(std::max(0.0, r * r - wt.squaredNorm()));
    wt[top] += tail;
    const Vector w = v * wt;
    best.offer(c + w, base + g.dot(w) + 0.5 * w.dot(h * w));
  }
  return {best.point, best.value, false};
}

MaximizeResult maximize_quadratic_halfspace(const ControlSet& set,
                                            const Vector& q, const Matrix& h) {
  const int d = set.dim();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
  if (eig.eigenvalues().maxCoeff() >= -1e-14) {
    return {Vector(), 0.0, true};  // halfspace is unbounded
  }
  const Vector u0 = -h.ldlt().solve(q);
  if (set.normal().dot(u0) <= set.offset()) {
    return {u0, quad(q, h, u0), false};
  }
  Matrix kkt(d + 1, d + 1);
  kkt.setZero();
  kkt.topLeftCorner(d, d) = h;
  kkt.topRightCorner(d, 1) = -set.normal();
  kkt.bottomLeftCorner(1, d) = set.normal().transpose();
  Vector rhs(d + 1);
  rhs.head(d) = -q;
  rhs[d] = set.offset();
  const Vector sol = kkt.fullPivLu().solve(rhs);
  const Vector u = sol.head(d);
  return {u, quad(q, h, u), false};
}

MaximizeResult maximize_quadratic_polytope(const ControlSet& set,
                                           const Vector& q, const Matrix& h) {
  const Matrix& a = set.ineq_matrix();
  const Vector& b = set.ineq_rhs();
  const int rows = static_cast<int>(a.rows());
  const int d = set.dim();
  require(rows <= 24, "maximize_quadratic: too many polytope rows");
  Best best;

  // Subset of size 0: unconstrained stationary point.
  {
    Eigen::FullPivLU<Matrix> lu(h);
    if (lu.isInvertible()) {
      const Vector u = lu.solve(-q);
      if (((a * u - b).array() <= 1e-9).all()) best.offer(u, quad(q, h, u));
    }
  }
  // Active subsets up to size d.
  std::vector<int> idx;
  std::function<void(int, int)> rec = [&](int start, int remaining) {
    if (!idx.empty()) {
      const int s = static_cast<int>(idx.size());
      Matrix kkt(d + s, d + s);
      kkt.setZero();
      kkt.topLeftCorner(d, d) = h;
      Vector rhs(d + s);
      rhs.head(d) = -q;
      for (int i = 0; i < s; ++i) {
        kkt.block(0, d + i, d, 1) = a.row(idx[i]).transpose();
        kkt.block(d + i, 0, 1, d) = a.row(idx[i]);
        rhs[d + i] = b[idx[i]];
      }
      Eigen::FullPivLU<Matrix> lu(kkt);
      if (lu.isInvertible()) {
        const Vector sol = lu.solve(rhs);
        const Vector u = sol.head(d);
        if (((a * u - b).array() <= 1e-9).all()) best.offer(u, quad(q, h, u));
      }
    }
    if (remaining == 0) return;
    for (int i = start; i < rows; ++i) {
      idx.push_back(i);
      rec(i + 1, remaining - 1);
      idx.pop_back();
    }
  };
  rec(0, d);
  if (best.point.size() == 0) {
    throw CapabilityError(
        "maximize_quadratic: no feasible stationary candidate; polytope may "
        "be unbounded relative to the quadratic");
  }
  return {best.point, best.value, false};
}

}  // namespace

MaximizeResult maximize_quadratic(const ControlSet& set, const Vector& q,
                                  const Matrix& h) {
  require_dims(q.size() == set.dim() && h.rows() == set.dim() &&
                   h.cols() == set.dim(),
               "maximize_quadratic: shape mismatch");
  switch (set.family()) {
    case SetFamily::Box:
      return maximize_quadratic_box(set, q, h);
    case SetFamily::Ball:
      return maximize_quadratic_ball(set, q, h);
    case SetFamily::Halfspace:
      return maximize_quadratic_halfspace(set, q, h);
    case SetFamily::Polytope:
      return maximize_quadratic_polytope(set, q, h);
    case SetFamily::Finite: {
      Best best;
      for (const auto& p : set.points()) best.offer(p, quad(q, h, p));
      return {best.point, best.value, false};
    }
  }
  throw Error("maximize_quadratic: unknown family");
}

MaximizeResult maximize_on_set(
    const ControlSet& set, const std::function<double(const Vector&)>& fn) {
  const int d = set.dim();
  if (set.family() == SetFamily::Finite) {
    Best best;
    for (const auto& p : set.points()) best.offer(p, fn(p));
    return {best.point, best.value, false};
  }

  Vector lo, hi;
  if (set.family() == SetFamily::Box) {
    lo = set.lower();
    hi = set.upper();
    require(lo.allFinite() && hi.allFinite(),
            "maximize_on_set: unbounded box needs a quadratic Hamiltonian");
  } else if (set.family() == SetFamily::Ball) {
    lo = set.center().array() - set.radius();
    hi = set.center().array() + set.radius();
  } else {
    throw CapabilityError(
        "maximize_on_set: search ladder only for finite/box/ball families");
  }
  require(d <= 2, "maximize_on_set: search ladder supports d <= 2");

  const int pts = 33;
  Best best;
  Vector u(d);
  auto sweep = [&](const Vector& lo_r, const Vector& hi_r) {
    if (d == 1) {
      for (int i = 0; i < pts; ++i) {
        u[0] = lo_r[0] + (hi_r[0] - lo_r[0]) * i / (pts - 1);
        const Vector up = set.project(u);
        best.offer(up, fn(up));
      }
    } else {
      for (int i = 0; i < pts; ++i) {
        for (int j = 0; j < pts; ++j) {
          u[0] = lo_r[0] + (hi_r[0] - lo_r[0]) * i / (pts - 1);
          u[1] = lo_r[1] + (hi_r[1] - lo_r[1]) * j / (pts - 1);
          const Vector up = set.project(u);
          best.offer(up, fn(up));
        }
      }
    }
  };
  sweep(lo, hi);
  Vector span = (hi - lo) / (pts - 1);
  for (int round = 0; round < 3; ++round) {
    const Vector center = best.point;
    const Vector lo_r = center - 2.0 * span;
    const Vector hi_r = center + 2.0 * span;
    sweep(lo_r, hi_r);
    span *= 4.0 / (pts - 1);
  }
  return {best.point, best.value, false};
}

}  // namespace socv
