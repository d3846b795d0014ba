#include "socv/oracles/cone_oracle.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>

namespace socv::oracles {
namespace {

double box_distance(const Vector& lo, const Vector& hi, const Vector& p) {
  double acc = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    double gap = 0.0;
    if (p[i] < lo[i]) gap = lo[i] - p[i];
    if (p[i] > hi[i]) gap = p[i] - hi[i];
    acc += gap * gap;
  }
  return std::sqrt(acc);
}

double ball_distance(const Vector& c, double r, const Vector& p) {
  return std::max(0.0, (p - c).norm() - r);
}

double halfspace_distance(const Vector& n, double off, const Vector& p) {
  return std::max(0.0, (n.dot(p) - off) / n.norm());
}

double finite_distance(const std::vector<Vector>& pts, const Vector& p) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& q : pts) best = std::min(best, (q - p).norm());
  return best;
}

/// Independent polytope projection: full KKT solve per candidate active set
/// (the cones module uses the Schur form instead).
double polytope_distance(const Matrix& a, const Vector& b, const Vector& p) {
  const int rows = static_cast<int>(a.rows());
  const int d = static_cast<int>(a.cols());
  if (((a * p - b).array() <= 1e-9).all()) return 0.0;

  double best = std::numeric_limits<double>::infinity();
  std::vector<int> idx;
  std::function<void(int, int)> rec = [&](int start, int remaining) {
    if (!idx.empty()) {
      const int s = static_cast<int>(idx.size());
      Matrix kkt = Matrix::Zero(d + s, d + s);
      kkt.topLeftCorner(d, d) = Matrix::Identity(d, d);
      Vector rhs(d + s);
      rhs.head(d) = p;
      for (int i = 0; i < s; ++i) {
        kkt.block(0, d + i, d, 1) = 0.5 * a.row(idx[i]).transpose();
        kkt.block(d + i, 0, 1, d) = a.row(idx[i]);
        rhs[d + i] = b[idx[i]];
      }
      Eigen::FullPivLU<Matrix> lu(kkt);
      if (lu.isInvertible()) {
        const Vector sol = lu.solve(rhs);
        const Vector y = sol.head(d);
        if (((a * y - b).array() <= 1e-9).all()) {
          best = std::min(best, (y - p).norm());
        }
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
  return best;
}

}  // namespace

double oracle_distance(const ControlSet& set, const Vector& point) {
  switch (set.family()) {
    case SetFamily::Box:
      return box_distance(set.lower(), set.upper(), point);
    case SetFamily::Ball:
      return ball_distance(set.center(), set.radius(), point);
    case SetFamily::Halfspace:
      return halfspace_distance(set.normal(), set.offset(), point);
    case SetFamily::Polytope:
      return polytope_distance(set.ineq_matrix(), set.ineq_rhs(), point);
    case SetFamily::Finite:
      return finite_distance(set.points(), point);
  }
  throw Error("oracle_distance: unknown family");
}

ConeDistanceTable brute_force_cone(const ControlSet& set, const Vector& u,
                                   const Vector& v, const Vector& h,
                                   const std::vector<double>& ladder) {
  ConeDistanceTable table;
  table.eps = ladder;
  for (double eps : ladder) {
    table.first.push_back(oracle_distance(set, u + eps * v) / eps);
    table.second.push_back(oracle_distance(set, u + eps * v + eps * eps * h) /
                           (eps * eps));
  }
  return table;
}

double extrapolate_limit(const std::vector<double>& eps,
                         const std::vector<double>& values) {
  require(eps.size() == values.size() && eps.size() >= 2,
          "extrapolate_limit: need at least two rungs");
  const size_t last = eps.size() - 1;
  const double e1 = eps[last - 1], e2 = eps[last];
  const double f1 = values[last - 1], f2 = values[last];
  // Linear model f(e) = L + C e through the two smallest rungs.
  const double limit = f2 + (f2 - f1) * e2 / (e1 - e2);
  return std::max(0.0, limit);
}

double sampled_distance(const ControlSet& set, const Vector& point,
                        int resolution) {
  const int d = set.dim();
  require(resolution >= 2, "sampled_distance: resolution too small");
  double best = std::numeric_limits<double>::infinity();

  if (set.family() == SetFamily::Finite) {
    return finite_distance(set.points(), point);
  }
  Vector lo(d), hi(d);
  if (set.family() == SetFamily::Box) {
    lo = set.lower();
    hi = set.upper();
    require(lo.allFinite() && hi.allFinite(),
            "sampled_distance: box must be bounded");
  } else if (set.family() == SetFamily::Ball) {
    lo = set.center().array() - set.radius();
    hi = set.center().array() + set.radius();
  } else {
    throw CapabilityError("sampled_distance: box/ball/finite only");
  }
  require(d <= 2, "sampled_distance: d <= 2 only");

  Vector cand(d);
  if (d == 1) {
    for (int i = 0; i < resolution; ++i) {
      cand[0] = lo[0] + (hi[0] - lo[0]) * i / (resolution - 1);
      if (set.family() == SetFamily::Ball &&
          (cand - set.center()).norm() > set.radius())
        continue;
      best = std::min(best, (cand - point).norm());
    }
  } else {
    for (int i = 0; i < resolution; ++i) {
      for (int j = 0; j < resolution; ++j) {
        cand[0] = lo[0] + (hi[0] - lo[0]) * i / (resolution - 1);
        cand[1] = lo[1] + (hi[1] - lo[1]) * j / (resolution - 1);
        if (set.family() == SetFamily::Ball &&
            (cand - set.center()).norm() > set.radius())
          continue;
        best = std::min(best, (cand - point).norm());
      }
    }
    if (set.family() == SetFamily::Ball) {
      // Include boundary samples so tangential queries resolve.
      for (int i = 0; i < 4 * resolution; ++i) {
        const double theta = 2.0 * M_PI * i / (4 * resolution);
        cand[0] = set.center()[0] + set.radius() * std::cos(theta);
        cand[1] = set.center()[1] + set.radius() * std::sin(theta);
        best = std::min(best, (cand - point).norm());
      }
    }
  }
  return best;
}

}  // namespace socv::oracles
