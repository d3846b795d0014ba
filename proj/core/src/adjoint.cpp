#include "socv/adjoint.hpp"

#include "socv/hilbert.hpp"

#include <cmath>

namespace socv {
namespace {

Matrix design_matrix(const PolynomialBasis& basis, const AdaptedField& xbar,
                     int step) {
  Matrix design(xbar.paths(), basis.size());
  Vector row(basis.size());
  for (int p = 0; p < xbar.paths(); ++p) {
    basis.eval(xbar.vec(p, step), row);
    design.row(p) = row.transpose();
  }
  return design;
}

}  // namespace

Matrix hamiltonian_xx(const ProblemSpec& spec, double t, const Vector& x,
                      const Vector& u, const Vector& p1, const Matrix& q1) {
  const auto& coeffs = *spec.coeffs;
  return coeffs.a_xx_p(t, x, u, p1) + coeffs.b_xx_w(t, x, u, q1) -
         coeffs.f_xx(t, x, u);
}

FirstAdjoint solve_first_adjoint(const ProblemSpec& spec,
                                 const AdaptedField& xbar,
                                 const AdaptedField& ubar,
                                 const NoiseEnsemble& noise,
                                 const RegressionConfig& reg,
                                 const ParallelConfig& par) {
  spec.validate();
  const int n = spec.state_dim();
  const int m = spec.noise_dim;
  const int paths = noise.paths();
  const int steps = noise.steps();
  const double dt = noise.dt();
  const Vector sg = spec.space.semigroup_factors(dt);  // S = S* (diagonal)
  const auto& coeffs = *spec.coeffs;

  FirstAdjoint out{AdaptedField::state_field(paths, steps + 1, n),
                   AdaptedField::state_field(paths, steps, n),
                   AdaptedField::matrix_field(paths, steps, n, m),
                   {}};

  // Terminal condition, exact per sample.
  for (int p = 0; p < paths; ++p) {
    out.p1.vec(p, steps) = -coeffs.g_x(xbar.vec(p, steps));
  }

  const PolynomialBasis basis(n, reg.degree);
  const auto batches = regression_batches(paths, basis.size(), reg.batches);
  Matrix payload(paths, n);          // S P1_{k+1}
  Matrix mart(paths, n * m);         // centered payload (x) dW / dt
  Matrix cont(paths, n);
  Matrix q_fit(paths, n * m);

  for (int k = steps - 1; k >= 0; --k) {
    const double t = k * dt;
    for (int p = 0; p < paths; ++p) {
      payload.row(p) = sg.cwiseProduct(out.p1.vec(p, k + 1)).transpose();
    }
    const Matrix design = design_matrix(basis, xbar, k);

    for (const auto& [lo, hi] : batches) {
      const int count = hi - lo;
      StepRegression regression(basis, reg, count);
      regression.factor(design.middleRows(lo, count));
      cont.middleRows(lo, count) =
          regression.fit(payload.middleRows(lo, count));

      // Martingale-increment regression on the centered payload: the
      // conditional mean drops out of the estimand and takes most of the
      // variance with it.
      for (int p = lo; p < hi; ++p) {
        const auto dw = noise.increments(p, k);
        for (int j = 0; j < m; ++j) {
          mart.block(p, j * n, 1, n) =
              (payload.row(p) - cont.row(p)) * (dw[j] / dt);
        }
      }
      q_fit.middleRows(lo, count) = regression.fit(mart.middleRows(lo, count));
      out.diagnostics.max_condition = std::max(
          out.diagnostics.max_condition, regression.condition_number());
      if (regression.rank_deficient()) ++out.diagnostics.rank_deficient_steps;
    }

    parallel_for(par, paths, [&](int lo, int hi) {
      for (int p = lo; p < hi; ++p) {
        const Vector cont_p = cont.row(p).transpose();
        Matrix q1(n, m);
        for (int j = 0; j < m; ++j) {
          q1.col(j) = q_fit.block(p, j * n, 1, n).transpose();
        }
        out.q1.at(p, k) = q1;
        out.p1_post.vec(p, k) = cont_p;
        const Vector x = xbar.vec(p, k);
        const Vector u = ubar.vec(p, k);
        const Vector drift = coeffs.a_x(t, x, u).transpose() * cont_p +
                             coeffs.b_x_adjoint(t, x, u, q1) -
                             coeffs.f_x(t, x, u);
        out.p1.vec(p, k) = cont_p + dt * drift;
      }
    });
  }
  return out;
}

SecondAdjoint solve_second_adjoint(const ProblemSpec& spec,
                                   const AdaptedField& xbar,
                                   const AdaptedField& ubar,
                                   const FirstAdjoint& first,
                                   const NoiseEnsemble& noise,
                                   const RegressionConfig& reg,
                                   const ParallelConfig& par) {
  spec.validate();
  if (!spec.coeffs->has_second_derivatives()) {
    throw CapabilityError("solve_second_adjoint: family lacks (A6) derivatives");
  }
  const int n = spec.state_dim();
  const int m = spec.noise_dim;
  const int paths = noise.paths();
  const int steps = noise.steps();
  const double dt = noise.dt();
  const Vector sg = spec.space.semigroup_factors(dt);
  const Vector sg_half = spec.space.semigroup_factors(0.5 * dt);
  const auto& coeffs = *spec.coeffs;

  SecondAdjoint out{AdaptedField::matrix_field(paths, steps + 1, n, n),
                    AdaptedField::matrix_field(paths, steps, n, n * m),
                    {}};

  for (int p = 0; p < paths; ++p) {
    out.p2.at(p, steps) = -coeffs.g_xx(xbar.vec(p, steps));
  }

  const PolynomialBasis basis(n, reg.degree);
  const auto batches = regression_batches(paths, basis.size(), reg.batches);
  const int nn = n * n;
  Matrix payload(paths, nn);
  Matrix mart(paths, nn * m);
  Matrix cont_fit(paths, nn);
  Matrix q_fit(paths, nn * m);

  for (int k = steps - 1; k >= 0; --k) {
    const double t = k * dt;
    for (int p = 0; p < paths; ++p) {
      // S* P2_{k+1} S, flattened column-major.
      const Matrix propagated =
          sg.asDiagonal() * out.p2.at(p, k + 1) * sg.asDiagonal();
      payload.row(p) = Eigen::Map<const Vector>(propagated.data(), nn);
    }
    const Matrix design = design_matrix(basis, xbar, k);

    for (const auto& [lo, hi] : batches) {
      const int count = hi - lo;
      StepRegression regression(basis, reg, count);
      regression.factor(design.middleRows(lo, count));
      cont_fit.middleRows(lo, count) =
          regression.fit(payload.middleRows(lo, count));
      for (int p = lo; p < hi; ++p) {
        const auto dw = noise.increments(p, k);
        for (int j = 0; j < m; ++j) {
          mart.block(p, nn * j, 1, nn) =
              (payload.row(p) - cont_fit.row(p)) * (dw[j] / dt);
        }
      }
      q_fit.middleRows(lo, count) = regression.fit(mart.middleRows(lo, count));
      out.diagnostics.max_condition = std::max(
          out.diagnostics.max_condition, regression.condition_number());
      if (regression.rank_deficient()) ++out.diagnostics.rank_deficient_steps;
    }

    parallel_for(par, paths, [&](int lo, int hi) {
      for (int p = lo; p < hi; ++p) {
        Matrix cont(n, n);
        for (int c = 0; c < n; ++c) {
          cont.col(c) = cont_fit.block(p, c * n, 1, n).transpose();
        }
        auto q2_all = out.q2.at(p, k);
        std::vector<Matrix> q2(m);
        for (int j = 0; j < m; ++j) {
          Matrix qj(n, n);
          for (int c = 0; c < n; ++c) {
            qj.col(c) = q_fit.block(p, nn * j + c * n, 1, n).transpose();
          }
          q2[j] = 0.5 * (qj + qj.transpose());
          q2_all.block(0, j * n, n, n) = q2[j];
        }

        const Vector x = xbar.vec(p, k);
        const Vector u = ubar.vec(p, k);
        // Drift at the midpoint continuation value.
        const Matrix mid =
            sg_half.asDiagonal() * cont * sg_half.asDiagonal();
        const Matrix ax = coeffs.a_x(t, x, u);
        Matrix drift = ax.transpose() * mid + mid * ax +
                       hamiltonian_xx(spec, t, x, u, first.p1.vec(p, k),
                                      first.q1.at(p, k));
        for (int j = 0; j < m; ++j) {
          const Matrix bxj = coeffs.b_x_col(t, x, u, j);
          drift += bxj.transpose() * mid * bxj;
          drift += bxj.transpose() * q2[j] + q2[j] * bxj;
        }
        out.p2.at(p, k) =
            cont + dt * (sg_half.asDiagonal() * drift * sg_half.asDiagonal());
      }
    });
  }
  return out;
}

AdaptedField realize_q2_action(const SecondAdjoint& adj2,
                               const AdaptedField& x1, bool transposed) {
  const int n = adj2.p2.rows();
  const int m = adj2.q2.cols() / n;
  require_dims(x1.rows() == n && x1.paths() == adj2.q2.paths() &&
                   x1.steps() >= adj2.q2.steps(),
               "realize_q2_action: field shape mismatch");
  AdaptedField out =
      AdaptedField::matrix_field(adj2.q2.paths(), adj2.q2.steps(), n, m);
  for (int p = 0; p < out.paths(); ++p) {
    for (int k = 0; k < out.steps(); ++k) {
      auto cell = out.at(p, k);
      const Vector xv = x1.vec(p, k);
      for (int j = 0; j < m; ++j) {
        const auto qj = adj2.q2_block(p, k, j);
        cell.col(j) = transposed ? Vector(qj.transpose() * xv) : Vector(qj * xv);
      }
    }
  }
  return out;
}

namespace {

/// Deterministic Gaussian draws for identity-check test data.
class TrialRng {
 public:
  explicit TrialRng(uint64_t seed) : seed_(seed) {}
  double normal() { return counter_gaussian(seed_, 0x74726961, 0, counter_++); }
  Vector normal_vector(int size) {
    Vector v(size);
    for (int i = 0; i < size; ++i) v[i] = normal();
    return v;
  }
  /// Piecewise-constant deterministic field with unit sample L2 norm
  /// (sum_k |value_k|^2 dt = 1).
  Matrix unit_field(int rows, int steps, double dt) {
    Matrix f(rows, steps);
    for (int k = 0; k < steps; ++k)
      for (int i = 0; i < rows; ++i) f(i, k) = normal();
    const double norm = std::sqrt(f.squaredNorm() * dt);
    if (norm > 0.0) f /= norm;
    return f;
  }
  /// Uniform grid index in {0..count-1} via the normal CDF of a fresh draw.
  int uniform_index(int count) {
    const double u = 0.5 * (1.0 + std::erf(normal() / std::sqrt(2.0)));
    return std::min(static_cast<int>(u * count), count - 1);
  }

 private:
  uint64_t seed_;
  int64_t counter_ = 0;
};

void summarize(IdentityCheckResult& r) {
  double mx = 0.0, mean = 0.0;
  for (double v : r.residuals) {
    mx = std::max(mx, v);
    mean += v;
  }
  r.max_residual = mx;
  r.mean_residual = r.residuals.empty() ? 0.0 : mean / r.residuals.size();
}

}  // namespace

IdentityCheckResult check_transposition_identity(
    const ProblemSpec& spec, const AdaptedField& xbar, const AdaptedField& ubar,
    const FirstAdjoint& adj, const NoiseEnsemble& noise, int trials,
    uint64_t seed, const ParallelConfig& par) {
  spec.validate();
  const int n = spec.state_dim();
  const int m = spec.noise_dim;
  const int paths = noise.paths();
  const int steps = noise.steps();
  const double dt = noise.dt();
  const Vector sg = spec.space.semigroup_factors(dt);
  const auto& coeffs = *spec.coeffs;

  IdentityCheckResult result;
  TrialRng rng(seed);
  std::vector<double> lhs_per_path(paths), rhs_per_path(paths);

  for (int trial = 0; trial < trials; ++trial) {
    // t on the grid (strictly before T so the integral is nonempty),
    // eta Gaussian in state space, psi piecewise-constant unit fields.
    const int k0 = rng.uniform_index(steps);
    const Vector eta = rng.normal_vector(n);
    const Matrix psi1 = rng.unit_field(n, steps, dt);
    const Matrix psi2 = rng.unit_field(n * m, steps, dt);

    parallel_for(par, paths, [&](int lo, int hi) {
      for (int p = lo; p < hi; ++p) {
        Vector z = eta;
        double lhs_integral = 0.0;
        double rhs_integral = 0.0;
        for (int k = k0; k < steps; ++k) {
          const double t = k * dt;
          const Vector x = xbar.vec(p, k);
          const Vector u = ubar.vec(p, k);
          const auto q1 = adj.q1.at(p, k);
          // Integrands sample the continuation value: that is the P1(s)
          // the discrete telescoping pairs against, so the residual is
          // Monte Carlo noise rather than an O(dt) floor.
          const Vector p1 = adj.p1_post.vec(p, k);
          const Vector kernel = coeffs.a_x(t, x, u).transpose() * p1 +
                                coeffs.b_x_adjoint(t, x, u, q1) -
                                coeffs.f_x(t, x, u);
          lhs_integral += z.dot(kernel) * dt;
          const Eigen::Map<const Matrix> psi2k(psi2.col(k).data(), n, m);
          rhs_integral +=
              (psi1.col(k).dot(p1) + hs_inner(psi2k, q1)) * dt;
          z = sg.cwiseProduct(z + dt * psi1.col(k) +
                              psi2k * noise.increments(p, k));
        }
        lhs_per_path[p] =
            z.dot(-coeffs.g_x(xbar.vec(p, steps))) + lhs_integral;
        rhs_per_path[p] = eta.dot(adj.p1.vec(p, k0)) + rhs_integral;
      }
    });

    double lhs = 0.0, rhs = 0.0;
    for (int p = 0; p < paths; ++p) {
      lhs += lhs_per_path[p];
      rhs += rhs_per_path[p];
    }
    lhs /= paths;
    rhs /= paths;
    double var = 0.0;
    for (int p = 0; p < paths; ++p) {
      const double d = lhs_per_path[p] - rhs_per_path[p] - (lhs - rhs);
      var += d * d;
    }
    var = paths > 1 ? var / (paths - 1) : 0.0;
    const double denom = std::abs(lhs) + std::abs(rhs) + 1.0;
    result.residuals.push_back(std::abs(lhs - rhs) / denom);
    result.std_errors.push_back(std::sqrt(var / paths) / denom);
  }
  summarize(result);
  return result;
}

IdentityCheckResult check_relaxed_transposition_identity(
    const ProblemSpec& spec, const AdaptedField& xbar, const AdaptedField& ubar,
    const FirstAdjoint& adj, const SecondAdjoint& adj2,
    const NoiseEnsemble& noise, int trials, uint64_t seed,
    const ParallelConfig& par) {
  spec.validate();
  const int n = spec.state_dim();
  const int m = spec.noise_dim;
  const int paths = noise.paths();
  const int steps = noise.steps();
  const double dt = noise.dt();
  const Vector sg = spec.space.semigroup_factors(dt);
  const auto& coeffs = *spec.coeffs;

  IdentityCheckResult result;
  TrialRng rng(seed);
  std::vector<double> lhs_per_path(paths), rhs_per_path(paths);

  for (int trial = 0; trial < trials; ++trial) {
    const int k0 = rng.uniform_index(steps);
    const Vector xi1 = rng.normal_vector(n);
    const Vector xi2 = rng.normal_vector(n);
    const Matrix u1 = rng.unit_field(n, steps, dt);
    const Matrix u2 = rng.unit_field(n, steps, dt);
    const Matrix v1 = rng.unit_field(n * m, steps, dt);
    const Matrix v2 = rng.unit_field(n * m, steps, dt);

    parallel_for(par, paths, [&](int lo, int hi) {
      for (int p = lo; p < hi; ++p) {
        Vector z1 = xi1, z2 = xi2;
        double lhs_integral = 0.0;
        double rhs_integral = 0.0;
        for (int k = k0; k < steps; ++k) {
          const double t = k * dt;
          const Vector x = xbar.vec(p, k);
          const Vector u = ubar.vec(p, k);
          const Matrix ax = coeffs.a_x(t, x, u);
          const Eigen::Map<const Matrix> v1k(v1.col(k).data(), n, m);
          const Eigen::Map<const Matrix> v2k(v2.col(k).data(), n, m);
          const auto p2 = adj2.p2.at(p, k);
          const Matrix hxx = hamiltonian_xx(spec, t, x, u, adj.p1.vec(p, k),
                                            adj.q1.at(p, k));
          lhs_integral += z2.dot(hxx * z1) * dt;

          const Matrix bx_z1 = coeffs.b_x_apply(t, x, u, z1);
          const Matrix bx_z2 = coeffs.b_x_apply(t, x, u, z2);
          double rhs_term = u1.col(k).dot(p2.transpose() * z2);
          rhs_term += u2.col(k).dot(p2 * z1);
          rhs_term += hs_inner(p2 * bx_z1, v2k);
          rhs_term += hs_inner(p2 * v1k, bx_z2 + v2k);
          for (int j = 0; j < m; ++j) {
            const auto qj = adj2.q2_block(p, k, j);
            rhs_term += v1k.col(j).dot(qj.transpose() * z2);  // Qhat side
            rhs_term += (qj * z1).dot(v2k.col(j));            // Q side
          }
          rhs_integral += rhs_term * dt;

          const auto dw = noise.increments(p, k);
          const Vector z1_next = sg.cwiseProduct(
              z1 + dt * (ax * z1 + u1.col(k)) + (bx_z1 + v1k) * dw);
          const Vector z2_next = sg.cwiseProduct(
              z2 + dt * (ax * z2 + u2.col(k)) + (bx_z2 + v2k) * dw);
          z1 = z1_next;
          z2 = z2_next;
        }
        const Matrix gxx = coeffs.g_xx(xbar.vec(p, steps));
        lhs_per_path[p] = z2.dot(-gxx * z1) + lhs_integral;
        rhs_per_path[p] = xi2.dot(adj2.p2.at(p, k0) * xi1) + rhs_integral;
      }
    });

    double lhs = 0.0, rhs = 0.0;
    for (int p = 0; p < paths; ++p) {
      lhs += lhs_per_path[p];
      rhs += rhs_per_path[p];
    }
    lhs /= paths;
    rhs /= paths;
    double var = 0.0;
    for (int p = 0; p < paths; ++p) {
      const double d = lhs_per_path[p] - rhs_per_path[p] - (lhs - rhs);
      var += d * d;
    }
    var = paths > 1 ? var / (paths - 1) : 0.0;
    const double denom = std::abs(lhs) + std::abs(rhs) + 1.0;
    result.residuals.push_back(std::abs(lhs - rhs) / denom);
    result.std_errors.push_back(std::sqrt(var / paths) / denom);
  }
  summarize(result);
  return result;
}

}  // namespace socv
