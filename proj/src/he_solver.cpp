#include "higgs/he_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "higgs/parallel.hpp"

namespace higgs::he_solver {

double w_star(double theta, double s) {
  if (!(s > 0.0)) throw std::domain_error("w_star: s must be > 0");
  return std::log(s * sinch(theta * s));
}

double w_star_dtheta(double theta, double s) {
  // d/dtheta log(sinh(theta s)/theta) = (x coth x - 1)/theta, x = theta s.
  const double x = theta * s;
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return theta == 0.0 ? 0.0 : (x2 / 3.0 - x2 * x2 / 45.0) / theta;
  }
  return (xcoth(x) - 1.0) / theta;
}

void SolverConfig::validate() const {
  if (max_iterations < 1) throw std::invalid_argument("SolverConfig: need at least one iteration");
  if (!(tolerance > 0.0)) throw std::invalid_argument("SolverConfig: tolerance must be > 0");
  if (max_halvings < 0) throw std::invalid_argument("SolverConfig: max_halvings must be >= 0");
  if (fd_order != 2) throw std::invalid_argument("SolverConfig: only fd_order = 2 is implemented");
  if (!(cg_tolerance > 0.0)) throw std::invalid_argument("SolverConfig: cg_tolerance must be > 0");
}

std::vector<double> reduced_residual(const RadialField& f) {
  const std::size_t n = f.grid.n;
  if (f.w.size() != n) throw std::invalid_argument("reduced_residual: field/grid mismatch");
  if (n < 3) throw std::invalid_argument("reduced_residual: need interior nodes");
  const double h = f.grid.ds();
  std::vector<double> r(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i)
    r[i] = (f.w[i + 1] - 2.0 * f.w[i] + f.w[i - 1]) / (h * h) + std::exp(-2.0 * f.w[i]);
  return r;
}

std::vector<double> reduced_residual(const AnnulusField& f) {
  const AnnulusGrid& g = f.grid;
  if (!g.periodic) throw std::invalid_argument("reduced_residual: annulus grid must be periodic");
  if (f.w.size() != g.size()) throw std::invalid_argument("reduced_residual: field/grid mismatch");
  const double hs = g.ds(), ha = g.dangle();
  std::vector<double> r(g.size(), 0.0);
  for (std::size_t i = 1; i + 1 < g.ns; ++i) {
    for (std::size_t j = 0; j < g.n_angle; ++j) {
      const std::size_t jp = (j + 1) % g.n_angle, jm = (j + g.n_angle - 1) % g.n_angle;
      const double lap =
          (f.w[g.at(i + 1, j)] - 2.0 * f.w[g.at(i, j)] + f.w[g.at(i - 1, j)]) / (hs * hs) +
          (f.w[g.at(i, jp)] - 2.0 * f.w[g.at(i, j)] + f.w[g.at(i, jm)]) / (ha * ha);
      r[g.at(i, j)] = lap + std::exp(-2.0 * f.w[g.at(i, j)]);
    }
  }
  return r;
}

namespace {

double sup_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Tridiagonal solve (Thomas) for J delta = rhs on the interior nodes,
// J = D2 - 2 e^{-2w}.  J is negative definite, so pivots stay away from 0.
bool solve_tridiagonal(double h, const std::vector<double>& w, const std::vector<double>& rhs,
                       std::vector<double>& delta) {
  const std::size_t m = rhs.size();
  const double off = 1.0 / (h * h);
  std::vector<double> cp(m, 0.0), dp(m, 0.0);
  double piv = -2.0 / (h * h) - 2.0 * std::exp(-2.0 * w[1]);
  if (std::abs(piv) < 1e-300) return false;
  cp[0] = off / piv;
  dp[0] = rhs[0] / piv;
  for (std::size_t i = 1; i < m; ++i) {
    const double di = -2.0 / (h * h) - 2.0 * std::exp(-2.0 * w[i + 1]);
    piv = di - off * cp[i - 1];
    if (std::abs(piv) < 1e-300) return false;
    if (i + 1 < m) cp[i] = off / piv;
    dp[i] = (rhs[i] - off * dp[i - 1]) / piv;
  }
  delta.assign(m, 0.0);
  delta[m - 1] = dp[m - 1];
  for (std::size_t i = m - 1; i-- > 0;) delta[i] = dp[i] - cp[i] * delta[i + 1];
  return true;
}

}  // namespace

RadialField solve_radial_bvp(double theta, const RadialGrid& grid, const SolverConfig& config,
                             SolveReport* report, const std::vector<double>* initial_guess,
                             const std::optional<std::pair<double, double>>& dirichlet) {
  config.validate();
  if (!(theta >= 0.0) || !(theta < 1.0)) throw std::domain_error("solve_radial_bvp: theta in [0,1)");
  if (grid.n < 4) throw std::invalid_argument("solve_radial_bvp: grid too coarse");

  const std::size_t n = grid.n;
  RadialField f{grid, std::vector<double>(n, 0.0)};
  const double wa = dirichlet ? dirichlet->first : w_star(theta, grid.s_min);
  const double wb = dirichlet ? dirichlet->second : w_star(theta, grid.s_max);
  if (initial_guess) {
    if (initial_guess->size() != n)
      throw std::invalid_argument("solve_radial_bvp: initial guess size mismatch");
    f.w = *initial_guess;
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const double lam = (grid.s(i) - grid.s_min) / (grid.s_max - grid.s_min);
      f.w[i] = (1.0 - lam) * wa + lam * wb;
    }
  }
  f.w.front() = wa;
  f.w.back() = wb;

  SolveReport rep;
  std::vector<double> res = reduced_residual(f);
  double rnorm = sup_abs(res);
  rep.residual_history.push_back(rnorm);

  const double wscale = std::max({1.0, std::abs(wa), std::abs(wb)});
  const double floor = 16.0 * 1.1e-16 * wscale / (grid.ds() * grid.ds());
  const double tol = std::max(config.tolerance, floor);
  rep.tolerance_used = tol;

  for (std::size_t it = 0; it < config.max_iterations && rnorm > tol; ++it) {
    std::vector<double> rhs(n - 2);
    for (std::size_t i = 0; i < n - 2; ++i) rhs[i] = -res[i + 1];
    std::vector<double> delta;
    if (!solve_tridiagonal(grid.ds(), f.w, rhs, delta)) {
      rep.failure = "Jacobian singular in tridiagonal elimination";
      break;
    }
    // backtracking on the residual sup-norm
    double lam = 1.0;
    RadialField trial = f;
    double trial_norm = rnorm;
    int halvings = 0;
    for (; halvings <= config.max_halvings; ++halvings) {
      for (std::size_t i = 0; i < n - 2; ++i) trial.w[i + 1] = f.w[i + 1] + lam * delta[i];
      std::vector<double> tres = reduced_residual(trial);
      trial_norm = sup_abs(tres);
      if (trial_norm <= rnorm) { res = std::move(tres); break; }
      lam *= 0.5;
    }
    if (halvings > config.max_halvings) {
      rep.failure = "damping exhausted without residual decrease";
      break;
    }
    f.w = trial.w;
    rnorm = trial_norm;
    rep.residual_history.push_back(rnorm);
    rep.iterations = it + 1;
  }
  rep.final_residual = rnorm;
  rep.converged = rnorm <= tol;
  if (rep.converged && !dirichlet) {
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(f.w[i] - w_star(theta, grid.s(i))));
    rep.sup_error_vs_oracle = err;
  }
  if (report) *report = rep;
  if (!rep.converged && !report)
    throw std::runtime_error("solve_radial_bvp: no convergence: " +
                             (rep.failure.empty() ? "max iterations reached" : rep.failure));
  return f;
}

namespace {

// Matvec for the (positive definite) negated annulus Jacobian
//   A x = -Lap x + 2 e^{-2w} x
// on interior rows, Dirichlet at the s-ends, periodic angle.  A single solve
// is sequential and deterministic; parallelism lives one level up, across
// independent family members.
void apply_negated_jacobian(const AnnulusGrid& g, const std::vector<double>& w,
                            const std::vector<double>& x, std::vector<double>& y) {
  const std::size_t na = g.n_angle, rows = g.ns - 2;
  const double hs2 = g.ds() * g.ds(), ha2 = g.dangle() * g.dangle();
  for (std::size_t k = 0; k < rows; ++k) {
    const std::size_t i = k + 1;
    for (std::size_t j = 0; j < na; ++j) {
      const std::size_t jp = (j + 1) % na, jm = (j + na - 1) % na;
      const double up = (i + 1 <= g.ns - 2) ? x[(k + 1) * na + j] : 0.0;
      const double dn = (i >= 2) ? x[(k - 1) * na + j] : 0.0;
      const double lap = (up - 2.0 * x[k * na + j] + dn) / hs2 +
                         (x[k * na + jp] - 2.0 * x[k * na + j] + x[k * na + jm]) / ha2;
      y[k * na + j] = -lap + 2.0 * std::exp(-2.0 * w[g.at(i, j)]) * x[k * na + j];
    }
  }
}

bool conjugate_gradient(const AnnulusGrid& g, const std::vector<double>& w,
                        const std::vector<double>& rhs, std::vector<double>& x,
                        double tol, std::size_t max_it) {
  const std::size_t n = rhs.size();
  x.assign(n, 0.0);
  std::vector<double> r = rhs, p = rhs, ap(n, 0.0);
  // The matvec carries row-sized work items and parallelizes; the axpy/dot
  // updates are too fine-grained to win anything, so they stay serial.  The
  // serial block sum is arithmetic-identical to the parallel one, keeping the
  // solve bit-identical across thread counts.
  auto dot = [&](const std::vector<double>& a, const std::vector<double>& b) {
    return par::block_sum_serial(n, [&](std::size_t i) { return a[i] * b[i]; });
  };
  double rr = dot(r, r);
  const double rhs_norm = std::sqrt(rr);
  if (rhs_norm == 0.0) return true;
  for (std::size_t it = 0; it < max_it; ++it) {
    apply_negated_jacobian(g, w, p, ap);
    const double pap = dot(p, ap);
    if (!(pap > 0.0)) return false;  // loss of positive definiteness
    const double alpha = rr / pap;
    for (std::size_t i = 0; i < n; ++i) x[i] += alpha * p[i];
    for (std::size_t i = 0; i < n; ++i) r[i] -= alpha * ap[i];
    const double rr_new = dot(r, r);
    if (std::sqrt(rr_new) <= tol * rhs_norm) return true;
    const double beta = rr_new / rr;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    rr = rr_new;
  }
  return false;
}

}  // namespace

AnnulusField solve_annulus(double theta, const AnnulusGrid& grid, const SolverConfig& config,
                           SolveReport* report,
                           const std::function<double(double)>& boundary_perturbation,
                           const std::vector<double>* initial_guess) {
  config.validate();
  if (!(theta >= 0.0) || !(theta < 1.0)) throw std::domain_error("solve_annulus: theta in [0,1)");
  if (!grid.periodic) throw std::invalid_argument("solve_annulus: grid must be periodic");
  if (grid.ns < 4) throw std::invalid_argument("solve_annulus: grid too coarse");

  AnnulusField f{grid, std::vector<double>(grid.size(), 0.0)};
  const double wa = w_star(theta, grid.s_min), wb = w_star(theta, grid.s_max);
  for (std::size_t j = 0; j < grid.n_angle; ++j) {
    const double pert = boundary_perturbation ? boundary_perturbation(grid.angle(j)) : 0.0;
    f.w[grid.at(0, j)] = wa + pert;
    f.w[grid.at(grid.ns - 1, j)] = wb + pert;
  }
  if (initial_guess) {
    if (initial_guess->size() != grid.size())
      throw std::invalid_argument("solve_annulus: initial guess size mismatch");
    for (std::size_t i = 1; i + 1 < grid.ns; ++i)
      for (std::size_t j = 0; j < grid.n_angle; ++j)
        f.w[grid.at(i, j)] = (*initial_guess)[grid.at(i, j)];
  } else {
    for (std::size_t i = 1; i + 1 < grid.ns; ++i) {
      const double lam = (grid.s(i) - grid.s_min) / (grid.s_max - grid.s_min);
      for (std::size_t j = 0; j < grid.n_angle; ++j)
        f.w[grid.at(i, j)] = (1.0 - lam) * f.w[grid.at(0, j)] + lam * f.w[grid.at(grid.ns - 1, j)];
    }
  }

  SolveReport rep;
  std::vector<double> res = reduced_residual(f);
  double rnorm = sup_abs(res);
  rep.residual_history.push_back(rnorm);
  const std::size_t m = (grid.ns - 2) * grid.n_angle;

  const double wscale = std::max({1.0, std::abs(wa), std::abs(wb)});
  const double floor = 16.0 * 1.1e-16 * wscale *
                       (1.0 / (grid.ds() * grid.ds()) + 1.0 / (grid.dangle() * grid.dangle()));
  const double tol = std::max(config.tolerance, floor);
  rep.tolerance_used = tol;

  for (std::size_t it = 0; it < config.max_iterations && rnorm > tol; ++it) {
    // Solve (-J) delta = res on the interior, then w += -delta... J delta = -res.
    std::vector<double> rhs(m);
    for (std::size_t k = 0; k < grid.ns - 2; ++k)
      for (std::size_t j = 0; j < grid.n_angle; ++j)
        rhs[k * grid.n_angle + j] = res[grid.at(k + 1, j)];
    std::vector<double> delta;
    if (!conjugate_gradient(grid, f.w, rhs, delta, config.cg_tolerance, config.cg_max_iterations)) {
      rep.failure = "conjugate gradient failed (Jacobian not positive definite or max iterations)";
      break;
    }
    double lam = 1.0;
    AnnulusField trial = f;
    double trial_norm = rnorm;
    int halvings = 0;
    for (; halvings <= config.max_halvings; ++halvings) {
      for (std::size_t k = 0; k < grid.ns - 2; ++k)
        for (std::size_t j = 0; j < grid.n_angle; ++j)
          trial.w[grid.at(k + 1, j)] = f.w[grid.at(k + 1, j)] + lam * delta[k * grid.n_angle + j];
      std::vector<double> tres = reduced_residual(trial);
      trial_norm = sup_abs(tres);
      if (trial_norm <= rnorm) { res = std::move(tres); break; }
      lam *= 0.5;
    }
    if (halvings > config.max_halvings) {
      rep.failure = "damping exhausted without residual decrease";
      break;
    }
    f.w = trial.w;
    rnorm = trial_norm;
    rep.residual_history.push_back(rnorm);
    rep.iterations = it + 1;
  }
  rep.final_residual = rnorm;
  rep.converged = rnorm <= tol;
  if (rep.converged && !boundary_perturbation) {
    double err = 0.0;
    for (std::size_t i = 0; i < grid.ns; ++i)
      for (std::size_t j = 0; j < grid.n_angle; ++j)
        err = std::max(err, std::abs(f.w[grid.at(i, j)] - w_star(theta, grid.s(i))));
    rep.sup_error_vs_oracle = err;
  }
  if (report) *report = rep;
  if (!rep.converged && !report)
    throw std::runtime_error("solve_annulus: no convergence: " +
                             (rep.failure.empty() ? "max iterations reached" : rep.failure));
  return f;
}

double max_angular_fourier_amplitude(const AnnulusField& f) {
  const AnnulusGrid& g = f.grid;
  const std::size_t na = g.n_angle;
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < g.ns; ++i) {
    for (std::size_t n = 1; n <= na / 2; ++n) {
      double re = 0.0, im = 0.0;
      for (std::size_t j = 0; j < na; ++j) {
        const double ang = static_cast<double>(n) * g.angle(j);
        re += f.w[g.at(i, j)] * std::cos(ang);
        im -= f.w[g.at(i, j)] * std::sin(ang);
      }
      const double amp = std::hypot(re, im) / static_cast<double>(na);
      worst = std::max(worst, amp);
    }
  }
  return worst;
}

double cone_conformal_factor(double theta, double r) {
  if (!(r > 0.0) || !(r < 1.0)) throw std::domain_error("cone_conformal_factor: r in (0,1)");
  if (!(theta >= 0.0) || !(theta < 1.0)) throw std::domain_error("cone_conformal_factor: theta in [0,1)");
  const double logr = std::log(r);
  if (theta == 0.0) return 1.0 / (r * r * logr * logr);
  // 4 theta^2 r^{2 theta - 2} / (1 - r^{2 theta})^2, with 1 - r^{2 theta}
  // evaluated as -expm1(2 theta log r) to keep small-theta accuracy.
  const double one_minus = -std::expm1(2.0 * theta * logr);
  return 4.0 * theta * theta * std::exp((2.0 * theta - 2.0) * logr) / (one_minus * one_minus);
}

ConformalFactorField ConformalFactorField::cone(double theta, const AnnulusGrid& grid) {
  ConformalFactorField out{grid, std::vector<double>(grid.size(), 0.0)};
  for (std::size_t i = 0; i < grid.ns; ++i) {
    const double v = cone_conformal_factor(theta, grid.r(i));
    for (std::size_t j = 0; j < grid.n_angle; ++j) out.factor[grid.at(i, j)] = v;
  }
  return out;
}

ConformalFactorField ConformalFactorField::constant(double value, const AnnulusGrid& grid) {
  if (!(value > 0.0)) throw std::domain_error("ConformalFactorField: factor must be positive");
  return {grid, std::vector<double>(grid.size(), value)};
}

AnnulusField gauss_curvature(const ConformalFactorField& factor) {
  const AnnulusGrid& g = factor.grid;
  if (!g.periodic) throw std::invalid_argument("gauss_curvature: grid must be periodic");
  if (g.ns < 3) throw std::invalid_argument("gauss_curvature: empty interior");
  for (double v : factor.factor)
    if (!(v > 0.0)) throw std::domain_error("gauss_curvature: non-positive factor rejected");

  // K = -e^{-2 lambda} Delta_flat lambda, lambda = log(factor)/2; in (s, angle)
  // Delta_flat = (d_ss + d_aa) / r^2.
  std::vector<double> lam(g.size());
  for (std::size_t n = 0; n < g.size(); ++n) lam[n] = 0.5 * std::log(factor.factor[n]);

  AnnulusField K{g, std::vector<double>(g.size(), 0.0)};
  const double hs2 = g.ds() * g.ds(), ha2 = g.dangle() * g.dangle();
  par::parallel_for(g.ns - 2, [&](std::size_t k) {
    const std::size_t i = k + 1;
    const double r = g.r(i);
    for (std::size_t j = 0; j < g.n_angle; ++j) {
      const std::size_t jp = (j + 1) % g.n_angle, jm = (j + g.n_angle - 1) % g.n_angle;
      const double lap =
          (lam[g.at(i + 1, j)] - 2.0 * lam[g.at(i, j)] + lam[g.at(i - 1, j)]) / hs2 +
          (lam[g.at(i, jp)] - 2.0 * lam[g.at(i, j)] + lam[g.at(i, jm)]) / ha2;
      K.w[g.at(i, j)] = -lap / (r * r * factor.factor[g.at(i, j)]);
    }
  });
  // boundary rows carry the adjacent interior value (no one-sided stencil)
  for (std::size_t j = 0; j < g.n_angle; ++j) {
    K.w[g.at(0, j)] = K.w[g.at(1, j)];
    K.w[g.at(g.ns - 1, j)] = K.w[g.at(g.ns - 2, j)];
  }
  return K;
}

DiagonalMetricField DiagonalMetricField::cone(double theta, const AnnulusGrid& grid) {
  DiagonalMetricField out{grid, std::vector<double>(grid.size()), std::vector<double>(grid.size())};
  for (std::size_t i = 0; i < grid.ns; ++i) {
    const double w = w_star(theta, grid.s(i));
    for (std::size_t j = 0; j < grid.n_angle; ++j) {
      out.w1[grid.at(i, j)] = w;
      out.w2[grid.at(i, j)] = -w;
    }
  }
  return out;
}

DiagonalMetricField DiagonalMetricField::power_model(double theta, const AnnulusGrid& grid) {
  DiagonalMetricField out{grid, std::vector<double>(grid.size()), std::vector<double>(grid.size())};
  for (std::size_t i = 0; i < grid.ns; ++i)
    for (std::size_t j = 0; j < grid.n_angle; ++j) {
      out.w1[grid.at(i, j)] = theta * grid.s(i);
      out.w2[grid.at(i, j)] = -theta * grid.s(i);
    }
  return out;
}

GeneralResidual he_residual_general(const DiagonalMetricField& h,
                                    const std::vector<double>* higgs_coupling) {
  const AnnulusGrid& g = h.grid;
  if (!g.periodic) throw std::invalid_argument("he_residual_general: grid must be periodic");
  if (h.w1.size() != g.size() || h.w2.size() != g.size())
    throw std::invalid_argument("he_residual_general: field/grid mismatch");
  if (higgs_coupling && higgs_coupling->size() != g.size())
    throw std::invalid_argument("he_residual_general: coupling/grid mismatch");

  GeneralResidual out;
  out.r1.assign(g.size(), 0.0);
  out.r2.assign(g.size(), 0.0);
  const double hs2 = g.ds() * g.ds(), ha2 = g.dangle() * g.dangle();
  for (std::size_t i = 1; i + 1 < g.ns; ++i) {
    for (std::size_t j = 0; j < g.n_angle; ++j) {
      const std::size_t jp = (j + 1) % g.n_angle, jm = (j + g.n_angle - 1) % g.n_angle;
      const std::size_t n = g.at(i, j);
      const double q = higgs_coupling ? (*higgs_coupling)[n] : 1.0;
      const double bracket = q * std::exp(h.w2[n] - h.w1[n]);
      const double lap1 = (h.w1[g.at(i + 1, j)] - 2.0 * h.w1[n] + h.w1[g.at(i - 1, j)]) / hs2 +
                          (h.w1[g.at(i, jp)] - 2.0 * h.w1[n] + h.w1[g.at(i, jm)]) / ha2;
      const double lap2 = (h.w2[g.at(i + 1, j)] - 2.0 * h.w2[n] + h.w2[g.at(i - 1, j)]) / hs2 +
                          (h.w2[g.at(i, jp)] - 2.0 * h.w2[n] + h.w2[g.at(i, jm)]) / ha2;
      out.r1[n] = lap1 + bracket;
      out.r2[n] = lap2 - bracket;
      out.max_abs = std::max(out.max_abs, std::max(std::abs(out.r1[n]), std::abs(out.r2[n])));
    }
  }

  // Membership evidence: weighted norm of the interior R1 samples at the
  // default (delta, p) = (0.25, 3).
  using weighted_norms::CylinderGrid;
  using weighted_norms::SampledSection;
  CylinderGrid cg;
  cg.s_samples.assign(g.ns - 2, 0.0);
  for (std::size_t i = 1; i + 1 < g.ns; ++i) cg.s_samples[i - 1] = g.s(i);
  cg.n_angle = g.n_angle;
  cg.delta = 0.25;
  cg.p = 3.0;
  SampledSection sec;
  sec.grid = cg;
  sec.shape = weighted_norms::SectionShape::scalar;
  sec.values.resize(cg.size());
  for (std::size_t i = 1; i + 1 < g.ns; ++i)
    for (std::size_t j = 0; j < g.n_angle; ++j)
      sec.values[cg.at(i - 1, j)] = out.r1[g.at(i, j)];
  out.weighted_norm_r1 = weighted_norms::weighted_lp_norm(sec, cg);
  return out;
}

}  // namespace higgs::he_solver
