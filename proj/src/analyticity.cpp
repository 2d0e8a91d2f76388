#include "higgs/analyticity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "higgs/parallel.hpp"

namespace higgs::analyticity {

void FamilyConfig::validate() const {
  if (probes.empty()) throw std::invalid_argument("FamilyConfig: need at least one probe");
  for (double p : probes)
    if (!(p >= grid.s_min) || !(p <= grid.s_max))
      throw std::invalid_argument("FamilyConfig: probe outside the solver grid");
  solver.validate();
}

void FamilyTable::validate() const {
  if (thetas.size() != values.size()) throw std::invalid_argument("FamilyTable: ragged table");
  for (std::size_t k = 1; k < thetas.size(); ++k)
    if (!(thetas[k] > thetas[k - 1]))
      throw std::invalid_argument("FamilyTable: theta samples must strictly increase");
  for (const auto& row : values)
    if (row.size() != probes.size()) throw std::invalid_argument("FamilyTable: ragged row");
}

namespace {

// Cubic Lagrange interpolation on the uniform solver grid.
double interpolate(const he_solver::RadialField& f, double s0) {
  const RadialGrid& g = f.grid;
  const double h = g.ds();
  double pos = (s0 - g.s_min) / h;
  long i1 = static_cast<long>(std::floor(pos));
  i1 = std::clamp<long>(i1 - 1, 0, static_cast<long>(g.n) - 4);
  const std::size_t base = static_cast<std::size_t>(i1);
  double result = 0.0;
  for (std::size_t a = 0; a < 4; ++a) {
    double lk = 1.0;
    const double xa = g.s(base + a);
    for (std::size_t b = 0; b < 4; ++b) {
      if (a == b) continue;
      lk *= (s0 - g.s(base + b)) / (xa - g.s(base + b));
    }
    result += lk * f.w[base + a];
  }
  return result;
}

}  // namespace

FamilyTable solve_family(const std::vector<double>& theta_list, const FamilyConfig& config) {
  config.validate();
  for (double theta : theta_list)
    if (!(theta >= 0.0) || !(theta < 1.0))
      throw std::domain_error("solve_family: theta outside [0,1)");

  FamilyTable table;
  table.mode = config.mode;
  table.probes = config.probes;
  table.thetas = theta_list;
  table.values.assign(theta_list.size(), {});

  if (config.mode == FamilyMode::closed_form) {
    for (std::size_t k = 0; k < theta_list.size(); ++k) {
      std::vector<double> row(config.probes.size(), 0.0);
      for (std::size_t q = 0; q < config.probes.size(); ++q)
        row[q] = he_solver::w_star(theta_list[k], config.probes[q]);
      table.values[k] = std::move(row);
    }
  } else {
    // independent solves, one per family member; results keyed by index
    std::vector<std::string> failures(theta_list.size());
    par::parallel_for(theta_list.size(), [&](std::size_t k) {
      try {
        he_solver::SolveReport rep;
        const he_solver::RadialField f =
            he_solver::solve_radial_bvp(theta_list[k], config.grid, config.solver, &rep);
        if (!rep.converged) {
          failures[k] = "no convergence";
          return;
        }
        std::vector<double> row(config.probes.size(), 0.0);
        for (std::size_t q = 0; q < config.probes.size(); ++q)
          row[q] = interpolate(f, config.probes[q]);
        table.values[k] = std::move(row);
      } catch (const std::exception& e) {
        failures[k] = e.what();
      }
    });
    for (std::size_t k = 0; k < theta_list.size(); ++k)
      if (!failures[k].empty())
        throw std::runtime_error("solve_family: solve failed at theta = " +
                                 std::to_string(theta_list[k]) + ": " + failures[k]);
  }
  table.validate();
  return table;
}

namespace {

// Legendre values P_0..P_d at x in [-1, 1].
void legendre_row(double x, int d, std::vector<double>& row) {
  row.assign(static_cast<std::size_t>(d) + 1, 0.0);
  row[0] = 1.0;
  if (d >= 1) row[1] = x;
  for (int n = 1; n < d; ++n)
    row[n + 1] = ((2.0 * n + 1.0) * x * row[n] - n * row[n - 1]) / (n + 1.0);
}

// Normal-equations LSQ in the Legendre basis; the basis keeps the Gram matrix
// well conditioned on [-1,1] up to the degrees used here.
std::vector<double> legendre_fit(const std::vector<double>& x, const std::vector<double>& y, int d) {
  const std::size_t n = x.size();
  const std::size_t m = static_cast<std::size_t>(d) + 1;
  std::vector<double> gram(m * m, 0.0), rhs(m, 0.0), row;
  for (std::size_t i = 0; i < n; ++i) {
    legendre_row(x[i], d, row);
    for (std::size_t a = 0; a < m; ++a) {
      rhs[a] += row[a] * y[i];
      for (std::size_t b = 0; b < m; ++b) gram[a * m + b] += row[a] * row[b];
    }
  }
  // Gaussian elimination with partial pivoting.
  std::vector<double> c = rhs;
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < m; ++r)
      if (std::abs(gram[r * m + col]) > std::abs(gram[piv * m + col])) piv = r;
    if (std::abs(gram[piv * m + col]) < 1e-300)
      throw std::runtime_error("legendre_fit: singular normal equations");
    if (piv != col) {
      for (std::size_t cc = 0; cc < m; ++cc) std::swap(gram[piv * m + cc], gram[col * m + cc]);
      std::swap(c[piv], c[col]);
    }
    for (std::size_t r = col + 1; r < m; ++r) {
      const double f = gram[r * m + col] / gram[col * m + col];
      for (std::size_t cc = col; cc < m; ++cc) gram[r * m + cc] -= f * gram[col * m + cc];
      c[r] -= f * c[col];
    }
  }
  for (std::size_t col = m; col-- > 0;) {
    for (std::size_t cc = col + 1; cc < m; ++cc) c[col] -= gram[col * m + cc] * c[cc];
    c[col] /= gram[col * m + col];
  }
  return c;
}

}  // namespace

FitReport analyticity_fit(const FamilyTable& table, std::size_t probe_index, double window_lo,
                          double window_hi, int d_max, double floor) {
  table.validate();
  if (probe_index >= table.probes.size())
    throw std::invalid_argument("analyticity_fit: probe index out of range");
  if (!(window_hi > window_lo)) throw std::invalid_argument("analyticity_fit: empty window");

  std::vector<double> x, y;
  for (std::size_t k = 0; k < table.thetas.size(); ++k) {
    const double t = table.thetas[k];
    if (t < window_lo || t > window_hi) continue;
    x.push_back(2.0 * (t - window_lo) / (window_hi - window_lo) - 1.0);
    y.push_back(table.value(k, probe_index));
  }
  if (x.size() < 8)
    throw std::invalid_argument("analyticity_fit: need at least 8 theta samples in the window");

  FitReport rep;
  rep.floor = floor;
  std::vector<double> row;
  for (int d = 1; d <= d_max; ++d) {
    const std::vector<double> c = legendre_fit(x, y, d);
    double maxres = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      legendre_row(x[i], d, row);
      double fit = 0.0;
      for (std::size_t a = 0; a < c.size(); ++a) fit += c[a] * row[a];
      maxres = std::max(maxres, std::abs(fit - y[i]));
    }
    rep.degrees.push_back(d);
    rep.residuals.push_back(maxres);
    if (d == d_max) rep.final_coefficients = c;
  }

  // Certification: per-degree decay ratios measured over two-degree steps,
  // sqrt(res[d+2]/res[d]), which is robust against even/odd parity stalls of
  // the max-residual sequence; a run of >= 4 consecutive ratios < 0.5 above
  // the numerical floor certifies geometric decay.
  int run = 0, best_run = 0;
  double ratio_product = 1.0;
  int ratio_count = 0;
  for (std::size_t i = 0; i + 2 < rep.residuals.size(); ++i) {
    if (rep.residuals[i] <= floor) break;
    const double ratio = std::sqrt(rep.residuals[i + 2] / rep.residuals[i]);
    if (ratio < 0.5) {
      ++run;
      ratio_product *= ratio;
      ++ratio_count;
    } else {
      run = 0;
    }
    best_run = std::max(best_run, run);
    if (rep.residuals[i + 2] <= floor) break;
  }
  rep.certified = best_run >= 4;
  rep.decay_ratio = ratio_count > 0 ? std::pow(ratio_product, 1.0 / ratio_count) : 1.0;
  return rep;
}

std::vector<DerivativeEstimate> finite_difference_derivative(const FamilyTable& table,
                                                             std::size_t probe_index, int order) {
  table.validate();
  if (order < 1 || order > 3)
    throw std::invalid_argument("finite_difference_derivative: order must be in {1,2,3}");
  const std::size_t n = table.thetas.size();
  if (n < 9) throw std::invalid_argument("finite_difference_derivative: need at least 9 samples");
  const double h = table.thetas[1] - table.thetas[0];
  for (std::size_t k = 1; k < n; ++k)
    if (std::abs(table.thetas[k] - table.thetas[k - 1] - h) > 1e-9 * std::max(1.0, std::abs(h)))
      throw std::invalid_argument("finite_difference_derivative: non-uniform theta spacing rejected");

  auto f = [&](std::size_t k) { return table.value(k, probe_index); };
  auto stencil = [&](std::size_t k, double step_mult) -> double {
    const std::size_t m = static_cast<std::size_t>(step_mult);
    const double hh = h * step_mult;
    switch (order) {
      case 1: return (f(k + m) - f(k - m)) / (2.0 * hh);
      case 2: return (f(k + m) - 2.0 * f(k) + f(k - m)) / (hh * hh);
      default:
        return (f(k + 2 * m) - 2.0 * f(k + m) + 2.0 * f(k - m) - f(k - 2 * m)) / (2.0 * hh * hh * hh);
    }
  };
  const std::size_t margin = (order == 3) ? 4 : 2;

  std::vector<DerivativeEstimate> out;
  for (std::size_t k = margin; k + margin < n; ++k) {
    const double d1 = stencil(k, 1.0);
    const double d2 = stencil(k, 2.0);
    DerivativeEstimate e;
    e.theta = table.thetas[k];
    e.value = (4.0 * d1 - d2) / 3.0;     // Richardson for O(h^2) stencils
    e.error_bar = std::abs(d1 - d2) / 3.0 + 1e-14;
    out.push_back(e);
  }
  return out;
}

std::vector<MonodromyDistanceRow> monodromy_convergence(const std::vector<double>& theta_list,
                                                        double beta) {
  for (std::size_t k = 1; k < theta_list.size(); ++k)
    if (!(theta_list[k] < theta_list[k - 1]))
      throw std::invalid_argument("monodromy_convergence: theta list must descend");

  using local_model::FrameBasis;
  using local_model::LocalModelParams;
  const Mat2 limit = local_model::monodromy({0.0, beta}, FrameBasis::u_frame).m;
  const double sign = std::cos(kPi * beta);  // (-1)^beta for integer beta

  std::vector<MonodromyDistanceRow> rows;
  for (double theta : theta_list) {
    if (!(theta > 0.0) || !(theta < 1.0))
      throw std::domain_error("monodromy_convergence: theta must lie in (0,1)");
    const Mat2 m = local_model::monodromy({theta, beta}, FrameBasis::u_frame).m;
    MonodromyDistanceRow row;
    row.theta = theta;
    row.frobenius_to_limit = frobenius_distance(m, limit);
    row.trace_gap = std::abs(m.trace() - complexd(sign * 2.0 * std::cos(kPi * theta), 0.0));
    row.spectral_gap = std::abs(std::exp(complexd(0.0, kPi * theta)) - 1.0);
    rows.push_back(row);
  }
  return rows;
}

FamilyTable synthetic_table(const std::vector<double>& theta_list,
                            const std::function<double(double)>& f) {
  FamilyTable t;
  t.mode = FamilyMode::closed_form;
  t.probes = {0.0};
  t.thetas = theta_list;
  for (double th : theta_list) t.values.push_back({f(th)});
  t.validate();
  return t;
}

}  // namespace higgs::analyticity
