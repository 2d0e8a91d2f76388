#include "higgs/weighted_norms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "higgs/parallel.hpp"

namespace higgs::weighted_norms {

CylinderCoords cylinder_coords(double r) {
  if (!(r > 0.0) || !(r < 1.0)) throw std::domain_error("cylinder_coords: r must lie in (0,1)");
  CylinderCoords c;
  c.s = -std::log(r);
  c.in_model = c.s > 1.0;  // flag r >= 1/e, where t <= 0 leaves the cusp chart
  c.t = std::log(c.s);
  return c;
}

CylinderGrid CylinderGrid::uniform_s(double s0, double s1, std::size_t n, std::size_t n_angle,
                                     double delta, double p) {
  if (!(s0 > 0.0) || !(s1 > s0)) throw std::invalid_argument("CylinderGrid: need 0 < s0 < s1");
  if (n < 2) throw std::invalid_argument("CylinderGrid: need at least 2 s-samples");
  CylinderGrid g;
  g.s_samples.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    g.s_samples[i] = s0 + (s1 - s0) * static_cast<double>(i) / static_cast<double>(n - 1);
  g.n_angle = n_angle;
  g.delta = delta;
  g.p = p;
  g.validate();
  return g;
}

void CylinderGrid::validate() const {
  if (s_samples.size() < 2) throw std::invalid_argument("CylinderGrid: too few s-samples");
  if (!(s_samples.front() > 0.0)) throw std::invalid_argument("CylinderGrid: s_min must be > 0");
  for (std::size_t i = 1; i < s_samples.size(); ++i)
    if (!(s_samples[i] > s_samples[i - 1]))
      throw std::invalid_argument("CylinderGrid: s-samples must strictly increase");
  if (n_angle < 1) throw std::invalid_argument("CylinderGrid: need at least one angle sample");
  if (!(delta > 0.0)) throw std::invalid_argument("CylinderGrid: delta must be > 0");
  if (!(p > 1.0)) throw std::invalid_argument("CylinderGrid: p must be > 1");
}

double CylinderGrid::t(std::size_t i) const { return std::log(s_samples.at(i)); }

double CylinderGrid::angle(std::size_t j) const { return static_cast<double>(j) * dangle(); }

void SampledSection::validate() const {
  grid.validate();
  const std::size_t comps = shape == SectionShape::scalar ? 1 : 4;
  if (values.size() != comps * grid.size())
    throw std::invalid_argument("SampledSection: value array shape does not match grid");
  for (const complexd& v : values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw std::invalid_argument("SampledSection: non-finite sample rejected");
}

double SampledSection::abs_at(std::size_t node) const {
  if (shape == SectionShape::scalar) return std::abs(values[node]);
  return mat_at(node).frobenius();
}

Mat2 SampledSection::mat_at(std::size_t node) const {
  if (shape == SectionShape::scalar) return {values[node], 0.0, 0.0, values[node]};
  const std::size_t b = 4 * node;
  return {values[b], values[b + 1], values[b + 2], values[b + 3]};
}

SampledSection SampledSection::scalar_field(
    const CylinderGrid& g, const std::function<complexd(double, double)>& f) {
  SampledSection out;
  out.grid = g;
  out.shape = SectionShape::scalar;
  out.values.resize(g.size());
  for (std::size_t i = 0; i < g.ns(); ++i)
    for (std::size_t j = 0; j < g.n_angle; ++j)
      out.values[g.at(i, j)] = f(g.s_samples[i], g.angle(j));
  return out;
}

SampledSection SampledSection::endo_field(const CylinderGrid& g,
                                          const std::function<Mat2(double, double)>& f) {
  SampledSection out;
  out.grid = g;
  out.shape = SectionShape::endomorphism;
  out.values.resize(4 * g.size());
  for (std::size_t i = 0; i < g.ns(); ++i)
    for (std::size_t j = 0; j < g.n_angle; ++j) {
      const Mat2 m = f(g.s_samples[i], g.angle(j));
      const std::size_t b = 4 * g.at(i, j);
      out.values[b] = m.a; out.values[b + 1] = m.b;
      out.values[b + 2] = m.c; out.values[b + 3] = m.d;
    }
  return out;
}

namespace {

// Trapezoid weight in t for sample i (t-spacings are non-uniform when the
// grid is uniform in s).
double t_weight(const CylinderGrid& g, std::size_t i) {
  const std::size_t n = g.ns();
  if (i == 0) return 0.5 * (g.t(1) - g.t(0));
  if (i == n - 1) return 0.5 * (g.t(n - 1) - g.t(n - 2));
  return 0.5 * (g.t(i + 1) - g.t(i - 1));
}

double lp_norm_of(const CylinderGrid& grid, const std::function<double(std::size_t)>& abs_at) {
  const double total = par::block_sum(grid.size(), [&](std::size_t node) {
    const std::size_t i = node / grid.n_angle;
    const double w = t_weight(grid, i) * grid.dangle();
    const double amp = std::exp(grid.delta * grid.t(i)) * abs_at(node);
    return w * std::pow(amp, grid.p);
  });
  return std::pow(total, 1.0 / grid.p);
}

}  // namespace

double weighted_lp_norm(const SampledSection& f, const CylinderGrid& grid) {
  f.validate();
  if (f.grid.size() != grid.size())
    throw std::invalid_argument("weighted_lp_norm: section and grid disagree");
  return lp_norm_of(grid, [&](std::size_t node) { return f.abs_at(node); });
}

namespace {

// Central difference in s (one-sided at the ends) and in the periodic angle.
// Non-uniform-aware in s so uniform-t grids work unchanged.
struct Derivatives {
  std::vector<Mat2> d_s, d_angle;
};

Derivatives covariant_derivative(const SampledSection& f, const ConnectionField& conn) {
  const CylinderGrid& g = f.grid;
  const std::size_t ns = g.ns(), na = g.n_angle;
  Derivatives d;
  d.d_s.resize(g.size());
  d.d_angle.resize(g.size());
  const double ha = g.dangle();
  for (std::size_t i = 0; i < ns; ++i) {
    for (std::size_t j = 0; j < na; ++j) {
      const std::size_t node = g.at(i, j);
      Mat2 fs;
      if (i == 0)
        fs = (1.0 / (g.s_samples[1] - g.s_samples[0])) * (f.mat_at(g.at(1, j)) - f.mat_at(g.at(0, j)));
      else if (i == ns - 1)
        fs = (1.0 / (g.s_samples[ns - 1] - g.s_samples[ns - 2])) *
             (f.mat_at(g.at(ns - 1, j)) - f.mat_at(g.at(ns - 2, j)));
      else
        fs = (1.0 / (g.s_samples[i + 1] - g.s_samples[i - 1])) *
             (f.mat_at(g.at(i + 1, j)) - f.mat_at(g.at(i - 1, j)));
      Mat2 fa;
      if (na >= 3) {
        const std::size_t jp = (j + 1) % na, jm = (j + na - 1) % na;
        fa = (1.0 / (2.0 * ha)) * (f.mat_at(g.at(i, jp)) - f.mat_at(g.at(i, jm)));
      }
      if (!conn.a_s.empty()) {
        const Mat2& as = conn.a_s[node];
        const Mat2& aa = conn.a_angle[node];
        const Mat2 m = f.mat_at(node);
        fs = fs + (as * m - m * as);
        fa = fa + (aa * m - m * aa);
      }
      d.d_s[node] = fs;
      d.d_angle[node] = fa;
    }
  }
  return d;
}

}  // namespace

double weighted_sobolev_norm(const SampledSection& f, int k, const CylinderGrid& grid,
                             const ConnectionField& conn) {
  if (k < 0 || k > 2) throw std::invalid_argument("weighted_sobolev_norm: k must be in {0,1,2}");
  if (k >= 1 && grid.ns() < 3)
    throw std::invalid_argument("weighted_sobolev_norm: grid too coarse for first differences");
  if (k >= 2 && grid.ns() < 5)
    throw std::invalid_argument("weighted_sobolev_norm: grid too coarse for second differences");
  f.validate();

  double total = weighted_lp_norm(f, grid);
  if (k == 0) return total;

  // First-order term: |nabla f| in the complete cusp metric on the cylinder,
  // i.e. y * sqrt(|f_s|^2 + |f_angle|^2) with y = s.  Scalar sections ride
  // through the matrix path as f * id, whose Frobenius norm carries a sqrt(2).
  const double shape_scale = f.shape == SectionShape::scalar ? 1.0 / std::sqrt(2.0) : 1.0;
  const Derivatives d1 = covariant_derivative(f, conn);
  auto grad_abs = [&](std::size_t node) {
    const std::size_t i = node / grid.n_angle;
    const double y = grid.s_samples[i];
    const double gs = d1.d_s[node].frobenius();
    const double ga = d1.d_angle[node].frobenius();
    return shape_scale * y * std::sqrt(gs * gs + ga * ga);
  };
  total += lp_norm_of(grid, grad_abs);
  if (k == 1) return total;

  // Second-order proxy: iterate the componentwise covariant difference and
  // weight by y^2.
  SampledSection ds = f, da = f;
  ds.shape = SectionShape::endomorphism;
  da.shape = SectionShape::endomorphism;
  ds.values.assign(4 * grid.size(), 0.0);
  da.values.assign(4 * grid.size(), 0.0);
  for (std::size_t node = 0; node < grid.size(); ++node) {
    const Mat2 a = d1.d_s[node];
    const Mat2 b = d1.d_angle[node];
    ds.values[4 * node] = a.a; ds.values[4 * node + 1] = a.b;
    ds.values[4 * node + 2] = a.c; ds.values[4 * node + 3] = a.d;
    da.values[4 * node] = b.a; da.values[4 * node + 1] = b.b;
    da.values[4 * node + 2] = b.c; da.values[4 * node + 3] = b.d;
  }
  const Derivatives dss = covariant_derivative(ds, conn);
  const Derivatives daa = covariant_derivative(da, conn);
  auto hess_abs = [&](std::size_t node) {
    const std::size_t i = node / grid.n_angle;
    const double y = grid.s_samples[i];
    const double h1 = dss.d_s[node].frobenius();
    const double h2 = dss.d_angle[node].frobenius();
    const double h3 = daa.d_s[node].frobenius();
    const double h4 = daa.d_angle[node].frobenius();
    return shape_scale * y * y * std::sqrt(h1 * h1 + h2 * h2 + h3 * h3 + h4 * h4);
  };
  total += lp_norm_of(grid, hess_abs);
  return total;
}

double hat_cutoff(double t) {
  const double tau = std::clamp(t, 0.0, 1.0);
  return tau * tau * (3.0 - 2.0 * tau);
}

HatDecomposition membership_hat_space(const SampledSection& f, const CylinderGrid& grid) {
  f.validate();
  const std::size_t last = grid.ns() - 1;
  complexd c(0.0);
  for (std::size_t j = 0; j < grid.n_angle; ++j) {
    const Mat2 m = f.mat_at(grid.at(last, j));
    c += 0.5 * m.trace();  // identity component
  }
  c /= static_cast<double>(grid.n_angle);

  SampledSection rem = f;
  if (f.shape == SectionShape::scalar) {
    for (std::size_t i = 0; i < grid.ns(); ++i) {
      const complexd sub = c * hat_cutoff(grid.t(i));
      for (std::size_t j = 0; j < grid.n_angle; ++j) rem.values[grid.at(i, j)] -= sub;
    }
  } else {
    for (std::size_t i = 0; i < grid.ns(); ++i) {
      const complexd sub = c * hat_cutoff(grid.t(i));
      for (std::size_t j = 0; j < grid.n_angle; ++j) {
        const std::size_t b = 4 * grid.at(i, j);
        rem.values[b] -= sub;      // diagonal entries only: C chi id
        rem.values[b + 3] -= sub;
      }
    }
  }
  return {c, weighted_lp_norm(rem, grid)};
}

MetricField MetricField::from_function(const CylinderGrid& g,
                                       const std::function<Hermitian2(double, double)>& f) {
  MetricField out;
  out.grid = g;
  out.h.resize(g.size());
  for (std::size_t i = 0; i < g.ns(); ++i)
    for (std::size_t j = 0; j < g.n_angle; ++j) out.h[g.at(i, j)] = f(g.s_samples[i], g.angle(j));
  return out;
}

SupDistance bounded_distance(const MetricField& h, const MetricField& k) {
  h.grid.validate();
  if (h.h.size() != k.h.size() || h.grid.size() != k.grid.size() || h.h.size() != h.grid.size())
    throw std::invalid_argument("bounded_distance: fields must share one grid");
  for (std::size_t n = 0; n < h.h.size(); ++n) {
    if (!h.h[n].positive_definite() || !k.h[n].positive_definite()) {
      const std::size_t i = n / h.grid.n_angle, j = n % h.grid.n_angle;
      throw std::domain_error("bounded_distance: non-positive-definite sample at node (" +
                              std::to_string(i) + "," + std::to_string(j) + ")");
    }
  }
  auto worst = par::block_max(h.h.size(), [&](std::size_t n) {
    return symmetric_space_distance(h.h[n], k.h[n]);
  });
  SupDistance out;
  out.sup = worst.value;
  out.argmax_node = worst.index;
  out.at_deepest = symmetric_space_distance(h.h[h.grid.at(h.grid.ns() - 1, 0)],
                                            k.h[h.grid.at(h.grid.ns() - 1, 0)]);
  return out;
}

GrowthProbe classify_growth(const std::function<double(double)>& value_at, double base_extent,
                            int doublings, double growth_tol) {
  if (doublings < 1) throw std::invalid_argument("classify_growth: need at least one doubling");
  GrowthProbe probe;
  double extent = base_extent;
  for (int d = 0; d <= doublings; ++d) {
    probe.extents.push_back(extent);
    probe.values.push_back(value_at(extent));
    extent *= 2.0;
  }
  bool all_grow = true;
  for (int d = 0; d < doublings; ++d) {
    const double lo = probe.values[d], hi = probe.values[d + 1];
    if (!(hi > lo * (1.0 + growth_tol))) all_grow = false;
  }
  probe.verdict = all_grow ? GrowthVerdict::unbounded : GrowthVerdict::bounded;
  return probe;
}

}  // namespace higgs::weighted_norms
