#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include "higgs/numerics.hpp"

namespace higgs::weighted_norms {

// Discretized weighted L^p / Sobolev norms on the half-infinite cylinder
// coordinates s = |log r|, t = log s, and symmetric-space distance sweeps
// between sampled fibre metrics.

struct CylinderCoords {
  double s = 0.0;
  double t = 0.0;
  bool in_model = true;  // false when r >= 1/e (t <= 0, outside the cusp chart)
};

/// s = -log r, t = log s; flags r >= 1/e instead of failing.
CylinderCoords cylinder_coords(double r);

/// s-samples strictly increasing with uniform spacing; the quadrature runs in
/// t = log s with trapezoid weights from the (non-uniform) t-spacings.
struct CylinderGrid {
  std::vector<double> s_samples;
  std::size_t n_angle = 16;
  double delta = 0.25;  // weight, inside the (0, 1/2) window
  double p = 3.0;       // exponent, > 1

  static CylinderGrid uniform_s(double s0, double s1, std::size_t n, std::size_t n_angle,
                                double delta = 0.25, double p = 3.0);

  void validate() const;
  std::size_t ns() const { return s_samples.size(); }
  std::size_t size() const { return ns() * n_angle; }
  std::size_t at(std::size_t i, std::size_t j) const { return i * n_angle + j; }
  double t(std::size_t i) const;
  double angle(std::size_t j) const;  // full circle, periodic
  double dangle() const { return 2.0 * kPi / static_cast<double>(n_angle); }
};

enum class SectionShape { scalar, endomorphism };

/// Complex samples on the grid nodes; scalar sections store one value per
/// node, endomorphism sections a 2x2 matrix (Frobenius norm pointwise).
struct SampledSection {
  CylinderGrid grid;
  SectionShape shape = SectionShape::scalar;
  int form_degree = 0;  // 0 or 1
  std::vector<complexd> values;  // scalar: size(); endomorphism: 4*size(), row-major per node

  void validate() const;
  double abs_at(std::size_t node) const;
  Mat2 mat_at(std::size_t node) const;

  static SampledSection scalar_field(const CylinderGrid& g,
                                     const std::function<complexd(double s, double angle)>& f);
  static SampledSection endo_field(const CylinderGrid& g,
                                   const std::function<Mat2(double s, double angle)>& f);
};

/// ( integral |e^{delta t} f|^p dt dangle )^{1/p} by trapezoid in t and the
/// periodic rectangle rule in the angle.  Deterministic reduction order.
double weighted_lp_norm(const SampledSection& f, const CylinderGrid& grid);

/// Connection coefficients for covariant differences of endomorphism
/// sections: nabla f = df + [A, f] with A = a_s ds + a_angle dangle.
struct ConnectionField {
  std::vector<Mat2> a_s;      // empty = trivial connection
  std::vector<Mat2> a_angle;
};

/// sum_{j<=k} || nabla^j f ||_{L^p_delta}, k <= 2.  First- and second-order
/// terms are measured in the complete cusp metric on the cylinder, so the
/// j-th term of the model section s^{-delta} is delta^j-fold the 0th.
double weighted_sobolev_norm(const SampledSection& f, int k, const CylinderGrid& grid,
                             const ConnectionField& conn = {});

struct HatDecomposition {
  complexd constant;      // asymptotic constant C (identity component)
  double remainder_norm;  // || f - C chi(t) id ||_{L^p_delta}
};

/// Splits f into C chi(t) id + remainder, C estimated from the mean of the
/// identity component at the largest t; chi is the smoothstep 3 tau^2 - 2 tau^3
/// on tau = clamp(t, 0, 1).
HatDecomposition membership_hat_space(const SampledSection& f, const CylinderGrid& grid);

double hat_cutoff(double t);

/// Sampled 2x2 positive Hermitian metric on the cylinder grid nodes.
struct MetricField {
  CylinderGrid grid;
  std::vector<Hermitian2> h;

  static MetricField from_function(const CylinderGrid& g,
                                   const std::function<Hermitian2(double s, double angle)>& f);
};

struct SupDistance {
  double sup = 0.0;
  std::size_t argmax_node = 0;
  double at_deepest = 0.0;  // pointwise distance at the largest-s node (angle 0)
};

/// sup over shared nodes of dist_{G/K}(h, k); rejects non-positive-definite
/// samples naming the offending node.
SupDistance bounded_distance(const MetricField& h, const MetricField& k);

enum class GrowthVerdict { bounded, unbounded };

struct GrowthProbe {
  std::vector<double> extents;
  std::vector<double> values;
  GrowthVerdict verdict = GrowthVerdict::bounded;
};

/// Operational boundedness proxy: re-evaluates `value_at(extent)` on
/// geometrically extended grids; classified unbounded when every doubling
/// grows the value by more than `growth_tol` (relative).
GrowthProbe classify_growth(const std::function<double(double extent)>& value_at,
                            double base_extent, int doublings = 3, double growth_tol = 0.01);

}  // namespace higgs::weighted_norms
