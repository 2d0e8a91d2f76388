#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "higgs/grids.hpp"
#include "higgs/numerics.hpp"

namespace higgs::local_model {

// Explicit rank-2 harmonic bundles on the punctured unit disk.  One family
// member is selected by a cone parameter theta (cone angle 2*pi*theta) and a
// twist beta; theta = 0 is the cusp limit and every evaluator is finite there
// through the series-stabilized forms, beta = 0 is the plain model and
// beta = 1 the twisted one used by the hyperbolic-cone construction.
//
// Conventions, fixed once:
//   * branch domain U = { z = r e^{i gamma} : 0 < r < 1, gamma in (-pi, pi) },
//     z^a = exp(a (log r + i gamma));
//   * sections carry components in the holomorphic basis {w10, w01} with
//     phi w10 = (1/2) z^beta w01 z^-1 dz and phi w01 = 0;
//   * loops around the puncture run counterclockwise (gamma increasing).

struct LocalModelParams {
  double theta = 0.5;
  double beta = 0.0;

  void validate() const;
};

struct DiskPoint {
  double r = 0.5;
  double gamma = 0.0;

  void validate() const;
};

/// Fibre metric sample; diagonal and det = 1 for every closed-form model.
struct MetricSample {
  Hermitian2 h;

  double det() const { return h.det(); }
};

enum class FrameBasis { s_frame, u_frame };

struct MonodromyMatrix {
  Mat2 m;
  FrameBasis basis = FrameBasis::u_frame;
};

enum class FrameTag { holomorphic, dbar_prime_holomorphic, s_flat, u_flat };

/// Two sections, each with two components in the {w10, w01} basis.
/// Columns of `component_matrix` are the sections.
struct FrameSample {
  std::array<complexd, 2> section1{};  // components of the first section
  std::array<complexd, 2> section2{};
  FrameTag tag = FrameTag::holomorphic;

  Mat2 component_matrix() const {
    return {section1[0], section2[0], section1[1], section2[1]};
  }
};

enum class SectionTag { w10, w01, z_w01 };

// --- closed-form evaluators -------------------------------------------------

/// k_theta(r) = diag(h1, 1/h1), h1 = r^beta * (1/(2 theta)) (r^-theta - r^theta);
/// theta = 0 gives the cusp limit diag(-r^beta log r, ...).
MetricSample eval_cone_metric(const LocalModelParams& p, double r);

/// Simpson's cusp model diag(-log r, -1/log r); equals eval_cone_metric at
/// theta = 0, beta = 0.
MetricSample eval_cusp_metric(double r);

/// Coefficient c(r) of the Hermitian adjoint: phi^* = c(r) [[0,1/2],[0,0]] zbar^-1 dzbar
/// (times z^-beta for twisted models); c = theta^2 / sinh^2(theta log r).
double eval_higgs_adjoint(const LocalModelParams& p, double r);

/// Diagonal coefficient a(r) of the Chern connection,
///   partial_h = partial + a(r) diag(1,-1) z^-1 dz,
/// a = beta/2 + (theta/2) coth(theta log r); cusp limit beta/2 + 1/(2 log r).
/// The beta/2 shift comes from the r^beta factor of the twisted metric.
double eval_chern_connection(const LocalModelParams& p, double r);

/// Curvature coefficient f(r): F = f(r) diag(1,-1) dzbar dz,
/// f = -theta^2 / (4 r^2 sinh^2(theta log r)); cusp limit -1/(4 r^2 log^2 r).
double eval_curvature(const LocalModelParams& p, double r);

// --- residual reports -------------------------------------------------------

struct HermitianEinsteinReport {
  // Residuals of F + [phi, phi^*] in the cylinder normalization, i.e. of the
  // bounded coefficient 4 r^2 (F + [phi, phi^*])_11 = w'' + e^{-2w}; the raw
  // dzbar dz coefficient diverges like r^-2 and its floating-point
  // cancellation floor would swamp any round-off assertion.
  double max_closed_form = 0.0;
  std::size_t argmax_closed_form = 0;
  double max_finite_difference = 0.0;
  std::size_t argmax_finite_difference = 0;
  std::size_t nodes = 0;
};

/// Checks F + [phi, phi^*] = 0 two ways on a radial grid: closed forms
/// (vanishes to round-off) and second differences of log h11 in s
/// (vanishes to discretization order).
HermitianEinsteinReport check_hermitian_einstein(const LocalModelParams& p, const RadialGrid& grid);

struct FlatnessReport {
  double max_residual = 0.0;  // sup over interior nodes, sections and form parts
  std::size_t ns = 0, n_angle = 0;
};

/// Applies the full flat connection D = d + A to the requested flat frame by
/// central differences in (s, gamma) and reports the max residual.
FlatnessReport check_flatness(const LocalModelParams& p, const AnnulusGrid& grid, FrameBasis basis);

// --- frames and monodromy ---------------------------------------------------

/// Frame sample for any of the four tags.  s_flat requires theta > 0.
FrameSample frame(const LocalModelParams& p, const DiskPoint& z, FrameTag tag);

/// Flat frame {s1, s2}; degenerates at theta = 0 (rejected).
FrameSample flat_frame_s(const LocalModelParams& p, const DiskPoint& z);

/// Flat frame {u10, u01}; valid for all theta >= 0 (analytic limit at 0).
FrameSample flat_frame_u(const LocalModelParams& p, const DiskPoint& z);

/// Monodromy of the counterclockwise loop.  s_frame: diag(e^{-i pi (beta+theta)},
/// e^{-i pi (beta-theta)}).  u_frame: the conjugate by the constant s->u change
/// of basis; at theta = 0 the parabolic limit e^{-i pi beta} [[1,0],[-i pi,1]].
MonodromyMatrix monodromy(const LocalModelParams& p, FrameBasis basis);

/// Cross-check oracle: monodromy from 4th-order parallel transport of the
/// w-basis components around the loop at fixed r (integer beta only, since
/// the connection must be single-valued in the trivialization).
MonodromyMatrix monodromy_by_transport(const LocalModelParams& p, FrameBasis basis,
                                       double r = 0.3, std::size_t steps = 4096);

// --- growth rates -----------------------------------------------------------

struct GrowthFit {
  double exponent = 0.0;   // least-squares slope of log|section|_k against log r
  double predicted = 0.0;  // weight from the growth-rate display
  std::size_t points = 0;
};

/// Fits the growth exponent of |section|_{k_theta} on a log-spaced r-grid.
/// Predicted: w10 -> (beta-theta)/2, w01 -> (theta-beta)/2, z_w01 -> 1+(theta-beta)/2.
GrowthFit section_growth_exponent(const LocalModelParams& p, SectionTag tag,
                                  const std::vector<double>& r_grid);

/// Convenience log-spaced grid for growth fits, reaching down to r = 1e-8.
std::vector<double> default_growth_grid(double r_min = 1e-8, double r_max = 1e-4,
                                        std::size_t n = 64);

// Connection coefficient matrices in the w-basis at a point, split into the
// z^-1 dz and zbar^-1 dzbar parts.  Exposed for the flatness checks and the
// transport oracle.
struct ConnectionCoefficients {
  Mat2 mz;   // A = mz z^-1 dz + mzb zbar^-1 dzbar
  Mat2 mzb;
};
ConnectionCoefficients connection_coefficients(const LocalModelParams& p, const DiskPoint& z);

const char* frame_tag_name(FrameTag t);
const char* basis_name(FrameBasis b);

}  // namespace higgs::local_model
