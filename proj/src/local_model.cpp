#include "higgs/local_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "higgs/parallel.hpp"

namespace higgs::local_model {

namespace {

void require_r(double r) {
  if (!(r > 0.0) || !(r < 1.0)) throw std::domain_error("local_model: r must lie in (0,1)");
}

// h1(s) = (1/theta) sinh(theta s) = s * sinch(theta s); the cylinder-frame
// (beta-free) part of the metric.  s = -log r > 0.
double h1_of_s(double theta, double s) { return s * sinch(theta * s); }

const Mat2 kLowerN{0.0, 0.0, 1.0, 0.0};   // [[0,0],[1,0]]
const Mat2 kUpperN{0.0, 1.0, 0.0, 0.0};   // [[0,1],[0,0]]
const Mat2 kSigma{1.0, 0.0, 0.0, -1.0};   // diag(1,-1)

}  // namespace

void LocalModelParams::validate() const {
  if (!(theta >= 0.0) || !(theta < 1.0))
    throw std::domain_error("LocalModelParams: theta must lie in [0,1)");
  if (!std::isfinite(beta)) throw std::domain_error("LocalModelParams: beta must be finite");
}

void DiskPoint::validate() const {
  require_r(r);
  if (!(gamma > -kPi) || !(gamma < kPi))
    throw std::domain_error("DiskPoint: gamma must lie in (-pi, pi)");
}

MetricSample eval_cone_metric(const LocalModelParams& p, double r) {
  p.validate();
  require_r(r);
  const double s = -std::log(r);
  const double h1 = std::pow(r, p.beta) * h1_of_s(p.theta, s);
  return {Hermitian2::diag(h1, 1.0 / h1)};
}

MetricSample eval_cusp_metric(double r) {
  return eval_cone_metric({0.0, 0.0}, r);
}

double eval_higgs_adjoint(const LocalModelParams& p, double r) {
  p.validate();
  require_r(r);
  // c = theta^2 / sinh^2(theta log r) = 1 / (s sinch(theta s))^2
  const double s = -std::log(r);
  const double h1 = h1_of_s(p.theta, s);
  return 1.0 / (h1 * h1);
}

double eval_chern_connection(const LocalModelParams& p, double r) {
  p.validate();
  require_r(r);
  const double logr = std::log(r);
  return 0.5 * p.beta + 0.5 * xcoth(p.theta * logr) / logr;
}

double eval_curvature(const LocalModelParams& p, double r) {
  p.validate();
  require_r(r);
  const double s = -std::log(r);
  const double h1 = h1_of_s(p.theta, s);
  return -1.0 / (4.0 * r * r * h1 * h1);
}

HermitianEinsteinReport check_hermitian_einstein(const LocalModelParams& p, const RadialGrid& grid) {
  p.validate();
  if (grid.n < 4) throw std::invalid_argument("check_hermitian_einstein: grid too coarse (< 4 points)");
  if (!(grid.s_min > 0.0)) throw std::domain_error("check_hermitian_einstein: grid leaves (0,1)");

  HermitianEinsteinReport rep;
  rep.nodes = grid.n;

  // (i) closed forms: 4 r^2 F_11 + c = 4 r^2 (F + [phi,phi^*])_11.
  auto closed = par::block_max(grid.n, [&](std::size_t i) {
    const double r = grid.r(i);
    const double f = eval_curvature(p, r);
    const double c = eval_higgs_adjoint(p, r);
    return std::abs(4.0 * r * r * f + c);
  });
  rep.max_closed_form = closed.value;
  rep.argmax_closed_form = closed.index;

  // (ii) second differences of w = log h11 in s; the bracket term e^{-2w}
  // uses the beta-stripped w so that both routes live in the cylinder frame.
  const double ds = grid.ds();
  std::vector<double> w(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i)
    w[i] = std::log(eval_cone_metric(p, grid.r(i)).h.h11);
  auto fd = par::block_max(grid.n - 2, [&](std::size_t k) {
    const std::size_t i = k + 1;
    const double wpp = (w[i + 1] - 2.0 * w[i] + w[i - 1]) / (ds * ds);
    const double wc = w[i] + p.beta * grid.s(i);
    return std::abs(wpp + std::exp(-2.0 * wc));
  });
  rep.max_finite_difference = fd.value;
  rep.argmax_finite_difference = fd.index + 1;
  return rep;
}

ConnectionCoefficients connection_coefficients(const LocalModelParams& p, const DiskPoint& z) {
  const double a = eval_chern_connection(p, z.r);
  const double c = eval_higgs_adjoint(p, z.r);
  const complexd zb = zpow(z.r, z.gamma, p.beta);
  ConnectionCoefficients cc;
  cc.mz = a * kSigma + (0.5 * zb) * kLowerN;
  cc.mzb = (0.5 * c / zb) * kUpperN;
  return cc;
}

FrameSample frame(const LocalModelParams& p, const DiskPoint& z, FrameTag tag) {
  p.validate();
  z.validate();
  const double logr = std::log(z.r);
  const complexd zbeta = zpow(z.r, z.gamma, p.beta);
  // v01 = z^beta w01 + theta coth(theta log r) w10
  const complexd v1 = xcoth(p.theta * logr) / logr;
  const complexd v2 = zbeta;

  FrameSample out;
  out.tag = tag;
  switch (tag) {
    case FrameTag::holomorphic:
      out.section1 = {1.0, 0.0};
      out.section2 = {0.0, 1.0};
      return out;
    case FrameTag::dbar_prime_holomorphic:
      out.section1 = {1.0, 0.0};  // w10
      out.section2 = {v1, v2};    // v01
      return out;
    case FrameTag::s_flat: {
      if (p.theta <= 0.0)
        throw std::domain_error("flat_frame_s: s-frame degenerates at theta = 0; use the u-frame");
      const complexd f1 = zpow(z.r, z.gamma, -(p.beta + p.theta) / 2.0);
      const complexd f2 = zpow(z.r, z.gamma, -(p.beta - p.theta) / 2.0);
      out.section1 = {f1 * (p.theta + v1), f1 * v2};
      out.section2 = {f2 * (p.theta - v1), -f2 * v2};
      return out;
    }
    case FrameTag::u_flat: {
      // u10 = z^{-beta/2} [ cosh(theta L / 2) w10 - (L/2) sinch(theta L / 2) v01 ]
      // u01 = z^{-beta/2} [ -theta sinh(theta L / 2) w10 + cosh(theta L / 2) v01 ]
      // with L = log z; every factor is finite through theta = 0.
      const complexd L(logr, z.gamma);
      const complexd zmb2 = zpow(z.r, z.gamma, -p.beta / 2.0);
      const complexd ch = std::cosh(p.theta * L / 2.0);
      const complexd snc = (L / 2.0) * sinch(p.theta * L / 2.0);  // sinh(theta L/2)/theta
      out.section1 = {zmb2 * (ch - snc * v1), zmb2 * (-snc * v2)};
      out.section2 = {zmb2 * (-p.theta * p.theta * snc + ch * v1), zmb2 * (ch * v2)};
      return out;
    }
  }
  throw std::logic_error("frame: unknown tag");
}

FrameSample flat_frame_s(const LocalModelParams& p, const DiskPoint& z) {
  return frame(p, z, FrameTag::s_flat);
}

FrameSample flat_frame_u(const LocalModelParams& p, const DiskPoint& z) {
  return frame(p, z, FrameTag::u_flat);
}

FlatnessReport check_flatness(const LocalModelParams& p, const AnnulusGrid& grid, FrameBasis basis) {
  p.validate();
  if (grid.periodic)
    throw std::invalid_argument("check_flatness: grid crossing the branch cut rejected; use a sector");
  if (!(grid.s_min > 0.0)) throw std::domain_error("check_flatness: annulus leaves (0,1)");
  const FrameTag tag = (basis == FrameBasis::s_frame) ? FrameTag::s_flat : FrameTag::u_flat;

  const double hs = grid.ds();
  const double hg = grid.dangle();

  std::vector<Mat2> fr(grid.size());
  for (std::size_t i = 0; i < grid.ns; ++i)
    for (std::size_t j = 0; j < grid.n_angle; ++j)
      fr[grid.at(i, j)] = frame(p, {grid.r(i), grid.angle(j)}, tag).component_matrix();

  // D xi = 0 componentwise:  ds-part  xi_s - (mz + mzb) xi = 0,
  //                          dgamma-part  xi_gamma + i (mz - mzb) xi = 0.
  const std::size_t ni = grid.ns - 2, nj = grid.n_angle - 2;
  auto worst = par::block_max(ni * nj, [&](std::size_t k) {
    const std::size_t i = k / nj + 1;
    const std::size_t j = k % nj + 1;
    const auto cc = connection_coefficients(p, {grid.r(i), grid.angle(j)});
    const Mat2& x = fr[grid.at(i, j)];
    const Mat2 xs = (1.0 / (2.0 * hs)) * (fr[grid.at(i + 1, j)] - fr[grid.at(i - 1, j)]);
    const Mat2 xg = (1.0 / (2.0 * hg)) * (fr[grid.at(i, j + 1)] - fr[grid.at(i, j - 1)]);
    const Mat2 rs = xs - (cc.mz + cc.mzb) * x;
    const Mat2 rg = xg + complexd(0.0, 1.0) * ((cc.mz - cc.mzb) * x);
    return std::max(rs.frobenius(), rg.frobenius());
  });

  FlatnessReport rep;
  rep.max_residual = worst.value;
  rep.ns = grid.ns;
  rep.n_angle = grid.n_angle;
  return rep;
}

MonodromyMatrix monodromy(const LocalModelParams& p, FrameBasis basis) {
  p.validate();
  const complexd phase = std::exp(complexd(0.0, -kPi * p.beta));
  if (basis == FrameBasis::s_frame) {
    if (p.theta <= 0.0)
      throw std::domain_error("monodromy: s-frame unavailable at theta = 0");
    const complexd e1 = std::exp(complexd(0.0, -kPi * p.theta));
    const complexd e2 = std::exp(complexd(0.0, kPi * p.theta));
    return {Mat2::diag(phase * e1, phase * e2), FrameBasis::s_frame};
  }
  // T^{-1} diag(e^{-i pi theta}, e^{i pi theta}) T with T the s->u change of
  // basis; written out, every entry is even in theta and finite at 0:
  //   [[cos(pi theta), -i theta sin(pi theta)], [-i sin(pi theta)/theta, cos ]]
  const double th = p.theta;
  const double co = std::cos(kPi * th);
  const double si = std::sin(kPi * th);
  const double sin_ratio = (th == 0.0) ? kPi : si / th;  // sin(pi theta)/theta
  Mat2 m{co, complexd(0.0, -th * si), complexd(0.0, -sin_ratio), co};
  return {phase * m, FrameBasis::u_frame};
}

MonodromyMatrix monodromy_by_transport(const LocalModelParams& p, FrameBasis basis, double r,
                                       std::size_t steps) {
  p.validate();
  require_r(r);
  if (std::abs(p.beta - std::round(p.beta)) > 1e-12)
    throw std::domain_error("monodromy_by_transport: connection single-valued only for integer beta");
  if (steps < 16) throw std::invalid_argument("monodromy_by_transport: too few steps");

  // Fundamental solution of Y' = -i (mz - mzb) Y around the loop, RK4.
  // The coefficients are evaluated on the universal cover (gamma runs over
  // [0, 2 pi]), with z^beta continued as e^{beta (log r + i gamma)}.
  auto rhs = [&](double gamma, const Mat2& y) {
    const double a = eval_chern_connection(p, r);
    const double c = eval_higgs_adjoint(p, r);
    const complexd zb = std::exp(p.beta * complexd(std::log(r), gamma));
    const Mat2 mz = a * kSigma + (0.5 * zb) * kLowerN;
    const Mat2 mzb = (0.5 * c / zb) * kUpperN;
    return complexd(0.0, -1.0) * ((mz - mzb) * y);
  };
  Mat2 y = Mat2::identity();
  const double h = 2.0 * kPi / static_cast<double>(steps);
  double g = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    const Mat2 k1 = rhs(g, y);
    const Mat2 k2 = rhs(g + h / 2.0, y + (h / 2.0) * k1);
    const Mat2 k3 = rhs(g + h / 2.0, y + (h / 2.0) * k2);
    const Mat2 k4 = rhs(g + h, y + h * k3);
    y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    g += h;
  }

  const FrameTag tag = (basis == FrameBasis::s_frame) ? FrameTag::s_flat : FrameTag::u_flat;
  if (basis == FrameBasis::s_frame && p.theta <= 0.0)
    throw std::domain_error("monodromy_by_transport: s-frame unavailable at theta = 0");
  const Mat2 f = frame(p, {r, 0.0}, tag).component_matrix();
  return {f.inverse() * (y * f), basis};
}

GrowthFit section_growth_exponent(const LocalModelParams& p, SectionTag tag,
                                  const std::vector<double>& r_grid) {
  p.validate();
  if (r_grid.size() < 8)
    throw std::invalid_argument("section_growth_exponent: need at least 8 grid points");

  std::vector<double> x(r_grid.size()), y(r_grid.size());
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    const double r = r_grid[i];
    require_r(r);
    const MetricSample k = eval_cone_metric(p, r);
    double norm = 0.0;
    switch (tag) {
      case SectionTag::w10: norm = std::sqrt(k.h.h11); break;
      case SectionTag::w01: norm = std::sqrt(k.h.h22); break;
      case SectionTag::z_w01: norm = r * std::sqrt(k.h.h22); break;
    }
    x[i] = std::log(r);
    y[i] = std::log(norm);
  }

  GrowthFit fit;
  fit.points = r_grid.size();
  fit.exponent = lsq_slope(x.data(), y.data(), x.size());
  switch (tag) {
    case SectionTag::w10: fit.predicted = (p.beta - p.theta) / 2.0; break;
    case SectionTag::w01: fit.predicted = (p.theta - p.beta) / 2.0; break;
    case SectionTag::z_w01: fit.predicted = 1.0 + (p.theta - p.beta) / 2.0; break;
  }
  return fit;
}

std::vector<double> default_growth_grid(double r_min, double r_max, std::size_t n) {
  std::vector<double> g(n);
  const double l0 = std::log(r_min), l1 = std::log(r_max);
  for (std::size_t i = 0; i < n; ++i)
    g[i] = std::exp(l0 + (l1 - l0) * static_cast<double>(i) / static_cast<double>(n - 1));
  return g;
}

const char* frame_tag_name(FrameTag t) {
  switch (t) {
    case FrameTag::holomorphic: return "holomorphic";
    case FrameTag::dbar_prime_holomorphic: return "d''_holomorphic";
    case FrameTag::s_flat: return "s_flat";
    case FrameTag::u_flat: return "u_flat";
  }
  return "?";
}

const char* basis_name(FrameBasis b) {
  return b == FrameBasis::s_frame ? "s" : "u";
}

}  // namespace higgs::local_model
