#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "higgs/numerics.hpp"

namespace higgs {

// All grids live in cylinder coordinates: s = -log r in (0, infinity),
// gamma the angle.  r = e^{-s}, so increasing s walks toward the puncture.

/// Uniform 1D grid in s; r-samples are log-spaced.
struct RadialGrid {
  double s_min = 1.0;
  double s_max = 8.0;
  std::size_t n = 0;

  RadialGrid() = default;
  RadialGrid(double s0, double s1, std::size_t nodes) : s_min(s0), s_max(s1), n(nodes) {
    if (!(s0 > 0.0) || !(s1 > s0)) throw std::invalid_argument("RadialGrid: need 0 < s_min < s_max");
    if (nodes < 2) throw std::invalid_argument("RadialGrid: need at least 2 nodes");
  }
  static RadialGrid from_r_range(double r_lo, double r_hi, std::size_t nodes) {
    if (!(r_lo > 0.0) || !(r_hi > r_lo) || !(r_hi < 1.0))
      throw std::invalid_argument("RadialGrid: need 0 < r_lo < r_hi < 1");
    return RadialGrid(-std::log(r_hi), -std::log(r_lo), nodes);
  }

  double ds() const { return (s_max - s_min) / static_cast<double>(n - 1); }
  double s(std::size_t i) const { return s_min + static_cast<double>(i) * ds(); }
  double r(std::size_t i) const { return std::exp(-s(i)); }
};

/// 2D grid in (s, gamma).  Periodic grids cover the full circle with
/// gamma_j = j * 2pi/n_angle; open grids stay inside (-pi, pi) and keep a
/// margin around the branch cut at gamma = +-pi.
struct AnnulusGrid {
  double s_min = 1.0, s_max = 4.0;
  std::size_t ns = 0, n_angle = 0;
  bool periodic = true;
  double angle_min = 0.0, angle_max = 2.0 * kPi;  // open grids only

  AnnulusGrid() = default;

  static AnnulusGrid full_circle(double s0, double s1, std::size_t ns_, std::size_t na_) {
    if (!(s0 > 0.0) || !(s1 > s0)) throw std::invalid_argument("AnnulusGrid: bad s range");
    if (ns_ < 4 || na_ < 4) throw std::invalid_argument("AnnulusGrid: grid too coarse (< 4 points)");
    AnnulusGrid g;
    g.s_min = s0; g.s_max = s1; g.ns = ns_; g.n_angle = na_;
    g.periodic = true;
    return g;
  }

  static AnnulusGrid branch_sector(double s0, double s1, std::size_t ns_, std::size_t na_,
                                   double cut_margin = 0.3) {
    if (!(s0 > 0.0) || !(s1 > s0)) throw std::invalid_argument("AnnulusGrid: bad s range");
    if (ns_ < 4 || na_ < 4) throw std::invalid_argument("AnnulusGrid: grid too coarse (< 4 points)");
    if (!(cut_margin > 0.0) || cut_margin >= kPi)
      throw std::invalid_argument("AnnulusGrid: sector crosses the branch cut");
    AnnulusGrid g;
    g.s_min = s0; g.s_max = s1; g.ns = ns_; g.n_angle = na_;
    g.periodic = false;
    g.angle_min = -kPi + cut_margin;
    g.angle_max = kPi - cut_margin;
    return g;
  }

  double ds() const { return (s_max - s_min) / static_cast<double>(ns - 1); }
  double dangle() const {
    return periodic ? 2.0 * kPi / static_cast<double>(n_angle)
                    : (angle_max - angle_min) / static_cast<double>(n_angle - 1);
  }
  double s(std::size_t i) const { return s_min + static_cast<double>(i) * ds(); }
  double r(std::size_t i) const { return std::exp(-s(i)); }
  double angle(std::size_t j) const {
    return periodic ? static_cast<double>(j) * dangle() : angle_min + static_cast<double>(j) * dangle();
  }
  std::size_t size() const { return ns * n_angle; }
  std::size_t at(std::size_t i, std::size_t j) const { return i * n_angle + j; }
};

}  // namespace higgs
