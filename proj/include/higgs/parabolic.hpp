#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace higgs::parabolic {

// Exact arithmetic for filtered (parabolic) bundles: weights, divisor step
// data, algebraic degree and slope stability.  Everything in this module is
// rational; floating-point cone angles are snapped to rationals first.

using Rational = mpq_class;

/// Best rational approximation with denominator <= max_den (Stern-Brocot
/// walk).  `snapped` reports whether the result differs from the input.
struct SnappedAngle {
  Rational value;
  bool snapped = false;
  double delta = 0.0;  // value - input
};
SnappedAngle snap_to_rational(double x, unsigned long max_den = 1000000);

/// Weights at one marked point: strictly increasing in [0,1), multiplicities
/// summing to the rank of the carrying object.
struct PointWeights {
  struct Entry {
    Rational weight;
    unsigned multiplicity = 1;
  };
  std::vector<Entry> entries;

  unsigned total_multiplicity() const;
  void validate(unsigned rank) const;
};

using WeightSystem = std::vector<PointWeights>;  // one per marked point

struct FilteredBundleSpec {
  unsigned genus = 0;
  unsigned rank = 1;
  long deg_E0 = 0;
  WeightSystem weights;  // size == number of marked points

  std::size_t marked_points() const { return weights.size(); }
  void validate() const;
};

struct SubobjectSpec {
  unsigned rank = 1;
  long deg_F0 = 0;
  WeightSystem weights;
  /// The module does not verify phi-invariance of caller-supplied subobjects;
  /// this flag records the unverified assumption.
  bool phi_invariance_assumed = true;

  void validate(const FilteredBundleSpec& parent) const;
};

struct ConeAngleVector {
  std::vector<Rational> theta;  // each in [0,1); 0 marks a cusp

  void validate() const;
  static ConeAngleVector from_doubles(const std::vector<double>& angles,
                                      std::vector<SnappedAngle>* report = nullptr);
};

Rational algebraic_degree(const FilteredBundleSpec& b);
Rational algebraic_degree(const SubobjectSpec& b);
Rational slope(const FilteredBundleSpec& b);
Rational slope(const SubobjectSpec& b);

enum class StabilityVerdict { stable, semistable_only, unstable };

struct StabilityResult {
  StabilityVerdict verdict = StabilityVerdict::stable;
  std::optional<std::size_t> witness;  // index of the first violating subobject
  bool vacuous = false;                // no subobjects supplied
  bool phi_invariance_assumed = false;
};

/// Strict slope comparison against every caller-supplied subobject.  The
/// module never enumerates subobjects itself.
StabilityResult is_stable(const FilteredBundleSpec& b, const std::vector<SubobjectSpec>& subs);

/// Step function alpha -> divisor coefficient per marked point: jumps from 0
/// to 1 at the per-point threshold.
struct DivisorStep {
  std::vector<Rational> thresholds;

  int coefficient(std::size_t point, const Rational& alpha) const {
    return alpha >= thresholds.at(point) ? 1 : 0;
  }
};

/// The degree-zero cone-angle bundle: E0 = K^{1/2} + K^{-1/2}[-D] with
/// weights {(1-theta_j)/2, (1+theta_j)/2} at each marked point, its unique
/// filtered Higgs subobject K^{-1/2}[-D], and the divisor step data.
struct McOwenBundle {
  FilteredBundleSpec total;
  SubobjectSpec sub;
  DivisorStep d1, d2;
};

McOwenBundle mcowen_bundle(unsigned genus, unsigned points, const ConeAngleVector& theta);

/// The closed-form stability inequality 2g - 2 + m - sum theta_j > 0.
bool mcowen_stable(unsigned genus, unsigned points, const ConeAngleVector& theta);
Rational mcowen_constraint(unsigned genus, unsigned points, const ConeAngleVector& theta);

/// Local weight pair of the disk models: beta = 0 -> {theta/2, 1 - theta/2},
/// beta = 1 -> {(1-theta)/2, (1+theta)/2}; theta = 0 collapses to a double
/// weight.
PointWeights local_weight_set(const Rational& theta, int beta);

const char* verdict_name(StabilityVerdict v);

}  // namespace higgs::parabolic
