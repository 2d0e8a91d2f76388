#include "higgs/parabolic.hpp"

#include <cmath>
#include <stdexcept>

namespace higgs::parabolic {

SnappedAngle snap_to_rational(double x, unsigned long max_den) {
  if (!std::isfinite(x)) throw std::domain_error("snap_to_rational: non-finite input");
  // Continued-fraction convergents; the last one with denominator <= max_den
  // is the best approximation.
  const bool neg = x < 0.0;
  double v = std::abs(x);
  mpz_class p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double frac = v;
  for (int iter = 0; iter < 64; ++iter) {
    const double a_d = std::floor(frac);
    mpz_class a(a_d);
    mpz_class p2 = a * p1 + p0;
    mpz_class q2 = a * q1 + q0;
    if (q2 > mpz_class(max_den)) break;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    const double rem = frac - a_d;
    if (rem < 1e-15) break;
    frac = 1.0 / rem;
  }
  Rational r(p1, q1 == 0 ? mpz_class(1) : q1);
  r.canonicalize();
  if (neg) r = -r;
  SnappedAngle out;
  out.value = r;
  const Rational exact(x);  // the double, exactly
  out.snapped = r != exact;
  out.delta = Rational(r - exact).get_d();
  return out;
}

unsigned PointWeights::total_multiplicity() const {
  unsigned m = 0;
  for (const auto& e : entries) m += e.multiplicity;
  return m;
}

void PointWeights::validate(unsigned rank) const {
  Rational prev(-1);
  for (const auto& e : entries) {
    if (e.weight < 0 || e.weight >= 1)
      throw std::domain_error("PointWeights: weight outside [0,1)");
    if (!(e.weight > prev)) throw std::domain_error("PointWeights: weights must strictly increase");
    if (e.multiplicity == 0) throw std::domain_error("PointWeights: zero multiplicity");
    prev = e.weight;
  }
  if (total_multiplicity() != rank)
    throw std::domain_error("PointWeights: multiplicities must sum to the rank");
}

void FilteredBundleSpec::validate() const {
  if (rank < 1) throw std::domain_error("FilteredBundleSpec: rank must be >= 1");
  for (const auto& pw : weights) pw.validate(rank);
}

void SubobjectSpec::validate(const FilteredBundleSpec& parent) const {
  if (rank < 1 || rank >= parent.rank)
    throw std::domain_error("SubobjectSpec: rank must satisfy 1 <= rank < parent rank");
  if (weights.size() != parent.weights.size())
    throw std::domain_error("SubobjectSpec: marked-point count differs from parent");
  for (std::size_t j = 0; j < weights.size(); ++j) {
    weights[j].validate(rank);
    // sub-multiset compatibility: each sub-weight must occur at the point
    // with at least the sub-multiplicity.
    for (const auto& e : weights[j].entries) {
      unsigned avail = 0;
      for (const auto& pe : parent.weights[j].entries)
        if (pe.weight == e.weight) avail = pe.multiplicity;
      if (avail < e.multiplicity)
        throw std::domain_error("SubobjectSpec: sub-weights not a sub-multiset of parent weights");
    }
  }
}

void ConeAngleVector::validate() const {
  for (const auto& t : theta)
    if (t < 0 || t >= 1)
      throw std::domain_error("ConeAngleVector: theta_j must lie in [0,1) (theta_j = 1 rejected)");
}

ConeAngleVector ConeAngleVector::from_doubles(const std::vector<double>& angles,
                                              std::vector<SnappedAngle>* report) {
  ConeAngleVector v;
  for (double a : angles) {
    SnappedAngle s = snap_to_rational(a);
    if (report) report->push_back(s);
    v.theta.push_back(s.value);
  }
  v.validate();
  return v;
}

namespace {

Rational weight_sum(const WeightSystem& ws) {
  Rational sum(0);
  for (const auto& pw : ws)
    for (const auto& e : pw.entries) sum += e.weight * Rational(e.multiplicity);
  return sum;
}

}  // namespace

Rational algebraic_degree(const FilteredBundleSpec& b) {
  b.validate();
  return Rational(b.deg_E0) + weight_sum(b.weights);
}

Rational algebraic_degree(const SubobjectSpec& b) {
  return Rational(b.deg_F0) + weight_sum(b.weights);
}

Rational slope(const FilteredBundleSpec& b) { return algebraic_degree(b) / Rational(b.rank); }

Rational slope(const SubobjectSpec& b) { return algebraic_degree(b) / Rational(b.rank); }

StabilityResult is_stable(const FilteredBundleSpec& b, const std::vector<SubobjectSpec>& subs) {
  b.validate();
  StabilityResult res;
  if (subs.empty()) {
    res.vacuous = true;
    return res;
  }
  const Rational mu = slope(b);
  bool boundary = false;
  std::size_t boundary_witness = 0;
  for (std::size_t i = 0; i < subs.size(); ++i) {
    subs[i].validate(b);
    res.phi_invariance_assumed = res.phi_invariance_assumed || subs[i].phi_invariance_assumed;
    const Rational nu = slope(subs[i]);
    if (nu > mu) {
      res.verdict = StabilityVerdict::unstable;
      res.witness = i;
      return res;
    }
    if (nu == mu && !boundary) {
      boundary = true;
      boundary_witness = i;
    }
  }
  if (boundary) {
    res.verdict = StabilityVerdict::semistable_only;
    res.witness = boundary_witness;
  }
  return res;
}

McOwenBundle mcowen_bundle(unsigned genus, unsigned points, const ConeAngleVector& theta) {
  if (points < 1) throw std::domain_error("mcowen_bundle: need at least one marked point");
  if (theta.theta.size() != points)
    throw std::domain_error("mcowen_bundle: need one cone angle per marked point");
  theta.validate();

  const long g = static_cast<long>(genus);
  const long m = static_cast<long>(points);

  McOwenBundle out;
  out.total.genus = genus;
  out.total.rank = 2;
  // deg E0 = deg K^{1/2} + deg K^{-1/2}[-D] = (g-1) + (1-g-m) = -m
  out.total.deg_E0 = -m;
  out.sub.rank = 1;
  out.sub.deg_F0 = 1 - g - m;      // deg K^{-1/2}[-D]
  out.sub.phi_invariance_assumed = false;  // the unique filtered Higgs subbundle

  const Rational half(1, 2);
  for (const auto& t : theta.theta) {
    const Rational w1 = (Rational(1) - t) / 2;
    const Rational w2 = (Rational(1) + t) / 2;
    PointWeights pw;
    if (t == 0) {
      pw.entries.push_back({half, 2});  // cusp: weights collapse to 1/2
    } else {
      pw.entries.push_back({w1, 1});
      pw.entries.push_back({w2, 1});
    }
    out.total.weights.push_back(pw);

    PointWeights sw;
    sw.entries.push_back({t == 0 ? half : w2, 1});
    out.sub.weights.push_back(sw);

    out.d1.thresholds.push_back(w1);
    out.d2.thresholds.push_back(w2);
  }
  out.total.validate();
  out.sub.validate(out.total);
  return out;
}

Rational mcowen_constraint(unsigned genus, unsigned points, const ConeAngleVector& theta) {
  theta.validate();
  Rational sum(0);
  for (const auto& t : theta.theta) sum += t;
  return Rational(2 * static_cast<long>(genus) - 2 + static_cast<long>(points)) - sum;
}

bool mcowen_stable(unsigned genus, unsigned points, const ConeAngleVector& theta) {
  if (points < 1) throw std::domain_error("mcowen_stable: need at least one marked point");
  return mcowen_constraint(genus, points, theta) > 0;
}

PointWeights local_weight_set(const Rational& theta, int beta) {
  if (theta < 0 || theta >= 1) throw std::domain_error("local_weight_set: theta outside [0,1)");
  if (beta != 0 && beta != 1) throw std::domain_error("local_weight_set: beta must be 0 or 1");
  PointWeights pw;
  if (theta == 0) {
    pw.entries.push_back({beta == 0 ? Rational(0) : Rational(1, 2), 2});
    return pw;
  }
  if (beta == 0) {
    pw.entries.push_back({theta / 2, 1});
    pw.entries.push_back({Rational(1) - theta / 2, 1});
  } else {
    pw.entries.push_back({(Rational(1) - theta) / 2, 1});
    pw.entries.push_back({(Rational(1) + theta) / 2, 1});
  }
  return pw;
}

const char* verdict_name(StabilityVerdict v) {
  switch (v) {
    case StabilityVerdict::stable: return "stable";
    case StabilityVerdict::semistable_only: return "semistable_only";
    case StabilityVerdict::unstable: return "unstable";
  }
  return "?";
}

}  // namespace higgs::parabolic
