#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "higgs/local_model.hpp"
#include "higgs/weighted_norms.hpp"

using namespace higgs;
using namespace higgs::weighted_norms;

TEST_CASE("cylinder coordinates") {
  const auto c = cylinder_coords(std::exp(-std::exp(1.0)));
  CHECK(c.s == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
  CHECK(c.t == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c.in_model);

  CHECK(!cylinder_coords(std::exp(-1.0)).in_model);  // boundary flag at r = 1/e
  CHECK(!cylinder_coords(0.5).in_model);

  // monotonicity: r1 < r2 -> s1 > s2
  CHECK(cylinder_coords(0.1).s > cylinder_coords(0.2).s);

  CHECK_THROWS_AS(cylinder_coords(1.0), std::domain_error);
  CHECK_THROWS_AS(cylinder_coords(0.0), std::domain_error);
}

TEST_CASE("weighted Lp norm basics") {
  // t in [0, T] (s in [1, e^T]); f = e^{-delta t} makes the integrand 1.
  const double T = 2.0;
  const auto g = CylinderGrid::uniform_s(1.0, std::exp(T), 400, 16, 0.25, 3.0);
  const auto f = SampledSection::scalar_field(
      g, [&](double s, double) { return std::exp(-g.delta * std::log(s)); });
  const double expect = std::pow(2.0 * kPi * T, 1.0 / g.p);
  CHECK(weighted_lp_norm(f, g) == doctest::Approx(expect).epsilon(1e-12));

  const auto zero = SampledSection::scalar_field(g, [](double, double) { return 0.0; });
  CHECK(weighted_lp_norm(zero, g) == 0.0);

  // homogeneity
  auto f3 = f;
  for (auto& v : f3.values) v *= complexd(-3.0, 4.0);
  CHECK(weighted_lp_norm(f3, g) == doctest::Approx(5.0 * weighted_lp_norm(f, g)).epsilon(1e-12));

  // non-finite samples rejected
  auto bad = f;
  bad.values[7] = complexd(std::numeric_limits<double>::quiet_NaN(), 0.0);
  CHECK_THROWS_AS(weighted_lp_norm(bad, g), std::invalid_argument);
}

TEST_CASE("triangle inequality and homogeneity on random sections") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> ur(-1.0, 1.0);
  for (double p : {2.0, 3.0, 4.0}) {
    const auto g = CylinderGrid::uniform_s(1.0, 6.0, 60, 8, 0.25, p);
    for (int rep = 0; rep < 10; ++rep) {
      auto a = SampledSection::scalar_field(g, [&](double, double) { return complexd(ur(rng), ur(rng)); });
      auto b = SampledSection::scalar_field(g, [&](double, double) { return complexd(ur(rng), ur(rng)); });
      auto sum = a;
      for (std::size_t i = 0; i < sum.values.size(); ++i) sum.values[i] += b.values[i];
      CHECK(weighted_lp_norm(sum, g) <=
            weighted_lp_norm(a, g) + weighted_lp_norm(b, g) + 1e-12);
    }
  }
}

TEST_CASE("quadrature reproduces analytic integrals at second order") {
  // f = e^{-delta t} e^{-t}: integrand e^{-pt}, integral (e^{-p t0} - e^{-p t1})/p.
  const double delta = 0.25, p = 3.0;
  auto norm_at = [&](std::size_t n) {
    const auto g = CylinderGrid::uniform_s(1.5, 12.0, n, 8, delta, p);
    const auto f = SampledSection::scalar_field(g, [&](double s, double) {
      const double t = std::log(s);
      return std::exp(-(delta + 1.0) * t);
    });
    return weighted_lp_norm(f, g);
  };
  const double t0 = std::log(1.5), t1 = std::log(12.0);
  const double exact = std::pow(2.0 * kPi * (std::exp(-p * t0) - std::exp(-p * t1)) / p, 1.0 / p);
  const double e1 = std::abs(norm_at(100) - exact);
  const double e2 = std::abs(norm_at(200) - exact);
  const double e3 = std::abs(norm_at(400) - exact);
  CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.12));
  CHECK(std::log2(e2 / e3) == doctest::Approx(2.0).epsilon(0.12));
}

TEST_CASE("weighted Sobolev norms") {
  const auto g = CylinderGrid::uniform_s(1.5, 20.0, 600, 8, 0.25, 3.0);

  const auto f = SampledSection::scalar_field(
      g, [&](double s, double) { return std::pow(s, -g.delta); });  // e^{-delta t}

  // k = 0 reduces to the Lp norm
  CHECK(weighted_sobolev_norm(f, 0, g) == doctest::Approx(weighted_lp_norm(f, g)));

  // constant section, trivial connection: first-difference term vanishes
  const auto cst = SampledSection::scalar_field(g, [](double, double) { return 2.5; });
  CHECK(weighted_sobolev_norm(cst, 1, g) == doctest::Approx(weighted_lp_norm(cst, g)).epsilon(1e-12));

  // |nabla (s^-delta)| = delta s^-delta in the cusp norm, so the k = 1 norm is
  // (1 + delta) times the k = 0 norm; 5% window on this grid.
  const double n0 = weighted_lp_norm(f, g);
  const double n1 = weighted_sobolev_norm(f, 1, g);
  CHECK(n1 == doctest::Approx((1.0 + g.delta) * n0).epsilon(0.05));
  // k = 2 adds delta (1 + delta) once more
  const double n2 = weighted_sobolev_norm(f, 2, g);
  CHECK(n2 == doctest::Approx((1.0 + g.delta + g.delta * (1.0 + g.delta)) * n0).epsilon(0.05));

  CHECK_THROWS_AS(weighted_sobolev_norm(f, 3, g), std::invalid_argument);

  // grids too coarse for the requested differences are rejected
  const auto tiny = CylinderGrid::uniform_s(1.5, 3.0, 2, 4, 0.25, 3.0);
  const auto ft = SampledSection::scalar_field(tiny, [](double, double) { return 1.0; });
  CHECK_THROWS_AS(weighted_sobolev_norm(ft, 1, tiny), std::invalid_argument);
}

TEST_CASE("covariant term of the Sobolev norm") {
  const auto g = CylinderGrid::uniform_s(1.5, 10.0, 200, 8, 0.25, 3.0);

  // [A, id] = 0: the identity section has vanishing covariant derivative for
  // any connection
  ConnectionField conn;
  conn.a_s.assign(g.size(), Mat2{0.0, 0.3, 0.3, 0.0});
  conn.a_angle.assign(g.size(), Mat2{0.1, 0.0, 0.0, -0.1});
  const auto id = SampledSection::endo_field(g, [](double, double) { return Mat2::identity(); });
  CHECK(weighted_sobolev_norm(id, 1, g, conn) ==
        doctest::Approx(weighted_lp_norm(id, g)).epsilon(1e-12));

  // a non-central section picks up the commutator
  const auto diag = SampledSection::endo_field(g, [](double, double) { return Mat2::diag(1.0, -1.0); });
  const double trivial = weighted_sobolev_norm(diag, 1, g);
  const double twisted = weighted_sobolev_norm(diag, 1, g, conn);
  CHECK(trivial == doctest::Approx(weighted_lp_norm(diag, g)).epsilon(1e-12));
  CHECK(twisted > trivial * 1.1);
}

TEST_CASE("hat-space decomposition") {
  const auto g = CylinderGrid::uniform_s(1.5, 40.0, 500, 8, 0.25, 3.0);

  // exact decomposition: f = 3 chi(t) id
  const auto f1 = SampledSection::endo_field(g, [&](double s, double) {
    const double chi = hat_cutoff(std::log(s));
    return Mat2::diag(3.0 * chi, 3.0 * chi);
  });
  const auto d1 = membership_hat_space(f1, g);
  CHECK(d1.constant.real() == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(d1.remainder_norm <= 1e-10);

  // decaying tail e^{-4 delta t}: constant ~ 0, remainder finite and stable
  // under grid doubling
  auto rem_at = [&](double s_max) {
    const auto gg = CylinderGrid::uniform_s(1.5, s_max, static_cast<std::size_t>(s_max * 14), 8,
                                            0.25, 3.0);
    const auto f = SampledSection::endo_field(gg, [&](double s, double) {
      const double v = std::pow(s, -4.0 * gg.delta);
      return Mat2::diag(v, v);
    });
    return membership_hat_space(f, gg).remainder_norm;
  };
  const auto probe = classify_growth(rem_at, 40.0);
  CHECK(probe.verdict == GrowthVerdict::bounded);

  // growing tail e^{+delta t}: divergent under extension
  auto grow_at = [&](double s_max) {
    const auto gg = CylinderGrid::uniform_s(1.5, s_max, static_cast<std::size_t>(s_max * 14), 8,
                                            0.25, 3.0);
    const auto f = SampledSection::endo_field(gg, [&](double s, double) {
      const double v = std::pow(s, gg.delta);
      return Mat2::diag(v, v);
    });
    return membership_hat_space(f, gg).remainder_norm;
  };
  CHECK(classify_growth(grow_at, 40.0).verdict == GrowthVerdict::unbounded);

  // decay slower than e^{-delta t} also fails the integral test: e^{-delta t/2}
  auto slow_at = [&](double s_max) {
    const auto gg = CylinderGrid::uniform_s(1.5, s_max, static_cast<std::size_t>(s_max * 14), 8,
                                            0.25, 3.0);
    const auto f = SampledSection::endo_field(gg, [&](double s, double) {
      const double v = std::pow(s, -0.5 * gg.delta);
      return Mat2::diag(v, v);
    });
    return membership_hat_space(f, gg).remainder_norm;
  };
  CHECK(classify_growth(slow_at, 40.0).verdict == GrowthVerdict::unbounded);
}

TEST_CASE("bounded distance: identity and rejection") {
  const auto g = CylinderGrid::uniform_s(1.0, 8.0, 50, 4, 0.25, 3.0);
  const auto h = MetricField::from_function(g, [](double s, double) {
    return Hermitian2::diag(std::exp(s), std::exp(-s));
  });
  const auto d = bounded_distance(h, h);
  CHECK(d.sup == 0.0);

  auto bad = h;
  bad.h[g.at(2, 1)] = Hermitian2::diag(-1.0, 1.0);
  CHECK_THROWS_WITH_AS(bounded_distance(h, bad), doctest::Contains("node (2,1)"), std::domain_error);
}

TEST_CASE("sinh model is a bounded distance from the pure power") {
  // h = (1/(2 theta))(r^-theta - r^theta) vs k = r^-theta, rank-1 embedded as
  // diag(h, 1); pointwise distance -> |log 2 theta| as r -> 0.
  const double theta = 0.25;
  auto sup_at = [&](double s_max) {
    const auto g = CylinderGrid::uniform_s(1.0, s_max, static_cast<std::size_t>(s_max * 8), 1,
                                           0.25, 3.0);
    const auto h = MetricField::from_function(g, [&](double s, double) {
      return Hermitian2::diag(std::sinh(theta * s) / theta, 1.0);
    });
    const auto k = MetricField::from_function(g, [&](double s, double) {
      return Hermitian2::diag(std::exp(theta * s), 1.0);
    });
    return bounded_distance(h, k).sup;
  };
  const auto probe = classify_growth(sup_at, 16.0);
  CHECK(probe.verdict == GrowthVerdict::bounded);

  const auto g = CylinderGrid::uniform_s(1.0, 128.0, 1024, 1, 0.25, 3.0);
  const auto h = MetricField::from_function(g, [&](double s, double) {
    return Hermitian2::diag(std::sinh(theta * s) / theta, 1.0);
  });
  const auto k = MetricField::from_function(g, [&](double s, double) {
    return Hermitian2::diag(std::exp(theta * s), 1.0);
  });
  CHECK(bounded_distance(h, k).at_deepest ==
        doctest::Approx(std::abs(std::log(2.0 * theta))).epsilon(1e-3));
}

TEST_CASE("cone vs cusp distance is unbounded") {
  const double theta = 0.5;
  auto sup_at = [&](double s_max) {
    const auto g = CylinderGrid::uniform_s(1.0, s_max, static_cast<std::size_t>(s_max * 8), 1,
                                           0.25, 3.0);
    const auto h = MetricField::from_function(g, [&](double s, double) {
      const double v = std::sinh(theta * s) / theta;
      return Hermitian2::diag(v, 1.0 / v);
    });
    const auto k = MetricField::from_function(g, [&](double s, double) {
      return Hermitian2::diag(s, 1.0 / s);
    });
    return bounded_distance(h, k).sup;
  };
  CHECK(classify_growth(sup_at, 8.0).verdict == GrowthVerdict::unbounded);
}

TEST_CASE("pointwise metric axioms and congruence invariance") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> ur(-1.0, 1.0);
  auto random_pd = [&]() {
    // g* g + eps for a random complex 2x2 g
    const Mat2 g{complexd(ur(rng), ur(rng)), complexd(ur(rng), ur(rng)),
                 complexd(ur(rng), ur(rng)), complexd(ur(rng), ur(rng))};
    const Mat2 m = g.conj_transpose() * g;
    return Hermitian2{m.a.real() + 0.2, m.d.real() + 0.2, m.b};
  };

  for (int rep = 0; rep < 50; ++rep) {
    const Hermitian2 a = random_pd(), b = random_pd(), c = random_pd();
    const double dab = symmetric_space_distance(a, b);
    const double dba = symmetric_space_distance(b, a);
    CHECK(dab == doctest::Approx(dba).epsilon(1e-10));
    CHECK(symmetric_space_distance(a, a) <= 1e-7);
    CHECK(dab > 0.0);
    CHECK(dab <= symmetric_space_distance(a, c) + symmetric_space_distance(c, b) + 1e-10);

    // invariance under h -> g* h g, k -> g* k g
    const Mat2 g{complexd(ur(rng) + 1.5, ur(rng)), complexd(ur(rng), ur(rng)),
                 complexd(ur(rng), ur(rng)), complexd(ur(rng) + 1.5, ur(rng))};
    auto congr = [&](const Hermitian2& h) {
      const Mat2 m = g.conj_transpose() * (h.to_mat2() * g);
      return Hermitian2{m.a.real(), m.d.real(), m.b};
    };
    CHECK(symmetric_space_distance(congr(a), congr(b)) == doctest::Approx(dab).epsilon(1e-10));
  }
}

TEST_CASE("metric fields from the local model") {
  // route the closed forms through the distance sweep: dist(k_theta, k_theta) = 0,
  // dist(k_theta, k_0) attains its sup at the deepest node
  const auto g = CylinderGrid::uniform_s(1.0, 12.0, 120, 2, 0.25, 3.0);
  auto field = [&](double theta) {
    return MetricField::from_function(g, [&](double s, double) {
      return local_model::eval_cone_metric({theta, 0.0}, std::exp(-s)).h;
    });
  };
  const auto d = bounded_distance(field(0.5), field(0.0));
  CHECK(d.sup == doctest::Approx(d.at_deepest));
  CHECK(d.argmax_node == g.at(g.ns() - 1, 0));
}
