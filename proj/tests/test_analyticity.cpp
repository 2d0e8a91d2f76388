#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>

#include "higgs/analyticity.hpp"

using namespace higgs;
using namespace higgs::analyticity;

namespace {

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

}  // namespace

TEST_CASE("closed-form and solver families agree at the probes") {
  FamilyConfig closed;
  closed.mode = FamilyMode::closed_form;
  FamilyConfig solver;
  solver.mode = FamilyMode::radial_solver;

  const std::vector<double> thetas{0.2, 0.4, 0.6};
  const auto tc = solve_family(thetas, closed);
  const auto ts = solve_family(thetas, solver);
  for (std::size_t k = 0; k < thetas.size(); ++k)
    for (std::size_t q = 0; q < tc.probes.size(); ++q)
      CHECK(std::abs(tc.value(k, q) - ts.value(k, q)) < 1e-4);
}

TEST_CASE("family includes the cusp endpoint") {
  FamilyConfig cfg;
  const auto t = solve_family({0.0, 0.1, 0.2}, cfg);
  CHECK(t.value(0, 0) == doctest::Approx(std::log(1.5)).epsilon(1e-12));
}

TEST_CASE("probe values increase with theta") {
  // h11(theta, r) = s * sinch(theta s) grows in theta (sinh(x)/x increasing),
  // so the log-probe values are increasing at every fixed probe point.
  FamilyConfig cfg;
  const auto t = solve_family(linspace(0.0, 0.9, 19), cfg);
  for (std::size_t q = 0; q < t.probes.size(); ++q)
    for (std::size_t k = 1; k < t.thetas.size(); ++k)
      CHECK(t.value(k, q) > t.value(k - 1, q));
}

TEST_CASE("rerunning the family is bit-identical") {
  FamilyConfig cfg;
  cfg.mode = FamilyMode::radial_solver;
  cfg.grid = RadialGrid(1.0, 8.0, 301);
  const auto a = solve_family(linspace(0.1, 0.7, 9), cfg);
  const auto b = solve_family(linspace(0.1, 0.7, 9), cfg);
  for (std::size_t k = 0; k < a.thetas.size(); ++k)
    for (std::size_t q = 0; q < a.probes.size(); ++q) {
      const double x = a.value(k, q), y = b.value(k, q);
      CHECK(std::memcmp(&x, &y, sizeof(double)) == 0);
    }
}

TEST_CASE("analyticity certification on the closed-form family") {
  FamilyConfig cfg;
  const auto table = solve_family(linspace(0.1, 0.7, 41), cfg);
  for (std::size_t q = 0; q < table.probes.size(); ++q) {
    const auto rep = analyticity_fit(table, q, 0.1, 0.7);
    CHECK(rep.certified);
    CHECK(rep.decay_ratio < 0.5);
    CHECK(rep.basis == "legendre");
    // residuals non-increasing in degree on the fitted window
    for (std::size_t i = 1; i < rep.residuals.size(); ++i)
      CHECK(rep.residuals[i] <= rep.residuals[i - 1] * (1.0 + 1e-9));
  }

  // one-sided window at the cusp endpoint
  const auto edge = solve_family(linspace(0.005, 0.2, 40), cfg);
  CHECK(analyticity_fit(edge, 0, 0.005, 0.2).certified);
}

TEST_CASE("certification is stable under grid refinement") {
  FamilyConfig coarse;
  coarse.mode = FamilyMode::radial_solver;
  coarse.grid = RadialGrid(1.0, 8.0, 351);
  FamilyConfig fine = coarse;
  fine.grid = RadialGrid(1.0, 8.0, 701);

  const auto thetas = linspace(0.1, 0.7, 25);
  CHECK(analyticity_fit(solve_family(thetas, coarse), 1, 0.1, 0.7).certified);
  CHECK(analyticity_fit(solve_family(thetas, fine), 1, 0.1, 0.7).certified);
}

TEST_CASE("synthetic controls") {
  const auto thetas = linspace(0.1, 0.7, 41);

  // linear data: degree-1 residual at round-off
  const auto lin = synthetic_table(thetas, [](double t) { return 2.0 - 3.0 * t; });
  const auto rl = analyticity_fit(lin, 0, 0.1, 0.7);
  CHECK(rl.residuals.front() <= 1e-12);

  // |theta - 1/2| kink: no sustained geometric decay
  const auto kink = synthetic_table(thetas, [](double t) { return std::abs(t - 0.5); });
  const auto rk = analyticity_fit(kink, 0, 0.1, 0.7);
  CHECK(!rk.certified);

  CHECK_THROWS_AS(analyticity_fit(lin, 0, 0.1, 0.11), std::invalid_argument);  // < 8 samples
}

TEST_CASE("finite-difference derivatives with Richardson bars") {
  FamilyConfig cfg;
  const auto table = solve_family(linspace(0.2, 0.6, 41), cfg);

  // oracle: d/dtheta log(sinh(theta s0)/theta) = s0 coth(theta s0) - 1/theta
  const auto est = finite_difference_derivative(table, 1, 1);  // probe s0 = 2.5
  CHECK(est.size() == 41 - 4);
  for (const auto& e : est) {
    const double exact = he_solver::w_star_dtheta(e.theta, 2.5);
    CHECK(std::abs(e.value - exact) <= e.error_bar + 1e-9);
  }

  // derivative of a constant table is 0; second derivative of theta^2 is 2
  const auto thetas = linspace(0.1, 0.9, 17);
  const auto cst = synthetic_table(thetas, [](double) { return 4.2; });
  for (const auto& e : finite_difference_derivative(cst, 0, 1)) CHECK(std::abs(e.value) <= 1e-12);

  const auto quad = synthetic_table(thetas, [](double t) { return t * t; });
  for (const auto& e : finite_difference_derivative(quad, 0, 2))
    CHECK(e.value == doctest::Approx(2.0).epsilon(1e-9));

  const auto cub = synthetic_table(thetas, [](double t) { return t * t * t; });
  for (const auto& e : finite_difference_derivative(cub, 0, 3))
    CHECK(e.value == doctest::Approx(6.0).epsilon(1e-7));

  // non-uniform spacing rejected
  FamilyTable bad = cst;
  bad.thetas[3] += 1e-3;
  bad.validate();
  CHECK_THROWS_AS(finite_difference_derivative(bad, 0, 1), std::invalid_argument);
}

TEST_CASE("monodromy convergence table") {
  std::vector<double> thetas;
  for (int k = 1; k <= 8; ++k) thetas.push_back(std::pow(2.0, -k));
  const auto rows = monodromy_convergence(thetas, 0.0);
  REQUIRE(rows.size() == 8);

  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].trace_gap <= 1e-12);
    if (i > 0) {
      CHECK(rows[i].frobenius_to_limit < rows[i - 1].frobenius_to_limit);
      // the spectral distance to the parabolic limit halves per step
      const double ratio = rows[i].spectral_gap / rows[i - 1].spectral_gap;
      CHECK(ratio >= 0.4);
      CHECK(ratio <= 0.6);
      // the matrix gap is even in theta and contracts quadratically
      const double fr = rows[i].frobenius_to_limit / rows[i - 1].frobenius_to_limit;
      CHECK(fr >= 0.2);
      CHECK(fr <= 0.3);
    }
  }

  // beta = 1 carries the sign in the trace identity
  const auto rows1 = monodromy_convergence({0.25, 0.125}, 1.0);
  CHECK(rows1[0].trace_gap <= 1e-12);

  CHECK_THROWS_AS(monodromy_convergence({0.1, 0.2}, 0.0), std::invalid_argument);
}
