#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "higgs/he_solver.hpp"
#include "higgs/local_model.hpp"

namespace higgs::analyticity {

// Desk-scale certification that the metric family depends analytically on the
// cone parameter: probe values over a theta grid, polynomial-fit residual
// decay, finite-difference derivatives with Richardson bars, and the
// elliptic-to-parabolic monodromy convergence table.

enum class FamilyMode { closed_form, radial_solver };

struct FamilyConfig {
  FamilyMode mode = FamilyMode::closed_form;
  std::vector<double> probes{1.5, 2.5, 4.0};  // probe points s0
  RadialGrid grid{1.0, 8.0, 701};             // radial_solver mode
  he_solver::SolverConfig solver;

  void validate() const;
};

struct FamilyTable {
  std::vector<double> thetas;           // strictly increasing
  std::vector<double> probes;
  std::vector<std::vector<double>> values;  // values[k][q] = w_thetas[k](probes[q])
  FamilyMode mode = FamilyMode::closed_form;

  double value(std::size_t theta_index, std::size_t probe_index) const {
    return values.at(theta_index).at(probe_index);
  }
  void validate() const;
};

/// Populates the table; radial_solver mode converges one independent solve per
/// theta and probes it by cubic interpolation on the solver grid.
FamilyTable solve_family(const std::vector<double>& theta_list, const FamilyConfig& config);

struct FitReport {
  std::vector<int> degrees;
  std::vector<double> residuals;        // max |fit - data| per degree
  std::vector<double> final_coefficients;  // orthogonal-basis coefficients, top degree
  double decay_ratio = 0.0;             // geometric mean over the certified run
  bool certified = false;
  std::string basis = "legendre";
  double floor = 0.0;                   // numerical floor used for certification
};

/// Least-squares polynomial fits of degree 1..d_max on the window; analytic
/// behaviour is certified when the residuals decay geometrically (ratio < 0.5
/// sustained over >= 4 consecutive degrees) before hitting the floor.
FitReport analyticity_fit(const FamilyTable& table, std::size_t probe_index,
                          double window_lo, double window_hi, int d_max = 10,
                          double floor = 1e-13);

struct DerivativeEstimate {
  double theta = 0.0;
  double value = 0.0;
  double error_bar = 0.0;  // Richardson step-halving disagreement
};

/// Central differences + Richardson extrapolation of the probe values with
/// respect to theta; orders 1..3, uniform theta spacing required.
std::vector<DerivativeEstimate> finite_difference_derivative(const FamilyTable& table,
                                                             std::size_t probe_index, int order);

struct MonodromyDistanceRow {
  double theta = 0.0;
  double frobenius_to_limit = 0.0;  // || M_u(theta) - M_u(0) ||_F
  double trace_gap = 0.0;           // | tr - (-1)^beta 2 cos(pi theta) |
  double spectral_gap = 0.0;        // | e^{i pi theta} - 1 |: distance of the
                                    // eigenvalues to the parabolic limit
};

/// Distance table for theta descending to 0.  The Frobenius column decays
/// quadratically (the u-frame matrix is even in theta); the spectral column is
/// the quantity that halves as theta halves.
std::vector<MonodromyDistanceRow> monodromy_convergence(const std::vector<double>& theta_list,
                                                        double beta);

/// Synthetic table for control fixtures (e.g. the |theta - 1/2| kink).
FamilyTable synthetic_table(const std::vector<double>& theta_list,
                            const std::function<double(double)>& f);

}  // namespace higgs::analyticity
