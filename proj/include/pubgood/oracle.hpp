#ifndef PUBGOOD_ORACLE_HPP
#define PUBGOOD_ORACLE_HPP

#include <vector>

#include "pubgood/model.hpp"

// Centralized ground-truth solver for the welfare problem
//
//   maximize    sum_i alpha_i U_i(x, t_i)
//   subject to  sum_j t_j >= x,   0 <= x <= L,   t_i <= w_i
//
// Utilities are decreasing in t_i, so the financing constraint is active at
// the optimum and the problem collapses to a 1-D concave maximization of
// V(x) = max_t { sum_i alpha_i U_i(x, t_i) : sum t_i = x } over
// x in [0, min(L, sum_i w_i)].

namespace pubgood {

struct OracleResult {
  double x_opt = 0.0;
  std::vector<double> t_opt;
  double value = 0.0;
  double inner_multiplier = 0.0;  // scalar price of the budget sum t = x
};

struct InnerAllocation {
  std::vector<double> t;
  double value = 0.0;
  double nu = 0.0;
};

/// Splits a fixed budget x across the agents: maximizes
/// sum_i alpha_i U_i(x, t_i) subject to sum t_i = x and
/// t_i in [-T_max_i, w_i]. Solved by bisection on the scalar multiplier nu
/// of the budget constraint; each t_i(nu) equates alpha_i dU_i/dt to -nu,
/// clamped to its box. Requires 0 <= x <= min(L, sum w_i).
InnerAllocation inner_allocation(const ValidatedScenario& s, double x);

/// Golden-section search on V(x) to bracket width `tol` (V is concave:
/// partial maximization of a jointly concave objective over a convex set).
OracleResult centralized_solve(const ValidatedScenario& s, double tol = 1e-8);

/// Best objective over the uniform grid {x} x {t_1} x ... x {t_m}
/// (n+1 points per axis; points with sum t_j < x are skipped). A lower
/// bound on the true optimum within one grid cell's objective variation.
/// Throws Error(TooLarge) for m > 3.
double brute_grid_check(const ValidatedScenario& s, int n);

}  // namespace pubgood

#endif
