#ifndef PUBGOOD_PLANNER_HPP
#define PUBGOOD_PLANNER_HPP

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "pubgood/model.hpp"

// Planner-side state and updates. This header deliberately knows nothing
// about utilities or endowments: everything here is computable from the
// agents' announced (x_bar, t_bar, g) messages and the planner's own duals.

namespace pubgood {

/// Best-dual-value bookkeeping. Subgradient iterates are not monotone, so
/// the planner keeps the lowest aggregate value seen and the iterate that
/// achieved it.
struct BestTracker {
  double g_min = std::numeric_limits<double>::infinity();
  std::int64_t k_min = -1;
  DualState state_min;
  std::vector<AgentResponse> responses_min;
};

/// lambda(0) = 0; mu(0) = mu0 when given (must have length m(m-1)/2), else 0.
DualState init_duals(std::size_t m, const std::optional<std::vector<double>>& mu0 = std::nullopt);

/// g = sum_i g_i.
double aggregate_dual_value(std::span<const AgentResponse> responses);

/// Replaces the snapshot iff g <= tracker.g_min (ties replace, so the latest
/// tying iterate wins).
void update_best(BestTracker& tracker, double g, std::int64_t k, const DualState& state,
                 std::span<const AgentResponse> responses);

/// lambda_i <- [lambda_i - zeta * (sum_j t_bar_j - x_bar_i)]^+
void update_lambda(std::vector<double>& lambda, std::span<const AgentResponse> responses,
                   double zeta);

/// mu_ij <- mu_ij - zeta * (x_bar_i - x_bar_j) for all i > j (no projection).
void update_mu(std::vector<double>& mu, std::span<const AgentResponse> responses, double zeta);

/// Final charges: gamma_i = x_i l_i - x_i (sum_{j<i} mu_ij - sum_{j>i} mu_ji)
/// - t_i sum_j l_j, evaluated at the converged duals. Adding gamma_i to the
/// agent's relaxed value g_i recovers alpha_i U_i(x_i, t_i) exactly.
std::vector<double> compute_charges(const DualState& duals, std::span<const double> x,
                                    std::span<const double> t);

}  // namespace pubgood

#endif
