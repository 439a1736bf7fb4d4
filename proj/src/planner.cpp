#include "pubgood/planner.hpp"

#include <algorithm>

namespace pubgood {

DualState init_duals(std::size_t m, const std::optional<std::vector<double>>& mu0) {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "init_duals: need m >= 1");
  DualState s;
  s.lambda.assign(m, 0.0);
  const std::size_t pairs = m * (m - 1) / 2;
  if (mu0) {
    if (mu0->size() != pairs)
      throw Error(ErrorCode::Length, "init_duals: mu0 has wrong length");
    s.mu = *mu0;
  } else {
    s.mu.assign(pairs, 0.0);
  }
  return s;
}

double aggregate_dual_value(std::span<const AgentResponse> responses) {
  double g = 0.0;
  for (const auto& r : responses) g += r.g;
  return g;
}

void update_best(BestTracker& tracker, double g, std::int64_t k, const DualState& state,
                 std::span<const AgentResponse> responses) {
  if (g <= tracker.g_min) {
    tracker.g_min = g;
    tracker.k_min = k;
    tracker.state_min = state;
    tracker.responses_min.assign(responses.begin(), responses.end());
  }
}

void update_lambda(std::vector<double>& lambda, std::span<const AgentResponse> responses,
                   double zeta) {
  if (lambda.size() != responses.size())
    throw Error(ErrorCode::Length, "update_lambda: lambda/responses length mismatch");
  double t_total = 0.0;
  for (const auto& r : responses) t_total += r.t_bar;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    const double s_i = t_total - responses[i].x_bar;
    lambda[i] = std::max(lambda[i] - zeta * s_i, 0.0);
  }
}

void update_mu(std::vector<double>& mu, std::span<const AgentResponse> responses, double zeta) {
  const std::size_t m = responses.size();
  if (mu.size() != m * (m - 1) / 2)
    throw Error(ErrorCode::Length, "update_mu: mu/responses length mismatch");
  std::size_t idx = 0;  // walks the flat (i,j), i > j order
  for (std::size_t i = 1; i < m; ++i)
    for (std::size_t j = 0; j < i; ++j, ++idx)
      mu[idx] -= zeta * (responses[i].x_bar - responses[j].x_bar);
}

std::vector<double> compute_charges(const DualState& duals, std::span<const double> x,
                                    std::span<const double> t) {
  const std::size_t m = duals.lambda.size();
  if (x.size() != m || t.size() != m)
    throw Error(ErrorCode::Length, "compute_charges: allocation length mismatch");
  double lam_total = 0.0;
  for (double l : duals.lambda) lam_total += l;
  std::vector<double> gamma(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double c_i = mu_coefficient(i + 1, duals.mu, m);
    gamma[i] = x[i] * duals.lambda[i] - x[i] * c_i - t[i] * lam_total;
  }
  return gamma;
}

}  // namespace pubgood
