#ifndef PUBGOOD_AGENT_HPP
#define PUBGOOD_AGENT_HPP

#include <cstddef>
#include <span>

#include "pubgood/model.hpp"

namespace pubgood {

/// Everything one agent needs to answer an announcement. `spec` is the
/// agent's private data (utility and endowment); nothing outside this module
/// reads it.
struct AgentContext {
  std::size_t index = 1;  // 1-based agent id
  AgentSpec spec;
  double t_max = 0.0;  // contribution floor magnitude: t in [-t_max, spec.w]
  double L = 1.0;
  std::size_t m = 1;
};

AgentContext agent_context(const ValidatedScenario& s, std::size_t idx0);

/// Value of agent i's relaxed objective at (x, t):
///   alpha_i U_i(x,t) + t * sum_j lambda_j - x * lambda_i + x * c_i.
double agent_objective(const AgentContext& ctx, std::span<const double> lambda,
                       std::span<const double> mu, double x, double t);

/// How solve_agent locates the maximizer. The built-in families split into
/// two 1-D concave problems with closed-form stationary points; Bisection
/// and CoordinateAscent exist as independent cross-check routes and as the
/// fallback for external utilities.
enum class SolveMethod {
  Auto,             // ClosedForm for built-ins, CoordinateAscent for external
  ClosedForm,
  Bisection,        // derivative bisection per coordinate
  CoordinateAscent, // 2-D projected coordinate ascent
};

/// Maximizes the relaxed objective over [0, L] x [-t_max, w] and returns the
/// maximizer with the attained value g_i. Requires lambda >= 0 componentwise.
/// Throws Error(Numerical) if the iterative fallback fails to converge
/// within its cap.
AgentResponse solve_agent(const AgentContext& ctx, std::span<const double> lambda,
                          std::span<const double> mu,
                          SolveMethod method = SolveMethod::Auto);

}  // namespace pubgood

#endif
