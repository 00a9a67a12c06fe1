#pragma once

#include <vector>

#include "fitvol/solver.hpp"

namespace fitvol {

struct AnalyticQuote {
    double price = 0.0;
    double delta = 0.0;  // dV/dS
};

enum class OptionKind { Call, Put };

/// Standard normal CDF via erfc; absolute error well under 1e-10.
double norm_cdf(double z);

/// Dividend-adjusted closed form for constant coefficients:
///   call = S e^{-d tau} Phi(d1) - E e^{-r tau} Phi(d2),
///   d1 = (ln(S/E) + (r - d + s^2/2) tau)/(s sqrt(tau)), d2 = d1 - s sqrt(tau).
/// Throws std::domain_error for nonpositive S, E, sigma or tau.
AnalyticQuote bs_price_delta(double s, double strike, double r, double d, double sigma,
                             double tau, OptionKind kind);

/// Crank-Nicolson centered space difference scheme on the transformed
/// equation, used as the oscillation/positivity comparison baseline.
/// Interior rows use three-point second-order stencils; the end rows are
/// the degenerate reductions u_t = -r u and u_t = -d(1,.) u (which is what
/// the collocation stencil itself degenerates to, since x(1-x) vanishes
/// there). Positivity is intentionally not asserted.
Solution csds_solve(const SolverConfig& config, const Mesh& mesh, const MarketModel& model,
                    const Payoff& payoff);

/// Nodal option delta dV/dS of a recorded slice via the chain rule through
/// the transform. With S + p_m = p_m/(1-x) the expression collapses to
///   delta_i = u_i + (1 - x_i) (u_x)_i,
/// with u_x from three-point centered differences (one-sided at the ends),
/// so the S = infinity node needs no special handling.
std::vector<double> discrete_delta(const Solution& solution, int slice);

}  // namespace fitvol
