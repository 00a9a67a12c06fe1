#pragma once

#include <array>

#include "fitvol/coefficient.hpp"

namespace fitvol {

/// Market data for the generalized Black-Scholes model
///
///   V_t + (1/2) sigma^2(t) S^2 V_SS + (r(t) S - S d(S,t)) V_S - r(t) V = 0
///
/// together with the mesh parameter p_m of the transformation
/// x = S/(S+p_m), u = V/(S+p_m) that maps the half line onto (0,1).
/// Immutable after construction; all evaluations are pure.
class MarketModel {
public:
    /// Throws std::invalid_argument unless sigma and rate are time-only
    /// shapes, sigma is strictly positive and p_m > 0.
    MarketModel(CoefficientSpec sigma, CoefficientSpec rate, CoefficientSpec dividend,
                double p_m);

    double sigma(double t) const { return sigma_(0.0, t); }
    double sigma_sq(double t) const { double s = sigma_(0.0, t); return s * s; }
    double rate(double t) const { return rate_(0.0, t); }
    double dividend(double x, double t) const { return dividend_(x, t); }
    double dividend_ddx(double x, double t) const { return dividend_.ddx(x, t); }
    double p_m() const { return p_m_; }

    bool time_dependent() const {
        return sigma_.time_dependent() || rate_.time_dependent() || dividend_.time_dependent();
    }

    const CoefficientSpec& rate_spec() const { return rate_; }
    const CoefficientSpec& dividend_spec() const { return dividend_; }

private:
    CoefficientSpec sigma_, rate_, dividend_;
    double p_m_;
};

/// x = S/(S+p_m); monotone map of [0,inf) onto [0,1).
double to_x(double s, double p_m);
/// S = p_m x/(1-x); inverse of to_x. Throws for x >= 1 (S infinite).
double from_x(double x, double p_m);

/// Divergent-form coefficients of the transformed operator
///
///   u_t - ( x(1-x) (a u_x + b u) )_x + c u = 0
///
/// equivalent to the non-divergent transformed equation
///
///   u_t - (1/2) sigma^2 x^2(1-x)^2 u_xx - x(1-x)(r-d) u_x + ((1-x)r + x d) u = 0.
double coeff_a(double x, double t, const MarketModel& model);
double coeff_b(double x, double t, const MarketModel& model);
double coeff_c(double x, double t, const MarketModel& model);

/// Terminal option payoffs V(S,T) supported by the solver.
class Payoff {
public:
    enum class Kind { Call, Put, CashOrNothing, BullSpread, Butterfly };

    static Payoff call(double strike);
    static Payoff put(double strike);
    /// V = 1 for S >= strike, else 0.
    static Payoff cash_or_nothing(double strike);
    /// Long call at e1, short call at e2; requires 0 < e1 < e2.
    static Payoff bull_spread(double e1, double e2);
    /// V = +1 on (s1,s2), -1 on (s2,s3), 0 elsewhere; requires 0 < s1 < s2 < s3.
    static Payoff butterfly(double s1, double s2, double s3);

    /// Raw payoff V(S,T).
    double value(double s) const;

    Kind kind() const { return kind_; }
    double param(int i) const { return params_[static_cast<unsigned>(i)]; }

private:
    Payoff(Kind kind, std::array<double, 3> params) : kind_(kind), params_(params) {}

    Kind kind_;
    std::array<double, 3> params_;
};

/// Transformed initial data u0(x) = payoff(S(x)) / (S(x)+p_m), extended to
/// x=1 by the growth-rate limit of each payoff (1 for a call, 0 otherwise).
/// Evaluated through algebraically reduced forms, so that e.g. a call with
/// p_m equal to the strike yields max(2x-1, 0) exactly.
double initial_condition(const Payoff& payoff, const MarketModel& model, double x);

enum class Boundary { Left, Right };

/// Exact solution of the degenerate boundary reductions
///   u_t(0,t) = -r(t) u(0,t),   u_t(1,t) = -d(1,t) u(1,t):
/// returns u0 * exp(-Int_0^t r) at x=0 and u0 * exp(-Int_0^t d(1,.)) at x=1,
/// with the integrals in closed form per coefficient shape.
double boundary_decay(const MarketModel& model, Boundary end, double t, double u0_at_end);

}  // namespace fitvol
