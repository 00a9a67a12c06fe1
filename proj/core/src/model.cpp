#include "fitvol/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fitvol {

MarketModel::MarketModel(CoefficientSpec sigma, CoefficientSpec rate,
                         CoefficientSpec dividend, double p_m)
    : sigma_(sigma), rate_(rate), dividend_(dividend), p_m_(p_m) {
    if (!(p_m > 0.0)) throw std::invalid_argument("MarketModel: p_m must be positive");
    if (sigma_.space_dependent())
        throw std::invalid_argument("MarketModel: sigma must be a time-only coefficient");
    if (rate_.space_dependent())
        throw std::invalid_argument("MarketModel: rate must be a time-only coefficient");
    if (!sigma_.strictly_positive())
        throw std::invalid_argument("MarketModel: sigma must be strictly positive for all t");
}

double to_x(double s, double p_m) {
    if (!(s >= 0.0)) throw std::domain_error("to_x: S must be nonnegative");
    if (!(p_m > 0.0)) throw std::domain_error("to_x: p_m must be positive");
    return s / (s + p_m);
}

double from_x(double x, double p_m) {
    if (!(p_m > 0.0)) throw std::domain_error("from_x: p_m must be positive");
    if (!(x >= 0.0) || x >= 1.0) throw std::domain_error("from_x: x must lie in [0,1)");
    return p_m * x / (1.0 - x);
}

double coeff_a(double x, double t, const MarketModel& model) {
    return 0.5 * model.sigma_sq(t) * x * (1.0 - x);
}

double coeff_b(double x, double t, const MarketModel& model) {
    return model.rate(t) - model.dividend(x, t) + model.sigma_sq(t) * (2.0 * x - 1.0);
}

double coeff_c(double x, double t, const MarketModel& model) {
    const double r = model.rate(t);
    const double ss = model.sigma_sq(t);
    const double d = model.dividend(x, t);
    const double dx = model.dividend_ddx(x, t);
    return (2.0 - 3.0 * x) * r - (6.0 * x * x - 6.0 * x + 1.0) * ss - (1.0 - 3.0 * x) * d -
           x * (1.0 - x) * dx;
}

Payoff Payoff::call(double strike) {
    if (!(strike > 0.0)) throw std::invalid_argument("Payoff: strike must be positive");
    return {Kind::Call, {strike, 0.0, 0.0}};
}

Payoff Payoff::put(double strike) {
    if (!(strike > 0.0)) throw std::invalid_argument("Payoff: strike must be positive");
    return {Kind::Put, {strike, 0.0, 0.0}};
}

Payoff Payoff::cash_or_nothing(double strike) {
    if (!(strike > 0.0)) throw std::invalid_argument("Payoff: strike must be positive");
    return {Kind::CashOrNothing, {strike, 0.0, 0.0}};
}

Payoff Payoff::bull_spread(double e1, double e2) {
    if (!(e1 > 0.0 && e1 < e2))
        throw std::invalid_argument("Payoff: bull spread needs 0 < E1 < E2");
    return {Kind::BullSpread, {e1, e2, 0.0}};
}

Payoff Payoff::butterfly(double s1, double s2, double s3) {
    if (!(s1 > 0.0 && s1 < s2 && s2 < s3))
        throw std::invalid_argument("Payoff: butterfly needs 0 < S1 < S2 < S3");
    return {Kind::Butterfly, {s1, s2, s3}};
}

double Payoff::value(double s) const {
    switch (kind_) {
        case Kind::Call:
            return std::max(s - params_[0], 0.0);
        case Kind::Put:
            return std::max(params_[0] - s, 0.0);
        case Kind::CashOrNothing:
            // Half value at the jump: the control-volume average of the
            // Heaviside over a node-centered cell, which keeps the jump
            // mass second-order accurate on nested meshes.
            if (s == params_[0]) return 0.5;
            return s > params_[0] ? 1.0 : 0.0;
        case Kind::BullSpread:
            return std::max(s - params_[0], 0.0) - std::max(s - params_[1], 0.0);
        case Kind::Butterfly:
            // jump points carry their cell-average values
            if (s == params_[0]) return 0.5;
            if (s == params_[2]) return -0.5;
            if (s > params_[0] && s < params_[1]) return 1.0;
            if (s > params_[1] && s < params_[2]) return -1.0;
            return 0.0;
    }
    return 0.0;
}

// u0 = payoff(S)/(S+p_m) rewritten in x. With k = E/p_m each call leg is
// max(S-E,0)/(S+p_m) = max((1+k)x - k, 0); for p_m = E this is max(2x-1,0)
// with 2x-1 exact in floating point on [1/2,1], and every variant reaches
// its x=1 limit without evaluating S.
double initial_condition(const Payoff& payoff, const MarketModel& model, double x) {
    if (!(x >= 0.0 && x <= 1.0))
        throw std::domain_error("initial_condition: x must lie in [0,1]");
    const double p_m = model.p_m();
    switch (payoff.kind()) {
        case Payoff::Kind::Call: {
            const double k = payoff.param(0) / p_m;
            return std::max((1.0 + k) * x - k, 0.0);
        }
        case Payoff::Kind::Put: {
            const double k = payoff.param(0) / p_m;
            return std::max(k - (1.0 + k) * x, 0.0);
        }
        case Payoff::Kind::CashOrNothing: {
            const double k = payoff.param(0) / p_m;
            const double edge = (1.0 + k) * x - k;  // sign of S - E
            if (edge == 0.0) return 0.5 * (1.0 - x) / p_m;
            return edge > 0.0 ? (1.0 - x) / p_m : 0.0;
        }
        case Payoff::Kind::BullSpread: {
            const double k1 = payoff.param(0) / p_m;
            const double k2 = payoff.param(1) / p_m;
            return std::max((1.0 + k1) * x - k1, 0.0) - std::max((1.0 + k2) * x - k2, 0.0);
        }
        case Payoff::Kind::Butterfly: {
            const double x1 = to_x(payoff.param(0), p_m);
            const double x2 = to_x(payoff.param(1), p_m);
            const double x3 = to_x(payoff.param(2), p_m);
            if (x == x1) return 0.5 * (1.0 - x) / p_m;
            if (x == x3) return -0.5 * (1.0 - x) / p_m;
            if (x > x1 && x < x2) return (1.0 - x) / p_m;
            if (x > x2 && x < x3) return -(1.0 - x) / p_m;
            return 0.0;
        }
    }
    return 0.0;
}

double boundary_decay(const MarketModel& model, Boundary end, double t, double u0_at_end) {
    const double integral = end == Boundary::Left ? model.rate_spec().integral_t(0.0, t)
                                                  : model.dividend_spec().integral_t(1.0, t);
    return u0_at_end * std::exp(-integral);
}

}  // namespace fitvol
