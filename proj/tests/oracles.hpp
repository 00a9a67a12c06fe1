#pragma once

// Independent reference computations used by the test suites. Everything
// here works from first principles (fine-grid integration, dense
// elimination, quadrature, finite differences) and never calls into the
// flux/assembly code paths it is used to check.

#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include "fitvol/model.hpp"

namespace oracles {

// Classical RK4 for v' = g(x, v) from x0 to x1 with n steps.
inline double rk4(const std::function<double(double, double)>& g, double x0, double v0,
                  double x1, int n) {
    const double h = (x1 - x0) / n;
    double x = x0, v = v0;
    for (int i = 0; i < n; ++i) {
        const double k1 = g(x, v);
        const double k2 = g(x + 0.5 * h, v + 0.5 * h * k1);
        const double k3 = g(x + 0.5 * h, v + 0.5 * h * k2);
        const double k4 = g(x + h, v + h * k3);
        v += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        x += h;
    }
    return v;
}

// Constant flux of the local problem (a_f x(1-x) v' + b_f v)' = 0 on
// [x_lo, x_hi] with v(x_lo) = u_lo, v(x_hi) = u_hi, by shooting on a fine
// grid. The solution is linear in the conserved constant C, so two sweeps
// determine it.
inline double interior_flux(double a_f, double b_f, double x_lo, double x_hi, double u_lo,
                            double u_hi, int n_grid = 100000) {
    auto rhs = [&](double c) {
        return [=](double x, double v) { return (c - b_f * v) / (a_f * x * (1.0 - x)); };
    };
    const double v0 = rk4(rhs(0.0), x_lo, u_lo, x_hi, n_grid);
    const double v1 = rk4(rhs(1.0), x_lo, u_lo, x_hi, n_grid);
    return (u_hi - v0) / (v1 - v0);
}

// Flux of the degenerate left-end problem (abar x v' + b v)' = C on
// (0, x1) with v(0) = u0, v(x1) = u1 and b/abar >= 0, evaluated at x_eval.
// Integrating once gives abar x v' + b v = C x + b u0; the bounded branch
// fixes v near 0 through v'(0) = C/(abar+b), and C is fitted by shooting
// from a small offset.
inline double left_flux(double abar, double b, double x1, double u0, double u1,
                        double x_eval, int n_grid = 100000) {
    const double delta = 1e-9 * x1;
    auto rhs = [&](double c) {
        return [=](double x, double v) { return (c * x + b * u0 - b * v) / (abar * x); };
    };
    auto shoot = [&](double c) {
        const double v_start = u0 + c / (abar + b) * delta;
        return rk4(rhs(c), delta, v_start, x1, n_grid);
    };
    const double v0 = shoot(0.0);
    const double v1 = shoot(1.0);
    const double c_star = (u1 - v0) / (v1 - v0);
    return c_star * x_eval + b * u0;
}

// Dense Gaussian elimination with partial pivoting; reference for the
// tridiagonal solver.
inline std::vector<double> dense_solve(std::vector<std::vector<double>> a,
                                       std::vector<double> rhs) {
    const std::size_t n = rhs.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a[i][k]) > std::abs(a[p][k])) p = i;
        std::swap(a[k], a[p]);
        std::swap(rhs[k], rhs[p]);
        if (a[k][k] == 0.0) throw std::runtime_error("dense_solve: singular matrix");
        for (std::size_t i = k + 1; i < n; ++i) {
            const double m = a[i][k] / a[k][k];
            for (std::size_t j = k; j < n; ++j) a[i][j] -= m * a[k][j];
            rhs[i] -= m * rhs[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = rhs[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
        x[i] = s / a[i][i];
    }
    return x;
}

// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    if (n % 2 != 0) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// Discounted lognormal expectation of a call payoff: quadrature in the
// standard normal variable, starting exactly at the kink.
inline double lognormal_call_price(double s, double e, double r, double d, double sigma,
                                   double tau) {
    const double mu = (r - d - 0.5 * sigma * sigma) * tau;
    const double vol = sigma * std::sqrt(tau);
    const double z_kink = (std::log(e / s) - mu) / vol;
    const double lo = std::max(z_kink, -14.0);
    auto integrand = [&](double z) {
        const double st = s * std::exp(mu + vol * z);
        const double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
        return std::max(st - e, 0.0) * phi;
    };
    return std::exp(-r * tau) * simpson(integrand, lo, 14.0, 200000);
}

// Five-point fourth-order first derivative.
inline double fd4(const std::function<double(double)>& g, double x, double h) {
    return (-g(x + 2.0 * h) + 8.0 * g(x + h) - 8.0 * g(x - h) + g(x - 2.0 * h)) / (12.0 * h);
}

// Maximum relative disagreement between the divergent operator
// -(x(1-x)(a w' + b w))' + c w (outer derivative by fd4 of the analytic
// inner product) and the non-divergent transformed operator, over
// n_points random (x, t) with x in [0.05, 0.95]. Certifies the a, b, c
// formulas against each other.
inline double operator_equivalence_max_rel(const fitvol::MarketModel& model, double horizon,
                                           unsigned seed, int n_points) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> ux(0.05, 0.95);
    std::uniform_real_distribution<double> ut(0.0, horizon);

    auto w = [](double x) { return std::exp(0.7 * x) * std::sin(2.1 * x + 0.3) + 1.2; };
    auto w1 = [](double x) {
        return std::exp(0.7 * x) * (0.7 * std::sin(2.1 * x + 0.3) + 2.1 * std::cos(2.1 * x + 0.3));
    };
    auto w2 = [](double x) {
        return std::exp(0.7 * x) * ((0.49 - 4.41) * std::sin(2.1 * x + 0.3) +
                                    2.0 * 0.7 * 2.1 * std::cos(2.1 * x + 0.3));
    };

    double worst = 0.0;
    for (int k = 0; k < n_points; ++k) {
        const double x = ux(rng);
        const double t = ut(rng);
        auto inner = [&](double y) {
            return y * (1.0 - y) *
                   (fitvol::coeff_a(y, t, model) * w1(y) + fitvol::coeff_b(y, t, model) * w(y));
        };
        const double divergent = -fd4(inner, x, 0.005) + fitvol::coeff_c(x, t, model) * w(x);

        const double q = x * (1.0 - x);
        const double r = model.rate(t);
        const double d = model.dividend(x, t);
        const double direct = -0.5 * model.sigma_sq(t) * q * q * w2(x) - q * (r - d) * w1(x) +
                              ((1.0 - x) * r + x * d) * w(x);

        // Operator values are O(0.1..1) for this window function; the floor
        // keeps the ratio meaningful where the operator crosses zero.
        const double scale = std::max({std::abs(direct), std::abs(divergent), 1e-2});
        worst = std::max(worst, std::abs(divergent - direct) / scale);
    }
    return worst;
}

}  // namespace oracles
