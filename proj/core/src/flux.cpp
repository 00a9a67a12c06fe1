#include "fitvol/flux.hpp"

#include <cmath>
#include <stdexcept>

namespace fitvol {

namespace {

// ln(x/(1-x)), the natural coordinate of the fitted profile.
double log_phi(double x) { return std::log(x) - std::log1p(-x); }

// abar = (1/2) sigma^2 (1-x): the non-degenerate diffusion factor at the
// left end, where the flux is written abar * x * u' + b u.
double abar_left(double x, double t, const MarketModel& model) {
    return 0.5 * model.sigma_sq(t) * (1.0 - x);
}

// Mirror factor at the right end: flux = adbar * (1-x) * u' + b u.
double adbar_right(double x, double t, const MarketModel& model) {
    return 0.5 * model.sigma_sq(t) * x;
}

// (e^p - 1)/(e^q - 1) for p, q of the same sign with |p| <= |q|, q != 0.
// Rescaled for q > 0 so large arguments cannot overflow.
double expm1_ratio(double p, double q) {
    if (q > 0.0) return std::exp(p - q) * std::expm1(-p) / std::expm1(-q);
    return std::expm1(p) / std::expm1(q);
}

}  // namespace

double bernoulli(double z) {
    const double az = std::abs(z);
    if (az < 1e-5) return 1.0 - 0.5 * z + z * z / 12.0;  // next term z^4/720
    return z / std::expm1(z);
}

double face_alpha(int face, double t, const Mesh& mesh, const MarketModel& model) {
    const int n = mesh.n_intervals();
    if (face < 0 || face >= n) throw std::out_of_range("face_alpha: face index out of range");
    const double xm = mesh.midpoint(face);
    const double b = coeff_b(xm, t, model);
    if (face == 0) return b / abar_left(xm, t, model);
    if (face == n - 1) return b / adbar_right(xm, t, model);
    return b / (0.5 * model.sigma_sq(t));
}

FaceFlux flux_interior(int face, double t, const Mesh& mesh, const MarketModel& model) {
    const int n = mesh.n_intervals();
    if (face < 1 || face > n - 2)
        throw std::out_of_range("flux_interior: face must be interior (1..N-2)");
    const double xm = mesh.midpoint(face);
    // The local problem keeps the full degenerate weight x(1-x) and
    // freezes only the non-degenerate diffusion factor s^2/2 per face,
    // (a x(1-x) v' + b v)' = 0 with a = s^2/2. Freezing x(1-x) as well
    // would scale the assembled diffusive flux by an extra x(1-x) and
    // lose consistency.
    const double a = 0.5 * model.sigma_sq(t);
    const double b = coeff_b(xm, t, model);
    const double d = log_phi(mesh.node(face + 1)) - log_phi(mesh.node(face));  // > 0
    const double z = b / a * d;
    FaceFlux f;
    f.face = face;
    f.coeff_hi = a / d * bernoulli(-z);
    f.coeff_lo = -a / d * bernoulli(z);
    return f;
}

FaceFlux flux_left(double t, const Mesh& mesh, const MarketModel& model) {
    const double xm = mesh.midpoint(0);
    const double ab = abar_left(xm, t, model);
    const double b = coeff_b(xm, t, model);
    FaceFlux f;
    f.face = 0;
    if (b >= 0.0) {  // alpha_0 = b/abar >= 0
        f.coeff_lo = 0.5 * (b - ab);
        f.coeff_hi = 0.5 * (ab + b);
    } else {
        f.coeff_lo = b;
        f.coeff_hi = 0.0;
    }
    return f;
}

FaceFlux flux_right(double t, const Mesh& mesh, const MarketModel& model) {
    const int n = mesh.n_intervals();
    const double xm = mesh.midpoint(n - 1);
    const double ad = adbar_right(xm, t, model);
    const double b = coeff_b(xm, t, model);
    FaceFlux f;
    f.face = n - 1;
    if (b <= 0.0) {  // alpha_{N-1} = b/adbar <= 0
        f.coeff_lo = 0.5 * (b - ad);
        f.coeff_hi = 0.5 * (ad + b);
    } else {
        f.coeff_lo = 0.0;
        f.coeff_hi = b;
    }
    return f;
}

double basis_eval(int i, double x, double t, const Mesh& mesh, const MarketModel& model) {
    const int n = mesh.n_intervals();
    if (i < 0 || i > n) throw std::out_of_range("basis_eval: node index out of range");
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("basis_eval: x outside [0,1]");

    const int j = mesh.interval_of(x);
    if (x == mesh.node(j)) return i == j ? 1.0 : 0.0;
    if (x == mesh.node(j + 1)) return i == j + 1 ? 1.0 : 0.0;
    if (i != j && i != j + 1) return 0.0;

    // Linear hats on the two degenerate end intervals.
    if (j == 0) {
        const double x1 = mesh.node(1);
        return i == 0 ? (x1 - x) / x1 : x / x1;
    }
    if (j == n - 1) {
        const double xl = mesh.node(n - 1);
        return i == n ? (x - xl) / (1.0 - xl) : (1.0 - x) / (1.0 - xl);
    }

    // Fitted profile on an interior interval: with L = ln(x/(1-x)), the
    // shape interpolates exponentials of alpha*L and degenerates to the
    // ratio of log increments as alpha -> 0.
    const double alpha = face_alpha(j, t, mesh, model);
    const double l_lo = log_phi(mesh.node(j));
    const double l_hi = log_phi(mesh.node(j + 1));
    const double l_x = log_phi(x);
    if (alpha == 0.0) {
        return i == j ? (l_hi - l_x) / (l_hi - l_lo) : (l_x - l_lo) / (l_hi - l_lo);
    }
    if (i == j) return expm1_ratio(alpha * (l_hi - l_x), alpha * (l_hi - l_lo));
    return expm1_ratio(-alpha * (l_x - l_lo), -alpha * (l_hi - l_lo));
}

}  // namespace fitvol
