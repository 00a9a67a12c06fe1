#pragma once

#include "fitvol/mesh.hpp"
#include "fitvol/model.hpp"

namespace fitvol {

/// Linearization of the fitted approximation to the weighted flux density
/// rho(u) = a u_x + b u at a control-volume face:
///   rho_face ~= coeff_lo * u_face + coeff_hi * u_{face+1}.
/// Assembly consumes the coefficients directly (scaled by the x(1-x) face
/// weight); value() is a convenience for tests and interpolation.
struct FaceFlux {
    double coeff_lo = 0.0;
    double coeff_hi = 0.0;
    int face = 0;

    double value(double u_lo, double u_hi) const {
        return coeff_lo * u_lo + coeff_hi * u_hi;
    }
};

/// Cancellation-safe z / (exp(z) - 1); the generating function of the
/// fitted (exponentially weighted) two-point flux.
double bernoulli(double z);

/// Convection/diffusion ratio at a face. Interior faces use
/// b_{i+1/2}/a_{i+1/2}; the end faces divide by the non-degenerate factors
/// abar = (1/2) sigma^2 (1 - x_{1/2}) resp. adbar = (1/2) sigma^2 x_{N-1/2}.
double face_alpha(int face, double t, const Mesh& mesh, const MarketModel& model);

/// Fitted flux on an interior face 1 <= face <= N-2. Solves the local
/// two-point problem (a_f x(1-x) v' + b_f v)' = 0 exactly; the resulting
/// two-point coefficients are
///   coeff_hi = (a_f/D) B(-z),  coeff_lo = -(a_f/D) B(z),
/// with D = ln(phi_{face+1}/phi_face), phi_j = x_j/(1-x_j), z = alpha D and
/// B the bernoulli function above. This is algebraically identical to the
/// ratio-of-powers form but stays finite and branch-free through b -> 0,
/// where it reduces to a_f (u_hi - u_lo)/D.
FaceFlux flux_interior(int face, double t, const Mesh& mesh, const MarketModel& model);

/// Fitted flux on the degenerate left face x_{1/2}. For alpha_0 >= 0 the
/// local problem with an auxiliary constant source has a bounded solution
/// and linearizes to 0.5(b-abar) u_0 + 0.5(abar+b) u_1 at x_{1/2}; for
/// alpha_0 < 0 the bounded solution carries the purely convective flux
/// b_{1/2} u_0.
FaceFlux flux_left(double t, const Mesh& mesh, const MarketModel& model);

/// Mirror image of flux_left at the degenerate right face x_{N-1/2}:
/// 0.5(b-adbar) u_{N-1} + 0.5(adbar+b) u_N for alpha_{N-1} <= 0, and
/// b_{N-1/2} u_N for alpha_{N-1} > 0.
FaceFlux flux_right(double t, const Mesh& mesh, const MarketModel& model);

/// Fitted hat function phi_i(x): exponentially fitted profile on interior
/// intervals, linear on (0,x_1) and (x_{N-1},1). phi_i(x_j) = delta_ij and
/// the family sums to one on every interval.
double basis_eval(int i, double x, double t, const Mesh& mesh, const MarketModel& model);

}  // namespace fitvol
