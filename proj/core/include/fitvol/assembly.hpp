#pragma once

#include <functional>
#include <span>
#include <vector>

#include "fitvol/flux.hpp"
#include "fitvol/mesh.hpp"
#include "fitvol/model.hpp"

namespace fitvol {

/// Row i of the stiffness operator K(t), where M u' + K u = 0 is the
/// semidiscrete balance law: K_i u = -[x(1-x) rho_h(u)] across the control
/// volume plus c_i l_i u_i. Row 0 has no lo entry, row N no hi entry.
struct StiffnessRow {
    double lo = 0.0;
    double mid = 0.0;
    double hi = 0.0;
};

/// Per-time-step tridiagonal system A_i u_{i-1} + B_i u_i + C_i u_{i+1} = F_i.
/// All four arrays have n = N+1 entries; sub[0] and sup[n-1] are unused (0).
struct TridiagonalSystem {
    std::vector<double> sub;   // A
    std::vector<double> diag;  // B
    std::vector<double> sup;   // C
    std::vector<double> rhs;   // F

    std::size_t size() const { return diag.size(); }
};

using SourceFn = std::function<double(double x, double t)>;

/// Assembles one stiffness row from the face-flux linearizations: with
/// q_s = x_s(1-x_s) at the face midpoints,
///   K_i = -q_{i+1/2} * (upper-face coefficients)
///         +q_{i-1/2} * (lower-face coefficients) + c_i l_i on the diagonal.
/// Faces 0 and N-1 use the degenerate-end fluxes, the sentinel faces carry
/// weight zero.
StiffnessRow stiffness_row(int i, double t, const Mesh& mesh, const MarketModel& model);

/// All N+1 rows of K(t).
std::vector<StiffnessRow> stiffness_rows(double t, const Mesh& mesh, const MarketModel& model);

/// theta-weighted step for given rows and (lumped) masses:
///   B_i = m_i/dt + theta K_i,mid,  A_i = theta K_i,lo,  C_i = theta K_i,hi,
///   F_i = (m_i/dt - (1-theta) K_i,mid) u_i
///         - (1-theta)(K_i,lo u_{i-1} + K_i,hi u_{i+1}) + rhs_extra_i.
TridiagonalSystem theta_step(const std::vector<StiffnessRow>& rows,
                             std::span<const double> mass,
                             std::span<const double> u_prev,
                             double theta, double dt,
                             std::span<const double> rhs_extra = {});

/// Full fitted-scheme step from time t_m: coefficients sampled at
/// t_m + theta*dt and the optional forcing enters as l_i f(x_i, t_m+theta*dt).
/// Throws std::invalid_argument for dt <= 0 or theta outside [0,1].
TridiagonalSystem assemble_step(std::span<const double> u_prev, double theta, double dt,
                                double t_m, const Mesh& mesh, const MarketModel& model,
                                const SourceFn* source = nullptr);

/// Manufactured solution u(x,t) = exp(x - t) with analytic derivatives,
/// used by the convergence studies.
struct Manufactured {
    double value(double x, double t) const;
    double dt(double x, double t) const;
    double dx(double x, double t) const;
    double dxx(double x, double t) const;
};

/// Forcing that makes the manufactured solution satisfy the transformed
/// equation exactly: f = u_t - (1/2)s^2 x^2(1-x)^2 u_xx - x(1-x)(r-d) u_x
/// + ((1-x)r + x d) u, evaluated at the mesh nodes.
std::vector<double> mms_source(const Manufactured& exact, double t, const Mesh& mesh,
                               const MarketModel& model);

/// Pointwise version of the forcing above.
double mms_source_at(const Manufactured& exact, double x, double t, const MarketModel& model);

}  // namespace fitvol
