#include "fitvol/assembly.hpp"

#include <cmath>
#include <stdexcept>

namespace fitvol {

namespace {

double face_weight(const Mesh& mesh, int face) {
    const double xm = mesh.midpoint(face);
    return xm * (1.0 - xm);
}

FaceFlux face_flux(int face, double t, const Mesh& mesh, const MarketModel& model) {
    const int n = mesh.n_intervals();
    if (face == 0) return flux_left(t, mesh, model);
    if (face == n - 1) return flux_right(t, mesh, model);
    return flux_interior(face, t, mesh, model);
}

}  // namespace

StiffnessRow stiffness_row(int i, double t, const Mesh& mesh, const MarketModel& model) {
    const int n = mesh.n_intervals();
    if (i < 0 || i > n) throw std::out_of_range("stiffness_row: node index out of range");

    StiffnessRow row;
    row.mid = coeff_c(mesh.node(i), t, model) * mesh.volume(i);
    // Upper face i (sentinel beyond x_N carries weight zero).
    if (i <= n - 1) {
        const FaceFlux up = face_flux(i, t, mesh, model);
        const double q = face_weight(mesh, i);
        row.mid -= q * up.coeff_lo;
        row.hi = -q * up.coeff_hi;
    }
    // Lower face i-1 (sentinel below x_0 carries weight zero).
    if (i >= 1) {
        const FaceFlux lo = face_flux(i - 1, t, mesh, model);
        const double q = face_weight(mesh, i - 1);
        row.lo = q * lo.coeff_lo;
        row.mid += q * lo.coeff_hi;
    }
    return row;
}

std::vector<StiffnessRow> stiffness_rows(double t, const Mesh& mesh, const MarketModel& model) {
    const int n = mesh.n_intervals();
    std::vector<StiffnessRow> rows(static_cast<unsigned>(n) + 1);

    // Walk the faces once instead of calling stiffness_row per node.
    for (int i = 0; i <= n; ++i)
        rows[i].mid = coeff_c(mesh.node(i), t, model) * mesh.volume(i);
    for (int face = 0; face < n; ++face) {
        const FaceFlux f = face_flux(face, t, mesh, model);
        const double q = face_weight(mesh, face);
        rows[face].mid -= q * f.coeff_lo;   // upper face of row `face`
        rows[face].hi = -q * f.coeff_hi;
        rows[face + 1].lo = q * f.coeff_lo; // lower face of row `face+1`
        rows[face + 1].mid += q * f.coeff_hi;
    }
    return rows;
}

TridiagonalSystem theta_step(const std::vector<StiffnessRow>& rows,
                             std::span<const double> mass, std::span<const double> u_prev,
                             double theta, double dt, std::span<const double> rhs_extra) {
    const std::size_t n = rows.size();
    if (mass.size() != n || u_prev.size() != n)
        throw std::invalid_argument("theta_step: size mismatch");

    TridiagonalSystem sys;
    sys.sub.assign(n, 0.0);
    sys.diag.assign(n, 0.0);
    sys.sup.assign(n, 0.0);
    sys.rhs.assign(n, 0.0);
    const double expl = 1.0 - theta;
    for (std::size_t i = 0; i < n; ++i) {
        const double m_dt = mass[i] / dt;
        sys.diag[i] = m_dt + theta * rows[i].mid;
        sys.sub[i] = theta * rows[i].lo;
        sys.sup[i] = theta * rows[i].hi;
        double f = (m_dt - expl * rows[i].mid) * u_prev[i];
        if (i > 0) f -= expl * rows[i].lo * u_prev[i - 1];
        if (i + 1 < n) f -= expl * rows[i].hi * u_prev[i + 1];
        if (!rhs_extra.empty()) f += rhs_extra[i];
        sys.rhs[i] = f;
    }
    return sys;
}

TridiagonalSystem assemble_step(std::span<const double> u_prev, double theta, double dt,
                                double t_m, const Mesh& mesh, const MarketModel& model,
                                const SourceFn* source) {
    if (!(dt > 0.0)) throw std::invalid_argument("assemble_step: dt must be positive");
    if (!(theta >= 0.0 && theta <= 1.0))
        throw std::invalid_argument("assemble_step: theta must lie in [0,1]");
    const double t_mid = t_m + theta * dt;
    const auto rows = stiffness_rows(t_mid, mesh, model);

    std::vector<double> extra;
    if (source) {
        extra.resize(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i)
            extra[i] = mesh.volume(static_cast<int>(i)) *
                       (*source)(mesh.node(static_cast<int>(i)), t_mid);
    }
    return theta_step(rows, mesh.volumes(), u_prev, theta, dt, extra);
}

double Manufactured::value(double x, double t) const { return std::exp(x - t); }
double Manufactured::dt(double x, double t) const { return -std::exp(x - t); }
double Manufactured::dx(double x, double t) const { return std::exp(x - t); }
double Manufactured::dxx(double x, double t) const { return std::exp(x - t); }

double mms_source_at(const Manufactured& exact, double x, double t,
                     const MarketModel& model) {
    const double q = x * (1.0 - x);
    const double r = model.rate(t);
    const double d = model.dividend(x, t);
    return exact.dt(x, t) - 0.5 * model.sigma_sq(t) * q * q * exact.dxx(x, t) -
           q * (r - d) * exact.dx(x, t) + ((1.0 - x) * r + x * d) * exact.value(x, t);
}

std::vector<double> mms_source(const Manufactured& exact, double t, const Mesh& mesh,
                               const MarketModel& model) {
    std::vector<double> f(static_cast<unsigned>(mesh.n_nodes()));
    for (int i = 0; i < mesh.n_nodes(); ++i) f[i] = mms_source_at(exact, mesh.node(i), t, model);
    return f;
}

}  // namespace fitvol
