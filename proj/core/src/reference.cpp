#include "fitvol/reference.hpp"

#include <cmath>
#include <stdexcept>

namespace fitvol {

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

AnalyticQuote bs_price_delta(double s, double strike, double r, double d, double sigma,
                             double tau, OptionKind kind) {
    if (!(s > 0.0 && strike > 0.0 && sigma > 0.0 && tau > 0.0))
        throw std::domain_error("bs_price_delta: S, E, sigma and tau must be positive");
    const double vol = sigma * std::sqrt(tau);
    const double d1 = (std::log(s / strike) + (r - d + 0.5 * sigma * sigma) * tau) / vol;
    const double d2 = d1 - vol;
    const double disc_s = s * std::exp(-d * tau);
    const double disc_e = strike * std::exp(-r * tau);
    AnalyticQuote q;
    if (kind == OptionKind::Call) {
        q.price = disc_s * norm_cdf(d1) - disc_e * norm_cdf(d2);
        q.delta = std::exp(-d * tau) * norm_cdf(d1);
    } else {
        q.price = disc_e * norm_cdf(-d2) - disc_s * norm_cdf(-d1);
        q.delta = std::exp(-d * tau) * (norm_cdf(d1) - 1.0);
    }
    return q;
}

namespace {

// Collocation rows of the transformed (non-divergent) operator with
// three-point second-order stencils. The x(1-x) factors vanish at the end
// nodes, so rows 0 and N reduce to the boundary decay ODEs by themselves.
std::vector<StiffnessRow> csds_rows(double t, const Mesh& mesh, const MarketModel& model) {
    const int n = mesh.n_intervals();
    std::vector<StiffnessRow> rows(static_cast<unsigned>(n) + 1);
    rows[0].mid = model.rate(t);
    rows[n].mid = model.dividend(1.0, t);
    for (int i = 1; i < n; ++i) {
        const double x = mesh.node(i);
        const double hl = mesh.step(i - 1);
        const double hr = mesh.step(i);
        const double q = x * (1.0 - x);
        const double diff = 0.5 * model.sigma_sq(t) * q * q;
        const double conv = q * (model.rate(t) - model.dividend(x, t));
        const double reac = (1.0 - x) * model.rate(t) + x * model.dividend(x, t);

        const double d2_lo = 2.0 / (hl * (hl + hr));
        const double d2_mid = -2.0 / (hl * hr);
        const double d2_hi = 2.0 / (hr * (hl + hr));
        const double d1_lo = -hr / (hl * (hl + hr));
        const double d1_mid = (hr - hl) / (hl * hr);
        const double d1_hi = hl / (hr * (hl + hr));

        rows[i].lo = -diff * d2_lo - conv * d1_lo;
        rows[i].mid = -diff * d2_mid - conv * d1_mid + reac;
        rows[i].hi = -diff * d2_hi - conv * d1_hi;
    }
    return rows;
}

}  // namespace

Solution csds_solve(const SolverConfig& config, const Mesh& mesh, const MarketModel& model,
                    const Payoff& payoff) {
    std::vector<double> u0(static_cast<unsigned>(mesh.n_nodes()));
    for (int i = 0; i < mesh.n_nodes(); ++i)
        u0[i] = initial_condition(payoff, model, mesh.node(i));
    const std::vector<double> unit_mass(static_cast<unsigned>(mesh.n_nodes()), 1.0);
    detail::RowsFn rows_fn = [&mesh, &model](double t) { return csds_rows(t, mesh, model); };
    return detail::march_theta(config, mesh, model, std::move(u0), unit_mass, rows_fn,
                               !model.time_dependent(), nullptr,
                               /*source_mass_weighted=*/false);
}

std::vector<double> discrete_delta(const Solution& solution, int slice) {
    if (slice < 0 || slice >= static_cast<int>(solution.values.size()))
        throw std::out_of_range("discrete_delta: slice index out of range");
    const auto& u = solution.values[static_cast<unsigned>(slice)];
    const Mesh& mesh = solution.mesh;
    const int n = mesh.n_intervals();

    std::vector<double> delta(u.size());
    auto ux = [&](int i) {
        if (i == 0) return (u[1] - u[0]) / mesh.step(0);
        if (i == n) return (u[n] - u[n - 1]) / mesh.step(n - 1);
        const double hl = mesh.step(i - 1);
        const double hr = mesh.step(i);
        return (-hr / (hl * (hl + hr))) * u[i - 1] + ((hr - hl) / (hl * hr)) * u[i] +
               (hl / (hr * (hl + hr))) * u[i + 1];
    };
    // dV/dS = u + (S+p_m) u_x dx/dS; the transform makes (S+p_m) dx/dS = 1-x.
    for (int i = 0; i <= n; ++i) delta[i] = u[i] + (1.0 - mesh.node(i)) * ux(i);
    return delta;
}

}  // namespace fitvol
