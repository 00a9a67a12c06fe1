#include "fitvol/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fitvol {

namespace {

constexpr double kPositivityTol = -1e-12;

void validate(const SolverConfig& config) {
    if (!(config.theta >= 0.0 && config.theta <= 1.0))
        throw std::invalid_argument("SolverConfig: theta must lie in [0,1]");
    if (!(config.horizon > 0.0))
        throw std::invalid_argument("SolverConfig: horizon must be positive");
    if (config.record_every < 1)
        throw std::invalid_argument("SolverConfig: record_every must be >= 1");
    if (config.schedule) {
        double sum = 0.0;
        for (double dt : *config.schedule) {
            if (!(dt > 0.0)) throw std::invalid_argument("SolverConfig: schedule steps must be positive");
            sum += dt;
        }
        if (std::abs(sum - config.horizon) > 1e-12 * std::max(1.0, config.horizon))
            throw std::invalid_argument("SolverConfig: schedule must sum to the horizon");
    } else if (!(config.dt > 0.0)) {
        throw std::invalid_argument("SolverConfig: dt must be positive");
    }
}

}  // namespace

int SolverConfig::n_steps() const {
    if (schedule) return static_cast<int>(schedule->size());
    // Round up so the realized uniform step never exceeds the requested one.
    return std::max(1, static_cast<int>(std::ceil(horizon / dt - 1e-9)));
}

int Solution::slice_index(double t) const {
    for (std::size_t k = 0; k < times.size(); ++k)
        if (std::abs(times[k] - t) <= 1e-12 * std::max(1.0, std::abs(t)))
            return static_cast<int>(k);
    throw std::out_of_range("Solution: time was not recorded");
}

std::vector<double> thomas_solve(const TridiagonalSystem& sys) {
    const std::size_t n = sys.size();
    std::vector<double> c_star(n, 0.0), u(n, 0.0);

    double pivot = sys.diag[0];
    if (pivot == 0.0) throw SolveError(0, 0.0, "thomas_solve: zero pivot at row 0");
    c_star[0] = sys.sup[0] / pivot;
    u[0] = sys.rhs[0] / pivot;
    for (std::size_t i = 1; i < n; ++i) {
        pivot = sys.diag[i] - sys.sub[i] * c_star[i - 1];
        if (pivot == 0.0) {
            std::ostringstream msg;
            msg << "thomas_solve: zero pivot at row " << i;
            throw SolveError(static_cast<int>(i), 0.0, msg.str());
        }
        c_star[i] = sys.sup[i] / pivot;
        u[i] = (sys.rhs[i] - sys.sub[i] * u[i - 1]) / pivot;
    }
    for (std::size_t i = n - 1; i-- > 0;) u[i] -= c_star[i] * u[i + 1];
    return u;
}

MMatrixReport m_matrix_check(const TridiagonalSystem& sys, bool check_rhs) {
    const int n = static_cast<int>(sys.size()) - 1;  // highest node index
    MMatrixReport report;
    auto fail = [&](int row, const std::string& why) {
        report.pass = false;
        report.offending_row = row;
        report.reason = why;
        return report;
    };
    if (n < 4) return fail(-1, "system too small for the two-sided reduction");

    double scale = 0.0;
    for (int i = 0; i <= n; ++i)
        scale = std::max({scale, std::abs(sys.diag[i]), std::abs(sys.sub[i]),
                          std::abs(sys.sup[i])});
    const double tol = 1e-13 * std::max(1.0, scale);

    // Left reduction: u_0 = F_0/B_0 - (C_0/B_0) u_1, then eliminate u_1
    // from row 2.
    if (!(sys.diag[0] > 0.0)) return fail(0, "nonpositive diagonal before reduction");
    const double delta = sys.diag[1] - sys.sub[1] / sys.diag[0] * sys.sup[0];
    if (!(delta > 0.0)) return fail(1, "nonpositive pivot in left reduction");
    const double delta_f = sys.rhs[1] - sys.sub[1] / sys.diag[0] * sys.rhs[0];
    const double b2 = sys.diag[2] - sys.sub[2] * sys.sup[1] / delta;
    const double f2 = sys.rhs[2] - sys.sub[2] * delta_f / delta;

    // Mirror reduction from the right: eliminate u_N, then u_{N-1}.
    if (!(sys.diag[n] > 0.0)) return fail(n, "nonpositive diagonal before reduction");
    const double delta_r = sys.diag[n - 1] - sys.sup[n - 1] / sys.diag[n] * sys.sub[n];
    if (!(delta_r > 0.0)) return fail(n - 1, "nonpositive pivot in right reduction");
    const double delta_rf = sys.rhs[n - 1] - sys.sup[n - 1] / sys.diag[n] * sys.rhs[n];
    double bn2 = sys.diag[n - 2] - sys.sup[n - 2] * sys.sub[n - 1] / delta_r;
    double fn2 = sys.rhs[n - 2] - sys.sup[n - 2] * delta_rf / delta_r;
    if (n == 4) {  // both reductions land on the single remaining row
        bn2 = b2 - sys.sup[2] * sys.sub[3] / delta_r;
        fn2 = f2 - sys.sup[2] * delta_rf / delta_r;
    }

    auto reduced_diag = [&](int i) {
        if (n == 4) return bn2;
        if (i == 2) return b2;
        if (i == n - 2) return bn2;
        return sys.diag[i];
    };
    auto reduced_rhs = [&](int i) {
        if (n == 4) return fn2;
        if (i == 2) return f2;
        if (i == n - 2) return fn2;
        return sys.rhs[i];
    };

    bool any_strict = false;
    for (int i = 2; i <= n - 2; ++i) {
        const double lo = i > 2 ? sys.sub[i] : 0.0;
        const double hi = i < n - 2 ? sys.sup[i] : 0.0;
        if (lo > tol) return fail(i, "positive sub-diagonal in reduced system");
        if (hi > tol) return fail(i, "positive super-diagonal in reduced system");
        const double diag = reduced_diag(i);
        if (!(diag > 0.0)) return fail(i, "nonpositive diagonal in reduced system");
        const double slack = diag - std::abs(lo) - std::abs(hi);
        if (slack < -tol) return fail(i, "diagonal dominance violated in reduced system");
        if (slack > tol) any_strict = true;
        if (check_rhs && reduced_rhs(i) < -tol)
            return fail(i, "negative reduced right-hand side");
    }
    if (!any_strict) return fail(-1, "no strictly dominant row in reduced system");
    return report;
}

namespace detail {

Solution march_theta(const SolverConfig& config, const Mesh& mesh, const MarketModel& model,
                     std::vector<double> initial, std::span<const double> mass,
                     const RowsFn& rows_fn, bool rows_frozen, const SourceFn* source,
                     bool source_mass_weighted) {
    validate(config);
    if (static_cast<int>(initial.size()) != mesh.n_nodes())
        throw std::invalid_argument("solve: initial vector does not match the mesh");
    for (double v : initial)
        if (!std::isfinite(v)) throw std::invalid_argument("solve: initial vector must be finite");

    Solution sol{mesh, model, {}, {}, {}};
    const int n_steps = config.n_steps();
    const double dt_uniform = config.schedule ? 0.0 : config.horizon / n_steps;

    auto track_min = [&](const std::vector<double>& u, int step) {
        const double m = *std::min_element(u.begin(), u.end());
        if (m < sol.diagnostics.min_value) {
            sol.diagnostics.min_value = m;
            sol.diagnostics.min_step = step;
        }
        return m;
    };

    track_min(initial, 0);
    sol.times.push_back(0.0);
    sol.values.push_back(initial);

    std::vector<StiffnessRow> frozen_rows;
    if (rows_frozen) frozen_rows = rows_fn(config.theta * dt_uniform);

    std::vector<double> u = std::move(initial);
    std::vector<double> extra;
    double t = 0.0;
    for (int m = 0; m < n_steps; ++m) {
        const double dt = config.schedule ? (*config.schedule)[static_cast<unsigned>(m)]
                                          : dt_uniform;
        const double t_mid = t + config.theta * dt;
        std::vector<StiffnessRow> scratch;
        if (!rows_frozen) scratch = rows_fn(t_mid);
        const std::vector<StiffnessRow>& rows = rows_frozen ? frozen_rows : scratch;

        if (source) {
            extra.resize(u.size());
            for (int i = 0; i < mesh.n_nodes(); ++i)
                extra[i] = (source_mass_weighted ? mass[static_cast<unsigned>(i)] : 1.0) *
                           (*source)(mesh.node(i), t_mid);
        }
        TridiagonalSystem sys = theta_step(rows, mass, u, config.theta, dt, extra);

        if (config.check_m_matrix) {
            sol.diagnostics.m_matrix_checked = true;
            const bool prev_nonneg =
                *std::min_element(u.begin(), u.end()) >= kPositivityTol;
            const MMatrixReport rep = m_matrix_check(sys, prev_nonneg);
            if (!rep.pass && sol.diagnostics.m_matrix_all_pass) {
                sol.diagnostics.m_matrix_all_pass = false;
                sol.diagnostics.m_matrix_first_fail_step = m;
                sol.diagnostics.m_matrix_first_fail_reason = rep.reason;
                if (config.m_matrix_strict)
                    throw SolveError(m, 0.0, "m_matrix_check failed: " + rep.reason);
            }
        }

        try {
            u = thomas_solve(sys);
        } catch (const SolveError& e) {
            std::ostringstream msg;
            msg << "step " << m << ": " << e.what();
            throw SolveError(m, sol.diagnostics.min_value, msg.str());
        }
        t += dt;

        const double step_min = track_min(u, m + 1);
        if (config.check_positivity && step_min < kPositivityTol) {
            std::ostringstream msg;
            msg << "positivity violated at step " << m + 1 << " (t=" << t
                << "): min u = " << step_min;
            throw SolveError(m + 1, step_min, msg.str());
        }

        const bool last = m + 1 == n_steps;
        if (last || (m + 1) % config.record_every == 0) {
            sol.times.push_back(t);
            sol.values.push_back(u);
        }
    }
    return sol;
}

}  // namespace detail

Solution solve_evolution(const SolverConfig& config, const Mesh& mesh,
                         const MarketModel& model, std::vector<double> initial,
                         const SourceFn* source) {
    const bool frozen = !model.time_dependent();
    detail::RowsFn rows_fn = [&mesh, &model](double t) { return stiffness_rows(t, mesh, model); };
    return detail::march_theta(config, mesh, model, std::move(initial), mesh.volumes(),
                               rows_fn, frozen, source, /*source_mass_weighted=*/true);
}

Solution solve_evolution(const SolverConfig& config, const Mesh& mesh,
                         const MarketModel& model, const Payoff& payoff,
                         const SourceFn* source) {
    std::vector<double> u0(static_cast<unsigned>(mesh.n_nodes()));
    for (int i = 0; i < mesh.n_nodes(); ++i)
        u0[i] = initial_condition(payoff, model, mesh.node(i));
    return solve_evolution(config, mesh, model, std::move(u0), source);
}

double largest_stable_dt(const Mesh& mesh, const MarketModel& model, double theta, double t,
                         std::span<const double> u_prev, double dt_lo, double dt_hi) {
    const bool rhs = *std::min_element(u_prev.begin(), u_prev.end()) >= kPositivityTol;
    auto passes = [&](double dt) {
        return m_matrix_check(assemble_step(u_prev, theta, dt, t, mesh, model), rhs).pass;
    };
    if (passes(dt_hi)) return dt_hi;
    if (!passes(dt_lo)) return 0.0;
    double lo = dt_lo, hi = dt_hi;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (passes(mid) ? lo : hi) = mid;
    }
    return lo;
}

double interpolate(const Solution& solution, double t, double x) {
    const int k = solution.slice_index(t);
    const auto& u = solution.values[static_cast<unsigned>(k)];
    const Mesh& mesh = solution.mesh;
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("interpolate: x outside [0,1]");
    const int j = mesh.interval_of(x);
    const double t_rec = solution.times[static_cast<unsigned>(k)];
    return u[static_cast<unsigned>(j)] * basis_eval(j, x, t_rec, mesh, solution.model) +
           u[static_cast<unsigned>(j) + 1] *
               basis_eval(j + 1, x, t_rec, mesh, solution.model);
}

}  // namespace fitvol
