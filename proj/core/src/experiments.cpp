#include "fitvol/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>
#include <stdexcept>

#include "fitvol/io.hpp"

namespace fitvol {

TestProblem test_problem(int id) {
    switch (id) {
        case 1:
            return {1,
                    MarketModel(CoefficientSpec::constant(0.3), CoefficientSpec::constant(0.1),
                                CoefficientSpec::constant(0.04), 400.0),
                    Payoff::call(400.0), 1.0, 700.0};
        case 2:
            return {2,
                    MarketModel(CoefficientSpec::constant(0.4), CoefficientSpec::constant(0.1),
                                CoefficientSpec::constant(0.04), 400.0),
                    Payoff::cash_or_nothing(400.0), 1.0, 700.0};
        case 3:
            return {3,
                    MarketModel(CoefficientSpec::constant(0.4),
                                CoefficientSpec::sinusoidal_in_t(0.1, 0.02, 10.0),
                                CoefficientSpec::linear_in_x(0.06), 400.0),
                    Payoff::call(400.0), 1.0, 700.0};
        case 4:
            return {4,
                    MarketModel(CoefficientSpec::constant(0.4),
                                CoefficientSpec::sinusoidal_in_t(0.1, 0.02, 10.0),
                                CoefficientSpec::linear_in_x(0.06), 50.0),
                    Payoff::butterfly(40.0, 50.0, 60.0), 1.0, 100.0};
        default:
            throw std::invalid_argument("test_problem: id must be 1..4");
    }
}

double norm_c(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) throw std::invalid_argument("norm_c: length mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) m = std::max(m, std::abs(u[i] - v[i]));
    return m;
}

double norm_l2(std::span<const double> u, std::span<const double> v, const Mesh& mesh,
               int n_nodes) {
    if (u.size() != v.size()) throw std::invalid_argument("norm_l2: length mismatch");
    if (n_nodes < 0) n_nodes = static_cast<int>(u.size());
    if (n_nodes > mesh.n_nodes() || n_nodes > static_cast<int>(u.size()))
        throw std::invalid_argument("norm_l2: more nodes requested than available");
    double s = 0.0;
    for (int i = 0; i < n_nodes; ++i) {
        const double d = u[static_cast<unsigned>(i)] - v[static_cast<unsigned>(i)];
        s += mesh.volume(i) * d * d;
    }
    return std::sqrt(s);
}

double rate_of_convergence(double e_n, double e_2n) {
    if (!(e_n > 0.0 && e_2n > 0.0))
        throw std::domain_error("rate_of_convergence: errors must be positive");
    return std::log2(e_n / e_2n);
}

namespace {

void fill_rates(ConvergenceTable& table) {
    for (std::size_t k = 1; k < table.rows.size(); ++k) {
        table.rows[k].rc_inf = rate_of_convergence(table.rows[k - 1].e_inf, table.rows[k].e_inf);
        table.rows[k].rc_l2 = rate_of_convergence(table.rows[k - 1].e_l2, table.rows[k].e_l2);
    }
}

std::string cell(double v) { return std::isnan(v) ? std::string() : format_double(v); }

}  // namespace

std::string ConvergenceTable::to_csv() const {
    std::ostringstream out;
    out << "N,E_inf,RC_inf,E_l2,RC_l2\n";
    for (const auto& row : rows)
        out << row.n << ',' << format_double(row.e_inf) << ',' << cell(row.rc_inf) << ','
            << format_double(row.e_l2) << ',' << cell(row.rc_l2) << '\n';
    return out.str();
}

std::string PointwiseSeries::to_csv() const {
    std::ostringstream out;
    out << "N,E_s,RC_s\n";
    for (std::size_t k = 0; k < ns.size(); ++k) {
        out << ns[k] << ',' << format_double(errors[k]) << ',';
        if (k > 0) out << format_double(rate_of_convergence(errors[k - 1], errors[k]));
        out << '\n';
    }
    return out.str();
}

ConvergenceTable run_mms_study(const MmsStudyConfig& config) {
    if (config.tp != 1 && config.tp != 3)
        throw std::invalid_argument("run_mms_study: coefficient set must be TP1 or TP3");
    const MarketModel model = test_problem(config.tp).model;
    const Manufactured exact{};

    auto run_one = [&](int n) {
        const Mesh mesh = config.family == MeshFamily::Uniform
                              ? Mesh::uniform(n)
                              : Mesh::power_graded(n, config.grade_p);
        SolverConfig sc;
        sc.theta = config.theta;
        sc.horizon = config.horizon;
        sc.dt = config.dt_policy == DtPolicy::MinStep ? mesh.min_step() : config.dt;

        std::vector<double> u0(static_cast<unsigned>(mesh.n_nodes()));
        for (int i = 0; i < mesh.n_nodes(); ++i) u0[i] = exact.value(mesh.node(i), 0.0);

        SourceFn f = [&model, &exact](double x, double t) {
            return mms_source_at(exact, x, t, model);
        };
        const Solution sol = solve_evolution(sc, mesh, model, std::move(u0), &f);

        std::vector<double> u_ref(static_cast<unsigned>(mesh.n_nodes()));
        for (int i = 0; i < mesh.n_nodes(); ++i)
            u_ref[i] = exact.value(mesh.node(i), config.horizon);
        const auto& u_h = sol.final_slice();
        return std::pair<double, double>{norm_c(u_h, u_ref), norm_l2(u_h, u_ref, mesh)};
    };

    std::vector<std::future<std::pair<double, double>>> futures;
    futures.reserve(config.ns.size());
    for (int n : config.ns)
        futures.push_back(std::async(std::launch::async, run_one, n));

    ConvergenceTable table;
    table.description = "manufactured solution study";
    for (std::size_t k = 0; k < config.ns.size(); ++k) {
        const auto [e_inf, e_l2] = futures[k].get();
        table.rows.push_back({config.ns[k], e_inf, std::numeric_limits<double>::quiet_NaN(),
                              e_l2, std::numeric_limits<double>::quiet_NaN()});
    }
    fill_rates(table);
    return table;
}

ConvergenceTable run_self_convergence(int tp, const std::vector<int>& ns, int fine_n,
                                      double fine_dt, double theta, double coarse_dt) {
    if (tp != 2 && tp != 3)
        throw std::invalid_argument("run_self_convergence: test problem must be TP2 or TP3");
    for (int n : ns)
        if (n <= 0 || fine_n % n != 0)
            throw std::invalid_argument("run_self_convergence: every N must divide the fine N");
    if (coarse_dt <= 0.0) coarse_dt = fine_dt;

    const TestProblem problem = test_problem(tp);
    SolverConfig fine_sc;
    fine_sc.theta = theta;
    fine_sc.horizon = problem.horizon;
    fine_sc.dt = fine_dt;
    const Mesh fine_mesh = Mesh::uniform(fine_n);
    const Solution fine = solve_evolution(fine_sc, fine_mesh, problem.model, problem.payoff);
    const auto& u_fine = fine.final_slice();

    auto run_one = [&](int n) {
        const Mesh mesh = Mesh::uniform(n);
        SolverConfig sc;
        sc.theta = theta;
        sc.horizon = problem.horizon;
        sc.dt = coarse_dt;
        const Solution sol = solve_evolution(sc, mesh, problem.model, problem.payoff);

        const int stride = fine_n / n;
        std::vector<double> u_ref(static_cast<unsigned>(n) + 1);
        for (int i = 0; i <= n; ++i) u_ref[i] = u_fine[static_cast<unsigned>(i * stride)];
        const auto& u_h = sol.final_slice();
        return std::pair<double, double>{norm_c(u_h, u_ref), norm_l2(u_h, u_ref, mesh)};
    };

    std::vector<std::future<std::pair<double, double>>> futures;
    futures.reserve(ns.size());
    for (int n : ns) futures.push_back(std::async(std::launch::async, run_one, n));

    ConvergenceTable table;
    table.description = "self convergence vs fine grid";
    for (std::size_t k = 0; k < ns.size(); ++k) {
        const auto [e_inf, e_l2] = futures[k].get();
        table.rows.push_back({ns[k], e_inf, std::numeric_limits<double>::quiet_NaN(), e_l2,
                              std::numeric_limits<double>::quiet_NaN()});
    }
    fill_rates(table);
    return table;
}

AnalyticStudyResult run_analytic_convergence(const std::vector<int>& ns, double dt,
                                             double theta) {
    // Call with zero dividend so the constant-coefficient closed form applies.
    const double strike = 400.0, r = 0.1, sigma = 0.3, horizon = 1.0, p_m = 400.0;
    const MarketModel model(CoefficientSpec::constant(sigma), CoefficientSpec::constant(r),
                            CoefficientSpec::constant(0.0), p_m);
    const Payoff payoff = Payoff::call(strike);
    const double s_probe = 600.0;

    auto run_one = [&](int n) {
        const Mesh mesh = Mesh::uniform(n);
        SolverConfig sc;
        sc.theta = theta;
        sc.horizon = horizon;
        sc.dt = dt;
        const Solution sol = solve_evolution(sc, mesh, model, payoff);
        const auto& u_h = sol.final_slice();

        // Transformed analytic reference; the x_N = 1 node (S infinite) is
        // excluded from both norms.
        std::vector<double> u_ref(u_h.size(), 0.0);
        for (int i = 0; i < n; ++i) {
            const double s = from_x(mesh.node(i), p_m);
            if (s > 0.0)
                u_ref[static_cast<unsigned>(i)] =
                    bs_price_delta(s, strike, r, 0.0, sigma, horizon, OptionKind::Call).price /
                    (s + p_m);
        }
        double e_inf = 0.0;
        for (int i = 0; i < n; ++i)
            e_inf = std::max(e_inf, std::abs(u_h[static_cast<unsigned>(i)] -
                                             u_ref[static_cast<unsigned>(i)]));
        const double e_l2 = norm_l2(u_h, u_ref, mesh, n);

        const double x_probe = to_x(s_probe, p_m);
        int i_probe = 0;
        for (int i = 0; i <= n; ++i)
            if (std::abs(mesh.node(i) - x_probe) < std::abs(mesh.node(i_probe) - x_probe))
                i_probe = i;
        const double e_pt = std::abs(u_h[static_cast<unsigned>(i_probe)] -
                                     u_ref[static_cast<unsigned>(i_probe)]);
        return std::tuple<double, double, double>{e_inf, e_l2, e_pt};
    };

    std::vector<std::future<std::tuple<double, double, double>>> futures;
    futures.reserve(ns.size());
    for (int n : ns) futures.push_back(std::async(std::launch::async, run_one, n));

    AnalyticStudyResult result;
    result.table.description = "convergence to the analytic transformed price";
    result.pointwise.s = s_probe;
    for (std::size_t k = 0; k < ns.size(); ++k) {
        const auto [e_inf, e_l2, e_pt] = futures[k].get();
        result.table.rows.push_back({ns[k], e_inf, std::numeric_limits<double>::quiet_NaN(),
                                     e_l2, std::numeric_limits<double>::quiet_NaN()});
        result.pointwise.ns.push_back(ns[k]);
        result.pointwise.errors.push_back(e_pt);
    }
    fill_rates(result.table);
    return result;
}

ComparisonPreset comparison_preset_from_name(const std::string& name) {
    if (name == "oscillation") return ComparisonPreset::Oscillation;
    if (name == "signflip-tp2") return ComparisonPreset::SignFlipTp2;
    if (name == "signflip-tp3") return ComparisonPreset::SignFlipTp3;
    throw std::invalid_argument("unknown comparison preset: " + name);
}

ComparisonRun run_comparison(ComparisonPreset preset, SchemeKind scheme) {
    struct Setup {
        MarketModel model;
        Payoff payoff;
        double horizon;
        int n;
        double dt;
    };
    auto setup = [&]() -> Setup {
        switch (preset) {
            case ComparisonPreset::Oscillation:
                // Small volatility: convection-dominated transport of the
                // payoff kink.
                return {MarketModel(CoefficientSpec::constant(0.01),
                                    CoefficientSpec::constant(0.1),
                                    CoefficientSpec::constant(0.0), 400.0),
                        Payoff::call(400.0), 1.0, 320, 1e-4};
            case ComparisonPreset::SignFlipTp2:
                return {MarketModel(CoefficientSpec::constant(0.1),
                                    CoefficientSpec::constant(0.0),
                                    CoefficientSpec::linear_in_x(0.4), 400.0),
                        Payoff::cash_or_nothing(400.0), 2.0, 40, 1e-3};
            case ComparisonPreset::SignFlipTp3:
                return {MarketModel(CoefficientSpec::constant(0.1),
                                    CoefficientSpec::constant(0.0),
                                    CoefficientSpec::linear_in_x(2.0), 400.0),
                        Payoff::call(400.0), 2.0, 40, 1e-3};
        }
        throw std::invalid_argument("run_comparison: unknown preset");
    }();

    const Mesh mesh = Mesh::uniform(setup.n);
    SolverConfig sc;
    sc.theta = 0.5;
    sc.horizon = setup.horizon;
    sc.dt = setup.dt;

    ComparisonRun run{scheme,
                      scheme == SchemeKind::Fitted
                          ? solve_evolution(sc, mesh, setup.model, setup.payoff)
                          : csds_solve(sc, mesh, setup.model, setup.payoff),
                      {},
                      0.0,
                      0};
    run.delta = discrete_delta(run.solution, static_cast<int>(run.solution.values.size()) - 1);
    run.min_value = run.solution.diagnostics.min_value;
    run.delta_sign_flips = count_sign_flips(run.delta);
    return run;
}

int count_sign_flips(std::span<const double> v, double floor) {
    if (v.size() < 3) return 0;
    if (floor < 0.0) {
        // Sub-ppm wiggles are discretization fuzz, not oscillation; the
        // centered scheme's spurious swings sit many orders above this.
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        floor = 1e-6 * std::max(1.0, m);
    }
    int flips = 0;
    int prev = 0;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        const double d = v[i + 1] - v[i];
        if (std::abs(d) <= floor) continue;
        const int s = d > 0.0 ? 1 : -1;
        if (prev != 0 && s != prev) ++flips;
        prev = s;
    }
    return flips;
}

}  // namespace fitvol
