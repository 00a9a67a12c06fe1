// Command-line front end: solve | converge | compare, driven by a JSON
// configuration, emitting CSV artifacts (atomic writes, LF endings,
// run metadata in a sidecar so data files stay byte-reproducible).

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

#include "fitvol/experiments.hpp"
#include "fitvol/io.hpp"
#include "fitvol/reference.hpp"
#include "fitvol/solver.hpp"

using json = nlohmann::json;
using namespace fitvol;

namespace {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& path, const std::string& what)
        : std::runtime_error("config error at " + path + ": " + what) {}
};

const json& member(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) throw ConfigError(path + "/" + key, "missing");
    return j.at(key);
}

double num_at(const json& j, const std::string& key, const std::string& path) {
    const json& v = member(j, key, path);
    if (!v.is_number()) throw ConfigError(path + "/" + key, "expected a number");
    return v.get<double>();
}

double num_or(const json& j, const std::string& key, double fallback) {
    if (!j.is_object() || !j.contains(key)) return fallback;
    return j.at(key).get<double>();
}

int int_at(const json& j, const std::string& key, const std::string& path) {
    const json& v = member(j, key, path);
    if (!v.is_number_integer()) throw ConfigError(path + "/" + key, "expected an integer");
    return v.get<int>();
}

std::string str_at(const json& j, const std::string& key, const std::string& path) {
    const json& v = member(j, key, path);
    if (!v.is_string()) throw ConfigError(path + "/" + key, "expected a string");
    return v.get<std::string>();
}

CoefficientSpec coefficient_from(const json& j, const std::string& path) {
    if (j.is_number()) return CoefficientSpec::constant(j.get<double>());
    if (!j.is_object()) throw ConfigError(path, "expected a number or coefficient object");
    const std::string kind = str_at(j, "kind", path);
    if (kind == "constant") return CoefficientSpec::constant(num_at(j, "value", path));
    if (kind == "sinusoidal_in_t")
        return CoefficientSpec::sinusoidal_in_t(num_at(j, "base", path),
                                                num_at(j, "amplitude", path),
                                                num_at(j, "frequency", path));
    if (kind == "linear_in_x") return CoefficientSpec::linear_in_x(num_at(j, "slope", path));
    throw ConfigError(path + "/kind", "unknown coefficient kind '" + kind + "'");
}

Payoff payoff_from(const json& j, const std::string& path) {
    const std::string kind = str_at(j, "kind", path);
    if (kind == "call") return Payoff::call(num_at(j, "E", path));
    if (kind == "put") return Payoff::put(num_at(j, "E", path));
    if (kind == "cash_or_nothing") return Payoff::cash_or_nothing(num_at(j, "E", path));
    if (kind == "bull_spread")
        return Payoff::bull_spread(num_at(j, "E1", path), num_at(j, "E2", path));
    if (kind == "butterfly")
        return Payoff::butterfly(num_at(j, "S1", path), num_at(j, "S2", path),
                                 num_at(j, "S3", path));
    throw ConfigError(path + "/kind", "unknown payoff kind '" + kind + "'");
}

struct ProblemSpec {
    MarketModel model;
    Payoff payoff;
    double horizon;
};

ProblemSpec problem_from(const json& cfg) {
    const json& p = member(cfg, "problem", "");
    if (p.is_number_integer()) {
        const TestProblem tp = test_problem(p.get<int>());
        return {tp.model, tp.payoff, tp.horizon};
    }
    if (!p.is_object()) throw ConfigError("/problem", "expected a preset id (1..4) or an object");
    MarketModel model(coefficient_from(member(p, "sigma", "/problem"), "/problem/sigma"),
                      coefficient_from(member(p, "r", "/problem"), "/problem/r"),
                      coefficient_from(member(p, "d", "/problem"), "/problem/d"),
                      num_at(p, "p_m", "/problem"));
    return {model, payoff_from(member(p, "payoff", "/problem"), "/problem/payoff"),
            num_or(p, "T", 1.0)};
}

Mesh mesh_from(const json& cfg) {
    const json& m = member(cfg, "mesh", "");
    const std::string family = str_at(m, "family", "/mesh");
    const int n = int_at(m, "N", "/mesh");
    if (family == "uniform") return Mesh::uniform(n);
    if (family == "graded") return Mesh::power_graded(n, num_or(m, "p", 2.0));
    throw ConfigError("/mesh/family", "expected 'uniform' or 'graded'");
}

SolverConfig solver_from(const json& cfg, double default_horizon) {
    SolverConfig sc;
    sc.horizon = default_horizon;
    if (cfg.contains("time")) {
        const json& t = cfg.at("time");
        sc.theta = num_or(t, "theta", 0.5);
        sc.dt = num_or(t, "dt", 1e-3);
        sc.horizon = num_or(t, "T", default_horizon);
    }
    if (cfg.contains("diagnostics")) {
        const json& d = cfg.at("diagnostics");
        sc.check_positivity = d.value("check_positivity", false);
        sc.check_m_matrix = d.value("check_m_matrix", false);
        sc.m_matrix_strict = d.value("strict", false);
    }
    if (!(sc.theta >= 0.0 && sc.theta <= 1.0))
        throw ConfigError("/time/theta", "must lie in [0,1]");
    if (!(sc.dt > 0.0)) throw ConfigError("/time/dt", "must be positive");
    if (!(sc.horizon > 0.0)) throw ConfigError("/time/T", "must be positive");
    return sc;
}

std::filesystem::path resolve(const std::filesystem::path& out_dir, const std::string& path) {
    const std::filesystem::path p(path);
    return p.is_absolute() ? p : out_dir / p;
}

void write_sidecar(const std::filesystem::path& data_path, const json& cfg,
                   const std::string& command) {
    json meta;
    meta["command"] = command;
    meta["config"] = cfg;
    const auto now = std::chrono::system_clock::now();
    meta["written_at_unix"] =
        std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
    atomic_write_text(data_path.string() + ".meta.json", meta.dump(2) + "\n");
}

std::string solution_csv(const Solution& sol, const std::vector<int>& slice_indices) {
    std::ostringstream out;
    out << "t,x,S,u,V\n";
    const double p_m = sol.model.p_m();
    const int n = sol.mesh.n_intervals();
    for (int k : slice_indices) {
        const double t = sol.times[static_cast<unsigned>(k)];
        const auto& u = sol.values[static_cast<unsigned>(k)];
        for (int i = 0; i <= n; ++i) {
            const double x = sol.mesh.node(i);
            out << format_double(t) << ',' << format_double(x) << ',';
            if (i == n) {
                // S is infinite at x = 1; V = (S+p_m) u keeps the sign.
                const double ui = u[static_cast<unsigned>(i)];
                const double v = ui == 0.0 ? 0.0
                                           : ui * std::numeric_limits<double>::infinity();
                out << "inf," << format_double(ui) << ',' << format_double(v) << '\n';
            } else {
                const double s = from_x(x, p_m);
                out << format_double(s) << ',' << format_double(u[static_cast<unsigned>(i)])
                    << ',' << format_double((s + p_m) * u[static_cast<unsigned>(i)]) << '\n';
            }
        }
    }
    return out.str();
}

std::string delta_csv(const Solution& sol, const std::vector<double>& delta) {
    std::ostringstream out;
    out << "x,S,delta\n";
    const int n = sol.mesh.n_intervals();
    for (int i = 0; i <= n; ++i) {
        const double x = sol.mesh.node(i);
        out << format_double(x) << ',';
        if (i == n)
            out << "inf,";
        else
            out << format_double(from_x(x, sol.model.p_m())) << ',';
        out << format_double(delta[static_cast<unsigned>(i)]) << '\n';
    }
    return out.str();
}

// Recorded-slice indices matching the requested output slices: the final
// slice alone, or k slices at times j T/k.
std::vector<int> pick_slices(const Solution& sol, const json& outputs) {
    const json slices = outputs.is_object() && outputs.contains("slices")
                            ? outputs.at("slices")
                            : json("final");
    if (slices.is_string() && slices.get<std::string>() == "final")
        return {static_cast<int>(sol.times.size()) - 1};
    if (!slices.is_number_integer() || slices.get<int>() < 1)
        throw ConfigError("/outputs/slices", "expected 'final' or a positive integer");
    const int k = slices.get<int>();
    const double horizon = sol.times.back();
    std::vector<int> picks;
    for (int j = 1; j <= k; ++j) {
        const double target = horizon * j / k;
        int best = 0;
        for (std::size_t s = 0; s < sol.times.size(); ++s)
            if (std::abs(sol.times[s] - target) <
                std::abs(sol.times[static_cast<unsigned>(best)] - target))
                best = static_cast<int>(s);
        picks.push_back(best);
    }
    return picks;
}

int cmd_solve(const json& cfg, const std::filesystem::path& out_dir) {
    const ProblemSpec problem = problem_from(cfg);
    const Mesh mesh = mesh_from(cfg);
    SolverConfig sc = solver_from(cfg, problem.horizon);

    const json outputs = cfg.contains("outputs") ? cfg.at("outputs") : json::object();
    const int requested =
        outputs.contains("slices") && outputs.at("slices").is_number_integer()
            ? outputs.at("slices").get<int>()
            : 1;
    sc.record_every = std::max(1, sc.n_steps() / std::max(1, requested));

    const Solution sol = solve_evolution(sc, mesh, problem.model, problem.payoff);

    const std::string path = outputs.value("solution_path", std::string("solution.csv"));
    const auto full = resolve(out_dir, path);
    atomic_write_text(full.string(), solution_csv(sol, pick_slices(sol, outputs)));
    write_sidecar(full, cfg, "solve");

    if (sol.diagnostics.m_matrix_checked && !sol.diagnostics.m_matrix_all_pass) {
        std::cerr << "m-matrix check failed at step "
                  << sol.diagnostics.m_matrix_first_fail_step << ": "
                  << sol.diagnostics.m_matrix_first_fail_reason << "\n";
        return 1;
    }
    std::cout << "wrote " << full.string() << " (min u = "
              << format_double(sol.diagnostics.min_value) << ")\n";
    return 0;
}

int cmd_converge(const json& cfg, const std::filesystem::path& out_dir) {
    const json& study = member(cfg, "study", "");
    const std::string kind = str_at(study, "kind", "/study");

    std::vector<int> ns;
    for (const json& v : member(study, "Ns", "/study")) ns.push_back(v.get<int>());
    if (ns.empty()) throw ConfigError("/study/Ns", "must not be empty");
    for (std::size_t i = 1; i < ns.size(); ++i)
        if (ns[i] != 2 * ns[i - 1])
            throw ConfigError("/study/Ns", "mesh sizes must double between rows");

    const json outputs = cfg.contains("outputs") ? cfg.at("outputs") : json::object();
    const std::string table_path = outputs.value("table_path", std::string("table.csv"));
    const auto full = resolve(out_dir, table_path);

    ConvergenceTable table;
    if (kind == "mms") {
        MmsStudyConfig mc;
        mc.tp = study.value("tp", 1);
        mc.ns = ns;
        const std::string family = study.value("mesh_family", std::string("uniform"));
        if (family == "graded") {
            mc.family = MeshFamily::PowerGraded;
            mc.grade_p = num_or(study, "p", 2.0);
        } else if (family != "uniform") {
            throw ConfigError("/study/mesh_family", "expected 'uniform' or 'graded'");
        }
        mc.horizon = num_or(study, "T", mc.family == MeshFamily::PowerGraded ? 0.1 : 1.0);
        mc.theta = num_or(study, "theta", 0.5);
        const std::string policy = study.value("dt_policy", std::string("fixed"));
        if (policy == "min_h")
            mc.dt_policy = DtPolicy::MinStep;
        else if (policy != "fixed")
            throw ConfigError("/study/dt_policy", "expected 'fixed' or 'min_h'");
        mc.dt = num_or(study, "dt", 1e-3);
        table = run_mms_study(mc);
    } else if (kind == "self") {
        table = run_self_convergence(study.value("tp", 2), ns, study.value("fine_N", 5120),
                                     num_or(study, "fine_dt", 1e-4),
                                     num_or(study, "theta", 0.5));
    } else if (kind == "analytic") {
        const AnalyticStudyResult result =
            run_analytic_convergence(ns, num_or(study, "dt", 1e-4),
                                     num_or(study, "theta", 0.5));
        table = result.table;
        const std::string pw_path = outputs.value(
            "pointwise_path", full.stem().string() + "_s600.csv");
        const auto pw_full = resolve(out_dir, pw_path);
        atomic_write_text(pw_full.string(), result.pointwise.to_csv());
        std::cout << "wrote " << pw_full.string() << "\n";
    } else {
        throw ConfigError("/study/kind", "expected 'mms', 'self' or 'analytic'");
    }

    atomic_write_text(full.string(), table.to_csv());
    write_sidecar(full, cfg, "converge");
    std::cout << "wrote " << full.string() << "\n";
    std::cout << table.to_csv();
    return 0;
}

int cmd_compare(const json& cfg, const std::filesystem::path& out_dir) {
    const std::string preset_name = str_at(cfg, "preset", "");
    const ComparisonPreset preset = comparison_preset_from_name(preset_name);

    const ComparisonRun fitted = run_comparison(preset, SchemeKind::Fitted);
    const ComparisonRun csds = run_comparison(preset, SchemeKind::Csds);

    const auto emit = [&](const ComparisonRun& run, const std::string& stem) {
        const int last = static_cast<int>(run.solution.times.size()) - 1;
        atomic_write_text(resolve(out_dir, stem + "_solution.csv").string(),
                          solution_csv(run.solution, {last}));
        atomic_write_text(resolve(out_dir, stem + "_delta.csv").string(),
                          delta_csv(run.solution, run.delta));
    };
    emit(fitted, "fitted");
    emit(csds, "csds");
    write_sidecar(out_dir / "comparison", cfg, "compare");

    std::cout << "fitted_min=" << format_double(fitted.min_value)
              << " csds_min=" << format_double(csds.min_value)
              << " fitted_flips=" << fitted.delta_sign_flips
              << " csds_flips=" << csds.delta_sign_flips << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fitted finite-volume solver for the transformed Black-Scholes equation"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    for (const char* name : {"solve", "converge", "compare"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON configuration file")->required();
        sub->add_option("--out", out_dir, "output directory (default: cwd)");
    }

    CLI11_PARSE(app, argc, argv);

    json cfg;
    try {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "cannot open config file: " << config_path << "\n";
            return 2;
        }
        cfg = json::parse(in);  // parse_error messages carry line/column
    } catch (const json::parse_error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        std::filesystem::create_directories(out_dir);
        const std::string sub = app.get_subcommands().front()->get_name();
        if (sub == "solve") return cmd_solve(cfg, out_dir);
        if (sub == "converge") return cmd_converge(cfg, out_dir);
        return cmd_compare(cfg, out_dir);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const SolveError& e) {
        std::cerr << "solve failed: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
