#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fitvol/reference.hpp"
#include "fitvol/solver.hpp"

namespace fitvol {

/// The four canonical European test problems.
struct TestProblem {
    int id;
    MarketModel model;
    Payoff payoff;
    double horizon;
    double s_max;  // plotting range only
};

TestProblem test_problem(int id);

/// max_i |u_i - v_i|. Throws on length mismatch.
double norm_c(std::span<const double> u, std::span<const double> v);
/// sqrt(sum_i l_i (u_i - v_i)^2) over the leading n entries (n = full
/// length by default). Throws on length mismatch.
double norm_l2(std::span<const double> u, std::span<const double> v, const Mesh& mesh,
               int n_nodes = -1);
/// Double-mesh order estimate log2(e_n / e_2n); errors must be positive.
double rate_of_convergence(double e_n, double e_2n);

struct ConvergenceRow {
    int n = 0;
    double e_inf = 0.0;
    double rc_inf = std::numeric_limits<double>::quiet_NaN();
    double e_l2 = 0.0;
    double rc_l2 = std::numeric_limits<double>::quiet_NaN();
};

/// Error table over a doubling sequence of meshes. RC cells are recomputed
/// from the stored errors, never stored independently.
struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    std::string description;

    /// CSV with header "N,E_inf,RC_inf,E_l2,RC_l2"; NaN rates print empty.
    std::string to_csv() const;
};

enum class MeshFamily { Uniform, PowerGraded };
enum class DtPolicy { Fixed, MinStep };

struct MmsStudyConfig {
    int tp = 1;  // 1 or 3: coefficient set to borrow
    MeshFamily family = MeshFamily::Uniform;
    double grade_p = 2.0;
    std::vector<int> ns;
    double horizon = 1.0;
    double theta = 0.5;
    DtPolicy dt_policy = DtPolicy::Fixed;
    double dt = 1e-3;
};

/// Manufactured-solution study: marches exp(x-t) with the matching forcing
/// on each mesh and reports final-time errors against the exact values.
ConvergenceTable run_mms_study(const MmsStudyConfig& config);

/// Self-convergence against a fine uniform reference run (default N=5120,
/// dt=1e-4) restricted to the coarse nodes; requires every coarse N to
/// divide fine_n so the restriction is index-exact.
ConvergenceTable run_self_convergence(int tp, const std::vector<int>& ns, int fine_n = 5120,
                                      double fine_dt = 1e-4, double theta = 0.5,
                                      double coarse_dt = -1.0 /* default: fine_dt */);

struct PointwiseSeries {
    double s = 600.0;                 // probed asset price
    std::vector<int> ns;
    std::vector<double> errors;       // |u_h - u| at the node nearest x(s)
    std::string to_csv() const;       // header "N,E_s,RC_s"
};

struct AnalyticStudyResult {
    ConvergenceTable table;
    PointwiseSeries pointwise;
};

/// Convergence to the transformed constant-coefficient analytic price
/// (call, zero dividend), omitting the x_N = 1 node from both norms.
AnalyticStudyResult run_analytic_convergence(const std::vector<int>& ns, double dt = 1e-4,
                                             double theta = 0.5);

enum class ComparisonPreset { Oscillation, SignFlipTp2, SignFlipTp3 };
enum class SchemeKind { Fitted, Csds };

struct ComparisonRun {
    SchemeKind scheme;
    Solution solution;
    std::vector<double> delta;   // final slice
    double min_value = 0.0;      // over all steps and nodes
    int delta_sign_flips = 0;
};

ComparisonPreset comparison_preset_from_name(const std::string& name);

/// One scheme of a comparison experiment. Oscillation: small-volatility
/// call where the centered scheme's delta oscillates. SignFlip presets:
/// convection against diffusion (r=0, growing dividend), where the
/// centered scheme violates the maximum principle.
ComparisonRun run_comparison(ComparisonPreset preset, SchemeKind scheme);

/// Sign changes in the successive differences of v, ignoring differences
/// below floor (default: 1e-6 * max(1, max|v|)).
int count_sign_flips(std::span<const double> v, double floor = -1.0);

}  // namespace fitvol
