#pragma once

#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fitvol/assembly.hpp"
#include "fitvol/mesh.hpp"
#include "fitvol/model.hpp"

namespace fitvol {

/// Time-marching parameters. Either a uniform dt (realized as
/// ceil(horizon/dt) equal steps) or an explicit schedule whose sum must
/// equal the horizon to 1e-12.
struct SolverConfig {
    double theta = 0.5;
    double dt = 1e-3;
    double horizon = 1.0;
    /// Stride between stored slices; initial and final slices are always kept.
    int record_every = std::numeric_limits<int>::max();
    bool check_positivity = false;
    bool check_m_matrix = false;
    /// Abort on an M-matrix check failure instead of recording it.
    bool m_matrix_strict = false;
    std::optional<std::vector<double>> schedule;

    /// Uniform per-step size after rounding the step count.
    int n_steps() const;
};

struct RunDiagnostics {
    double min_value = std::numeric_limits<double>::infinity();
    int min_step = -1;
    bool m_matrix_checked = false;
    bool m_matrix_all_pass = true;
    int m_matrix_first_fail_step = -1;
    std::string m_matrix_first_fail_reason;
};

/// Recorded evolution of the nodal vector u_h, plus the model echo needed
/// to map back to (S, V). Immutable once returned by a solver.
struct Solution {
    Mesh mesh;
    MarketModel model;
    std::vector<double> times;                 // recorded t_m
    std::vector<std::vector<double>> values;   // values[slice][node]
    RunDiagnostics diagnostics;

    const std::vector<double>& slice(int k) const { return values[static_cast<unsigned>(k)]; }
    const std::vector<double>& final_slice() const { return values.back(); }
    /// Index of the recorded slice at time t (1e-12 tolerance); throws
    /// std::out_of_range if t was not recorded.
    int slice_index(double t) const;
};

class SolveError : public std::runtime_error {
public:
    SolveError(int step, double min_value, const std::string& what)
        : std::runtime_error(what), step_(step), min_value_(min_value) {}
    int step() const { return step_; }
    double min_value() const { return min_value_; }

private:
    int step_;
    double min_value_;
};

/// Solves the assembled system by tridiagonal elimination. Throws
/// SolveError naming the row on a zero pivot.
std::vector<double> thomas_solve(const TridiagonalSystem& sys);

/// Marches the theta scheme from the given initial vector. The stiffness
/// rows are rebuilt each step for time-dependent coefficients and frozen
/// otherwise. With check_positivity set, a step whose minimum drops below
/// -1e-12 raises SolveError carrying the step and the offending minimum.
Solution solve_evolution(const SolverConfig& config, const Mesh& mesh,
                         const MarketModel& model, std::vector<double> initial,
                         const SourceFn* source = nullptr);

/// Convenience overload: initial data from the transformed payoff.
Solution solve_evolution(const SolverConfig& config, const Mesh& mesh,
                         const MarketModel& model, const Payoff& payoff,
                         const SourceFn* source = nullptr);

struct MMatrixReport {
    bool pass = true;
    int offending_row = -1;
    std::string reason;
};

/// Applies the two-sided reduction (eliminating u_0, u_1, u_{N-1}, u_N)
/// and verifies on the reduced system: nonpositive off-diagonals, positive
/// diagonals, diagonal dominance (weak everywhere, strict somewhere), and,
/// when check_rhs is set (caller knows u_prev >= 0), a nonnegative reduced
/// right-hand side. Report-only; never throws.
MMatrixReport m_matrix_check(const TridiagonalSystem& sys, bool check_rhs = true);

/// Largest dt in [dt_lo, dt_hi] whose first assembled step passes
/// m_matrix_check, found by bisection; 0 if even dt_lo fails.
double largest_stable_dt(const Mesh& mesh, const MarketModel& model, double theta,
                         double t, std::span<const double> u_prev,
                         double dt_lo = 1e-8, double dt_hi = 10.0);

/// Evaluates the recorded slice at time t through the fitted basis;
/// exact at the nodes.
double interpolate(const Solution& solution, double t, double x);

namespace detail {
using RowsFn = std::function<std::vector<StiffnessRow>(double t)>;
/// Shared theta-scheme time loop (fitted scheme and the centered
/// comparison scheme differ only in rows_fn and mass).
Solution march_theta(const SolverConfig& config, const Mesh& mesh, const MarketModel& model,
                     std::vector<double> initial, std::span<const double> mass,
                     const RowsFn& rows_fn, bool rows_frozen, const SourceFn* source,
                     bool source_mass_weighted);
}  // namespace detail

}  // namespace fitvol
