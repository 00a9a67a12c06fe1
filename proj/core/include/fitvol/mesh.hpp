#pragma once

#include <cstddef>
#include <vector>

namespace fitvol {

/// Subdivision 0 = x_0 < x_1 < ... < x_N = 1 with the control-volume
/// geometry derived from it:
///   midpoints x_{i+1/2} = x_i + h_i/2,
///   sentinels x_{-1/2} = 0 and x_{N+1/2} = 1,
///   volumes   l_i = x_{i+1/2} - x_{i-1/2}  (so l_0 = h_0/2, l_N = h_{N-1}/2).
/// Immutable after construction.
class Mesh {
public:
    static Mesh uniform(int n_intervals);
    /// Steps proportional to (i+1)^p on the first half, mirrored on the
    /// second, so the grid refines toward both degenerate endpoints.
    /// Nodes 1/2 and 1 are pinned exactly (rounding absorbed into the last
    /// step of each half). Requires even n_intervals >= 4 and p >= 1.
    static Mesh power_graded(int n_intervals, double p);

    int n_intervals() const { return static_cast<int>(steps_.size()); }
    int n_nodes() const { return static_cast<int>(nodes_.size()); }

    double node(int i) const { return nodes_[static_cast<unsigned>(i)]; }
    double step(int i) const { return steps_[static_cast<unsigned>(i)]; }
    /// x_{i+1/2} for interval i = 0..N-1.
    double midpoint(int i) const { return mids_[static_cast<unsigned>(i)]; }
    /// Control-volume length l_i for node i = 0..N.
    double volume(int i) const { return volumes_[static_cast<unsigned>(i)]; }

    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& volumes() const { return volumes_; }

    double min_step() const;
    /// Index of the interval [x_j, x_{j+1}) containing x; the last interval
    /// is closed at 1.
    int interval_of(double x) const;

private:
    explicit Mesh(std::vector<double> nodes);

    std::vector<double> nodes_;
    std::vector<double> steps_;
    std::vector<double> mids_;
    std::vector<double> volumes_;
};

}  // namespace fitvol
