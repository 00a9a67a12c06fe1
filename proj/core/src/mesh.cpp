#include "fitvol/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fitvol {

Mesh::Mesh(std::vector<double> nodes) : nodes_(std::move(nodes)) {
    const int n = static_cast<int>(nodes_.size()) - 1;
    if (n < 4) throw std::invalid_argument("Mesh: need at least 4 intervals");
    if (nodes_.front() != 0.0 || nodes_.back() != 1.0)
        throw std::invalid_argument("Mesh: nodes must span [0,1]");
    steps_.resize(static_cast<unsigned>(n));
    mids_.resize(static_cast<unsigned>(n));
    for (int i = 0; i < n; ++i) {
        const double h = nodes_[i + 1] - nodes_[i];
        if (!(h > 0.0)) throw std::invalid_argument("Mesh: nodes must be strictly increasing");
        steps_[i] = h;
        mids_[i] = nodes_[i] + 0.5 * h;
    }
    volumes_.resize(nodes_.size());
    volumes_.front() = mids_.front();                // x_{1/2} - 0
    volumes_.back() = 1.0 - mids_.back();            // 1 - x_{N-1/2}
    for (int i = 1; i < n; ++i) volumes_[i] = mids_[i] - mids_[i - 1];
}

Mesh Mesh::uniform(int n_intervals) {
    if (n_intervals < 4) throw std::invalid_argument("Mesh::uniform: N must be >= 4");
    std::vector<double> nodes(static_cast<unsigned>(n_intervals) + 1);
    for (int i = 0; i <= n_intervals; ++i)
        nodes[i] = static_cast<double>(i) / static_cast<double>(n_intervals);
    nodes.back() = 1.0;
    return Mesh(std::move(nodes));
}

Mesh Mesh::power_graded(int n_intervals, double p) {
    if (n_intervals < 4 || n_intervals % 2 != 0)
        throw std::invalid_argument("Mesh::power_graded: N must be even and >= 4");
    if (!(p >= 1.0)) throw std::invalid_argument("Mesh::power_graded: p must be >= 1");
    const int half = n_intervals / 2;
    double sum = 0.0;
    for (int k = 1; k <= half; ++k) sum += std::pow(static_cast<double>(k), p);

    std::vector<double> nodes(static_cast<unsigned>(n_intervals) + 1, 0.0);
    double acc = 0.0;
    for (int i = 0; i < half; ++i) {
        acc += std::pow(static_cast<double>(i + 1), p) / (2.0 * sum);
        nodes[i + 1] = acc;
    }
    // Pin the half point and mirror; the (<= 1e-14) accumulation rounding
    // is absorbed into the last step of each half so that 1/2 and 1 are
    // exact, as the degenerate x(1-x) face weights require.
    nodes[half] = 0.5;
    for (int i = 0; i < half; ++i) nodes[n_intervals - i] = 1.0 - nodes[i];
    return Mesh(std::move(nodes));
}

double Mesh::min_step() const {
    return *std::min_element(steps_.begin(), steps_.end());
}

int Mesh::interval_of(double x) const {
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("Mesh::interval_of: x outside [0,1]");
    if (x >= nodes_[nodes_.size() - 2]) return n_intervals() - 1;
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
    return static_cast<int>(it - nodes_.begin()) - 1;
}

}  // namespace fitvol
