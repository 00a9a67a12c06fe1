#include <doctest.h>

#include <cmath>
#include <random>

#include "fitvol/assembly.hpp"
#include "oracles.hpp"

using namespace fitvol;

namespace {

MarketModel tp1_model() {
    return {CoefficientSpec::constant(0.3), CoefficientSpec::constant(0.1),
            CoefficientSpec::constant(0.04), 400.0};
}

MarketModel zero_convection_model() {
    return {CoefficientSpec::constant(0.3), CoefficientSpec::constant(0.09),
            CoefficientSpec::linear_in_x(0.18), 400.0};
}

bool close(double x, double y, double tol = 1e-14) {
    return std::abs(x - y) <= tol * std::max({1.0, std::abs(x), std::abs(y)});
}

// Independent transcription of the scalar system entries, written with the
// ratio-of-powers quantities phi_j^alpha and Delta_i^alpha instead of the
// flux linearizations the library assembles from.
TridiagonalSystem hand_assembled(std::span<const double> u_prev, double theta, double dt,
                                 double t_mid, const Mesh& mesh, const MarketModel& model) {
    const int n = mesh.n_intervals();
    auto phi = [&](int j, double alpha) {
        return std::pow(mesh.node(j) / (1.0 - mesh.node(j)), alpha);
    };
    auto q = [&](int face) { return mesh.midpoint(face) * (1.0 - mesh.midpoint(face)); };
    auto b_face = [&](int face) { return coeff_b(mesh.midpoint(face), t_mid, model); };
    auto alpha_int = [&](int face) {
        return b_face(face) / (0.5 * model.sigma_sq(t_mid));
    };

    // Stiffness rows in the same balance-law orientation.
    std::vector<StiffnessRow> k(static_cast<unsigned>(n) + 1);
    for (int i = 0; i <= n; ++i)
        k[i].mid = coeff_c(mesh.node(i), t_mid, model) * mesh.volume(i);

    const double abar = 0.5 * model.sigma_sq(t_mid) * (1.0 - mesh.midpoint(0));
    const double b0 = b_face(0);
    if (b0 >= 0.0) {
        k[0].mid += q(0) * 0.5 * (abar - b0);
        k[0].hi = -q(0) * 0.5 * (abar + b0);
        k[1].lo = q(0) * 0.5 * (b0 - abar);
        k[1].mid += q(0) * 0.5 * (abar + b0);
    } else {
        k[0].mid += q(0) * (-b0);
        k[0].hi = 0.0;
        k[1].lo = q(0) * b0;
    }

    for (int f = 1; f <= n - 2; ++f) {
        const double al = alpha_int(f);
        const double delta = 1.0 / (phi(f + 1, al) - phi(f, al));
        const double b = b_face(f);
        k[f].mid += q(f) * b * phi(f, al) * delta;
        k[f].hi = -q(f) * b * phi(f + 1, al) * delta;
        k[f + 1].lo = -q(f) * b * phi(f, al) * delta;
        k[f + 1].mid += q(f) * b * phi(f + 1, al) * delta;
    }

    const double adbar = 0.5 * model.sigma_sq(t_mid) * mesh.midpoint(n - 1);
    const double bn = b_face(n - 1);
    if (bn > 0.0) {
        k[n - 1].hi = -q(n - 1) * bn;
        k[n].mid += q(n - 1) * bn;
        k[n].lo = 0.0;
    } else {
        k[n - 1].mid += q(n - 1) * 0.5 * (adbar - bn);
        k[n - 1].hi = -q(n - 1) * 0.5 * (adbar + bn);
        k[n].lo = q(n - 1) * 0.5 * (bn - adbar);
        k[n].mid += q(n - 1) * 0.5 * (adbar + bn);
    }

    TridiagonalSystem sys;
    const auto& l = mesh.volumes();
    const unsigned nn = static_cast<unsigned>(n) + 1;
    sys.sub.assign(nn, 0.0);
    sys.diag.assign(nn, 0.0);
    sys.sup.assign(nn, 0.0);
    sys.rhs.assign(nn, 0.0);
    for (unsigned i = 0; i < nn; ++i) {
        sys.diag[i] = l[i] / dt + theta * k[i].mid;
        sys.sub[i] = theta * k[i].lo;
        sys.sup[i] = theta * k[i].hi;
        double f = (l[i] / dt - (1.0 - theta) * k[i].mid) * u_prev[i];
        if (i > 0) f -= (1.0 - theta) * k[i].lo * u_prev[i - 1];
        if (i + 1 < nn) f -= (1.0 - theta) * k[i].hi * u_prev[i + 1];
        sys.rhs[i] = f;
    }
    return sys;
}

}  // namespace

TEST_SUITE("assembly") {

TEST_CASE("boundary rows decouple with the expected entries") {
    const Mesh mesh = Mesh::uniform(20);
    const MarketModel tp1 = tp1_model();
    const double t = 0.2;

    // alpha_0 < 0: no upper coupling in row 0.
    const StiffnessRow r0 = stiffness_row(0, t, mesh, tp1);
    const double q0 = mesh.midpoint(0) * (1.0 - mesh.midpoint(0));
    const double b0 = coeff_b(mesh.midpoint(0), t, tp1);
    REQUIRE(b0 < 0.0);
    CHECK(r0.hi == 0.0);
    CHECK(close(r0.mid, -q0 * b0 + coeff_c(0.0, t, tp1) * mesh.volume(0)));

    // alpha_{N-1} > 0: no lower coupling in row N.
    const StiffnessRow rn = stiffness_row(20, t, mesh, tp1);
    const double qn = mesh.midpoint(19) * (1.0 - mesh.midpoint(19));
    const double bn = coeff_b(mesh.midpoint(19), t, tp1);
    REQUIRE(bn > 0.0);
    CHECK(rn.lo == 0.0);
    CHECK(close(rn.mid, qn * bn + coeff_c(1.0, t, tp1) * mesh.volume(20)));
}

TEST_CASE("pure diffusion rows have negative couplings and dominant diagonal") {
    const Mesh mesh = Mesh::uniform(16);
    const MarketModel m = zero_convection_model();
    for (int i = 2; i <= 14; ++i) {
        const StiffnessRow row = stiffness_row(i, 0.0, mesh, m);
        CHECK(row.lo < 0.0);
        CHECK(row.hi < 0.0);
        const double c_l = coeff_c(mesh.node(i), 0.0, m) * mesh.volume(i);
        CHECK(close(row.mid, -row.lo - row.hi + c_l, 1e-13));
    }
}

TEST_CASE("entries match the hand-coded transcription") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> uu(0.0, 1.5);
    const double theta = 0.5, dt = 1e-3;

    // Covers all four end-face branch combinations.
    const MarketModel configs[] = {
        tp1_model(),  // alpha_0 < 0, alpha_{N-1} > 0
        {CoefficientSpec::constant(0.3), CoefficientSpec::constant(0.1),
         CoefficientSpec::constant(0.0), 400.0},  // alpha_0 > 0, alpha_{N-1} > 0
        {CoefficientSpec::constant(0.3), CoefficientSpec::constant(0.1),
         CoefficientSpec::constant(0.3), 400.0},  // alpha_0 < 0, alpha_{N-1} < 0
        {CoefficientSpec::constant(0.3), CoefficientSpec::constant(0.15),
         CoefficientSpec::linear_in_x(0.5), 400.0},  // alpha_0 > 0, alpha_{N-1} < 0
    };
    for (const MarketModel& model : configs) {
        const Mesh mesh = Mesh::uniform(12);
        std::vector<double> u_prev(13);
        for (auto& v : u_prev) v = uu(rng);
        const double t_m = 0.37;
        const TridiagonalSystem got = assemble_step(u_prev, theta, dt, t_m, mesh, model);
        const TridiagonalSystem want =
            hand_assembled(u_prev, theta, dt, t_m + theta * dt, mesh, model);
        for (std::size_t i = 0; i < got.size(); ++i) {
            CAPTURE(i);
            CHECK(close(got.diag[i], want.diag[i]));
            CHECK(close(got.sub[i], want.sub[i]));
            CHECK(close(got.sup[i], want.sup[i]));
            CHECK(close(got.rhs[i], want.rhs[i]));
        }
    }
}

TEST_CASE("constants probe the convective telescope") {
    std::mt19937 rng(31);
    const Mesh mesh = Mesh::power_graded(16, 2.0);
    const MarketModel m(CoefficientSpec::constant(0.4),
                        CoefficientSpec::sinusoidal_in_t(0.1, 0.02, 10.0),
                        CoefficientSpec::linear_in_x(0.06), 400.0);
    const double t = 0.41;
    const auto rows = stiffness_rows(t, mesh, m);
    auto q = [&](int f) { return mesh.midpoint(f) * (1.0 - mesh.midpoint(f)); };
    auto b = [&](int f) { return coeff_b(mesh.midpoint(f), t, m); };
    const int n = mesh.n_intervals();
    for (int i = 0; i <= n; ++i) {
        const double row_sum = rows[i].lo + rows[i].mid + rows[i].hi -
                               coeff_c(mesh.node(i), t, m) * mesh.volume(i);
        const double upper = i <= n - 1 ? q(i) * b(i) : 0.0;
        const double lower = i >= 1 ? q(i - 1) * b(i - 1) : 0.0;
        CHECK(std::abs(row_sum - (lower - upper)) < 1e-12);
    }
}

TEST_CASE("theta = 1 right-hand side carries no stiffness") {
    const Mesh mesh = Mesh::uniform(8);
    std::vector<double> u_prev(9, 0.7);
    const TridiagonalSystem a = assemble_step(u_prev, 1.0, 0.01, 0.0, mesh, tp1_model());
    const TridiagonalSystem b = assemble_step(u_prev, 1.0, 0.01, 0.0, mesh, zero_convection_model());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.rhs[i] == b.rhs[i]);
        CHECK(a.rhs[i] == doctest::Approx(mesh.volume(static_cast<int>(i)) / 0.01 * 0.7));
    }
}

TEST_CASE("assemble_step validation") {
    const Mesh mesh = Mesh::uniform(8);
    std::vector<double> u(9, 0.0);
    CHECK_THROWS_AS(assemble_step(u, 0.5, -1.0, 0.0, mesh, tp1_model()),
                    std::invalid_argument);
    CHECK_THROWS_AS(assemble_step(u, 1.5, 0.01, 0.0, mesh, tp1_model()),
                    std::invalid_argument);
}

TEST_CASE("manufactured forcing") {
    const MarketModel m = tp1_model();
    const Manufactured exact;

    // Degenerate boundary: f(0,t) = u_t + r u = (r - 1) e^{-t}.
    for (double t : {0.0, 0.4, 1.0}) {
        CHECK(mms_source_at(exact, 0.0, t, m) ==
              doctest::Approx((0.1 - 1.0) * std::exp(-t)).epsilon(1e-14));
    }

    // Spatial derivatives replaced by fourth-order differences.
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> ux(0.05, 0.95);
    std::uniform_real_distribution<double> ut(0.0, 1.0);
    const MarketModel m3(CoefficientSpec::constant(0.4),
                         CoefficientSpec::sinusoidal_in_t(0.1, 0.02, 10.0),
                         CoefficientSpec::linear_in_x(0.06), 400.0);
    for (int k = 0; k < 25; ++k) {
        const double x = ux(rng), t = ut(rng);
        auto u_of_x = [&](double y) { return exact.value(y, t); };
        const double h = 1e-2;
        const double ux_fd = oracles::fd4(u_of_x, x, h);
        const double uxx_fd =
            oracles::fd4([&](double y) { return oracles::fd4(u_of_x, y, h); }, x, h);
        const double q = x * (1.0 - x);
        const double fd_value = exact.dt(x, t) -
                                0.5 * m3.sigma_sq(t) * q * q * uxx_fd -
                                q * (m3.rate(t) - m3.dividend(x, t)) * ux_fd +
                                ((1.0 - x) * m3.rate(t) + x * m3.dividend(x, t)) *
                                    exact.value(x, t);
        CHECK(mms_source_at(exact, x, t, m3) == doctest::Approx(fd_value).epsilon(1e-8));
    }
}

TEST_CASE("pure mass system returns the previous state") {
    // With K = 0 the theta step is m/dt * u_new = m/dt * u_prev.
    const Mesh mesh = Mesh::uniform(8);
    std::vector<StiffnessRow> rows(9);
    std::vector<double> u_prev(9);
    for (int i = 0; i < 9; ++i) u_prev[static_cast<unsigned>(i)] = 0.1 * i;
    const TridiagonalSystem sys = theta_step(rows, mesh.volumes(), u_prev, 0.5, 1e-3);
    for (std::size_t i = 0; i < sys.size(); ++i)
        CHECK(sys.rhs[i] / sys.diag[i] == doctest::Approx(u_prev[i]).epsilon(1e-15));
}

}  // TEST_SUITE
