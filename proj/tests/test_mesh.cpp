#include <doctest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fitvol/mesh.hpp"

using namespace fitvol;

TEST_SUITE("mesh") {

TEST_CASE("uniform mesh geometry") {
    const Mesh m = Mesh::uniform(4);
    CHECK(m.n_intervals() == 4);
    const double expect_nodes[] = {0.0, 0.25, 0.5, 0.75, 1.0};
    const double expect_vols[] = {0.125, 0.25, 0.25, 0.25, 0.125};
    for (int i = 0; i <= 4; ++i) {
        CHECK(m.node(i) == expect_nodes[i]);
        CHECK(m.volume(i) == doctest::Approx(expect_vols[i]).epsilon(1e-15));
    }
    CHECK(std::accumulate(m.volumes().begin(), m.volumes().end(), 0.0) ==
          doctest::Approx(1.0).epsilon(1e-14));

    const Mesh big = Mesh::uniform(320);
    for (int i = 0; i < 320; ++i)
        CHECK(big.step(i) == doctest::Approx(1.0 / 320.0).epsilon(1e-14));
    CHECK(std::accumulate(big.volumes().begin(), big.volumes().end(), 0.0) ==
          doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("power graded mesh") {
    const Mesh m2 = Mesh::power_graded(4, 2.0);
    CHECK(m2.node(1) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(m2.node(2) == 0.5);
    CHECK(m2.node(3) == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(m2.node(4) == 1.0);
    double sum_h = 0.0;
    for (int i = 0; i < 4; ++i) sum_h += m2.step(i);
    CHECK(sum_h == doctest::Approx(1.0).epsilon(1e-15));

    const Mesh m1 = Mesh::power_graded(4, 1.0);
    CHECK(m1.node(1) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    CHECK(m1.node(3) == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
}

TEST_CASE("graded mesh symmetry and endpoint refinement") {
    for (int n : {8, 20, 160}) {
        for (double p : {1.0, 2.0, 3.0}) {
            const Mesh m = Mesh::power_graded(n, p);
            for (int i = 0; i <= n; ++i)
                CHECK(m.node(i) + m.node(n - i) == doctest::Approx(1.0).epsilon(1e-14));
            const double ratio = m.step(0) / m.step(n / 2 - 1);
            CHECK(ratio == doctest::Approx(std::pow(2.0 / n, p)).epsilon(1e-12));
        }
    }
}

TEST_CASE("mesh validation") {
    CHECK_THROWS_AS(Mesh::uniform(3), std::invalid_argument);
    CHECK_THROWS_AS(Mesh::power_graded(5, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(Mesh::power_graded(6, 0.5), std::invalid_argument);
}

TEST_CASE("interval lookup") {
    const Mesh m = Mesh::uniform(8);
    CHECK(m.interval_of(0.0) == 0);
    CHECK(m.interval_of(0.13) == 1);
    CHECK(m.interval_of(1.0) == 7);
    CHECK(m.interval_of(0.5) == 4);  // nodes open the interval to their right
    CHECK_THROWS_AS(m.interval_of(1.5), std::domain_error);
}

}  // TEST_SUITE
