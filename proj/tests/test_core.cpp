#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "grassflow/core.hpp"
#include "test_util.hpp"

using namespace grassflow;
using namespace grassflow::testutil;

TEST_CASE("pair_index lexicographic map and inverse") {
    CHECK(pair_index(0, 1, 3) == 0);
    CHECK(pair_index(1, 2, 3) == 2);
    CHECK(pair_index(2, 3, 4) == 5);
    for (int n = 2; n <= 8; ++n) {
        int k = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                CHECK(pair_index(i, j, n) == k);
                const auto [pi, pj] = pair_from_index(k, n);
                CHECK(pi == i);
                CHECK(pj == j);
                ++k;
            }
        CHECK(k == pair_count(n));
    }
    CHECK_THROWS_AS(pair_index(1, 1, 3), Error);
    CHECK_THROWS_AS(pair_index(2, 1, 3), Error);
    CHECK_THROWS_AS(pair_index(0, 3, 3), Error);
    CHECK_THROWS_AS(pair_index(-1, 1, 3), Error);
}

TEST_CASE("momentum_from_state") {
    ParticleState s;
    s.x = Eigen::Vector3d(1, 0, 0);
    s.v = Eigen::Vector3d(0, 1, 0);
    SkewMatrix l = momentum_from_state(s);
    CHECK(l(0, 1) == 1.0);
    CHECK(l(0, 2) == 0.0);
    CHECK(l(1, 2) == 0.0);

    s.v = Eigen::Vector3d(1, 0, 0);
    CHECK(momentum_from_state(s).comps.norm() == 0.0);

    ParticleState s4;
    s4.x = Eigen::Vector4d(1, 0, 0, 0);
    s4.v = Eigen::Vector4d(0, 0.6, 0.8, 0);
    SkewMatrix l4 = momentum_from_state(s4);
    CHECK(l4(0, 1) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(l4(0, 2) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(l4(0, 3) == 0.0);
    CHECK(l4(1, 2) == 0.0);

    ParticleState bad;
    bad.x = Eigen::Vector3d(1, 0, 0);
    bad.v = Eigen::Vector4d(0, 1, 0, 0);
    CHECK_THROWS_AS(momentum_from_state(bad), Error);
}

TEST_CASE("plucker residuals vanish on rank-2 matrices") {
    std::mt19937_64 rng(12345);
    for (int n = 4; n <= 8; ++n) {
        for (int trial = 0; trial < 50; ++trial) {
            ParticleState s;
            s.x = 2.0 * random_unit_vector(n, rng);
            s.v = 0.7 * random_unit_vector(n, rng);
            const Eigen::VectorXd res = plucker_residuals(momentum_from_state(s));
            CHECK(res.size() == n * (n - 1) * (n - 2) * (n - 3) / 24);
            CHECK(res.cwiseAbs().maxCoeff() <= 1e-14);
        }
    }
    SUBCASE("n=3 has no quadruples") {
        SkewMatrix l(3, Eigen::Vector3d(1.0, 2.0, 3.0));
        CHECK(plucker_residuals(l).size() == 0);
    }
    SUBCASE("non-decomposable n=4 matrix has a nonzero residual") {
        SkewMatrix l(4);
        l.set(0, 1, 1.0);
        l.set(2, 3, 1.0);
        const Eigen::VectorXd res = plucker_residuals(l);
        CHECK(res.size() == 1);
        CHECK(res[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    }
}

TEST_CASE("plane_basis recovers the span") {
    std::mt19937_64 rng(777);
    SUBCASE("coordinate plane") {
        ParticleState s;
        s.x = Eigen::Vector3d(1, 0, 0);
        s.v = Eigen::Vector3d(0, 1, 0);
        PlaneBasis b = plane_basis(momentum_from_state(s));
        CHECK(std::abs(b.e1[2]) < 1e-14);
        CHECK(std::abs(b.e2[2]) < 1e-14);
        CHECK(std::abs(b.e1.dot(b.e2)) < 1e-14);
    }
    SUBCASE("wedge kills the parallel part") {
        ParticleState s;
        s.x = Eigen::Vector3d(1, 0, 0);
        s.v = Eigen::Vector3d(1, 1, 0).normalized();
        PlaneBasis b = plane_basis(momentum_from_state(s));
        // span{e1, e2} should still be the coordinate (0,1) plane
        CHECK(std::abs(b.e1[2]) < 1e-14);
        CHECK(std::abs(b.e2[2]) < 1e-14);
    }
    SUBCASE("x, v recovered inside the plane; wedge reconstruction") {
        for (int n = 3; n <= 6; ++n) {
            for (int trial = 0; trial < 30; ++trial) {
                auto [a, bvec] = random_orthonormal_pair(n, rng);
                ParticleState s;
                s.x = a;
                s.v = (0.3 * a + 0.95 * bvec).normalized();
                const SkewMatrix l = momentum_from_state(s);
                PlaneBasis pb = plane_basis(l);
                auto resid = [&](const Eigen::VectorXd& u) {
                    return (u - pb.e1.dot(u) * pb.e1 - pb.e2.dot(u) * pb.e2).norm();
                };
                CHECK(resid(s.x) <= 1e-10);
                CHECK(resid(s.v) <= 1e-10);
                // e1 ^ e2 reproduces the normalized matrix up to sign
                const SkewMatrix w = wedge(pb.e1, pb.e2);
                const Eigen::VectorXd unit = l.comps / l.comps.norm();
                const double diff =
                    std::min((w.comps - unit).cwiseAbs().maxCoeff(), (w.comps + unit).cwiseAbs().maxCoeff());
                CHECK(diff <= 1e-10);
            }
        }
    }
    SUBCASE("zero matrix is degenerate") {
        CHECK_THROWS_AS(plane_basis(SkewMatrix(4)), Error);
    }
    SUBCASE("rank-4 matrix rejected") {
        SkewMatrix l(4);
        l.set(0, 1, 1.0);
        l.set(2, 3, 0.5);
        CHECK_THROWS_AS(plane_basis(l), Error);
    }
    SUBCASE("deterministic output") {
        const SkewMatrix l = random_wedge(5, rng);
        PlaneBasis a = plane_basis(l);
        PlaneBasis b = plane_basis(l);
        CHECK((a.e1 - b.e1).norm() == 0.0);
        CHECK((a.e2 - b.e2).norm() == 0.0);
    }
}

TEST_CASE("vector_form_n3 component convention and isometry") {
    SkewMatrix l(3);
    l.set(0, 1, 1.0);  // l_12 = 1 in 1-based labels
    CHECK(vector_form_n3(l) == Eigen::Vector3d(0, 0, 1));

    SkewMatrix m(3);
    m.set(1, 2, 1.0);  // l_23 = 1
    CHECK(vector_form_n3(m) == Eigen::Vector3d(1, 0, 0));

    CHECK(vector_form_n3(SkewMatrix(3)) == Eigen::Vector3d(0, 0, 0));

    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::Vector3d c;
        for (int k = 0; k < 3; ++k) c[k] = std::normal_distribution<double>()(rng);
        SkewMatrix s(3, c);
        const Eigen::Vector3d L = vector_form_n3(s);
        CHECK(L.squaredNorm() == doctest::Approx(s.comps.squaredNorm()).epsilon(1e-15));
        // round trip
        CHECK((skew_from_vector_n3(L).comps - s.comps).norm() == 0.0);
    }
    SkewMatrix l4(4);
    CHECK_THROWS_AS(vector_form_n3(l4), Error);
}

TEST_CASE("SkewMatrix storage, normalization flags, serialization shape") {
    SkewMatrix l(4);
    l.set(1, 3, 2.5);
    CHECK(l(1, 3) == 2.5);
    CHECK(l(3, 1) == -2.5);
    CHECK(l(2, 2) == 0.0);
    const Eigen::MatrixXd m = l.to_matrix();
    CHECK((m + m.transpose()).norm() == 0.0);
    CHECK((SkewMatrix::from_matrix(m).comps - l.comps).norm() == 0.0);

    std::mt19937_64 rng(9);
    const SkewMatrix w = random_wedge(4, rng);
    CHECK(w.full_square_sum() == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(w.normalized().is_normalized());
    CHECK(w.plane_normalized().comps.norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_FALSE(w.is_normalized());
}
