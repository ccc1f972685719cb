#include <doctest.h>

#include <random>

#include "grassflow/liepoisson.hpp"
#include "grassflow/raytransform.hpp"
#include "test_util.hpp"

using namespace grassflow;
using namespace grassflow::testutil;

namespace {

Polynomial random_comp_poly(int nvars, std::mt19937_64& rng, int max_terms = 6, int max_deg = 3) {
    std::uniform_int_distribution<int> deg(0, max_deg);
    std::uniform_int_distribution<int> var(0, nvars - 1);
    std::normal_distribution<double> gauss;
    Polynomial p(nvars);
    for (int t = 0; t < max_terms; ++t) {
        std::vector<int> powers(nvars, 0);
        const int d = deg(rng);
        for (int k = 0; k < d; ++k) ++powers[var(rng)];
        p.add_term(gauss(rng), powers);
    }
    return p;
}

Deformation quartic_deformation(int n, const Eigen::VectorXd& coeffs, double eps) {
    Polynomial psi(n);
    for (int k = 0; k < n; ++k) {
        std::vector<int> p(n, 0);
        p[k] = 4;
        psi.add_term(coeffs[k], p);
    }
    return Deformation(n, psi, eps);
}

}  // namespace

TEST_CASE("bracket_basis reproduces the so(n) relations") {
    SUBCASE("{l_12, l_13} = l_23 (1-based)") {
        const LinearForm f = bracket_basis(0, 1, 0, 2, 3);
        CHECK(f[pair_index(1, 2, 3)] == 1.0);
        CHECK(f[pair_index(0, 1, 3)] == 0.0);
        CHECK(f[pair_index(0, 2, 3)] == 0.0);
    }
    SUBCASE("disjoint pairs commute") {
        CHECK(bracket_basis(0, 1, 2, 3, 4).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("antisymmetry of the table") {
        for (int n = 3; n <= 5; ++n) {
            const BracketTable table(n);
            const int m = pair_count(n);
            for (int A = 0; A < m; ++A)
                for (int B = 0; B < m; ++B)
                    CHECK((table.bracket(A, B) + table.bracket(B, A)).cwiseAbs().maxCoeff() == 0.0);
        }
    }
    SUBCASE("{L_1, L_2} = L_3 in the vector form") {
        // L_1 = l_23, L_2 = -l_13, L_3 = l_12 (1-based)
        const LinearForm f = bracket_basis(1, 2, 0, 2, 3);  // {l_23, l_13}
        // {L_1, L_2} = -{l_23, l_13} should equal L_3 = l_12
        CHECK(-f[pair_index(0, 1, 3)] == 1.0);
    }
}

TEST_CASE("structure constants match explicit matrix commutators") {
    for (int n = 3; n <= 5; ++n) {
        const StructureConstants C(n);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                for (int p = 0; p < n; ++p)
                    for (int q = p + 1; q < n; ++q) {
                        const Eigen::MatrixXd lhs =
                            StructureConstants::basis_matrix(i, j, n) * StructureConstants::basis_matrix(p, q, n) -
                            StructureConstants::basis_matrix(p, q, n) * StructureConstants::basis_matrix(i, j, n);
                        Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, n);
                        for (int a = 0; a < n; ++a)
                            for (int b = 0; b < n; ++b)
                                rhs += C(i, j, p, q, a, b) * StructureConstants::basis_matrix(a, b, n);
                        CHECK((lhs - rhs).cwiseAbs().maxCoeff() == 0.0);
                    }
    }
    SUBCASE("antisymmetry C_{ab,pq,ij} = -C_{ij,pq,ab}") {
        const StructureConstants C(4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                for (int p = 0; p < 4; ++p)
                    for (int q = 0; q < 4; ++q)
                        for (int a = 0; a < 4; ++a)
                            for (int b = 0; b < 4; ++b)
                                CHECK(C(a, b, p, q, i, j) == -C(i, j, p, q, a, b));
    }
    SUBCASE("overlap-free quadruples vanish") {
        const StructureConstants C(5);
        for (int a = 0; a < 5; ++a)
            for (int b = 0; b < 5; ++b) CHECK(C(0, 1, 2, 3, a, b) == 0.0);
    }
}

TEST_CASE("Jacobi identity holds exactly on basis triples") {
    for (int n = 3; n <= 5; ++n) {
        const int m = pair_count(n);
        const BracketTable table(n);
        // {{l_A, l_B}, l_C} as a linear form: expand the inner bracket linearly.
        auto nested = [&](int A, int B, int Cc) {
            LinearForm out = LinearForm::Zero(m);
            const LinearForm inner = table.bracket(A, B);
            for (int K = 0; K < m; ++K)
                if (inner[K] != 0.0) out += inner[K] * table.bracket(K, Cc);
            return out;
        };
        for (int A = 0; A < m; ++A)
            for (int B = 0; B < m; ++B)
                for (int Cc = 0; Cc < m; ++Cc) {
                    const LinearForm total = nested(A, B, Cc) + nested(B, Cc, A) + nested(Cc, A, B);
                    CHECK(total.cwiseAbs().maxCoeff() == 0.0);
                }
    }
}

TEST_CASE("bracket_of_functions") {
    std::mt19937_64 rng(21);
    SUBCASE("{F, F} = 0") {
        const SkewMatrix l = random_wedge(4, rng);
        Polynomial p = random_comp_poly(pair_count(4), rng);
        const MomentumFunction F = MomentumFunction::from_polynomial(p, 4);
        CHECK(std::abs(bracket_of_functions(F, F, l)) <= 1e-14);
    }
    SUBCASE("{L_1, L_2} at L = (0,0,1) equals 1") {
        const SkewMatrix l = skew_from_vector_n3(Eigen::Vector3d(0, 0, 1));
        // L_1 = l_23, L_2 = -l_13 as coordinate combinations
        MomentumFunction L1 = MomentumFunction::coordinate(1, 2, 3);
        MomentumFunction L2 = MomentumFunction::coordinate(0, 2, 3);
        const double v = -bracket_of_functions(L1, L2, l);  // minus from L_2 = -l_13
        CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("l^2 is a Casimir against arbitrary functions") {
        for (int n = 3; n <= 5; ++n) {
            MomentumFunction l2;
            l2.value = [](const SkewMatrix& l) { return l.full_square_sum(); };
            l2.gradient = [](const SkewMatrix& l) { return SkewMatrix(l.n, 4.0 * l.comps); };
            for (int trial = 0; trial < 10; ++trial) {
                const SkewMatrix l = random_wedge(n, rng).scaled(1.7);
                const MomentumFunction F =
                    MomentumFunction::from_polynomial(random_comp_poly(pair_count(n), rng), n);
                CHECK(std::abs(bracket_of_functions(l2, F, l)) <= 1e-10);
            }
        }
    }
    SUBCASE("antisymmetry and Leibniz spot checks") {
        const SkewMatrix l = random_wedge(4, rng);
        const int m = pair_count(4);
        Polynomial pf = random_comp_poly(m, rng);
        Polynomial pg = random_comp_poly(m, rng);
        Polynomial ph = random_comp_poly(m, rng);
        const MomentumFunction F = MomentumFunction::from_polynomial(pf, 4);
        const MomentumFunction G = MomentumFunction::from_polynomial(pg, 4);
        CHECK(bracket_of_functions(F, G, l) ==
              doctest::Approx(-bracket_of_functions(G, F, l)).epsilon(1e-12));
        // {FG, H} = F{G,H} + G{F,H} pointwise, with FG assembled by hand
        MomentumFunction FG;
        FG.value = [&F, &G](const SkewMatrix& s) { return F.value(s) * G.value(s); };
        FG.gradient = [&F, &G](const SkewMatrix& s) {
            SkewMatrix out(s.n, F.value(s) * G.gradient(s).comps + G.value(s) * F.gradient(s).comps);
            return out;
        };
        const MomentumFunction H = MomentumFunction::from_polynomial(ph, 4);
        const double lhs = bracket_of_functions(FG, H, l);
        const double rhs =
            F.value(l) * bracket_of_functions(G, H, l) + G.value(l) * bracket_of_functions(F, H, l);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
    }
}

TEST_CASE("casimirs") {
    std::mt19937_64 rng(22);
    SUBCASE("orthonormal-state momentum has l^2 = 2 and C = 0") {
        auto [a, b] = random_orthonormal_pair(4, rng);
        ParticleState s;
        s.x = a;
        s.v = b;
        const auto cs = casimirs(momentum_from_state(s));
        REQUIRE(cs.size() == 2);
        CHECK(cs[0].name == "l2");
        CHECK(cs[0].value == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(cs[1].name == "plucker_C");
        CHECK(std::abs(cs[1].value) <= 1e-14);
    }
    SUBCASE("l_12 = l_34 = 1 has C = 1") {
        SkewMatrix l(4);
        l.set(0, 1, 1.0);
        l.set(2, 3, 1.0);
        const auto cs = casimirs(l);
        CHECK(cs[1].value == doctest::Approx(1.0).epsilon(1e-16));
    }
    SUBCASE("zero matrix") {
        const auto cs = casimirs(SkewMatrix(4));
        CHECK(cs[0].value == 0.0);
        CHECK(cs[1].value == 0.0);
    }
    SUBCASE("Pfaffian C is a Casimir against arbitrary functions") {
        MomentumFunction C;
        C.value = [](const SkewMatrix& l) {
            return l(0, 1) * l(2, 3) - l(0, 2) * l(1, 3) + l(0, 3) * l(1, 2);
        };
        C.gradient = [](const SkewMatrix& l) {
            SkewMatrix g(4);
            g.set(0, 1, l(2, 3));
            g.set(2, 3, l(0, 1));
            g.set(0, 2, -l(1, 3));
            g.set(1, 3, -l(0, 2));
            g.set(0, 3, l(1, 2));
            g.set(1, 2, l(0, 3));
            return g;
        };
        for (int trial = 0; trial < 10; ++trial) {
            SkewMatrix l(4, Eigen::VectorXd::NullaryExpr(6, [&rng](Eigen::Index) {
                             return std::normal_distribution<double>()(rng);
                         }));
            const MomentumFunction F =
                MomentumFunction::from_polynomial(random_comp_poly(6, rng), 4);
            CHECK(std::abs(bracket_of_functions(C, F, l)) <= 1e-10);
        }
    }
}

TEST_CASE("project_rank2") {
    std::mt19937_64 rng(23);
    SUBCASE("identity on rank-2 input") {
        for (int n = 4; n <= 6; ++n) {
            const SkewMatrix w = random_wedge(n, rng).scaled(1.3);
            const SkewMatrix p = project_rank2(w);
            CHECK((p.comps - w.comps).cwiseAbs().maxCoeff() <= 1e-14);
            // idempotent
            CHECK((project_rank2(p).comps - p.comps).cwiseAbs().maxCoeff() <= 1e-14);
        }
    }
    SUBCASE("small secondary block is removed") {
        SkewMatrix l(4);
        l.set(0, 1, 1.0);
        l.set(2, 3, 1e-6);
        const SkewMatrix p = project_rank2(l);
        CHECK(p(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(p(2, 3)) <= 1e-15);
        CHECK(plucker_residuals(p).cwiseAbs().maxCoeff() <= 1e-15);
    }
    SUBCASE("tied blocks are ambiguous") {
        SkewMatrix l(4);
        l.set(0, 1, 1.0);
        l.set(2, 3, 1.0);
        CHECK_THROWS_AS(project_rank2(l), Error);
    }
    SUBCASE("n=3 passes through") {
        SkewMatrix l(3, Eigen::Vector3d(0.3, -0.2, 0.9));
        CHECK((project_rank2(l).comps - l.comps).norm() == 0.0);
    }
}

TEST_CASE("reduced_rhs") {
    std::mt19937_64 rng(24);
    SUBCASE("Casimir Hamiltonian generates no motion") {
        const CasimirHamiltonian H(4);
        const SkewMatrix l = random_wedge(4, rng);
        CHECK(reduced_rhs(H, l).comps.cwiseAbs().maxCoeff() <= 1e-14);
    }
    SUBCASE("axis point is stationary for the n=3 quartic") {
        Eigen::VectorXd c(3);
        c << 1.0, 1.0, 1.0;
        const QuarticHamiltonian H(1.0, c);
        const SkewMatrix l = skew_from_vector_n3(Eigen::Vector3d(0, 0, 1));
        CHECK(reduced_rhs(H, l).comps.cwiseAbs().maxCoeff() <= 1e-14);
    }
    SUBCASE("vector form: rhs equals grad H x L") {
        Eigen::VectorXd c(3);
        c << 1.0, 2.0, 3.0;
        const QuarticHamiltonian H(0.8, c);
        for (int trial = 0; trial < 20; ++trial) {
            const SkewMatrix l = random_wedge(3, rng).scaled(0.9);
            const Eigen::Vector3d L = vector_form_n3(l);
            const Eigen::Vector3d expected =
                hamiltonian_quartic_n3_grad(0.8, Eigen::Vector3d(c), L).cross(L);
            const Eigen::Vector3d got = vector_form_n3(reduced_rhs(H, l));
            CHECK((got - expected).cwiseAbs().maxCoeff() <= 1e-13);
        }
    }
    SUBCASE("averaged momentum equations: rhs = -eps <m_ij psi> on wedge points") {
        for (int n : {3, 4}) {
            Eigen::VectorXd c(n);
            for (int k = 0; k < n; ++k) c[k] = k + 1.0;
            const double eps = 0.3;
            const QuarticHamiltonian H(eps, c);
            Polynomial psi(n);
            for (int k = 0; k < n; ++k) {
                std::vector<int> p(n, 0);
                p[k] = 4;
                psi.add_term(c[k], p);
            }
            for (int trial = 0; trial < 10; ++trial) {
                const SkewMatrix w = random_wedge(n, rng);
                const SkewMatrix rhs = reduced_rhs(H, w);
                for (int i = 0; i < n; ++i)
                    for (int j = i + 1; j < n; ++j) {
                        const double avg = ray_average(apply_mij(psi, i, j), w);
                        CHECK(rhs(i, j) == doctest::Approx(-eps * avg).epsilon(5e-12));
                    }
            }
        }
    }
    SUBCASE("numeric and closed-form Hamiltonians induce the same flow on the orbit") {
        Eigen::VectorXd c(4);
        c << 1.0, 2.0, 3.0, 4.0;
        const QuarticHamiltonian Hc(0.5, c);
        const NumericHamiltonian Hn(quartic_deformation(4, c, 0.5));
        for (int trial = 0; trial < 5; ++trial) {
            const SkewMatrix w = random_wedge(4, rng);
            CHECK((reduced_rhs(Hc, w).comps - reduced_rhs(Hn, w).comps).cwiseAbs().maxCoeff() <= 1e-7);
        }
    }
}

TEST_CASE("integrate_reduced") {
    std::mt19937_64 rng(25);
    SUBCASE("Casimir flow is constant") {
        const CasimirHamiltonian H(4);
        const SkewMatrix l0 = random_wedge(4, rng);
        const ReducedTrajectory traj = integrate_reduced(H, l0, 5.0);
        CHECK(traj.stationary);
        CHECK((traj.samples.back().l.comps - l0.comps).cwiseAbs().maxCoeff() <= 1e-14);
    }
    SUBCASE("energy and Casimir conservation, n=3") {
        Eigen::VectorXd c(3);
        c << 1.0, 1.0, 1.0;
        const QuarticHamiltonian H(1.0, c);
        const SkewMatrix l0 = skew_from_vector_n3(Eigen::Vector3d(0.05, 0.1, 1.0).normalized());
        ReducedIntegratorSettings set;
        set.dt = 1e-2;
        set.sample_stride = 100;
        const ReducedTrajectory traj = integrate_reduced(H, l0, 50.0, set);
        CHECK(traj.max_H_drift_rel <= 1e-8);
        CHECK(traj.max_l2_drift_rel <= 1e-12);
    }
    SUBCASE("axisymmetric n=4 conserves l_34; trajectories reverse") {
        Eigen::VectorXd c(4);
        c << 1.0, 2.0, 0.0, 0.0;
        const QuarticHamiltonian H(1.0, c);
        auto [a, b] = random_orthonormal_pair(4, rng);
        const SkewMatrix l0 = wedge(a, b);
        ReducedIntegratorSettings set;
        set.dt = 2e-3;
        set.sample_stride = 50;
        const double T = 20.0;
        const ReducedTrajectory traj = integrate_reduced(H, l0, T, set);
        CHECK(traj.max_l34_drift <= 1e-9);
        CHECK(traj.max_plucker <= 1e-9);
        CHECK(traj.max_l2_drift_rel <= 1e-12);

        // reversibility: integrate back with the mirrored Hamiltonian flow
        const SkewMatrix lT = traj.samples.back().l;
        const QuarticHamiltonian Hneg(-1.0, c);
        const ReducedTrajectory back = integrate_reduced(Hneg, lT, T, set);
        CHECK((back.samples.back().l.comps - l0.comps).cwiseAbs().maxCoeff() <= 1e-7);
    }
    SUBCASE("evenness: the -l0 trajectory is the negated time-reversed one") {
        // The flow field is even under l -> -l, so starting from -l0 traces
        // -l(-t): the same plane motion.
        Eigen::VectorXd c(4);
        c << 1.0, -1.0, 2.0, 0.5;
        const QuarticHamiltonian H(1.0, c);
        const QuarticHamiltonian Hback(-1.0, c);
        const SkewMatrix l0 = random_wedge(4, rng);
        ReducedIntegratorSettings set;
        set.dt = 5e-3;
        set.sample_stride = 20;
        const ReducedTrajectory neg = integrate_reduced(H, l0.scaled(-1.0), 10.0, set);
        const ReducedTrajectory back = integrate_reduced(Hback, l0, 10.0, set);
        REQUIRE(neg.samples.size() == back.samples.size());
        for (size_t k = 0; k < neg.samples.size(); ++k)
            CHECK((neg.samples[k].l.comps + back.samples[k].l.comps).cwiseAbs().maxCoeff() <= 1e-8);
    }
    SUBCASE("level-set confinement near a center") {
        Eigen::VectorXd c(3);
        c << 1.0, 1.0, 1.0;
        const QuarticHamiltonian H(1.0, c);
        const SkewMatrix l0 = skew_from_vector_n3(Eigen::Vector3d(0.02, 0.03, 1.0).normalized());
        const double H0 = H.value(l0);
        ReducedIntegratorSettings set;
        set.dt = 1e-2;
        set.sample_stride = 10;
        const ReducedTrajectory traj = integrate_reduced(H, l0, 100.0, set);
        for (const ReducedSample& s : traj.samples) CHECK(std::abs(s.H - H0) <= 1e-8);
    }
}

TEST_CASE("compare_full_vs_reduced at epsilon = 0") {
    Polynomial psi(3);
    psi.add_term(1.0, {4, 0, 0});
    const Deformation d(3, psi, 0.0);
    ParticleState s0;
    s0.x = Eigen::Vector3d(1, 0, 0);
    s0.v = Eigen::Vector3d(0, 0.6, 0.8);
    CompareSettings cs;
    cs.samples = 50;
    const DriftReport r = compare_full_vs_reduced(d, s0, 20.0, cs);
    CHECK(r.sup_deviation <= 1e-8);
    CHECK(r.epsilon == 0.0);
}
