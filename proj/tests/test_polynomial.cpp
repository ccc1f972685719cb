#include <doctest.h>

#include <random>

#include "grassflow/polynomial.hpp"

using namespace grassflow;

TEST_CASE("polynomial evaluation, partials, canonical form") {
    // psi = x0^4 + 2 x1^4 + 3 x2^4
    Polynomial p(3);
    p.add_term(1.0, {4, 0, 0});
    p.add_term(2.0, {0, 4, 0});
    p.add_term(3.0, {0, 0, 4});
    CHECK(p.degree() == 4);
    Eigen::VectorXd x(3);
    x << 1.0, -1.0, 0.5;
    CHECK(p.eval(x) == doctest::Approx(1.0 + 2.0 + 3.0 * 0.0625).epsilon(1e-15));

    const Polynomial dp0 = p.partial(0);
    CHECK(dp0.eval(x) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(p.partial(0).partial(1).is_zero());

    SUBCASE("like terms combine and zeros vanish") {
        Polynomial q(2);
        q.add_term(1.5, {1, 1});
        q.add_term(-1.5, {1, 1});
        CHECK(q.is_zero());
        q.add_term(2.0, {0, 3});
        q.add_term(1.0, {0, 3});
        CHECK(q.terms().size() == 1);
        CHECK(q.terms()[0].coeff == 3.0);
    }

    SUBCASE("times_coord raises the exponent") {
        const Polynomial xp = p.times_coord(1);
        Eigen::VectorXd y(3);
        y << 0.0, 2.0, 0.0;
        CHECK(xp.eval(y) == doctest::Approx(2.0 * 16.0 * 2.0).epsilon(1e-15));
    }
}

TEST_CASE("rotation substitution agrees with pointwise rotation") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Polynomial f(4);
    f.add_term(1.0, {4, 0, 0, 0});
    f.add_term(-2.0, {1, 2, 1, 0});
    f.add_term(0.5, {0, 0, 2, 2});
    for (int trial = 0; trial < 20; ++trial) {
        const double angle = 3.0 * uni(rng);
        const int i = 1, j = 3;
        const Polynomial g = f.rotated(i, j, angle);
        Eigen::VectorXd x(4);
        for (int k = 0; k < 4; ++k) x[k] = uni(rng);
        // g(x) must equal f(R^{-1} x)
        Eigen::VectorXd y = x;
        y[i] = std::cos(angle) * x[i] + std::sin(angle) * x[j];
        y[j] = -std::sin(angle) * x[i] + std::cos(angle) * x[j];
        CHECK(g.eval(x) == doctest::Approx(f.eval(y)).epsilon(1e-12));
    }
}
