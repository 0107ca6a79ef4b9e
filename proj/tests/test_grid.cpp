#include "rdbc/errors.hpp"
#include "rdbc/grid.hpp"

#include <doctest.h>

#include <cmath>

using namespace rdbc;

TEST_SUITE("grid") {

TEST_CASE("nodes and spacing")
{
    const Grid g(161);
    CHECK(g.nodes() == 162);
    CHECK(g.step() == doctest::Approx(1.0 / 161));
    CHECK(g.x(161) == doctest::Approx(1.0));
    CHECK_THROWS(Grid(0));
}

TEST_CASE("trapezoid is exact for linear data")
{
    const Grid g(10);
    const GridFunction f = sample(g, [](double x) { return 3.0 * x - 1.0; });
    CHECK(trapezoid(f, g.step()) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("norms of simple functions")
{
    const Grid g(161);
    const GridFunction one = sample(g, [](double) { return 1.0; });
    CHECK(l2_norm(one, g.step()) == doctest::Approx(1.0).epsilon(1e-14));
    const GridFunction x = sample(g, [](double t) { return t; });
    CHECK(l2_norm_derivative(x, g.step()) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(l2_norm(x, g.step()) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-4));
}

TEST_CASE("Horner evaluation")
{
    const double c[] = {1.0, -2.0, 0.5};
    CHECK(eval_polynomial(c, 2.0) == doctest::Approx(1.0 - 4.0 + 2.0));
    CHECK(eval_polynomial({}, 3.0) == 0.0);
}

}
