#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "xps/nilpotent.hpp"

using xps::NilpotentScalar;
using Catch::Approx;

TEST_CASE("product rule (a+bN)(c+dN) = ac + (ad+bc)N") {
    NilpotentScalar x{2.0, 3.0}, y{5.0, -1.0};
    NilpotentScalar z = x * y;
    CHECK(z.body == Approx(10.0));
    CHECK(z.soul == Approx(2.0 * -1.0 + 3.0 * 5.0));
}

TEST_CASE("N squared vanishes exactly") {
    NilpotentScalar n{0.0, 1.0};
    NilpotentScalar n2 = n * n;
    CHECK(n2.body == 0.0);
    CHECK(n2.soul == 0.0);
}

TEST_CASE("ring identities") {
    NilpotentScalar x{1.5, -0.25}, y{-2.0, 4.0}, z{0.5, 0.125};
    NilpotentScalar lhs = x * (y + z);
    NilpotentScalar rhs = x * y + x * z;
    CHECK(lhs.body == Approx(rhs.body));
    CHECK(lhs.soul == Approx(rhs.soul));

    NilpotentScalar comm = x * y - y * x;
    CHECK(comm.body == 0.0);
    CHECK(comm.soul == 0.0);
}

TEST_CASE("division inverts multiplication") {
    NilpotentScalar x{2.0, 3.0}, y{4.0, -5.0};
    NilpotentScalar q = (x * y) / y;
    CHECK(q.body == Approx(x.body));
    CHECK(q.soul == Approx(x.soul));
}

TEST_CASE("function lift matches the first-order expansion") {
    // f(a+bN) = f(a) + f'(a) b N checked for f = sin against a small-soul
    // finite difference of the exact function.
    const double a = 0.7, b = 2.5;
    NilpotentScalar lifted = xps::lift({a, b}, std::sin(a), std::cos(a));
    CHECK(lifted.body == Approx(std::sin(a)));
    const double eps = 1e-7;
    const double fd = (std::sin(a + eps * b) - std::sin(a)) / eps;
    CHECK(lifted.soul == Approx(fd).margin(1e-6));
}

TEST_CASE("lift is multiplicative over products: (x^2) soul = 2 a b") {
    NilpotentScalar x{3.0, 0.5};
    NilpotentScalar sq = x * x;
    CHECK(sq.body == Approx(9.0));
    CHECK(sq.soul == Approx(2.0 * 3.0 * 0.5));
}
