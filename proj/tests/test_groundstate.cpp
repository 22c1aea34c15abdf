#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "xps/groundstate.hpp"
#include "xps/spectral_oracle.hpp"

using namespace xps;
using Catch::Approx;

namespace {

ExtendedSystem dw_system(double lambda, double a) {
    return ExtendedSystem{SuperPotential::double_well(lambda, a), std::nullopt};
}

}  // namespace

TEST_CASE("first iterate reproduces the theta-cutoff exponential") {
    ExtendedSystem sys = dw_system(1.0, 1.0);
    Grid g(-8.0, 8.0, 4001);
    ProductState st = iterate_groundstate(sys, g, g, 1);

    // psi1 ~ theta(q+1) exp(-(q^3/3 - q)); ratio psi1(0)/psi1(1) = e^{-2/3}.
    const int i0 = g.nearest(0.0);
    const int i1 = g.nearest(1.0);
    CHECK(st.psi1[static_cast<size_t>(i0)] /
              st.psi1[static_cast<size_t>(i1)] ==
          Approx(std::exp(-2.0 / 3.0)).epsilon(1e-5));

    // support cutoff: psi1 vanishes left of q_-
    CHECK(st.psi1[g.nearest(-1.5)] == 0.0);
    CHECK(st.psi1[g.nearest(-8.0)] == 0.0);

    CHECK(l2_norm(st.psi1, g.spacing()) == Approx(1.0).epsilon(1e-10));
    CHECK(l2_norm(st.psi2, g.spacing()) == Approx(1.0).epsilon(1e-10));
}

TEST_CASE("components pair under parity for a symmetric double well") {
    ExtendedSystem sys = dw_system(1.0, 2.0);
    Grid g(-8.0, 8.0, 4001);
    ProductState st = iterate_groundstate(sys, g, g, 2);

    // max|psi''| estimate for the tolerance 10 h^2 max|psi''|
    double max_psi2 = 0.0;
    const double h = g.spacing();
    for (int i = 1; i + 1 < g.n; ++i) {
        const double dd = (st.psi1[static_cast<size_t>(i + 1)] -
                           2.0 * st.psi1[static_cast<size_t>(i)] +
                           st.psi1[static_cast<size_t>(i - 1)]) /
                          (h * h);
        max_psi2 = std::max(max_psi2, std::fabs(dd));
    }
    const double tol = 10.0 * h * h * max_psi2;
    double worst = 0.0;
    for (int i = 0; i < g.n; ++i) {
        const int j = g.n - 1 - i;  // node at -q
        worst = std::max(worst, std::fabs(st.psi1[static_cast<size_t>(j)] -
                                          st.psi2[static_cast<size_t>(i)]));
    }
    CHECK(worst <= tol);
}

TEST_CASE("a third iteration barely moves a well-separated state") {
    ExtendedSystem sys = dw_system(1.0, 2.0);
    Grid g(-8.0, 8.0, 4001);
    ProductState it2 = iterate_groundstate(sys, g, g, 2);
    ProductState it3 = refine_iteration(sys, it2);
    CHECK(state_distance(it2, it3) < 0.05);
}

TEST_CASE("successive iterates contract for separated wells") {
    ExtendedSystem sys = dw_system(1.0, 1.3);
    Grid g(-8.0, 8.0, 4001);
    ProductState it1 = iterate_groundstate(sys, g, g, 1);
    ProductState it2 = iterate_groundstate(sys, g, g, 2);
    ProductState it3 = refine_iteration(sys, it2);
    CHECK(state_distance(it2, it3) < state_distance(it1, it2));
}

TEST_CASE("narrow separation sets the warning flag") {
    ExtendedSystem sys = dw_system(0.5, 1.0);  // action 2/3 < 1
    Grid g(-8.0, 8.0, 2001);
    ProductState st = iterate_groundstate(sys, g, g, 1);
    CHECK(st.separation_warning);
    CHECK(std::isfinite(st.norm_closed_form));
    CHECK(st.norm_closed_form > 0.0);
}

TEST_CASE("overflowing dressing integrals raise a scaling error") {
    // lambda large enough that exp(|integral of W|) exceeds double range
    ExtendedSystem sys = dw_system(30.0, 2.0);
    Grid g(-8.0, 8.0, 2001);
    CHECK_THROWS_AS(iterate_groundstate(sys, g, g, 1), ScalingError);
}

TEST_CASE("log-derivative rejects a node at the origin") {
    ExtendedSystem sys{SuperPotential::linear(1.0), std::nullopt};
    Grid g(-8.0, 8.0, 2001);
    ProductState st;
    st.gq = g;
    st.psi1.resize(static_cast<size_t>(g.n));
    for (int i = 0; i < g.n; ++i) {
        const double x = g.node(i);
        st.psi1[static_cast<size_t>(i)] = x * std::exp(-0.5 * x * x);
    }
    detail::normalize_l2(st.psi1, g.spacing());
    st.psi2 = st.psi1;
    CHECK_THROWS_AS(energy_log_derivative(st, sys), PreconditionError);
}

TEST_CASE("iteration rejects potentials without a double-well shape") {
    ExtendedSystem sys{SuperPotential::linear(1.0), std::nullopt};
    Grid g(-8.0, 8.0, 1001);
    CHECK_THROWS_AS(iterate_groundstate(sys, g, g, 1), ShapeError);
    ExtendedSystem dw = dw_system(1.0, 1.0);
    CHECK_THROWS_AS(iterate_groundstate(dw, g, g, 3), ParameterError);
}

TEST_CASE("product state is separable by construction") {
    SuperPotential w = SuperPotential::double_well(1.0, 1.0);
    ExtendedSystem sys{w, w};
    Grid g(-8.0, 8.0, 801);
    ProductState st = iterate_groundstate(sys, g, g, 2);
    REQUIRE(st.has_p_sector());
    // chi_1(q,p) = psi1(q) phi1(p): every 2x2 minor of the materialized
    // matrix vanishes identically.
    for (int i : {100, 300, 400})
        for (int j : {150, 350, 500}) {
            const double p1 = st.psi1[static_cast<size_t>(i)] *
                              st.phi1[static_cast<size_t>(j)] *
                              st.psi1[static_cast<size_t>(i + 7)] *
                              st.phi1[static_cast<size_t>(j + 11)];
            const double p2 = st.psi1[static_cast<size_t>(i)] *
                              st.phi1[static_cast<size_t>(j + 11)] *
                              st.psi1[static_cast<size_t>(i + 7)] *
                              st.phi1[static_cast<size_t>(j)];
            CHECK(std::fabs(p1 - p2) <=
                  4.0 * std::numeric_limits<double>::epsilon() *
                      (std::fabs(p1) + std::fabs(p2)));
        }
}

TEST_CASE("log-derivative energy vanishes for the exact harmonic groundstate") {
    ExtendedSystem sys{SuperPotential::linear(1.0), std::nullopt};
    Grid g(-8.0, 8.0, 2001);
    ProductState st;
    st.gq = g;
    st.psi1.resize(static_cast<size_t>(g.n));
    for (int i = 0; i < g.n; ++i)
        st.psi1[static_cast<size_t>(i)] =
            std::exp(-0.5 * g.node(i) * g.node(i));
    detail::normalize_l2(st.psi1, g.spacing());
    st.psi2 = st.psi1;
    auto e = energy_log_derivative(st, sys);
    CHECK(std::fabs(e.eps_q) < 1e-12);
    CHECK(e.eps_p == 0.0);
}

TEST_CASE("log-derivative energy agrees with the oracle for a cubic") {
    // W = q^3 keeps the zero mode exp(-q^4/4); both routes should sit at
    // zero within their numerical floors.
    auto w = SuperPotential::table_of([](double x) { return x * x * x; },
                                      {-5.0, 5.0}, 2001);
    ExtendedSystem sys{w, std::nullopt};
    Grid g(-5.0, 5.0, 2001);
    ProductState st;
    st.gq = g;
    st.psi1.resize(static_cast<size_t>(g.n));
    for (int i = 0; i < g.n; ++i)
        st.psi1[static_cast<size_t>(i)] =
            std::exp(-0.25 * std::pow(g.node(i), 4));
    detail::normalize_l2(st.psi1, g.spacing());
    st.psi2 = st.psi1;
    auto e = energy_log_derivative(st, sys);

    auto sp = eigen_lowest(discretize(w, g, PartnerSign::plus), 1);
    const double e_oracle = sp.levels[0].energy;
    CHECK(std::fabs(e.eps_q - e_oracle) <=
          std::max(0.2 * std::fabs(e_oracle), 1e-3));
}

TEST_CASE("symmetric sectors yield equal log-derivative energies") {
    auto w = SuperPotential::table_of([](double x) { return x * x * x; },
                                      {-5.0, 5.0}, 2001);
    ExtendedSystem sys{w, w};
    Grid g(-5.0, 5.0, 2001);
    ProductState st;
    st.gq = st.gp = g;
    st.psi1.resize(static_cast<size_t>(g.n));
    for (int i = 0; i < g.n; ++i)
        st.psi1[static_cast<size_t>(i)] =
            std::exp(-0.25 * std::pow(g.node(i), 4));
    detail::normalize_l2(st.psi1, g.spacing());
    st.psi2 = st.psi1;
    st.phi1 = st.psi1;
    st.phi2 = st.psi1;
    auto e = energy_log_derivative(st, sys);
    CHECK(e.eps_q == e.eps_p);  // identical code path on identical data
}

TEST_CASE("log-derivative rejects an even superpotential") {
    ExtendedSystem sys = dw_system(1.0, 1.0);
    Grid g(-8.0, 8.0, 2001);
    ProductState st = iterate_groundstate(sys, g, g, 2);
    CHECK_THROWS_AS(energy_log_derivative(st, sys), PreconditionError);
}

TEST_CASE("semiclassical breaking energy of the unit double well") {
    ExtendedSystem sys = dw_system(1.0, 1.0);
    BreakingResult r = breaking_energy_semiclassical(sys);
    const double expect =
        2.0 / (2.0 * std::numbers::pi) * std::exp(-8.0 / 3.0);
    CHECK(r.eps_q == Approx(expect).epsilon(1e-9));
    CHECK(r.eps_p == 0.0);
    CHECK(r.eps == Approx(2.212e-2).epsilon(2e-3));
    CHECK(r.delta_w == Approx(4.0 / 3.0).epsilon(1e-9));
    CHECK(r.w_prime_plus == Approx(2.0).margin(1e-7));
}

TEST_CASE("identical sectors break nothing") {
    SuperPotential w = SuperPotential::double_well(1.0, 1.0);
    ExtendedSystem sys{w, w};
    BreakingResult r = breaking_energy_semiclassical(sys);
    CHECK(r.eps == 0.0);  // identical code path, exact cancellation
}

TEST_CASE("two-sector breaking assembles sector terms additively") {
    SuperPotential w = SuperPotential::double_well(1.0, 1.0);
    SuperPotential v = SuperPotential::double_well(1.0, 1.2);
    ExtendedSystem sys{w, v};
    BreakingResult r = breaking_energy_semiclassical(sys);
    const double eps_p_expect = 2.0 * 1.2 / (2.0 * std::numbers::pi) *
                                std::exp(-2.0 * (4.0 * 1.728 / 3.0));
    CHECK(r.eps_p == Approx(eps_p_expect).epsilon(1e-9));
    // additivity is exact by construction
    CHECK(r.eps == r.eps_q - r.eps_p);
}

TEST_CASE("breaking requires a double-well shape") {
    ExtendedSystem sys{SuperPotential::linear(1.0), std::nullopt};
    CHECK_THROWS_AS(breaking_energy_semiclassical(sys), ShapeError);
}

TEST_CASE("auxiliary expectation: symmetric phase flag") {
    SuperPotential w = SuperPotential::double_well(1.0, 1.0);
    ExtendedSystem sys{w, w};
    FExpectation f = auxiliary_expectation(sys);
    CHECK(f.phase == BreakingPhase::symmetric);
    CHECK(f.value == std::complex<double>(0.0, 0.0));
}

TEST_CASE("auxiliary expectation closed form with the p-sector absent") {
    ExtendedSystem sys = dw_system(1.0, 1.0);
    BreakingResult r = breaking_energy_semiclassical(sys);
    FExpectation f = auxiliary_expectation(sys);
    const double expect = -2.0 * std::sqrt(r.eps_q) *
                          std::sqrt(2.0 / std::numbers::pi) *
                          std::exp(-8.0 / 3.0) * 2.0;
    REQUIRE(f.phase == BreakingPhase::broken);
    CHECK(f.value.imag() == 0.0);
    CHECK(f.value.real() == Approx(expect).epsilon(1e-9));
}

TEST_CASE("auxiliary expectation is invariant under flipping the well") {
    auto wt = SuperPotential::table_of(
        [](double x) { return x * x - 1.0; }, {-6.0, 6.0}, 2401);
    auto wneg = SuperPotential::table_of(
        [](double x) { return 1.0 - x * x; }, {-6.0, 6.0}, 2401);
    ExtendedSystem sys_a{wt, std::nullopt};
    ExtendedSystem sys_b{wneg, std::nullopt};
    FExpectation fa = auxiliary_expectation(sys_a);
    FExpectation fb = auxiliary_expectation(sys_b);
    REQUIRE(fa.phase == BreakingPhase::broken);
    REQUIRE(fb.phase == BreakingPhase::broken);
    CHECK(fb.value.real() == Approx(fa.value.real()).epsilon(1e-9));
}

TEST_CASE("negative extended energy flags the complex branch") {
    SuperPotential w = SuperPotential::double_well(1.0, 1.2);  // smaller eps_q
    SuperPotential v = SuperPotential::double_well(1.0, 1.0);  // larger eps_p
    ExtendedSystem sys{w, v};
    BreakingResult r = breaking_energy_semiclassical(sys);
    REQUIRE(r.eps < 0.0);
    FExpectation f = auxiliary_expectation(sys);
    CHECK(f.phase == BreakingPhase::negative_eps);
    CHECK(f.value.real() == 0.0);
    CHECK(f.value.imag() != 0.0);
}
