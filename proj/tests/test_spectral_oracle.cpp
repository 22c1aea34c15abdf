#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "xps/spectral_oracle.hpp"

using namespace xps;
using Catch::Approx;

TEST_CASE("discretization writes the documented matrix entries") {
    auto w = SuperPotential::linear(1.0);
    Grid g(-4.0, 4.0, 9);
    auto op = discretize(w, g, PartnerSign::minus);
    const double h = g.spacing();
    REQUIRE(op.diagonal.size() == 9);
    REQUIRE(op.off_diagonal.size() == 8);
    for (int i = 0; i < 9; ++i) {
        const double x = g.node(i);
        CHECK(op.diagonal[static_cast<size_t>(i)] ==
              Approx(1.0 / (h * h) + 0.5 * (x * x + 1.0)));
    }
    for (double e : op.off_diagonal) CHECK(e == Approx(-0.5 / (h * h)));
}

TEST_CASE("harmonic zero-mode partner spectrum is 0, 1, 2") {
    auto w = SuperPotential::linear(1.0);
    Grid g(-8.0, 8.0, 2001);
    auto sp = eigen_lowest(discretize(w, g, PartnerSign::plus), 3);
    CHECK(std::fabs(sp.levels[0].energy) < 1e-4);
    CHECK(sp.levels[1].energy == Approx(1.0).margin(1e-4));
    CHECK(sp.levels[2].energy == Approx(2.0).margin(1e-4));
}

TEST_CASE("eigenvectors satisfy the residual contract") {
    auto w = SuperPotential::linear(1.0);
    Grid g(-8.0, 8.0, 801);
    auto op = discretize(w, g, PartnerSign::plus);
    std::vector<std::vector<double>> vecs;
    auto sp = eigen_lowest(op, 3, &vecs);
    REQUIRE(vecs.size() == 3);
    for (size_t j = 0; j < 3; ++j) {
        const double r = tridiag::residual(op.diagonal, op.off_diagonal,
                                           vecs[j], sp.levels[j].energy);
        CHECK(r <= 1e-10 * op.norm_inf());
    }
}

TEST_CASE("full spectrum trace identity") {
    auto w = SuperPotential::double_well(1.0, 1.0);
    Grid g(-6.0, 6.0, 201);
    auto op = discretize(w, g, PartnerSign::plus);
    auto sp = eigen_lowest(op, 201);
    double sum = 0.0;
    for (const auto& l : sp.levels) sum += l.energy;
    CHECK(sum == Approx(op.trace()).epsilon(1e-8));
}

TEST_CASE("double-well ground energy matches the semiclassical scale") {
    auto w = SuperPotential::double_well(1.0, 1.0);
    Grid g(-8.0, 8.0, 2001);
    auto sp = eigen_lowest(discretize(w, g, PartnerSign::plus), 1);
    const double eps_semiclassical =
        2.0 / (2.0 * std::numbers::pi) * std::exp(-8.0 / 3.0);
    const double e0 = sp.levels[0].energy;
    CHECK(e0 > 0.5 * eps_semiclassical);
    CHECK(e0 < 2.0 * eps_semiclassical);
}

TEST_CASE("SUSY degeneracy: positive partner spectra coincide") {
    // Only bound pairs participate: box-squeezed continuum levels carry no
    // pairing guarantee under a shared Dirichlet wall.
    auto check_degeneracy = [](const SuperPotential& w, const Grid& g,
                               int bound_pairs) {
        OracleOptions opts;
        opts.k = bound_pairs + 1;
        auto plus = oracle_spectrum(w, g, PartnerSign::plus, opts);
        auto minus = oracle_spectrum(w, g, PartnerSign::minus, opts);
        // E^+_{n+1} pairs with E^-_n once the zero mode is dropped.
        for (int n = 0; n < bound_pairs; ++n) {
            const double tol =
                5.0 * (plus.convergence[static_cast<size_t>(n + 1)] +
                       minus.convergence[static_cast<size_t>(n)]);
            CHECK(std::fabs(plus.levels[static_cast<size_t>(n + 1)].energy -
                            minus.levels[static_cast<size_t>(n)].energy) <=
                  std::max(tol, 1e-8));
        }
    };

    check_degeneracy(SuperPotential::linear(1.0), Grid(-8, 8, 2001), 3);
    check_degeneracy(SuperPotential::morse(3.0, 1.0, {-4.0, 28.0}),
                     Grid(-4, 28, 4001), 2);
}

TEST_CASE("Richardson consistency: halving h shrinks the error ~4x") {
    auto w = SuperPotential::linear(1.0);
    Grid fine(-8.0, 8.0, 1601);
    Grid coarse = fine.coarsened();
    auto e_fine = eigen_lowest(discretize(w, fine, PartnerSign::plus), 2);
    auto e_coarse = eigen_lowest(discretize(w, coarse, PartnerSign::plus), 2);
    // exact values are 0 and 1
    const double err_fine = std::fabs(e_fine.levels[1].energy - 1.0);
    const double err_coarse = std::fabs(e_coarse.levels[1].energy - 1.0);
    CHECK(err_coarse / err_fine == Approx(4.0).margin(1.0));
}

TEST_CASE("oracle convergence estimates and Richardson extrapolation") {
    auto w = SuperPotential::linear(1.0);
    OracleOptions opts;
    opts.k = 3;
    opts.richardson = true;
    auto sp = oracle_spectrum(w, Grid(-8, 8, 2001), PartnerSign::plus, opts);
    REQUIRE(sp.convergence.size() == 3);
    CHECK(sp.convergence[1] > 0.0);
    CHECK(std::fabs(sp.levels[0].energy) < 1e-7);
    CHECK(sp.levels[1].energy == Approx(1.0).margin(1e-7));
}

TEST_CASE("auto extension settles the ground level") {
    auto w = SuperPotential::linear(1.0, {-40.0, 40.0});
    OracleOptions opts;
    opts.k = 1;
    opts.auto_extend = true;
    auto sp = oracle_spectrum(w, Grid(-5, 5, 1001), PartnerSign::plus, opts);
    CHECK(std::fabs(sp.levels[0].energy) < 1e-5);
    CHECK(sp.grid.x_hi > 5.0);
}

TEST_CASE("coarse grid earns a resolution warning") {
    auto w = SuperPotential::double_well(2.0, 2.0);
    Grid g(-8.0, 8.0, 41);
    auto op = discretize(w, g, PartnerSign::plus);
    REQUIRE(!op.warnings.empty());
}

TEST_CASE("extended levels reproduce sector-wise differences exactly") {
    auto w = SuperPotential::linear(1.0);
    auto v = SuperPotential::linear(2.0);
    Grid g(-8.0, 8.0, 1201);
    auto wsp = eigen_lowest(discretize(w, g, PartnerSign::plus), 4);
    auto vsp = eigen_lowest(discretize(v, g, PartnerSign::plus), 4);
    auto levels = extended_levels(wsp, vsp, 4);
    REQUIRE(levels.size() == 16);
    for (const auto& l : levels) {
        const double direct = wsp.levels[static_cast<size_t>(l.n1)].energy -
                              vsp.levels[static_cast<size_t>(l.n2)].energy;
        CHECK(l.eps == direct);  // bitwise: same subtraction
    }
    // harmonic(1) vs harmonic(2): eps ~ n1 - 2 n2 up to the grid's h^2 bias
    for (const auto& l : levels)
        CHECK(l.eps ==
              Approx(static_cast<double>(l.n1) - 2.0 * l.n2).margin(1.5e-3));
    // sorted by |eps|
    for (size_t i = 1; i < levels.size(); ++i)
        CHECK(std::fabs(levels[i - 1].eps) <= std::fabs(levels[i].eps) + 1e-15);
}

TEST_CASE("identical sectors give an exactly zero diagonal") {
    auto w = SuperPotential::linear(1.0);
    Grid g(-8.0, 8.0, 801);
    auto wsp = eigen_lowest(discretize(w, g, PartnerSign::plus), 3);
    auto levels = extended_levels(wsp, wsp, 3);
    for (const auto& l : levels)
        if (l.n1 == l.n2) CHECK(l.eps == 0.0);
    // n_pairs = 1 collapses to the single ground difference
    auto one = extended_levels(wsp, wsp, 1);
    REQUIRE(one.size() == 1);
    CHECK(one[0].eps == 0.0);
}
