#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "xps/errors.hpp"
#include "xps/grid.hpp"
#include "xps/potentials.hpp"
#include "xps/spectral_oracle.hpp"

namespace xps {

using ShapeParams = std::vector<double>;

/// Parametrized potential family with the partner-step parameter map and,
/// when known in closed form, the x-independent remainder of the step.
struct ShapeInvariantFamily {
    std::string name;
    std::function<SuperPotential(const ShapeParams&)> make;
    std::function<ShapeParams(const ShapeParams&)> next;
    std::function<double(const ShapeParams&)> remainder;  // may be empty
    std::function<bool(const ShapeParams&)> in_range;
    Interval default_domain{-8.0, 8.0};
    bool translational = true;  // a1 = a0 + k models; scaling models live in
                                // the deformed-algebra representation
};

struct RemainderCheck {
    double r_est = 0.0;
    double residual = 0.0;
    bool shape_invariant = false;
};

/// Measure the partner-step remainder on a grid.
///
/// The excited-side potential W^2 + W' at a0 is compared against the
/// zero-mode-side potential W^2 - W' at a1 = f(a0); for a shape-invariant
/// family the difference is x-independent. r_est is its grid mean, residual
/// the maximum deviation from that mean.
inline RemainderCheck remainder_check(const ShapeInvariantFamily& fam,
                                      const ShapeParams& a0, const Grid& grid) {
    if (!fam.in_range(a0))
        throw ParameterError("remainder_check: parameters out of range for " +
                             fam.name);
    const SuperPotential w0 = fam.make(a0);
    const SuperPotential w1 = fam.make(fam.next(a0));
    std::vector<double> diff(static_cast<size_t>(grid.n));
    for (int i = 0; i < grid.n; ++i) {
        const double x = grid.node(i);
        diff[static_cast<size_t>(i)] = eval_partner(w0, x, PartnerSign::minus) -
                                       eval_partner(w1, x, PartnerSign::plus);
    }
    RemainderCheck rc;
    double sum = 0.0;
    for (double d : diff) sum += d;
    rc.r_est = sum / grid.n;
    for (double d : diff)
        rc.residual = std::max(rc.residual, std::fabs(d - rc.r_est));
    rc.shape_invariant = rc.residual < 1e-8 * (1.0 + std::fabs(rc.r_est));
    return rc;
}

/// Spectrum from partial remainder sums: E_0 = 0,
/// E_n = 1/2 sum_{k<n} |R(a_k)|. The chain stops when the parameter map
/// leaves the family's admissible range (finitely many bound states); the
/// result is then flagged truncated with a bound-state-count note.
///
/// Chain parameters and per-step remainders are retained alongside the
/// levels for reporting.
struct ShapeSpectrum {
    SpectrumResult spectrum;
    std::vector<ShapeParams> chain;      // a_0 ... a_{m}
    std::vector<double> remainders;      // R(a_0) ... R(a_{m-1})
};

inline ShapeSpectrum spectrum_from_remainders(const ShapeInvariantFamily& fam,
                                              const ShapeParams& a0, int n_max,
                                              const Grid* check_grid = nullptr) {
    if (n_max < 0)
        throw ParameterError("spectrum_from_remainders: n_max must be >= 0");
    Grid grid = check_grid ? *check_grid
                           : Grid(fam.default_domain.lo, fam.default_domain.hi,
                                  1201);

    ShapeSpectrum out;
    out.spectrum.potential = fam.name;
    out.spectrum.grid = grid;
    if (!fam.in_range(a0))
        throw ParameterError("spectrum_from_remainders: parameters out of "
                             "range for " + fam.name);

    std::vector<double> partial{0.0};
    ShapeParams a = a0;
    out.chain.push_back(a);
    for (int n = 0; n < n_max; ++n) {
        ShapeParams a_next = fam.next(a);
        if (!fam.in_range(a_next)) {
            out.spectrum.truncated = true;
            out.spectrum.notes.push_back(
                "chain leaves parameter range after " +
                std::to_string(n + 1) + " bound state(s)");
            break;
        }
        const RemainderCheck rc = remainder_check(fam, a, grid);
        if (!rc.shape_invariant)
            throw PreconditionError(
                "spectrum_from_remainders: family fails the shape-invariance "
                "check along the chain (residual " +
                std::to_string(rc.residual) + ")");
        const double r = fam.remainder ? fam.remainder(a) : rc.r_est;
        partial.push_back(partial.back() + 0.5 * std::fabs(r));
        out.remainders.push_back(r);
        a = a_next;
        out.chain.push_back(a);
    }
    for (size_t i = 0; i < partial.size(); ++i)
        out.spectrum.levels.push_back({static_cast<int>(i), partial[i]});
    return out;
}

/// Verbatim residual of the Riccati chain relation
///   W_{n+1}^2 + W_{n+1}' = W_n^2 - W_n' - mu_n,
/// reported as the max over the grid of |LHS - RHS|.
inline double riccati_residual(const SuperPotential& w_n,
                               const SuperPotential& w_n1, double mu_n,
                               const Grid& grid) {
    double worst = 0.0;
    for (int i = 0; i < grid.n; ++i) {
        const double x = grid.node(i);
        const double lhs = w_n1.value(x) * w_n1.value(x) + w_n1.derivative(x);
        const double rhs = w_n.value(x) * w_n.value(x) - w_n.derivative(x) - mu_n;
        worst = std::max(worst, std::fabs(lhs - rhs));
    }
    return worst;
}

/// Built-in translational families. Scaling models have no closed-form W
/// here and are generated through the deformed-algebra representation.
inline const std::map<std::string, ShapeInvariantFamily>& shape_family_registry() {
    static const std::map<std::string, ShapeInvariantFamily> reg = [] {
        std::map<std::string, ShapeInvariantFamily> m;

        ShapeInvariantFamily harmonic;
        harmonic.name = "harmonic";
        harmonic.make = [](const ShapeParams& a) {
            return SuperPotential::linear(a.at(0), {-12.0, 12.0});
        };
        harmonic.next = [](const ShapeParams& a) { return a; };
        harmonic.remainder = [](const ShapeParams& a) { return 2.0 * a.at(0); };
        harmonic.in_range = [](const ShapeParams& a) {
            return a.size() == 1 && a[0] > 0;
        };
        m.emplace(harmonic.name, harmonic);

        // W(x) = omega x + b: the partner step leaves (omega, b) fixed.
        ShapeInvariantFamily shifted;
        shifted.name = "shifted_oscillator";
        shifted.default_domain = {-10.0, 10.0};
        shifted.make = [](const ShapeParams& a) {
            const double omega = a.at(0), b = a.at(1);
            return SuperPotential::table_of(
                [omega, b](double x) { return omega * x + b; }, {-10.0, 10.0},
                41);
        };
        shifted.next = [](const ShapeParams& a) { return a; };
        shifted.remainder = [](const ShapeParams& a) { return 2.0 * a.at(0); };
        shifted.in_range = [](const ShapeParams& a) {
            return a.size() == 2 && a[0] > 0;
        };
        m.emplace(shifted.name, shifted);

        ShapeInvariantFamily morse;
        morse.name = "morse";
        morse.default_domain = {-4.0, 24.0};
        morse.make = [](const ShapeParams& a) {
            return SuperPotential::morse(a.at(0), a.at(1), {-4.0, 32.0});
        };
        morse.next = [](const ShapeParams& a) {
            return ShapeParams{a.at(0) - 1.0, a.at(1)};
        };
        morse.remainder = [](const ShapeParams& a) {
            const double A = a.at(0);
            return A * A - (A - 1.0) * (A - 1.0);
        };
        morse.in_range = [](const ShapeParams& a) {
            return a.size() == 2 && a[0] > 0 && a[1] > 0;
        };
        m.emplace(morse.name, morse);

        ShapeInvariantFamily pt;
        pt.name = "poschl_teller";
        pt.default_domain = {-20.0, 20.0};
        pt.make = [](const ShapeParams& a) {
            return SuperPotential::poschl_teller(a.at(0), a.at(1),
                                                 {-24.0, 24.0});
        };
        pt.next = [](const ShapeParams& a) {
            return ShapeParams{a.at(0) - a.at(1), a.at(1)};
        };
        pt.remainder = [](const ShapeParams& a) {
            const double A = a.at(0), B = a.at(1);
            return A * A - (A - B) * (A - B);
        };
        pt.in_range = [](const ShapeParams& a) {
            return a.size() == 2 && a[0] > 0 && a[1] > 0;
        };
        m.emplace(pt.name, pt);

        return m;
    }();
    return reg;
}

}  // namespace xps
