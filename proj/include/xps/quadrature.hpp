#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "xps/errors.hpp"

namespace xps {

namespace detail {

// 15-point Kronrod nodes/weights with the embedded 7-point Gauss rule.
inline constexpr std::array<double, 8> kGk15Nodes = {
    0.9914553711208126392069, 0.9491079123427585245262,
    0.8648644233597690727897, 0.7415311855993944398639,
    0.5860872354676911302941, 0.4058451513773971669066,
    0.2077849550078984676007, 0.0};

inline constexpr std::array<double, 8> kGk15Weights = {
    0.0229353220105292249637, 0.0630920926299785532907,
    0.1047900103222501838399, 0.1406532597155259187452,
    0.1690047266392679028266, 0.1903505780647854099133,
    0.2044329400752988924142, 0.2094821410847278280130};

inline constexpr std::array<double, 4> kG7Weights = {
    0.1294849661688696932706, 0.2797053914892766679015,
    0.3818300505051189449504, 0.4179591836734693877551};

struct Segment {
    double a, b, integral, error;
};

template <class F>
Segment gk15(const F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(c);
    double kron = kGk15Weights[7] * fc;
    double gauss = kG7Weights[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kGk15Nodes[static_cast<size_t>(i)];
        const double fsum = f(c - dx) + f(c + dx);
        kron += kGk15Weights[static_cast<size_t>(i)] * fsum;
        if (i % 2 == 1)  // odd Kronrod indices coincide with the Gauss nodes
            gauss += kG7Weights[static_cast<size_t>(i / 2)] * fsum;
    }
    kron *= half;
    gauss *= half;
    return {a, b, kron, std::fabs(kron - gauss)};
}

}  // namespace detail

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
};

/// Adaptive Gauss-Kronrod integration of f over [a, b].
///
/// Bisects the worst segment until the summed error estimate meets
/// rel_tol * |integral| (with abs_tol as a floor). Throws NumericalError
/// carrying the achieved estimate if the segment budget is exhausted.
template <class F>
QuadratureResult integrate_adaptive(const F& f, double a, double b,
                                    double rel_tol = 1e-10,
                                    double abs_tol = 1e-14,
                                    int max_segments = 2000) {
    if (a == b) return {0.0, 0.0};
    std::vector<detail::Segment> segs;
    segs.push_back(detail::gk15(f, a, b));
    for (;;) {
        double total = 0.0, err = 0.0;
        size_t worst = 0;
        for (size_t i = 0; i < segs.size(); ++i) {
            total += segs[i].integral;
            err += segs[i].error;
            if (segs[i].error > segs[worst].error) worst = i;
        }
        if (err <= std::max(abs_tol, rel_tol * std::fabs(total)))
            return {total, err};
        if (static_cast<int>(segs.size()) >= max_segments)
            throw NumericalError(
                "quadrature did not converge; achieved error estimate " +
                    std::to_string(err),
                err);
        detail::Segment s = segs[worst];
        const double mid = 0.5 * (s.a + s.b);
        segs[worst] = detail::gk15(f, s.a, mid);
        segs.push_back(detail::gk15(f, mid, s.b));
    }
}

}  // namespace xps
