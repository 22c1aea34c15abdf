#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "xps/errors.hpp"
#include "xps/groundstate.hpp"
#include "xps/ode.hpp"
#include "xps/potentials.hpp"

namespace xps {

/// Euclidean tunneling trajectory between the two vacua of a double-well
/// superpotential, with the closed-form matrix elements built on it.
struct InstantonResult {
    std::vector<double> tau_grid;
    std::vector<double> q_c;
    std::vector<double> w_on_traj;        // W(q_c(tau))
    double delta_w = 0.0;                 // quadrature action between vacua
    double action_tau_integral = 0.0;     // integral of W(q_c)^2 dtau
    double w_prime_plus = 0.0;            // W'(q_+)
    double delta_q = 0.0;                 // q_+ - q_- (signed)
    std::complex<double> me_charge{0.0, 0.0};
    double me_fermion = 0.0;
};

namespace detail {

struct InstantonVacua {
    double x_minus;  // unstable end of the flow qdot = -W (slope < 0)
    double x_plus;   // attracting end (slope > 0)
    double slope_plus;
};

inline InstantonVacua instanton_vacua(const SuperPotential& w) {
    auto vac = find_vacua(w);
    if (vac.size() != 2)
        throw ShapeError("instanton: superpotential needs exactly two simple "
                         "vacua, found " + std::to_string(vac.size()));
    InstantonVacua v;
    const Vacuum& a = vac[0];
    const Vacuum& b = vac[1];
    v.x_plus = a.slope > 0 ? a.location : b.location;
    v.x_minus = a.slope > 0 ? b.location : a.location;
    v.slope_plus = a.slope > 0 ? a.slope : b.slope;
    return v;
}

}  // namespace detail

/// Closed-form one-instanton matrix elements:
///   me_charge  = i sqrt(W'(q+)/pi) e^{-dW}
///   me_fermion =   sqrt(W'(q+)/pi) e^{-dW} (q+ - q-).
inline std::pair<std::complex<double>, double> instanton_matrix_elements(
    const SuperPotential& w) {
    const auto v = detail::instanton_vacua(w);
    const double dw = superpotential_action(w, v.x_plus, v.x_minus);
    const double amp =
        std::sqrt(v.slope_plus / std::numbers::pi) * std::exp(-dw);
    return {std::complex<double>(0.0, amp), amp * (v.x_plus - v.x_minus)};
}

/// Solve qdot = -W(q) between the vacua.
///
/// The collective time-translation coordinate is fixed by centering:
/// q_c(tau0) equals the inter-vacuum midpoint (tau0 = 0 by default), which
/// makes the output deterministic; every reported scalar is invariant
/// under changing tau0. The accumulated integral of W(q_c)^2 is carried as
/// an extra ODE component, and must reproduce the quadrature action between
/// the vacua to 1e-8 relative.
inline InstantonResult instanton_trajectory(const SuperPotential& w,
                                            double tau_span = 40.0,
                                            int n = 2001, double tau0 = 0.0) {
    if (n < 2) throw ParameterError("instanton: need at least two samples");
    if (!(tau_span > 0)) throw ParameterError("instanton: tau_span must be > 0");
    const auto v = detail::instanton_vacua(w);

    InstantonResult res;
    res.w_prime_plus = v.slope_plus;
    res.delta_q = v.x_plus - v.x_minus;
    res.delta_w = superpotential_action(w, v.x_plus, v.x_minus);

    const double half = 0.5 * tau_span;
    if (!(half > std::fabs(tau0)))
        throw ParameterError("instanton: |tau0| must be smaller than half the span");

    using S = std::array<double, 2>;  // q and the running action integral
    auto rhs = [&w](double, const S& y, S& dy) {
        const double q = detail::clamped(w, y[0]);
        const double wv = w.value(q);
        dy[0] = -wv;
        dy[1] = wv * wv;
    };
    OdeOptions opts;
    opts.rel_tol = 1e-12;
    opts.abs_tol = 1e-12;
    opts.h_max = 0.5;

    res.tau_grid.resize(static_cast<size_t>(n));
    res.q_c.resize(static_cast<size_t>(n));
    res.w_on_traj.resize(static_cast<size_t>(n));
    const double mid = 0.5 * (v.x_minus + v.x_plus);
    const double dtau = tau_span / (n - 1);

    // Forward sweep from the centering time, then backward.
    DormandPrince<2> fwd(rhs, opts);
    S y = {mid, 0.0};
    double t = tau0;
    double action_fwd_end = 0.0;
    for (int i = 0; i < n; ++i) {
        const double tau = -half + dtau * i;
        if (tau < tau0) continue;
        fwd.integrate_to(t, tau, y);
        t = tau;
        res.tau_grid[static_cast<size_t>(i)] = tau;
        res.q_c[static_cast<size_t>(i)] = y[0];
        action_fwd_end = y[1];
    }
    auto rhs_back = [&w](double, const S& y2, S& dy) {
        const double q = detail::clamped(w, y2[0]);
        const double wv = w.value(q);
        dy[0] = wv;  // running in reversed time
        dy[1] = wv * wv;
    };
    DormandPrince<2> bwd(rhs_back, opts);
    y = {mid, 0.0};
    t = 0.0;  // reversed clock sigma = tau0 - tau
    double action_bwd_end = 0.0;
    for (int i = n - 1; i >= 0; --i) {
        const double tau = -half + dtau * i;
        if (tau >= tau0) continue;
        const double sigma = tau0 - tau;
        bwd.integrate_to(t, sigma, y);
        t = sigma;
        res.tau_grid[static_cast<size_t>(i)] = tau;
        res.q_c[static_cast<size_t>(i)] = y[0];
        action_bwd_end = y[1];
    }
    res.action_tau_integral = action_fwd_end + action_bwd_end;

    for (int i = 0; i < n; ++i)
        res.w_on_traj[static_cast<size_t>(i)] =
            w.value(detail::clamped(w, res.q_c[static_cast<size_t>(i)]));

    const double w_left = std::fabs(res.w_on_traj.front());
    const double w_right = std::fabs(res.w_on_traj.back());
    if (w_left > 1e-8 || w_right > 1e-8)
        throw SpanError(
            "instanton: trajectory has not reached the vacua (|W| = " +
            std::to_string(std::max(w_left, w_right)) +
            " at the span ends); increase tau_span");

    if (std::fabs(res.action_tau_integral - res.delta_w) >
        1e-8 * std::fabs(res.delta_w))
        throw NumericalError(
            "instanton: action along the trajectory disagrees with the "
            "quadrature action",
            std::fabs(res.action_tau_integral - res.delta_w));

    auto me = instanton_matrix_elements(w);
    res.me_charge = me.first;
    res.me_fermion = me.second;
    return res;
}

/// Composite breaking matrix element assembled from instanton-side sector
/// quantities (the dual of breaking_product_from_groundstate):
///   2 i sqrt(eps) [ (eps_q/eps) sqrt(eps_q) sqrt(W'(q+)/pi) dq
///                 - (eps_p/eps) sqrt(eps_p) sqrt(V'(p+)/pi) dp ],
/// with eps_sector = W'(q+)/(2 pi) e^{-2 dW} and dq, dp the inter-vacuum
/// widths. eps = 0 within tolerance yields a flagged zero.
inline FExpectation breaking_product(
    const SuperPotential& w, const std::optional<SuperPotential>& v) {
    struct Side {
        double eps = 0.0, slope = 0.0, width = 0.0;
    };
    auto side = [](const SuperPotential& pot) {
        const auto vac = detail::instanton_vacua(pot);
        const double dw =
            superpotential_action(pot, vac.x_plus, vac.x_minus);
        if (dw < 0)
            throw OrientationError("breaking_product: negative action; vacua "
                                   "mislabeled");
        Side s;
        s.slope = vac.slope_plus;
        s.width = std::fabs(vac.x_plus - vac.x_minus);
        s.eps = vac.slope_plus / (2.0 * std::numbers::pi) * std::exp(-2.0 * dw);
        return s;
    };

    const Side sq = side(w);
    Side sp;
    if (v) sp = side(*v);
    const double eps = sq.eps - sp.eps;

    FExpectation f;
    const double scale = std::max(sq.eps, sp.eps);
    if (!(scale > 0.0) || std::fabs(eps) <= 1e-12 * scale) {
        f.phase = BreakingPhase::symmetric;
        return f;
    }
    const double term_q = (sq.eps / eps) * std::sqrt(sq.eps) *
                          std::sqrt(sq.slope / std::numbers::pi) * sq.width;
    const double term_p =
        v ? (sp.eps / eps) * std::sqrt(sp.eps) *
                std::sqrt(sp.slope / std::numbers::pi) * sp.width
          : 0.0;
    const double bracket = term_q - term_p;
    if (eps > 0) {
        f.value = std::complex<double>(0.0, 2.0 * std::sqrt(eps) * bracket);
        f.phase = BreakingPhase::broken;
    } else {
        f.value = -2.0 * std::sqrt(-eps) * bracket;
        f.phase = BreakingPhase::negative_eps;
    }
    return f;
}

}  // namespace xps
