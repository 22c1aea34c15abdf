#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "xps/csv.hpp"
#include "xps/errors.hpp"
#include "xps/extended_system.hpp"
#include "xps/grid.hpp"
#include "xps/potentials.hpp"

namespace xps {

/// Separable two-component groundstate candidate chi_1 = psi1(q) phi1(p),
/// chi_2 = psi2(q) phi2(p). Components carry fermion labels +1/2 (index 1)
/// and -1/2 (index 2). The p-sector vectors are empty when the system has
/// no V potential.
struct ProductState {
    Grid gq;
    Grid gp;
    std::vector<double> psi1, psi2;
    std::vector<double> phi1, phi2;
    double f_upper = +0.5;
    double f_lower = -0.5;
    bool separation_warning = false;
    double norm_closed_form = std::numeric_limits<double>::quiet_NaN();

    bool has_p_sector() const { return !phi1.empty(); }
};

namespace detail {

/// Antiderivative Omega(x) = integral_0^x W on the grid nodes, anchored by
/// quadrature at the node nearest the origin and extended with cumulative
/// trapezoid increments.
inline std::vector<double> antiderivative_from_origin(const SuperPotential& w,
                                                      const Grid& g) {
    std::vector<double> omega(static_cast<size_t>(g.n));
    std::vector<double> wv(static_cast<size_t>(g.n));
    for (int i = 0; i < g.n; ++i) wv[static_cast<size_t>(i)] = w.value(g.node(i));
    const int i0 = g.nearest(0.0);
    const double h = g.spacing();
    // Anchor at the true origin when reachable; otherwise the constant is
    // arbitrary (it cancels against normalization).
    omega[static_cast<size_t>(i0)] =
        (g.contains(0.0) && w.in_domain(0.0) && g.node(i0) != 0.0)
            ? superpotential_action(w, 0.0, g.node(i0))
            : 0.0;
    for (int i = i0 + 1; i < g.n; ++i)
        omega[static_cast<size_t>(i)] =
            omega[static_cast<size_t>(i - 1)] +
            0.5 * h * (wv[static_cast<size_t>(i - 1)] + wv[static_cast<size_t>(i)]);
    for (int i = i0 - 1; i >= 0; --i)
        omega[static_cast<size_t>(i)] =
            omega[static_cast<size_t>(i + 1)] -
            0.5 * h * (wv[static_cast<size_t>(i)] + wv[static_cast<size_t>(i + 1)]);
    return omega;
}

inline void normalize_l2(std::vector<double>& v, double h) {
    const double norm = l2_norm(v, h);
    if (!(norm > 0.0) || !std::isfinite(norm))
        throw ScalingError(
            "groundstate: normalization integral overflowed or vanished; "
            "shrink the domain");
    for (double& x : v) x /= norm;
}

/// psi_new(q) = e^{-Omega(q)} * cumulative integral from the left of
/// e^{Omega} * source  (solution of (d/dq + W) psi_new = const * source).
inline std::vector<double> dress_up(const std::vector<double>& omega,
                                    const std::vector<double>& src, double h) {
    const size_t n = omega.size();
    std::vector<double> out(n, 0.0);
    double acc = 0.0;
    double prev = std::exp(omega[0]) * src[0];
    out[0] = 0.0;
    for (size_t i = 1; i < n; ++i) {
        const double cur = std::exp(omega[i]) * src[i];
        acc += 0.5 * h * (prev + cur);
        prev = cur;
        out[i] = std::exp(-omega[i]) * acc;
        if (!std::isfinite(out[i]))
            throw ScalingError("groundstate: dressing integral overflowed; "
                               "shrink the domain");
    }
    normalize_l2(out, h);
    return out;
}

/// psi_new(q) = e^{+Omega(q)} * cumulative integral from the right of
/// e^{-Omega} * source  (solution of (-d/dq + W) psi_new = const * source).
inline std::vector<double> dress_down(const std::vector<double>& omega,
                                      const std::vector<double>& src, double h) {
    const size_t n = omega.size();
    std::vector<double> out(n, 0.0);
    double acc = 0.0;
    double prev = std::exp(-omega[n - 1]) * src[n - 1];
    out[n - 1] = 0.0;
    for (size_t i = n - 1; i-- > 0;) {
        const double cur = std::exp(-omega[i]) * src[i];
        acc += 0.5 * h * (prev + cur);
        prev = cur;
        out[i] = std::exp(omega[i]) * acc;
        if (!std::isfinite(out[i]))
            throw ScalingError("groundstate: dressing integral overflowed; "
                               "shrink the domain");
    }
    normalize_l2(out, h);
    return out;
}

struct SectorChain {
    Grid grid;
    std::vector<double> omega;
    double x_minus, x_plus;  // vacua, negative/positive slope
    double action;           // integral of W from x_plus to x_minus
};

inline SectorChain prepare_sector(const SuperPotential& w, const Grid& g,
                                  const char* tag) {
    auto vac = find_vacua(w);
    if (vac.size() != 2)
        throw ShapeError(std::string("groundstate: ") + tag + "-sector needs "
                         "exactly two simple vacua, found " +
                         std::to_string(vac.size()));
    SectorChain s;
    s.grid = g;
    s.omega = antiderivative_from_origin(w, g);
    s.x_minus = vac[0].slope < 0 ? vac[0].location : vac[1].location;
    s.x_plus = vac[0].slope > 0 ? vac[0].location : vac[1].location;
    if (!g.contains(s.x_minus) || !g.contains(s.x_plus))
        throw PreconditionError(std::string("groundstate: ") + tag +
                                "-sector grid does not cover both vacua");
    s.action = superpotential_action(w, s.x_plus, s.x_minus);
    return s;
}

inline std::vector<double> spike(const Grid& g, double x) {
    std::vector<double> v(static_cast<size_t>(g.n), 0.0);
    v[static_cast<size_t>(g.nearest(x))] = 1.0 / std::sqrt(g.spacing());
    return v;
}

}  // namespace detail

/// Iterative groundstate construction from delta-spike trials.
///
/// Iteration 1 produces the theta-cutoff exponentials, iteration 2 the
/// integral-dressed refinement; both components are L2-normalized
/// numerically. A warning flag is set when the inter-vacuum action is
/// below 1 (poorly separated wells). norm_closed_form reports the closed-form
/// normalization constant for reference; it is not used to normalize.
inline ProductState iterate_groundstate(const ExtendedSystem& sys,
                                        const Grid& gq, const Grid& gp,
                                        int iterations) {
    if (iterations != 1 && iterations != 2)
        throw ParameterError("iterate_groundstate: iterations must be 1 or 2");

    ProductState st;
    st.gq = gq;
    st.gp = gp;

    auto run_sector = [iterations](const detail::SectorChain& c,
                                   std::vector<double>& one,
                                   std::vector<double>& two) {
        std::vector<double> s1 = detail::spike(c.grid, c.x_plus);
        std::vector<double> s2 = detail::spike(c.grid, c.x_minus);
        const double h = c.grid.spacing();
        for (int it = 0; it < iterations; ++it) {
            std::vector<double> n1 = detail::dress_up(c.omega, s2, h);
            std::vector<double> n2 = detail::dress_down(c.omega, s1, h);
            s1 = std::move(n1);
            s2 = std::move(n2);
        }
        one = std::move(s1);
        two = std::move(s2);
    };

    detail::SectorChain cq = detail::prepare_sector(sys.w, gq, "q");
    run_sector(cq, st.psi1, st.psi2);
    st.separation_warning = cq.action < 1.0;

    double closed_norm_q = 0.0;
    {
        std::vector<double> f(st.psi1.size());
        for (int i = 0; i < gq.n; ++i)
            f[static_cast<size_t>(i)] =
                gq.node(i) >= cq.x_minus
                    ? std::exp(-2.0 * cq.omega[static_cast<size_t>(i)])
                    : 0.0;
        closed_norm_q = trapezoid(f, gq.spacing());
    }
    double closed_norm = closed_norm_q;

    if (sys.has_v()) {
        detail::SectorChain cp = detail::prepare_sector(*sys.v, gp, "p");
        run_sector(cp, st.phi1, st.phi2);
        st.separation_warning = st.separation_warning || cp.action < 1.0;
        std::vector<double> f(st.phi1.size());
        for (int i = 0; i < gp.n; ++i)
            f[static_cast<size_t>(i)] =
                gp.node(i) >= cp.x_minus
                    ? std::exp(-2.0 * cp.omega[static_cast<size_t>(i)])
                    : 0.0;
        closed_norm *= trapezoid(f, gp.spacing());
    }
    st.norm_closed_form = std::pow(closed_norm, 1.5);
    return st;
}

/// One further coupled iteration applied to an existing state.
inline ProductState refine_iteration(const ExtendedSystem& sys,
                                     const ProductState& in) {
    ProductState st = in;
    detail::SectorChain cq = detail::prepare_sector(sys.w, in.gq, "q");
    st.psi1 = detail::dress_up(cq.omega, in.psi2, in.gq.spacing());
    st.psi2 = detail::dress_down(cq.omega, in.psi1, in.gq.spacing());
    if (sys.has_v() && in.has_p_sector()) {
        detail::SectorChain cp = detail::prepare_sector(*sys.v, in.gp, "p");
        st.phi1 = detail::dress_up(cp.omega, in.phi2, in.gp.spacing());
        st.phi2 = detail::dress_down(cp.omega, in.phi1, in.gp.spacing());
    }
    return st;
}

/// L2 distance between the upper components of two states on the q grid.
inline double state_distance(const ProductState& a, const ProductState& b) {
    if (a.psi1.size() != b.psi1.size())
        throw PreconditionError("state_distance: mismatched grids");
    std::vector<double> diff(a.psi1.size());
    for (size_t i = 0; i < diff.size(); ++i) diff[i] = a.psi1[i] - b.psi1[i];
    return l2_norm(diff, a.gq.spacing());
}

namespace detail {

inline bool numerically_even(const SuperPotential& w) {
    const double reach = std::min(-w.domain().lo, w.domain().hi);
    if (!(reach > 0)) return false;
    double scale = 0.0, dev_even = 0.0;
    for (int i = 1; i <= 64; ++i) {
        const double x = reach * i / 64.0;
        const double a = w.value(x), b = w.value(-x);
        scale = std::max({scale, std::fabs(a), std::fabs(b)});
        dev_even = std::max(dev_even, std::fabs(a - b));
    }
    return scale > 0 && dev_even <= 1e-9 * (1.0 + scale);
}

/// Five-point central first derivative at node i.
inline double stencil5(const std::vector<double>& v, int i, double h) {
    return (-v[static_cast<size_t>(i + 2)] + 8.0 * v[static_cast<size_t>(i + 1)] -
            8.0 * v[static_cast<size_t>(i - 1)] + v[static_cast<size_t>(i - 2)]) /
           (12.0 * h);
}

inline double sector_log_energy(const SuperPotential& w, const Grid& g,
                                const std::vector<double>& comp1) {
    if (numerically_even(w))
        throw PreconditionError(
            "energy_log_derivative: superpotential is even; the log-derivative "
            "relation requires an odd superpotential");
    const int i0 = g.nearest(0.0);
    if (i0 < 2 || i0 + 2 >= g.n)
        throw PreconditionError("energy_log_derivative: origin too close to "
                                "the grid boundary for a 5-point stencil");
    const double at0 = comp1[static_cast<size_t>(i0)];
    if (std::fabs(at0) < 1e-12)
        throw PreconditionError(
            "energy_log_derivative: psi_1 vanishes at the origin node");
    const double logd = stencil5(comp1, i0, g.spacing()) / at0;
    const double root = w.value(g.node(i0)) + logd;
    return 0.5 * root * root;
}

}  // namespace detail

struct LogDerivativeEnergies {
    double eps_q = 0.0;
    double eps_p = 0.0;
};

/// Sector energies from the log-derivative relation
/// sqrt(2 eps) = W(0) + psi_1'(0)/psi_1(0), with the p analog.
inline LogDerivativeEnergies energy_log_derivative(const ProductState& st,
                                                   const ExtendedSystem& sys) {
    LogDerivativeEnergies e;
    e.eps_q = detail::sector_log_energy(sys.w, st.gq, st.psi1);
    if (sys.has_v() && st.has_p_sector())
        e.eps_p = detail::sector_log_energy(*sys.v, st.gp, st.phi1);
    return e;
}

/// Sector-wise semiclassical breaking data.
struct BreakingResult {
    double eps_q = 0.0, eps_p = 0.0, eps = 0.0;
    double delta_w = 0.0, delta_v = 0.0;
    double w_prime_plus = 0.0, v_prime_plus = 0.0;
    double q_plus = 0.0, q_minus = 0.0, p_plus = 0.0, p_minus = 0.0;
    double dq_width = 0.0, dp_width = 0.0;  // right vacuum minus left vacuum
    bool has_p = false;
};

namespace detail {

struct SectorBreaking {
    double eps, action, slope_plus, x_plus, x_minus, width;
};

inline SectorBreaking sector_breaking(const SuperPotential& w, const char* tag) {
    auto vac = find_vacua(w);
    if (vac.size() != 2)
        throw ShapeError(std::string("breaking: ") + tag + "-sector needs "
                         "exactly two simple vacua, found " +
                         std::to_string(vac.size()));
    const Vacuum& left = vac[0];
    const Vacuum& right = vac[1];
    const Vacuum& plus = left.slope > 0 ? left : right;
    const Vacuum& minus = left.slope > 0 ? right : left;
    const double action = superpotential_action(w, plus.location, minus.location);
    if (action < 0)
        throw OrientationError(std::string("breaking: ") + tag +
                               "-sector action is negative; vacua mislabeled");
    SectorBreaking s;
    s.action = action;
    s.slope_plus = plus.slope;
    s.x_plus = plus.location;
    s.x_minus = minus.location;
    s.width = right.location - left.location;
    s.eps = s.slope_plus / (2.0 * std::numbers::pi) * std::exp(-2.0 * action);
    return s;
}

}  // namespace detail

/// Semiclassical groundstate energy eps = eps_q - eps_p with
/// eps_sector = W'(x_+)/(2 pi) exp(-2 * action).
inline BreakingResult breaking_energy_semiclassical(const ExtendedSystem& sys) {
    BreakingResult r;
    auto q = detail::sector_breaking(sys.w, "q");
    r.eps_q = q.eps;
    r.delta_w = q.action;
    r.w_prime_plus = q.slope_plus;
    r.q_plus = q.x_plus;
    r.q_minus = q.x_minus;
    r.dq_width = q.width;
    if (sys.has_v()) {
        auto p = detail::sector_breaking(*sys.v, "p");
        r.eps_p = p.eps;
        r.delta_v = p.action;
        r.v_prime_plus = p.slope_plus;
        r.p_plus = p.x_plus;
        r.p_minus = p.x_minus;
        r.dp_width = p.width;
        r.has_p = true;
    }
    r.eps = r.eps_q - r.eps_p;
    return r;
}

enum class BreakingPhase { broken, symmetric, negative_eps };

struct FExpectation {
    std::complex<double> value{0.0, 0.0};
    BreakingPhase phase = BreakingPhase::broken;
};

namespace detail {

inline bool symmetric_phase(const BreakingResult& r) {
    const double scale = std::max(r.eps_q, r.eps_p);
    return !(scale > 0.0) || std::fabs(r.eps) <= 1e-12 * scale;
}

}  // namespace detail

/// Auxiliary-field expectation value
///   <F> = -2 sqrt(eps) [ (eps_q/eps) sqrt(W'(q+)/pi) e^{-2 dW} dq
///                      - (eps_p/eps) sqrt(V'(p+)/pi) e^{-2 dV} dp ].
/// dq, dp are the inter-vacuum widths, which keeps the value covariant
/// under mirroring the well. eps = 0 within tolerance returns a flagged
/// zero (the formula is singular there); eps < 0 puts the square root on
/// the imaginary axis and flags the result.
inline FExpectation auxiliary_expectation(const ExtendedSystem& sys) {
    const BreakingResult r = breaking_energy_semiclassical(sys);
    FExpectation f;
    if (detail::symmetric_phase(r)) {
        f.phase = BreakingPhase::symmetric;
        return f;
    }
    const double term_q = (r.eps_q / r.eps) *
                          std::sqrt(r.w_prime_plus / std::numbers::pi) *
                          std::exp(-2.0 * r.delta_w) * r.dq_width;
    const double term_p =
        r.has_p ? (r.eps_p / r.eps) *
                      std::sqrt(r.v_prime_plus / std::numbers::pi) *
                      std::exp(-2.0 * r.delta_v) * r.dp_width
                : 0.0;
    const double bracket = term_q - term_p;
    if (r.eps > 0) {
        f.value = -2.0 * std::sqrt(r.eps) * bracket;
        f.phase = BreakingPhase::broken;
    } else {
        f.value = std::complex<double>(0.0, -2.0 * std::sqrt(-r.eps) * bracket);
        f.phase = BreakingPhase::negative_eps;
    }
    return f;
}

/// Composite tunneling matrix-element product assembled from groundstate
/// quantities:
///   2 i sqrt(eps) [ (eps_q/eps) sqrt(eps_q) sqrt(W'(q+)/pi) dq
///                 - (eps_p/eps) sqrt(eps_p) sqrt(V'(p+)/pi) dp ].
inline FExpectation breaking_product_from_groundstate(const ExtendedSystem& sys) {
    const BreakingResult r = breaking_energy_semiclassical(sys);
    FExpectation f;
    if (detail::symmetric_phase(r)) {
        f.phase = BreakingPhase::symmetric;
        return f;
    }
    const double term_q = (r.eps_q / r.eps) * std::sqrt(r.eps_q) *
                          std::sqrt(r.w_prime_plus / std::numbers::pi) *
                          r.dq_width;
    const double term_p =
        r.has_p ? (r.eps_p / r.eps) * std::sqrt(r.eps_p) *
                      std::sqrt(r.v_prime_plus / std::numbers::pi) * r.dp_width
                : 0.0;
    const double bracket = term_q - term_p;
    if (r.eps > 0) {
        f.value = std::complex<double>(0.0, 2.0 * std::sqrt(r.eps) * bracket);
        f.phase = BreakingPhase::broken;
    } else {
        // 2 i sqrt(eps) = 2 i * i sqrt(|eps|) = -2 sqrt(|eps|)
        f.value = -2.0 * std::sqrt(-r.eps) * bracket;
        f.phase = BreakingPhase::negative_eps;
    }
    return f;
}

inline CsvWriter groundstate_csv(const ProductState& st) {
    CsvWriter csv({"q", "psi1", "psi2"});
    for (int i = 0; i < st.gq.n; ++i)
        csv.add_row({st.gq.node(i), st.psi1[static_cast<size_t>(i)],
                     st.psi2[static_cast<size_t>(i)]});
    return csv;
}

inline const std::vector<std::string>& breaking_csv_columns() {
    static const std::vector<std::string> cols = {
        "lambda_q", "a_q",   "lambda_p", "a_p",  "delta_w",
        "delta_v",  "eps_q", "eps_p",    "eps",  "f_expect"};
    return cols;
}

}  // namespace xps
