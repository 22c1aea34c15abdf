#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "xps/errors.hpp"
#include "xps/grid.hpp"
#include "xps/potentials.hpp"

namespace xps {

/// Symmetric tridiagonal discretization of 1/2 (-d^2/dx^2 + U_sign) with
/// Dirichlet boundary conditions just outside the grid.
struct DiscretizedOperator {
    Grid grid;
    std::vector<double> diagonal;       // 1/h^2 + U(x_i)/2
    std::vector<double> off_diagonal;   // -1/(2 h^2), length n-1
    PartnerSign sign = PartnerSign::plus;
    Sector sector = Sector::q;
    std::vector<std::string> warnings;

    double norm_inf() const {
        double m = 0.0;
        for (size_t i = 0; i < diagonal.size(); ++i) {
            double row = std::fabs(diagonal[i]);
            if (i > 0) row += std::fabs(off_diagonal[i - 1]);
            if (i + 1 < diagonal.size()) row += std::fabs(off_diagonal[i]);
            m = std::max(m, row);
        }
        return m;
    }

    double trace() const {
        double t = 0.0;
        for (double d : diagonal) t += d;
        return t;
    }
};

/// Three-point discretization of the partner Hamiltonian on a grid.
/// A grid too coarse for the potential's curvature only earns a warning;
/// eigenvalues of smooth wells are often still useful there.
inline DiscretizedOperator discretize(const SuperPotential& w, const Grid& grid,
                                      PartnerSign sign,
                                      Sector sector = Sector::q) {
    DiscretizedOperator op;
    op.grid = grid;
    op.sign = sign;
    op.sector = sector;
    const double h = grid.spacing();
    const double inv_h2 = 1.0 / (h * h);
    op.diagonal.resize(static_cast<size_t>(grid.n));
    op.off_diagonal.assign(static_cast<size_t>(grid.n - 1), -0.5 * inv_h2);

    std::vector<double> u(static_cast<size_t>(grid.n));
    for (int i = 0; i < grid.n; ++i) {
        u[static_cast<size_t>(i)] = eval_partner(w, grid.node(i), sign);
        op.diagonal[static_cast<size_t>(i)] =
            inv_h2 + 0.5 * u[static_cast<size_t>(i)];
    }

    double max_upp = 0.0;
    for (int i = 1; i + 1 < grid.n; ++i) {
        const double upp = (u[static_cast<size_t>(i + 1)] -
                            2.0 * u[static_cast<size_t>(i)] +
                            u[static_cast<size_t>(i - 1)]) *
                           inv_h2;
        max_upp = std::max(max_upp, std::fabs(upp));
    }
    if (h * h * max_upp > 0.1)
        op.warnings.push_back("grid resolution: h^2 * max|U''| = " +
                              std::to_string(h * h * max_upp) + " exceeds 0.1");
    return op;
}

/// Eigenvalues of the extended problem assembled from two sector spectra.
struct SpectrumResult {
    struct Level {
        int n;
        double energy;
    };
    std::vector<Level> levels;
    std::vector<double> convergence;  // |E(n) - E(n/2)| per level, if computed
    std::string potential;
    Grid grid;
    bool truncated = false;
    std::vector<std::string> notes;

    std::vector<double> energies() const {
        std::vector<double> e;
        e.reserve(levels.size());
        for (const auto& l : levels) e.push_back(l.energy);
        return e;
    }
};

namespace tridiag {

/// Number of eigenvalues of the symmetric tridiagonal (d, e) lying
/// strictly below lambda (Sturm sequence count).
inline int count_below(const std::vector<double>& d,
                       const std::vector<double>& e, double lambda) {
    const double tiny = std::numeric_limits<double>::min() * 4.0;
    int count = 0;
    double q = d[0] - lambda;
    if (q < 0) ++count;
    for (size_t i = 1; i < d.size(); ++i) {
        if (std::fabs(q) < tiny) q = (q < 0 ? -tiny : tiny);
        q = d[i] - lambda - e[i - 1] * e[i - 1] / q;
        if (q < 0) ++count;
    }
    return count;
}

/// k-th smallest eigenvalue (k = 0-based) by bisection. Deterministic.
inline double eigenvalue_by_index(const std::vector<double>& d,
                                  const std::vector<double>& e, int k,
                                  double lo, double hi) {
    // ~70 halvings take the bracket to a few ulp of the spectrum scale.
    for (int it = 0; it < 70 && hi - lo > 0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (count_below(d, e, mid) > k)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

/// Inverse iteration for the eigenvector at an isolated eigenvalue, using
/// a partially pivoted LU of the shifted tridiagonal matrix.
inline std::vector<double> eigenvector(const std::vector<double>& d,
                                       const std::vector<double>& e,
                                       double lambda) {
    const size_t n = d.size();
    const double scale = std::fabs(lambda) + 1.0;
    const double shift = lambda + 1e-13 * scale;  // stay off the exact pole

    // Factor (T - shift I): sub holds multipliers, diag/sup1/sup2 the U part.
    std::vector<double> sub(n, 0.0), diag(n), sup1(n, 0.0), sup2(n, 0.0);
    std::vector<char> piv(n, 0);
    for (size_t i = 0; i < n; ++i) diag[i] = d[i] - shift;
    for (size_t i = 0; i + 1 < n; ++i) {
        sub[i + 1] = e[i];
        sup1[i] = e[i];
    }
    const double tiny = 1e-290;
    for (size_t i = 0; i + 1 < n; ++i) {
        if (std::fabs(diag[i]) >= std::fabs(sub[i + 1])) {
            if (diag[i] == 0.0) diag[i] = tiny;
            const double m = sub[i + 1] / diag[i];
            sub[i + 1] = m;
            diag[i + 1] -= m * sup1[i];
        } else {
            piv[i] = 1;
            const double m = diag[i] / sub[i + 1];
            diag[i] = sub[i + 1];
            sub[i + 1] = m;
            const double tmp = sup1[i];
            sup1[i] = diag[i + 1];
            diag[i + 1] = tmp - m * diag[i + 1];
            if (i + 2 < n) {
                sup2[i] = sup1[i + 1];
                sup1[i + 1] = -m * sup1[i + 1];
            }
        }
    }
    if (diag[n - 1] == 0.0) diag[n - 1] = tiny;

    auto solve = [&](std::vector<double>& rhs) {
        for (size_t i = 0; i + 1 < n; ++i) {
            if (piv[i]) std::swap(rhs[i], rhs[i + 1]);
            rhs[i + 1] -= sub[i + 1] * rhs[i];
        }
        for (size_t i = n; i-- > 0;) {
            double s = rhs[i];
            if (i + 1 < n) s -= sup1[i] * rhs[i + 1];
            if (i + 2 < n) s -= sup2[i] * rhs[i + 2];
            rhs[i] = s / diag[i];
        }
    };

    std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> b(n);
    for (int iter = 0; iter < 4; ++iter) {
        b = v;
        solve(b);
        double norm = 0.0;
        for (double x : b) norm += x * x;
        norm = std::sqrt(norm);
        if (!(norm > 0) || !std::isfinite(norm)) break;
        for (size_t i = 0; i < n; ++i) v[i] = b[i] / norm;
    }
    return v;
}

inline double residual(const std::vector<double>& d,
                       const std::vector<double>& e,
                       const std::vector<double>& v, double lambda) {
    const size_t n = d.size();
    double r2 = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double hv = d[i] * v[i];
        if (i > 0) hv += e[i - 1] * v[i - 1];
        if (i + 1 < n) hv += e[i] * v[i + 1];
        const double r = hv - lambda * v[i];
        r2 += r * r;
    }
    return std::sqrt(r2);
}

}  // namespace tridiag

/// k smallest eigenvalues of a discretized operator, optionally with
/// eigenvectors (held in *vectors). Bisection on the Sturm count makes the
/// result deterministic; vector residuals are checked against
/// 1e-10 * ||H||.
inline SpectrumResult eigen_lowest(const DiscretizedOperator& op, int k,
                                   std::vector<std::vector<double>>* vectors =
                                       nullptr) {
    const int n = static_cast<int>(op.diagonal.size());
    if (k < 1 || k > n)
        throw PreconditionError("eigen_lowest: need 1 <= k <= n");

    double e_max = 0.0;
    for (double e : op.off_diagonal) e_max = std::max(e_max, std::fabs(e));
    double lo = op.diagonal[0], hi = op.diagonal[0];
    for (double d : op.diagonal) {
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    lo -= 2.0 * e_max;
    hi += 2.0 * e_max;

    SpectrumResult res;
    res.grid = op.grid;
    res.potential = (op.sign == PartnerSign::plus ? "U+" : "U-");
    if (vectors) vectors->clear();
    double prev = lo;
    for (int j = 0; j < k; ++j) {
        const double ev =
            tridiag::eigenvalue_by_index(op.diagonal, op.off_diagonal, j, prev, hi);
        res.levels.push_back({j, ev});
        prev = ev;  // eigenvalues are produced in ascending order
        if (vectors) {
            auto v = tridiag::eigenvector(op.diagonal, op.off_diagonal, ev);
            const double r = tridiag::residual(op.diagonal, op.off_diagonal, v, ev);
            const double bound = 1e-10 * op.norm_inf();
            if (r > bound)
                throw NumericalError(
                    "eigen_lowest: eigenvector residual " + std::to_string(r) +
                        " exceeds bound " + std::to_string(bound) +
                        " at level " + std::to_string(j),
                    r);
            vectors->push_back(std::move(v));
        }
    }
    for (const auto& w : op.warnings) res.notes.push_back(w);
    return res;
}

struct OracleOptions {
    int k = 4;
    bool richardson = false;     // (4 E_h - E_2h)/3 per level
    bool auto_extend = false;    // widen the domain until E_0 settles
    double extend_shift_tol = 1e-8;
    int max_extensions = 5;
};

/// Convenience oracle: discretize + solve, with per-level convergence
/// estimates from a half-resolution solve and optional Richardson
/// extrapolation / domain auto-extension.
inline SpectrumResult oracle_spectrum(const SuperPotential& w, Grid grid,
                                      PartnerSign sign, OracleOptions opts = {}) {
    auto solve = [&](const Grid& g) {
        return eigen_lowest(discretize(w, g, sign), opts.k);
    };

    if (opts.auto_extend) {
        double prev_e0 = solve(grid).levels[0].energy;
        for (int ext = 0; ext < opts.max_extensions; ++ext) {
            const double width = grid.x_hi - grid.x_lo;
            const double pad = 0.125 * width;
            const int extra = static_cast<int>(std::ceil(pad / grid.spacing()));
            Grid wider(grid.x_lo - extra * grid.spacing(),
                       grid.x_hi + extra * grid.spacing(),
                       grid.n + 2 * extra);
            if (wider.x_lo < w.domain().lo || wider.x_hi > w.domain().hi) break;
            const double e0 = solve(wider).levels[0].energy;
            grid = wider;
            if (std::fabs(e0 - prev_e0) < opts.extend_shift_tol) break;
            prev_e0 = e0;
        }
    }

    SpectrumResult fine = solve(grid);
    SpectrumResult coarse = eigen_lowest(
        discretize(w, grid.coarsened(), sign), opts.k);
    fine.convergence.resize(fine.levels.size());
    for (size_t i = 0; i < fine.levels.size(); ++i) {
        const double ef = fine.levels[i].energy;
        const double ec = coarse.levels[i].energy;
        fine.convergence[i] = std::fabs(ef - ec);
        if (opts.richardson)
            fine.levels[i].energy = (4.0 * ef - ec) / 3.0;
    }
    fine.potential = w.describe() + (sign == PartnerSign::plus ? " [U+]" : " [U-]");
    return fine;
}

/// One eigenvalue of the extended operator: eps = E_q(n1) - E_p(n2).
struct ExtendedLevel {
    int n1;
    int n2;
    double eps;
};

/// All pairwise extended levels for n1, n2 < n_pairs, sorted by |eps|
/// (ties broken by the index pair for determinism).
inline std::vector<ExtendedLevel> extended_levels(const SpectrumResult& wspec,
                                                  const SpectrumResult& vspec,
                                                  int n_pairs) {
    std::vector<ExtendedLevel> out;
    for (int i = 0; i < n_pairs && i < static_cast<int>(wspec.levels.size()); ++i)
        for (int j = 0; j < n_pairs && j < static_cast<int>(vspec.levels.size());
             ++j)
            out.push_back({i, j,
                           wspec.levels[static_cast<size_t>(i)].energy -
                               vspec.levels[static_cast<size_t>(j)].energy});
    std::sort(out.begin(), out.end(), [](const ExtendedLevel& a,
                                         const ExtendedLevel& b) {
        if (std::fabs(a.eps) != std::fabs(b.eps))
            return std::fabs(a.eps) < std::fabs(b.eps);
        if (a.n1 != b.n1) return a.n1 < b.n1;
        return a.n2 < b.n2;
    });
    return out;
}

}  // namespace xps
