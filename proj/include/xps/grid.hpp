#pragma once

#include <cmath>
#include <vector>

#include "xps/errors.hpp"

namespace xps {

/// Uniform grid on a closed interval [x_lo, x_hi] with n >= 3 nodes.
struct Grid {
    double x_lo = -8.0;
    double x_hi = 8.0;
    int n = 2001;

    Grid() = default;
    Grid(double lo, double hi, int npts) : x_lo(lo), x_hi(hi), n(npts) {
        if (!(x_hi > x_lo))
            throw ParameterError("grid: x_hi must exceed x_lo");
        if (n < 3)
            throw ParameterError("grid: need at least 3 nodes");
    }

    double spacing() const { return (x_hi - x_lo) / (n - 1); }

    double node(int i) const { return x_lo + spacing() * i; }

    std::vector<double> nodes() const {
        std::vector<double> x(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) x[static_cast<size_t>(i)] = node(i);
        return x;
    }

    /// Index of the node closest to x.
    int nearest(double x) const {
        double t = (x - x_lo) / spacing();
        int i = static_cast<int>(std::lround(t));
        if (i < 0) i = 0;
        if (i >= n) i = n - 1;
        return i;
    }

    bool contains(double x) const { return x >= x_lo && x <= x_hi; }

    /// Same interval, every other node kept (n must be odd).
    Grid coarsened() const {
        if (n % 2 == 0)
            throw ParameterError("grid: coarsening requires an odd node count");
        return Grid(x_lo, x_hi, (n + 1) / 2);
    }
};

/// Trapezoid-rule integral of samples y over a uniform grid.
inline double trapezoid(const std::vector<double>& y, double h) {
    if (y.size() < 2) return 0.0;
    double s = 0.5 * (y.front() + y.back());
    for (size_t i = 1; i + 1 < y.size(); ++i) s += y[i];
    return s * h;
}

/// L2 norm of samples over a uniform grid.
inline double l2_norm(const std::vector<double>& y, double h) {
    std::vector<double> sq(y.size());
    for (size_t i = 0; i < y.size(); ++i) sq[i] = y[i] * y[i];
    return std::sqrt(trapezoid(sq, h));
}

}  // namespace xps
