#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "xps/errors.hpp"

namespace xps {

/// Natural cubic spline through (x_i, y_i) with analytic first and second
/// derivatives of the interpolant.
class CubicSpline {
public:
    CubicSpline() = default;

    CubicSpline(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        const size_t n = x_.size();
        if (n < 3 || y_.size() != n)
            throw ParameterError("spline: need >= 3 samples with matching sizes");
        for (size_t i = 1; i < n; ++i)
            if (!(x_[i] > x_[i - 1]))
                throw ParameterError("spline: abscissae must strictly increase");
        for (double v : y_)
            if (!std::isfinite(v))
                throw ParameterError("spline: non-finite sample value");

        // Second derivatives M_i from the standard tridiagonal system,
        // natural boundary conditions M_0 = M_{n-1} = 0.
        m_.assign(n, 0.0);
        std::vector<double> diag(n, 0.0), rhs(n, 0.0), upper(n, 0.0);
        diag[0] = 1.0;
        for (size_t i = 1; i + 1 < n; ++i) {
            const double hl = x_[i] - x_[i - 1];
            const double hr = x_[i + 1] - x_[i];
            diag[i] = 2.0 * (hl + hr);
            upper[i] = hr;
            rhs[i] = 6.0 * ((y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl);
        }
        diag[n - 1] = 1.0;
        // Thomas elimination; lower entry at row i is h_{i-1} for interior rows.
        std::vector<double> d(diag), r(rhs);
        for (size_t i = 2; i + 1 < n; ++i) {
            const double hl = x_[i] - x_[i - 1];
            const double w = hl / d[i - 1];
            d[i] -= w * upper[i - 1];
            r[i] -= w * r[i - 1];
        }
        for (size_t k = n - 1; k-- > 1;) {
            m_[k] = (r[k] - upper[k] * m_[k + 1]) / d[k];
        }
    }

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }

    double value(double x) const {
        const size_t i = segment(x);
        const double h = x_[i + 1] - x_[i];
        const double a = (x_[i + 1] - x) / h;
        const double b = (x - x_[i]) / h;
        return a * y_[i] + b * y_[i + 1] +
               ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) *
                   (h * h) / 6.0;
    }

    double derivative(double x) const {
        const size_t i = segment(x);
        const double h = x_[i + 1] - x_[i];
        const double a = (x_[i + 1] - x) / h;
        const double b = (x - x_[i]) / h;
        return (y_[i + 1] - y_[i]) / h +
               ((3.0 * b * b - 1.0) * m_[i + 1] - (3.0 * a * a - 1.0) * m_[i]) *
                   h / 6.0;
    }

    double second_derivative(double x) const {
        const size_t i = segment(x);
        const double h = x_[i + 1] - x_[i];
        const double a = (x_[i + 1] - x) / h;
        const double b = (x - x_[i]) / h;
        return a * m_[i] + b * m_[i + 1];
    }

    const std::vector<double>& abscissae() const { return x_; }
    const std::vector<double>& ordinates() const { return y_; }

private:
    size_t segment(double x) const {
        if (x < x_.front() || x > x_.back())
            throw DomainError("spline: evaluation point outside tabulated range");
        auto it = std::upper_bound(x_.begin(), x_.end(), x);
        size_t i = static_cast<size_t>(it - x_.begin());
        if (i > 0) --i;
        if (i + 1 >= x_.size()) i = x_.size() - 2;
        return i;
    }

    std::vector<double> x_, y_, m_;
};

}  // namespace xps
