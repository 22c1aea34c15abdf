#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "xps/errors.hpp"

namespace xps {

struct OdeOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-10;
    double h_init = 1e-4;
    double h_max = 1.0;
    long max_steps = 50'000'000;
};

/// Explicit adaptive Dormand-Prince 5(4) integrator on a fixed-size state.
///
/// integrate_to advances y from t0 to t1 exactly (the final step is clipped
/// to the boundary, so sampled values carry full step accuracy rather than
/// interpolant accuracy).
template <size_t N>
class DormandPrince {
public:
    using State = std::array<double, N>;
    using Rhs = std::function<void(double, const State&, State&)>;

    explicit DormandPrince(Rhs rhs, OdeOptions opts = {})
        : rhs_(std::move(rhs)), opts_(opts) {}

    void integrate_to(double t0, double t1, State& y) {
        if (t1 == t0) return;
        const double dir = t1 > t0 ? 1.0 : -1.0;
        double t = t0;
        double h = dir * std::min(opts_.h_init, std::fabs(t1 - t0));
        State k1;
        rhs_(t, y, k1);
        long steps = 0;
        while (dir * (t1 - t) > 0.0) {
            if (++steps > opts_.max_steps)
                throw NumericalError("ode: step budget exhausted");
            const double tiny = 64.0 * std::numeric_limits<double>::epsilon() *
                                std::max(1.0, std::fabs(t));
            if (std::fabs(h) > opts_.h_max) h = dir * opts_.h_max;
            bool clipped = false;
            if (dir * (t + h - t1) >= 0.0) {
                h = t1 - t;
                clipped = true;
            }
            // A boundary-clipped step may be arbitrarily small; only an
            // error-controlled shrink this far signals stiffness.
            if (!clipped && std::fabs(h) < tiny)
                throw NumericalError("ode: step size underflow (stiffness)");

            State y_new, k7;
            const double err = step(t, h, y, k1, y_new, k7);
            if (err <= 1.0) {
                t += h;
                y = y_new;
                k1 = k7;  // FSAL
                h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2)));
            } else {
                h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
                if (std::fabs(h) < tiny)
                    throw NumericalError("ode: step size underflow (stiffness)");
            }
        }
    }

private:
    // One trial step from (t, y) with k1 = f(t, y) already evaluated.
    // Returns the scaled error norm; fills y_new and k7 = f(t+h, y_new).
    double step(double t, double h, const State& y, const State& k1,
                State& y_new, State& k7) {
        static constexpr double a21 = 1.0 / 5;
        static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                                a53 = 64448.0 / 6561, a54 = -212.0 / 729;
        static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                                a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                                a65 = -5103.0 / 18656;
        static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113,
                                b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                                b6 = 11.0 / 84;
        static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                                e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                                e6 = 22.0 / 525, e7 = -1.0 / 40;

        State k2, k3, k4, k5, k6, tmp;
        for (size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
        rhs_(t + h / 5, tmp, k2);
        for (size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        rhs_(t + 3 * h / 10, tmp, k3);
        for (size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs_(t + 4 * h / 5, tmp, k4);
        for (size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] +
                                 a54 * k4[i]);
        rhs_(t + 8 * h / 9, tmp, k5);
        for (size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                                 a64 * k4[i] + a65 * k5[i]);
        rhs_(t + h, tmp, k6);
        for (size_t i = 0; i < N; ++i)
            y_new[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] +
                                   b5 * k5[i] + b6 * k6[i]);
        rhs_(t + h, y_new, k7);

        double err_sq = 0.0;
        for (size_t i = 0; i < N; ++i) {
            const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                                  e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double scale =
                opts_.abs_tol +
                opts_.rel_tol * std::max(std::fabs(y[i]), std::fabs(y_new[i]));
            err_sq += (e / scale) * (e / scale);
        }
        return std::sqrt(err_sq / N);
    }

    Rhs rhs_;
    OdeOptions opts_;
};

}  // namespace xps
