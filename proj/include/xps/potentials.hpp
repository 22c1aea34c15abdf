#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "xps/errors.hpp"
#include "xps/interpolation.hpp"
#include "xps/quadrature.hpp"

namespace xps {

/// Closed evaluation interval of a potential.
struct Interval {
    double lo = -8.0;
    double hi = 8.0;
};

namespace family {

/// W(x) = omega * x.
struct Linear {
    double omega;
};

/// W(x) = lambda * (x^2 - a^2).
struct DoubleWell {
    double lambda;
    double a;
};

/// W(x) = A - B * exp(-x).
struct Morse {
    double A;
    double B;
};

/// W(x) = A * tanh(B * x).
struct PoschlTeller {
    double A;
    double B;
};

/// W given by samples, evaluated through a natural cubic spline; the
/// derivative is the analytic derivative of the interpolant.
struct TableDefined {
    CubicSpline spline;
};

}  // namespace family

/// Scalar SUSY potential W(q) (or V(p)) on a closed interval, with analytic
/// first and second derivatives. Immutable after construction.
class SuperPotential {
public:
    using Family =
        std::variant<family::Linear, family::DoubleWell, family::Morse,
                     family::PoschlTeller, family::TableDefined>;

    SuperPotential(family::Linear f, Interval dom) : fam_(f), dom_(dom) {
        if (!(f.omega > 0)) throw ParameterError("linear: omega must be > 0");
        check_interval();
    }
    SuperPotential(family::DoubleWell f, Interval dom) : fam_(f), dom_(dom) {
        if (!(f.lambda > 0)) throw ParameterError("double_well: lambda must be > 0");
        if (!(f.a > 0)) throw ParameterError("double_well: a must be > 0");
        check_interval();
    }
    SuperPotential(family::Morse f, Interval dom) : fam_(f), dom_(dom) {
        if (!(f.A > 0)) throw ParameterError("morse: A must be > 0");
        if (!(f.B > 0)) throw ParameterError("morse: B must be > 0");
        check_interval();
    }
    SuperPotential(family::PoschlTeller f, Interval dom) : fam_(f), dom_(dom) {
        if (!(f.A > 0)) throw ParameterError("poschl_teller: A must be > 0");
        if (!(f.B > 0)) throw ParameterError("poschl_teller: B must be > 0");
        check_interval();
    }
    SuperPotential(family::TableDefined f, Interval dom)
        : fam_(std::move(f)), dom_(dom) {
        const auto& sp = std::get<family::TableDefined>(fam_).spline;
        if (sp.x_min() > dom_.lo || sp.x_max() < dom_.hi)
            throw ParameterError("table: samples do not cover the domain");
        check_interval();
    }

    static SuperPotential linear(double omega, Interval dom = {}) {
        return SuperPotential(family::Linear{omega}, dom);
    }
    static SuperPotential double_well(double lambda, double a, Interval dom = {}) {
        return SuperPotential(family::DoubleWell{lambda, a}, dom);
    }
    static SuperPotential morse(double A, double B, Interval dom = {-4.0, 24.0}) {
        return SuperPotential(family::Morse{A, B}, dom);
    }
    static SuperPotential poschl_teller(double A, double B, Interval dom = {}) {
        return SuperPotential(family::PoschlTeller{A, B}, dom);
    }
    static SuperPotential table(std::vector<double> x, std::vector<double> w) {
        Interval dom{x.front(), x.back()};
        return SuperPotential(
            family::TableDefined{CubicSpline(std::move(x), std::move(w))}, dom);
    }
    /// Sample a callable on n uniform nodes over dom and interpolate.
    static SuperPotential table_of(const std::function<double(double)>& f,
                                   Interval dom, int n) {
        std::vector<double> x(static_cast<size_t>(n)), w(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            x[static_cast<size_t>(i)] =
                dom.lo + (dom.hi - dom.lo) * i / (n - 1);
            w[static_cast<size_t>(i)] = f(x[static_cast<size_t>(i)]);
        }
        return table(std::move(x), std::move(w));
    }

    const Interval& domain() const { return dom_; }
    const Family& fam() const { return fam_; }

    bool in_domain(double x) const { return x >= dom_.lo && x <= dom_.hi; }

    double value(double x) const {
        return std::visit(
            [x](const auto& f) -> double {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, family::Linear>)
                    return f.omega * x;
                else if constexpr (std::is_same_v<T, family::DoubleWell>)
                    return f.lambda * (x * x - f.a * f.a);
                else if constexpr (std::is_same_v<T, family::Morse>)
                    return f.A - f.B * std::exp(-x);
                else if constexpr (std::is_same_v<T, family::PoschlTeller>)
                    return f.A * std::tanh(f.B * x);
                else
                    return f.spline.value(x);
            },
            fam_);
    }

    double derivative(double x) const {
        return std::visit(
            [x](const auto& f) -> double {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, family::Linear>)
                    return f.omega;
                else if constexpr (std::is_same_v<T, family::DoubleWell>)
                    return 2.0 * f.lambda * x;
                else if constexpr (std::is_same_v<T, family::Morse>)
                    return f.B * std::exp(-x);
                else if constexpr (std::is_same_v<T, family::PoschlTeller>) {
                    const double c = std::cosh(f.B * x);
                    return f.A * f.B / (c * c);
                } else
                    return f.spline.derivative(x);
            },
            fam_);
    }

    double second_derivative(double x) const {
        return std::visit(
            [x](const auto& f) -> double {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, family::Linear>)
                    return 0.0;
                else if constexpr (std::is_same_v<T, family::DoubleWell>)
                    return 2.0 * f.lambda;
                else if constexpr (std::is_same_v<T, family::Morse>)
                    return -f.B * std::exp(-x);
                else if constexpr (std::is_same_v<T, family::PoschlTeller>) {
                    const double c = std::cosh(f.B * x);
                    return -2.0 * f.A * f.B * f.B * std::tanh(f.B * x) / (c * c);
                } else
                    return f.spline.second_derivative(x);
            },
            fam_);
    }

    std::string describe() const {
        std::ostringstream os;
        std::visit(
            [&os](const auto& f) {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, family::Linear>)
                    os << "linear{omega=" << f.omega << "}";
                else if constexpr (std::is_same_v<T, family::DoubleWell>)
                    os << "double_well{lambda=" << f.lambda << ",a=" << f.a << "}";
                else if constexpr (std::is_same_v<T, family::Morse>)
                    os << "morse{A=" << f.A << ",B=" << f.B << "}";
                else if constexpr (std::is_same_v<T, family::PoschlTeller>)
                    os << "poschl_teller{A=" << f.A << ",B=" << f.B << "}";
                else
                    os << "table{" << f.spline.abscissae().size() << " samples}";
            },
            fam_);
        os << " on [" << dom_.lo << "," << dom_.hi << "]";
        return os.str();
    }

private:
    void check_interval() const {
        if (!(dom_.hi > dom_.lo))
            throw ParameterError("potential: domain upper bound must exceed lower");
    }

    Family fam_;
    Interval dom_;
};

enum class PartnerSign { plus, minus };
enum class Sector { q, p };

/// Partner potential U_sign = W^2 -/+ W', "+" carrying W^2 - W'.
inline double eval_partner(const SuperPotential& w, double x, PartnerSign sign) {
    if (!w.in_domain(x))
        throw DomainError("eval_partner: point outside potential domain");
    const double wv = w.value(x);
    const double wp = w.derivative(x);
    return sign == PartnerSign::plus ? wv * wv - wp : wv * wv + wp;
}

/// The two partner potentials of a superpotential as plain callables.
struct PartnerPair {
    std::function<double(double)> u_plus;
    std::function<double(double)> u_minus;
};

inline PartnerPair make_partner_pair(const SuperPotential& w) {
    return {[w](double x) { return eval_partner(w, x, PartnerSign::plus); },
            [w](double x) { return eval_partner(w, x, PartnerSign::minus); }};
}

/// Simple zero of W with the slope W' there.
struct Vacuum {
    double location;
    double slope;
};

namespace detail {

constexpr double kRootTolerance = 1e-10;     // absolute, bisection target
constexpr double kRootSeparation = 1e-6;     // closer roots are degenerate

template <class F>
double bisect(const F& f, double a, double b) {
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    while (b - a > kRootTolerance) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0) return m;
        if ((fa < 0) != (fm < 0)) {
            b = m;
            fb = fm;
        } else {
            a = m;
            fa = fm;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace detail

/// All simple zeros of W on its domain, sorted ascending.
///
/// No sign change at all yields an empty list (a valid configuration, not
/// an error). A zero touched without sign change, or two roots closer than
/// the separation tolerance, raises DegenerateRootError.
inline std::vector<Vacuum> find_vacua(const SuperPotential& w,
                                      int scan_points = 4096) {
    const double lo = w.domain().lo;
    const double hi = w.domain().hi;
    const double dx = (hi - lo) / scan_points;
    auto f = [&w](double x) { return w.value(x); };

    double w_scale = 0.0;
    std::vector<double> samples(static_cast<size_t>(scan_points + 1));
    for (int i = 0; i <= scan_points; ++i) {
        samples[static_cast<size_t>(i)] = f(lo + i * dx);
        w_scale = std::max(w_scale, std::fabs(samples[static_cast<size_t>(i)]));
    }

    std::vector<Vacuum> roots;
    for (int i = 0; i < scan_points; ++i) {
        const double fa = samples[static_cast<size_t>(i)];
        const double fb = samples[static_cast<size_t>(i + 1)];
        if ((fa < 0) != (fb < 0)) {
            const double r = detail::bisect(f, lo + i * dx, lo + (i + 1) * dx);
            roots.push_back({r, w.derivative(r)});
        }
    }

    for (size_t i = 1; i < roots.size(); ++i)
        if (roots[i].location - roots[i - 1].location < detail::kRootSeparation)
            throw DegenerateRootError("find_vacua: roots closer than 1e-6 near x=" +
                                      std::to_string(roots[i].location));

    // A local |W| minimum that reaches zero without a sign change is a
    // non-simple zero.
    const double touch_tol = 1e-8 * (1.0 + w_scale);
    for (int i = 1; i < scan_points; ++i) {
        const double fm = std::fabs(samples[static_cast<size_t>(i)]);
        if (fm < touch_tol &&
            fm <= std::fabs(samples[static_cast<size_t>(i - 1)]) &&
            fm <= std::fabs(samples[static_cast<size_t>(i + 1)])) {
            const double x = lo + i * dx;
            bool near_known = false;
            for (const auto& r : roots)
                if (std::fabs(r.location - x) < 2.0 * dx) near_known = true;
            if (!near_known)
                throw DegenerateRootError(
                    "find_vacua: zero without sign change near x=" +
                    std::to_string(x));
        }
    }
    return roots;
}

/// Integral of W from x_from to x_to (adaptive quadrature, 1e-10 relative).
inline double superpotential_action(const SuperPotential& w, double x_from,
                                    double x_to) {
    if (!w.in_domain(x_from) || !w.in_domain(x_to))
        throw DomainError("superpotential_action: integration bound outside domain");
    if (x_from == x_to) return 0.0;
    return integrate_adaptive([&w](double x) { return w.value(x); }, x_from,
                              x_to, 1e-10)
        .value;
}

}  // namespace xps
