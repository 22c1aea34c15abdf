#pragma once

#include <cmath>
#include <ostream>

namespace xps {

/// Grassmann-even number a + b*N with N^2 = 0.
///
/// The body carries the ordinary dynamics, the soul the exact first-order
/// response in the grading direction. Functions lift through
/// f(a + bN) = f(a) + f'(a) b N, so propagating a NilpotentScalar is
/// equivalent to propagating the value together with its exact
/// linearization.
struct NilpotentScalar {
    double body = 0.0;
    double soul = 0.0;

    NilpotentScalar() = default;
    NilpotentScalar(double b) : body(b) {}
    NilpotentScalar(double b, double s) : body(b), soul(s) {}
};

inline NilpotentScalar operator+(NilpotentScalar x, NilpotentScalar y) {
    return {x.body + y.body, x.soul + y.soul};
}

inline NilpotentScalar operator-(NilpotentScalar x, NilpotentScalar y) {
    return {x.body - y.body, x.soul - y.soul};
}

inline NilpotentScalar operator-(NilpotentScalar x) { return {-x.body, -x.soul}; }

/// (a + bN)(c + dN) = ac + (ad + bc)N, the N^2 term vanishing identically.
inline NilpotentScalar operator*(NilpotentScalar x, NilpotentScalar y) {
    return {x.body * y.body, x.body * y.soul + x.soul * y.body};
}

inline NilpotentScalar operator*(double c, NilpotentScalar x) {
    return {c * x.body, c * x.soul};
}

inline NilpotentScalar operator*(NilpotentScalar x, double c) { return c * x; }

inline NilpotentScalar operator/(NilpotentScalar x, NilpotentScalar y) {
    return {x.body / y.body,
            (x.soul * y.body - x.body * y.soul) / (y.body * y.body)};
}

/// Lift a scalar function with known derivative: f(a+bN) = f(a) + f'(a) b N.
inline NilpotentScalar lift(NilpotentScalar x, double f_of_body,
                            double fprime_of_body) {
    return {f_of_body, fprime_of_body * x.soul};
}

inline std::ostream& operator<<(std::ostream& os, NilpotentScalar x) {
    return os << x.body << (x.soul < 0 ? " - " : " + ") << std::fabs(x.soul)
              << "*N";
}

}  // namespace xps
