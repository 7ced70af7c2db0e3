#pragma once

// Truncated univariate Taylor polynomials, t -> c0 + c1 t + c2 t^2 + c3 t^3.
// Pushing x + t v through a function gives the directional derivatives
// f, D_v f, D_v^2 f / 2, D_v^3 f / 6 in one forward pass.

#include <cmath>

namespace conecanon {

struct T3 {
    double c[4] = {0, 0, 0, 0};

    T3() = default;
    T3(double v) { c[0] = v; } // NOLINT: implicit on purpose
    T3(double a, double b, double d = 0, double e = 0) {
        c[0] = a; c[1] = b; c[2] = d; c[3] = e;
    }

    double value() const { return c[0]; }
    double d1() const { return c[1]; }
    double d2() const { return 2 * c[2]; }
    double d3() const { return 6 * c[3]; }
};

inline T3 operator+(const T3& a, const T3& b) {
    return {a.c[0] + b.c[0], a.c[1] + b.c[1], a.c[2] + b.c[2], a.c[3] + b.c[3]};
}
inline T3 operator-(const T3& a, const T3& b) {
    return {a.c[0] - b.c[0], a.c[1] - b.c[1], a.c[2] - b.c[2], a.c[3] - b.c[3]};
}
inline T3 operator-(const T3& a) { return {-a.c[0], -a.c[1], -a.c[2], -a.c[3]}; }
inline T3 operator*(const T3& a, const T3& b) {
    return {a.c[0] * b.c[0],
            a.c[0] * b.c[1] + a.c[1] * b.c[0],
            a.c[0] * b.c[2] + a.c[1] * b.c[1] + a.c[2] * b.c[0],
            a.c[0] * b.c[3] + a.c[1] * b.c[2] + a.c[2] * b.c[1] + a.c[3] * b.c[0]};
}
inline T3 operator*(double s, const T3& a) { return {s * a.c[0], s * a.c[1], s * a.c[2], s * a.c[3]}; }
inline T3 operator*(const T3& a, double s) { return s * a; }

// Compose a scalar function with known derivatives f, f', f'', f''' at a.c[0].
inline T3 compose(const T3& a, double f0, double f1, double f2, double f3) {
    const double x1 = a.c[1], x2 = a.c[2], x3 = a.c[3];
    return {f0,
            f1 * x1,
            f1 * x2 + 0.5 * f2 * x1 * x1,
            f1 * x3 + f2 * x1 * x2 + f3 * x1 * x1 * x1 / 6.0};
}

inline T3 recip(const T3& a) {
    const double x = a.c[0];
    return compose(a, 1 / x, -1 / (x * x), 2 / (x * x * x), -6 / (x * x * x * x));
}
inline T3 operator/(const T3& a, const T3& b) { return a * recip(b); }
inline T3 operator/(const T3& a, double s) { return a * (1.0 / s); }
inline T3 operator/(double s, const T3& a) { return s * recip(a); }
inline T3& operator+=(T3& a, const T3& b) { return a = a + b; }
inline T3& operator-=(T3& a, const T3& b) { return a = a - b; }
inline T3& operator*=(T3& a, const T3& b) { return a = a * b; }

inline T3 log(const T3& a) {
    const double x = a.c[0];
    return compose(a, std::log(x), 1 / x, -1 / (x * x), 2 / (x * x * x));
}
inline T3 exp(const T3& a) {
    const double e = std::exp(a.c[0]);
    return compose(a, e, e, e, e);
}
inline T3 pow(const T3& a, double p) {
    const double x = a.c[0];
    const double f = std::pow(x, p);
    return compose(a, f, p * f / x, p * (p - 1) * f / (x * x), p * (p - 1) * (p - 2) * f / (x * x * x));
}
inline T3 sqrt(const T3& a) { return pow(a, 0.5); }
inline T3 acos(const T3& a) {
    const double z = a.c[0];
    const double w = 1 - z * z;
    const double s = std::sqrt(w);
    return compose(a, std::acos(z), -1 / s, -z / (w * s), -(1 + 2 * z * z) / (w * w * s));
}
inline T3 cos(const T3& a) {
    const double x = a.c[0];
    return compose(a, std::cos(x), -std::sin(x), -std::cos(x), std::sin(x));
}

} // namespace conecanon
