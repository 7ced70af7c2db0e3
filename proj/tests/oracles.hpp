#pragma once
// Independent reference values for the unit tests. Nothing here calls the library.

#include <Eigen/Dense>
#include <cmath>
#include <functional>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline Mat lorentz_J(int N) {
    Mat J = -Mat::Identity(N, N);
    J(0, 0) = 1;
    return J;
}

// Hessian of -(N/2) log q, q = x0^2 - |x'|^2, from q_i = 2 J x and q_ij = 2 J.
inline Mat lorentz_raw_hessian(const Vec& x) {
    const int N = static_cast<int>(x.size());
    const Mat J = lorentz_J(N);
    const double q = x.dot(J * x);
    const Vec qi = 2 * J * x;
    return 0.5 * N * (-2 * J / q + qi * qi.transpose() / (q * q));
}

// Constant c with det Hess(-(N/2) log q) = e^{2(-(N/2) log q + c)}, read off at x.
inline double lorentz_constant(const Vec& x) {
    const int N = static_cast<int>(x.size());
    const double q = x.dot(lorentz_J(N) * x);
    return 0.5 * (std::log(lorentz_raw_hessian(x).determinant()) + N * std::log(q));
}

inline double lorentz(const Vec& x, double c) {
    const int N = static_cast<int>(x.size());
    return -0.5 * N * std::log(x.dot(lorentz_J(N) * x)) + c;
}

// Symmetric matrix from lower-triangle row-major coordinates, off-diagonals carrying sqrt 2.
inline Mat smat(const Vec& v) {
    const int m = static_cast<int>(std::lround((std::sqrt(8.0 * v.size() + 1) - 1) / 2));
    Mat X(m, m);
    int k = 0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j <= i; ++j, ++k) X(i, j) = X(j, i) = (i == j) ? v(k) : v(k) / std::sqrt(2.0);
    return X;
}

// Hessian of -(N/m) log det X in those coordinates: (N/m) tr(X^-1 E_a X^-1 E_b).
inline Mat psd_raw_hessian(const Vec& v) {
    const int N = static_cast<int>(v.size());
    const Mat X = smat(v);
    const int m = static_cast<int>(X.rows());
    const Mat Xi = X.inverse();
    Mat H(N, N);
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b)
            H(a, b) = double(N) / m * (Xi * smat(Vec::Unit(N, a)) * Xi * smat(Vec::Unit(N, b))).trace();
    return H;
}

inline double psd_constant(const Vec& v) {
    const int N = static_cast<int>(v.size());
    const Mat X = smat(v);
    const double m = static_cast<double>(X.rows());
    return 0.5 * (std::log(psd_raw_hessian(v).determinant()) + 2 * N / m * std::log(X.determinant()));
}

inline double psd(const Vec& v, double c) {
    const int N = static_cast<int>(v.size());
    const Mat X = smat(v);
    return -double(N) / X.rows() * std::log(X.determinant()) + c;
}

inline double orthant(const Vec& x) { return -x.array().log().sum(); }

using Fn = std::function<double(const Vec&)>;

// Fourth-order central differences.
inline Vec fd_gradient(const Fn& f, const Vec& x, double h) {
    Vec g(x.size());
    for (int i = 0; i < x.size(); ++i) {
        const Vec e = h * Vec::Unit(x.size(), i);
        g(i) = (-f(x + 2 * e) + 8 * f(x + e) - 8 * f(x - e) + f(x - 2 * e)) / (12 * h);
    }
    return g;
}

inline Mat fd_hessian(const Fn& f, const Vec& x, double h) {
    const int n = static_cast<int>(x.size());
    Mat H(n, n);
    for (int i = 0; i < n; ++i) {
        auto gi = [&](const Vec& y) { return fd_gradient(f, y, h)(i); };
        H.row(i) = fd_gradient(gi, x, h).transpose();
    }
    return 0.5 * (H + H.transpose());
}

// Lagrange/KKT solve of  H d + A^T l = -g,  A d = r  by the dense bordered system.
inline Vec kkt_step(const Mat& H, const Mat& A, const Vec& g, const Vec& r) {
    const int n = static_cast<int>(H.rows()), m = static_cast<int>(A.rows());
    Mat K = Mat::Zero(n + m, n + m);
    K.topLeftCorner(n, n) = H;
    K.topRightCorner(n, m) = A.transpose();
    K.bottomLeftCorner(m, n) = A;
    Vec rhs(n + m);
    rhs << -g, r;
    return K.fullPivLu().solve(rhs).head(n);
}

} // namespace oracle
