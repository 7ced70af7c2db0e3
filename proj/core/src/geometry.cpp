#include "conecanon/geometry.hpp"

#include <cmath>

#include "conecanon/errors.hpp"

namespace conecanon {

namespace {

struct Frame {
    Mat L;    // g = L L^T
    Mat W;    // L^{-T}
    Mat ginv;
};

Frame whiten(const Mat& g) {
    Eigen::LLT<Mat> llt(g);
    if (llt.info() != Eigen::Success) throw DegenerateHessian("metric is not positive definite");
    Frame f;
    f.L = llt.matrixL();
    const int n = static_cast<int>(g.rows());
    f.W = f.L.transpose().triangularView<Eigen::Upper>().solve(Mat::Identity(n, n));
    f.ginv = f.W * f.W.transpose();
    return f;
}

Vec koszul(const Jet3& j, const Mat& ginv) {
    const int n = static_cast<int>(j.grad.size());
    Vec H(n);
    for (int i = 0; i < n; ++i) H(i) = (ginv.array() * j.third[i].array()).sum();
    return H;
}

// Richardson-extrapolated central difference of f along v, error O(eps^6).
template <class Fn>
Vec richardson(const Fn& f, const Vec& x, const Vec& v, double eps) {
    auto central = [&](double h) -> Vec { return (f(x + h * v) - f(x - h * v)) / (2 * h); };
    const Vec d1 = central(eps), d2 = central(eps / 2), d4 = central(eps / 4);
    const Vec r1 = (4 * d2 - d1) / 3, r2 = (4 * d4 - d2) / 3;
    return (16 * r2 - r1) / 15;
}

} // namespace

GeometryReport geometry_at(const PotentialHandle& F, const Vec& x) {
    const Jet3 j = eval_jet3(F, x, 3);
    const int n = static_cast<int>(x.size());
    const double N = n;

    GeometryReport r;
    r.x = x;
    r.g = j.hess;
    Eigen::SelfAdjointEigenSolver<Mat> es(j.hess, Eigen::EigenvaluesOnly);
    const Vec ev = es.eigenvalues();
    if (!(ev(0) > 0)) throw DegenerateHessian("metric is not positive definite");
    r.cond = ev(n - 1) / ev(0);
    if (r.cond > kMaxMetricCondition) throw IllConditionedMetric("metric condition number exceeds 1e12");

    const Frame fr = whiten(j.hess);
    r.ginv = fr.ginv;
    r.H = koszul(j, fr.ginv);

    // whitened cubic form and covectors
    std::vector<Mat> S(n);
    for (int i = 0; i < n; ++i) S[i] = fr.W.transpose() * j.third[i] * fr.W;
    std::vector<Mat> T(n, Mat::Zero(n, n));
    for (int a = 0; a < n; ++a)
        for (int i = 0; i < n; ++i) T[a] += fr.W(i, a) * S[i];
    const Vec f = fr.W.transpose() * j.grad;
    const Vec Hw = fr.W.transpose() * r.H;

    r.grad_norm2 = f.squaredNorm();
    r.flat_laplacian = (fr.ginv.array() * j.hess.array()).sum();
    r.laplacian = r.flat_laplacian - 0.5 * Hw.dot(f);

    Mat Rw(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            double s = (T[a].array() * T[b].transpose().array()).sum();
            s -= T[a].row(b).dot(Hw);
            Rw(a, b) = 0.25 * s;
        }
    r.whitened_ricci = 0.5 * (Rw + Rw.transpose());
    r.scalar = r.whitened_ricci.trace();
    r.ricci = fr.L * r.whitened_ricci * fr.L.transpose();
    Eigen::SelfAdjointEigenSolver<Mat> rs(r.whitened_ricci, Eigen::EigenvaluesOnly);
    r.ricci_eigs = rs.eigenvalues();
    const double floor = (N - 2) / N;
    const Mat lower = r.whitened_ricci + floor * (Mat::Identity(n, n) - f * f.transpose() / N);
    Eigen::SelfAdjointEigenSolver<Mat> ls(lower, Eigen::EigenvaluesOnly);
    r.ricci_lower_min = ls.eigenvalues()(0);

    // Pick tensor, E_i = -F_i lowered
    const Vec E = -j.grad;
    r.pick.assign(n, Mat::Zero(n, n));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                r.pick[a](b, c) = j.third[a](b, c) +
                                  (2 / N) * (E(a) * j.hess(b, c) + E(b) * j.hess(a, c) + E(c) * j.hess(a, b)) -
                                  (4 / (N * N)) * E(a) * E(b) * E(c);
    const Vec Ew = -f;
    double norm2 = 0, tr = 0, rad = 0;
    const Vec xw = fr.L.transpose() * x; // radial vector in the whitened frame
    for (int a = 0; a < n; ++a) {
        Mat Aa = T[a];
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) {
                double t = (2 / N) * (Ew(a) * (b == c) + Ew(b) * (a == c) + Ew(c) * (a == b));
                t -= (4 / (N * N)) * Ew(a) * Ew(b) * Ew(c);
                Aa(b, c) += t;
            }
        norm2 += Aa.squaredNorm();
        tr = std::max(tr, std::abs(Aa.trace()));
        rad = std::max(rad, (Aa * xw).cwiseAbs().maxCoeff());
    }
    r.pick_norm2 = norm2;
    r.pick_trace = tr;
    r.pick_radial = rad;

    // kappa_ij = -d_i H_j and d log H(F), by extrapolated differences along g-unit directions
    auto Hfun = [&](const Vec& y) -> Vec {
        const Jet3 jy = eval_jet3(F, y, 3);
        return koszul(jy, whiten(jy.hess).ginv);
    };
    auto logdet = [&](const Vec& y) -> Vec {
        Vec v(1);
        v(0) = log_det_hessian(eval_jet3(F, y, 2).hess);
        return v;
    };
    const double eps = 0.02;
    Mat K(n, n);
    r.H_logdet.resize(n);
    Vec Hdir(n);
    for (int a = 0; a < n; ++a) {
        const Vec v = fr.W.col(a);
        K.row(a) = -richardson(Hfun, x, v, eps).transpose();
        Hdir(a) = richardson(logdet, x, v, eps)(0);
    }
    // rows of K are kappa(v_a, .), so kappa = L K and its whitened form is K W
    r.whitened_kappa = K * fr.W;
    r.whitened_kappa = 0.5 * (r.whitened_kappa + r.whitened_kappa.transpose()).eval();
    r.kappa = fr.L * r.whitened_kappa * fr.L.transpose();
    r.kappa_scalar = r.whitened_kappa.trace();
    r.H_logdet = fr.L * Hdir;
    r.koszul_discrepancy = (Hdir - Hw).cwiseAbs().maxCoeff();
    return r;
}

CurvatureBoundsReport curvature_bounds_check(const PotentialHandle& F, const std::vector<Vec>& samples, double tol) {
    CurvatureBoundsReport rep;
    if (samples.empty()) return rep;
    const double N = static_cast<double>(samples.front().size());
    rep.ricci_floor = -(N - 2) / N;
    rep.pick_bound = 4 * (N - 1) * (N - 2) / N;
    double worst = -INFINITY;
    for (const auto& x : samples) {
        const GeometryReport g = geometry_at(F, x);
        const double t = tol * (1 + g.cond);
        ++rep.samples;
        rep.max_eig = std::max(rep.max_eig, g.ricci_eigs.maxCoeff());
        rep.min_eig = std::min(rep.min_eig, g.ricci_eigs.minCoeff());
        rep.min_lower_gap = std::min(rep.min_lower_gap, g.ricci_lower_min);
        rep.max_pick = std::max(rep.max_pick, g.pick_norm2);
        const double excess = std::max({g.ricci_eigs.maxCoeff(), rep.ricci_floor - g.ricci_eigs.minCoeff(),
                                        -g.ricci_lower_min, g.pick_norm2 - rep.pick_bound, -g.pick_norm2});
        if (excess > t) ++rep.violations;
        if (excess > worst) {
            worst = excess;
            rep.worst = x;
        }
    }
    return rep;
}

HarmonicityReport harmonicity_check(const PotentialHandle& F, const std::vector<Vec>& samples) {
    HarmonicityReport rep;
    for (const auto& x : samples) {
        const Jet3 j = eval_jet3(F, x, 3);
        const Frame fr = whiten(j.hess);
        const double N = static_cast<double>(x.size());
        const Vec H = koszul(j, fr.ginv);
        const Vec f = fr.W.transpose() * j.grad;
        const double flat = (fr.ginv.array() * j.hess.array()).sum();
        const double lap = flat - 0.5 * (fr.W.transpose() * H).dot(f);
        rep.sup_laplacian = std::max(rep.sup_laplacian, std::abs(lap));
        rep.sup_flat_deviation = std::max(rep.sup_flat_deviation, std::abs(flat - N));
        rep.sup_grad_deviation = std::max(rep.sup_grad_deviation, std::abs(f.squaredNorm() - N));
    }
    return rep;
}

} // namespace conecanon
