#include "conecanon/duality.hpp"

#include <cmath>

#include "conecanon/errors.hpp"
#include "conecanon/sampling.hpp"

namespace conecanon {

namespace {

bool dual_domain(const PotentialHandle& Fd, const Vec& y) {
    try {
        return Fd.interior(y);
    } catch (const Error&) {
        return false;
    }
}

// Evaluates body(x, y) at samples whose image lies in the dual domain.
template <class Body>
DualSup over_pairs(const PotentialHandle& F, const PotentialHandle& Fd, const std::vector<Vec>& xs, Body body) {
    if (F.dim() != Fd.dim()) throw DomainMismatch("potential and dual potential differ in dimension");
    DualSup r;
    for (const Vec& x : xs) {
        const Vec y = gradient_map(F, x);
        if (!dual_domain(Fd, y)) {
            ++r.skipped;
            continue;
        }
        double d;
        try {
            d = body(x, y);
        } catch (const NonInteriorPoint&) {
            ++r.skipped;
            continue;
        }
        ++r.evaluated;
        if (!(d <= r.sup)) {
            r.sup = d;
            r.worst = x;
        }
    }
    return r;
}

Mat psd_congruence(int m, const Mat& P) {
    const int d = svec_size(m);
    Mat M(d, d);
    for (int a = 0; a < d; ++a) M.col(a) = svec(P * smat(Vec::Unit(d, a)) * P.transpose());
    return M;
}

std::vector<Mat> base_automorphisms(const ConeSpec& s) {
    const int d = s.dim;
    std::vector<Mat> out;
    switch (s.variant) {
    case Variant::Orthant: {
        Vec diag(d);
        for (int i = 0; i < d; ++i) diag(i) = std::exp(0.3 * (i + 1) - 0.5);
        out.push_back(diag.asDiagonal());
        Mat P = Mat::Zero(d, d);
        for (int i = 0; i < d; ++i) P(i, (i + 1) % d) = 1;
        out.push_back(P);
        break;
    }
    case Variant::Lorentz: {
        Mat B = Mat::Identity(d, d);
        const double r = 0.4;
        B(0, 0) = B(1, 1) = std::cosh(r);
        B(0, 1) = B(1, 0) = std::sinh(r);
        out.push_back(B);
        if (d >= 3) {
            Mat R = Mat::Identity(d, d);
            R(1, 1) = R(2, 2) = std::cos(0.7);
            R(1, 2) = -std::sin(0.7);
            R(2, 1) = std::sin(0.7);
            out.push_back(R);
        }
        break;
    }
    case Variant::PSD: {
        Mat P = Mat::Identity(s.order, s.order);
        for (int i = 0; i < s.order; ++i)
            for (int j = 0; j < i; ++j) P(i, j) = 0.3 * (i + j + 1);
        P(0, 0) = 1.5;
        out.push_back(psd_congruence(s.order, P));
        break;
    }
    case Variant::LinearImage: {
        const Mat Ainv = s.A.inverse();
        for (const Mat& B : base_automorphisms(*s.inner)) out.push_back(s.A * B * Ainv);
        break;
    }
    case Variant::Product: {
        Mat M = Mat::Zero(d, d);
        int off = 0;
        for (const auto& f : s.factors) {
            const auto fa = base_automorphisms(f);
            M.block(off, off, f.dim, f.dim) = fa.empty() ? Mat(Mat::Identity(f.dim, f.dim)) : fa.front();
            off += f.dim;
        }
        out.push_back(M);
        break;
    }
    case Variant::Polyhedral: break;
    }
    return out;
}

} // namespace

Vec gradient_map(const PotentialHandle& F, const Vec& x) {
    if (!F.interior(x)) throw NonInteriorPoint("point is not interior to the domain");
    const Vec y = -F.jet(x, 1).grad;
    if (F.cone && !(contains(dual_cone(*F.cone), y) > 0))
        throw DomainMismatch("gradient image is not in the dual cone");
    return y;
}

DualPairReport dual_pair(const PotentialHandle& F, const PotentialHandle& F_dual, const Vec& x) {
    DualPairReport r;
    r.x = x;
    r.y = gradient_map(F, x);
    if (F.cone) r.dual_margin = contains(dual_cone(*F.cone), r.y) / r.y.norm();
    r.identity_defect = std::abs(F(x) + F_dual(r.y));
    r.roundtrip = (-F_dual.jet(r.y, 1).grad - x).norm() / x.norm();
    return r;
}

DualSup duality_identity_defect(const PotentialHandle& F, const PotentialHandle& F_dual, const std::vector<Vec>& xs) {
    return over_pairs(F, F_dual, xs, [&](const Vec& x, const Vec& y) { return std::abs(F(x) + F_dual(y)); });
}

DualSup inverse_map_roundtrip(const PotentialHandle& F, const PotentialHandle& F_dual, const std::vector<Vec>& xs) {
    return over_pairs(F, F_dual, xs, [&](const Vec& x, const Vec& y) {
        return (-F_dual.jet(y, 1).grad - x).norm() / x.norm();
    });
}

DualSup isometry_defect(const PotentialHandle& F, const PotentialHandle& F_dual, const std::vector<Vec>& xs) {
    return over_pairs(F, F_dual, xs, [&](const Vec& x, const Vec& y) {
        const Mat g = F.jet(x, 2).hess;
        const Mat gs = F_dual.jet(y, 2).hess;
        Eigen::LLT<Mat> llt(g);
        if (llt.info() != Eigen::Success) return static_cast<double>(INFINITY);
        // dPhi = -g, so the pullback is g gs g; whitened it should be the identity
        const Mat Lg = llt.matrixL().solve(g);
        const Mat W = Lg * gs * Lg.transpose();
        return (W - Mat::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
    });
}

double min_dual_margin(const PotentialHandle& F, const ConeSpec& cone, const std::vector<Vec>& xs) {
    const ConeSpec dual = dual_cone(cone);
    double m = INFINITY;
    for (const Vec& x : xs) {
        const Vec y = -F.jet(x, 1).grad;
        m = std::min(m, contains(dual, y) / y.norm());
    }
    return m;
}

double gradient_homogeneity_defect(const PotentialHandle& F, const std::vector<Vec>& xs) {
    double d = 0;
    for (const Vec& x : xs) {
        const Vec y = gradient_map(F, x);
        for (double t : {0.5, 2.0, M_E}) d = std::max(d, (t * gradient_map(F, t * x) - y).norm() / y.norm());
    }
    return d;
}

std::vector<Mat> automorphisms(const ConeSpec& spec) {
    auto out = base_automorphisms(spec);
    out.push_back(2 * Mat::Identity(spec.dim, spec.dim));
    return out;
}

double equivariance_defect(const PotentialHandle& F, const std::vector<Mat>& autos, const std::vector<Vec>& xs) {
    double d = 0;
    for (const Mat& A : autos) {
        const Mat AinvT = A.inverse().transpose();
        for (const Vec& x : xs) {
            const Vec y = gradient_map(F, x);
            d = std::max(d, (gradient_map(F, A * x) - AinvT * y).norm() / y.norm());
        }
    }
    return d;
}

MonotonicityReport complete_monotonicity(const PotentialHandle& F, const ConeSpec& cone, const std::vector<Vec>& xs,
                                         int dirs, std::uint64_t seed) {
    MonotonicityReport r;
    SampleOptions so;
    so.count = static_cast<int>(xs.size()) * dirs * 3;
    so.seed = seed;
    so.decades = 2;
    const auto vs = sample_cone(cone, so);
    std::size_t next = 0;
    for (const Vec& x : xs) {
        const Jet3 j = F.jet(x, 3);
        const double ef = std::exp(j.value), s = x.norm();
        for (int k = 0; k < dirs; ++k) {
            const Vec &u = vs[next++], &v = vs[next++], &w = vs[next++];
            const double Fu = j.grad.dot(u), Fv = j.grad.dot(v), Fw = j.grad.dot(w);
            const double Fuv = u.dot(j.hess * v), Fuw = u.dot(j.hess * w), Fvw = v.dot(j.hess * w);
            const double Fuvw = j.third_dir(u, v, w);
            const double nu = u.norm() / s, nv = v.norm() / s, nw = w.norm() / s;
            r.min_order[0] = std::min(r.min_order[0], -ef * Fu / nu);
            r.min_order[1] = std::min(r.min_order[1], ef * (Fuv + Fu * Fv) / (nu * nv));
            r.min_order[2] = std::min(r.min_order[2],
                                      -ef * (Fuvw + Fuv * Fw + Fuw * Fv + Fvw * Fu + Fu * Fv * Fw) / (nu * nv * nw));
        }
        ++r.samples;
    }
    r.pass = r.min_order[0] >= -1e-10 && r.min_order[1] >= -1e-10 && r.min_order[2] >= -1e-10;
    return r;
}

PotentialHandle dual_potential(const ConeSpec& spec, const SolveOptions& opt) {
    const ConeSpec ds = dual_cone(spec);
    if (has_closed_form(ds)) return canonical_potential(ds);
    return numeric_potential(ds, opt).F;
}

} // namespace conecanon
