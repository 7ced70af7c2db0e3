#include "conecanon/foliation.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>

#include "conecanon/errors.hpp"

namespace conecanon {

namespace {

double alpha_of(const PotentialHandle& F) { return F.alpha ? *F.alpha : -static_cast<double>(F.dim()); }

struct Inertia {
    int pos = 0, neg = 0;
    double min_abs = INFINITY;
};

Inertia inertia(const Mat& M) {
    Eigen::SelfAdjointEigenSolver<Mat> es(M);
    const Vec ev = es.eigenvalues();
    const double scale = ev.cwiseAbs().maxCoeff();
    Inertia r;
    for (int i = 0; i < ev.size(); ++i) {
        if (ev(i) > 1e-12 * scale) ++r.pos;
        if (ev(i) < -1e-12 * scale) ++r.neg;
        r.min_abs = std::min(r.min_abs, std::abs(ev(i)));
    }
    return r;
}

Vec y_of(const PotentialHandle& F, const Vec& x) {
    const Jet3 j = F.jet(x, 1);
    return -std::exp(-2 * j.value / x.size()) * j.grad;
}

} // namespace

EquiaffineData equiaffine_data(const PotentialHandle& F, const Vec& x) {
    if (!F.interior(x)) throw NonInteriorPoint("point is not interior to the domain");
    const int N = F.dim(), n = N - 1;
    const double a = alpha_of(F);
    const Jet3 j = F.jet(x, 3);
    Eigen::LLT<Mat> llt(j.hess);
    if (llt.info() != Eigen::Success) throw DegenerateHessian("Hessian is not positive definite");
    const double logH = 2 * Mat(llt.matrixL()).diagonal().array().log().sum();
    const Mat ginv = llt.solve(Mat::Identity(N, N));
    Vec Hk(N);
    for (int i = 0; i < N; ++i) Hk(i) = (ginv.cwiseProduct(j.third[i])).sum();
    const Vec Hup = ginv * Hk;
    EquiaffineData d;
    d.nu = -(1.0 / (n + 2)) * std::pow(std::abs(a), -(n + 1.0) / (n + 2)) * std::exp(logH / (n + 2)) * (n * x - a * Hup);
    d.lambda = -j.grad.dot(d.nu) / a;
    const double dF2 = j.grad.dot(ginv * j.grad);
    d.h = std::exp(-logH / (n + 2)) * std::pow(dF2, -1.0 / (n + 2)) * (j.hess - j.grad * j.grad.transpose() / dF2);
    const Mat wedge = d.nu * x.transpose() - x * d.nu.transpose();
    d.radial = wedge.cwiseAbs().maxCoeff() / (d.nu.norm() * x.norm());
    d.tangential = (d.h * d.nu).norm() / (d.h.norm() * d.nu.norm());
    return d;
}

double level_curvature(int dim, double r) {
    const double N = dim;
    return -std::pow(N, -N / (N + 1)) * std::exp(2 * r / (N + 1));
}

LevelSetMesh level_set_mesh(const PotentialHandle& F, const ConeSpec& cone, double r, int resolution) {
    if (cone.dim < 2 || cone.dim > 3) throw DimensionMismatch("level-set meshes need cone dimension 2 or 3");
    if (resolution < 2) throw DimensionMismatch("resolution must be at least 2");
    const ValidityReport v = validate_proper(cone);
    if (!v.proper) throw MalformedSpec("cone is not proper: " + v.reason);
    const CrossSection cs = cross_section(cone, v.witness);
    const double inset = 0.01 * cs.margin(Vec::Zero(cs.n()));

    // chart points, with -1 marking lattice sites dropped near the boundary
    std::vector<Vec> pts;
    std::vector<int> id;
    if (cs.n() == 1) {
        for (int k = 0; k < resolution; ++k) {
            Vec s(1);
            s(0) = cs.lo(0) + (cs.hi(0) - cs.lo(0)) * (k + 1.0) / (resolution + 1);
            id.push_back(cs.margin(s) > inset ? static_cast<int>(pts.size()) : -1);
            if (id.back() >= 0) pts.push_back(s);
        }
    } else {
        for (int i = 0; i < resolution; ++i)
            for (int k = 0; k < resolution; ++k) {
                Vec s(2);
                s << cs.lo(0) + (cs.hi(0) - cs.lo(0)) * i / (resolution - 1.0),
                    cs.lo(1) + (cs.hi(1) - cs.lo(1)) * k / (resolution - 1.0);
                id.push_back(cs.margin(s) > inset ? static_cast<int>(pts.size()) : -1);
                if (id.back() >= 0) pts.push_back(s);
            }
    }

    LevelSetMesh m;
    m.r = r;
    for (const Vec& s : pts) {
        const Vec p = cs.to_cone(s);
        double e = 0;
        Vec x = p;
        bool ok = false;
        try {
            for (int it = 0; it < 60; ++it) {
                x = std::exp(e) * p;
                const Jet3 j = F.jet(x, 1);
                const double phi = j.value - r;
                if (std::abs(phi) <= 1e-13 * (1 + std::abs(r))) {
                    ok = true;
                    break;
                }
                e -= phi / j.grad.dot(x);
            }
        } catch (const Error& err) {
            throw RayMiss(std::string("ray leaves the domain of the potential: ") + err.what());
        }
        if (!ok) throw RayMiss("radial Newton did not reach the level");
        m.vertices.push_back(x);
        m.data.push_back(equiaffine_data(F, x));
        m.max_level_error = std::max(m.max_level_error, std::abs(F(x) - r));
    }
    if (cs.n() == 1) {
        for (int k = 0; k + 1 < resolution; ++k)
            if (id[k] >= 0 && id[k + 1] >= 0) m.faces.push_back({id[k], id[k + 1], -1});
    } else {
        auto at = [&](int i, int k) { return id[i * resolution + k]; };
        for (int i = 0; i + 1 < resolution; ++i)
            for (int k = 0; k + 1 < resolution; ++k) {
                const int a = at(i, k), b = at(i + 1, k), c = at(i, k + 1), d = at(i + 1, k + 1);
                if (a < 0 || b < 0 || c < 0 || d < 0) continue;
                m.faces.push_back({a, b, d});
                m.faces.push_back({a, d, c});
            }
    }
    return m;
}

void write_obj(const LevelSetMesh& mesh, const std::string& obj_path, const std::string& csv_path) {
    std::ofstream obj(obj_path);
    if (!obj) throw Error("cannot write " + obj_path);
    obj << std::setprecision(17) << "# level " << mesh.r << "\n";
    for (const Vec& v : mesh.vertices) {
        obj << "v";
        for (int i = 0; i < 3; ++i) obj << " " << (i < v.size() ? v(i) : 0.0);
        obj << "\n";
    }
    for (const auto& f : mesh.faces) {
        if (f[2] < 0)
            obj << "l " << f[0] + 1 << " " << f[1] + 1 << "\n";
        else
            obj << "f " << f[0] + 1 << " " << f[1] + 1 << " " << f[2] + 1 << "\n";
    }
    if (csv_path.empty()) return;
    std::ofstream csv(csv_path);
    if (!csv) throw Error("cannot write " + csv_path);
    csv << std::setprecision(17) << "vertex,lambda,lambda_formula,radial,tangential";
    const int N = mesh.vertices.empty() ? 0 : static_cast<int>(mesh.vertices[0].size());
    for (int i = 0; i < N; ++i) csv << ",nu" << i;
    csv << "\n";
    for (std::size_t k = 0; k < mesh.vertices.size(); ++k) {
        const auto& d = mesh.data[k];
        csv << k << "," << d.lambda << "," << level_curvature(N, mesh.r) << "," << d.radial << "," << d.tangential;
        for (int i = 0; i < N; ++i) csv << "," << d.nu(i);
        csv << "\n";
    }
}

double product_isometry_defect(const PotentialHandle& F, const std::vector<Vec>& xs) {
    double worst = 0;
    for (const Vec& x : xs) {
        const int N = static_cast<int>(x.size());
        auto psi = [&](const Vec& z) {
            const double f = F(z);
            Vec out(N + 1);
            out(0) = std::exp(-f / N);
            out.tail(N) = std::exp(f / N) * z;
            return out;
        };
        // fourth-order central differences on a step tied to the distance to the boundary
        const double eps = 1e-2 * std::min(F.margin(x), x.norm());
        Mat J(N + 1, N);
        for (int i = 0; i < N; ++i) {
            const Vec e = eps * Vec::Unit(N, i);
            J.col(i) = (8 * (psi(x + e) - psi(x - e)) - (psi(x + 2 * e) - psi(x - 2 * e))) / (12 * eps);
        }
        const Vec p = psi(x);
        const Vec y = p.tail(N);
        const Jet3 jy = F.jet(y, 2);
        const Mat hy = std::pow(N, -1.0 / (N + 1)) * std::exp(-2 * jy.value / (N + 1)) *
                       (jy.hess - jy.grad * jy.grad.transpose() / N);
        const Mat Jy = J.bottomRows(N);
        const Mat k = N * (J.row(0).transpose() * J.row(0)) / (p(0) * p(0)) +
                      N * std::pow(N, -static_cast<double>(N) / (N + 1)) * Jy.transpose() * hy * Jy;
        const Mat g = F.jet(x, 2).hess;
        worst = std::max(worst, (k - g).cwiseAbs().maxCoeff() / g.cwiseAbs().maxCoeff());
    }
    return worst;
}

DerivedMetricReport ma_riemannian_metric(const PotentialHandle& F, double B, double C, const Vec& x) {
    if (!(B > 0) || !(C > 0)) throw OutsideRegion("B and C must be positive");
    const int N = F.dim();
    const Jet3 j = F.jet(x, 2);
    const double t = j.value;
    if (!(t > std::log(B / C))) throw OutsideRegion("F(x) <= log(B/C)");
    const double q = C - B * std::exp(-t);
    const double d1 = std::pow(std::exp(-t) * q, 1.0 / N);
    const double d2 = d1 / N * (2 * B * std::exp(-t) - C) / q;
    DerivedMetricReport r;
    r.kind = "riemannian";
    r.x = x;
    r.metric = d1 * j.hess + d2 * j.grad * j.grad.transpose();
    Eigen::PartialPivLU<Mat> lu(r.metric);
    r.residual = std::abs(lu.determinant() - B);
    const Inertia in = inertia(r.metric);
    r.positive = in.pos;
    r.negative = in.neg;
    r.radial = x.dot(r.metric * x);
    r.radial_formula = N * d1 * B / (C * std::exp(t) - B);
    return r;
}

DerivedMetricReport lorentzian_u(const PotentialHandle& F, const Vec& x) {
    if (!F.interior(x)) throw NonInteriorPoint("point is not interior to the domain");
    const int N = F.dim();
    const Jet3 j = F.jet(x, 2);
    const double e = std::exp(-2 * j.value / N);
    DerivedMetricReport r;
    r.kind = "lorentzian";
    r.x = x;
    r.metric = e * (j.hess - (2.0 / N) * j.grad * j.grad.transpose());
    Eigen::PartialPivLU<Mat> lu(r.metric);
    r.residual = std::abs(lu.determinant() + 1);
    const Inertia in = inertia(r.metric);
    r.positive = in.pos;
    r.negative = in.neg;
    r.radial = x.dot(r.metric * x);
    r.radial_formula = -N * e; // 2u
    return r;
}

LagrangianReport lagrangian_graph_report(const PotentialHandle& F, const std::vector<Vec>& xs) {
    LagrangianReport rep;
    for (const Vec& x : xs) {
        const int N = static_cast<int>(x.size());
        const DerivedMetricReport k = lorentzian_u(F, x);
        rep.nondegeneracy = std::min(rep.nondegeneracy, inertia(k.metric).min_abs);
        const Vec y = y_of(F, x);
        rep.conicity = std::max(rep.conicity, (y_of(F, 2 * x) - 2 * y).norm() / y.norm());
        const double eps = 1e-4 * x.norm();
        auto logdet = [&](const Vec& z) {
            return std::log(std::abs(Eigen::PartialPivLU<Mat>(lorentzian_u(F, z).metric).determinant()));
        };
        Vec grad(N);
        for (int i = 0; i < N; ++i) {
            const Vec e = eps * Vec::Unit(N, i);
            grad(i) = (logdet(x + e) - logdet(x - e)) / (2 * eps);
        }
        rep.mean_curvature = std::max(rep.mean_curvature, x.norm() * grad.norm());
    }
    return rep;
}

double reparametrization_defect(const PotentialHandle& F, const std::function<double(double)>& dpsi,
                                const std::function<double(double)>& ddpsi, const std::vector<Vec>& xs) {
    double worst = 0;
    for (const Vec& x : xs) {
        const int N = static_cast<int>(x.size());
        const Jet3 j = F.jet(x, 2);
        const double d1 = dpsi(j.value), d2 = ddpsi(j.value);
        const Mat M = d1 * j.hess + d2 * j.grad * j.grad.transpose();
        Eigen::LLT<Mat> llt(j.hess);
        const double dF2 = j.grad.dot(llt.solve(j.grad));
        const double lhs = Eigen::PartialPivLU<Mat>(M).determinant();
        const double scale = std::pow(std::abs(d1), N) * std::exp(log_det_hessian(j.hess));
        const double rhs = std::pow(d1, N) * (1 + d2 / d1 * dF2) * std::exp(log_det_hessian(j.hess));
        // the bracket vanishes for the Lorentzian reparametrization, so measure against |psi'|^N H(F)
        worst = std::max(worst, std::abs(lhs - rhs) / (scale * (1 + std::abs(d2 / d1) * dF2)));
    }
    return worst;
}

} // namespace conecanon
