#include "conecanon/ma_solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>

#include "conecanon/errors.hpp"
#include "conecanon/random.hpp"

namespace conecanon {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Trip = Eigen::Triplet<double>;

// One arm of a directional stencil: unknown index (or -1 for the boundary) and length.
struct Arm {
    int k = -1;
    double len = 0;
};

// Non-uniform three-point differences along a unit direction.
struct Dir {
    Arm plus, minus;
    double den() const { return plus.len * minus.len * (plus.len + minus.len); }
    // weights (plus, minus, centre)
    std::array<double, 3> first() const {
        const double hp = plus.len, hm = minus.len, d = den();
        return {hm * hm / d, -hp * hp / d, (hp * hp - hm * hm) / d};
    }
    std::array<double, 3> second() const {
        const double hp = plus.len, hm = minus.len, d = den();
        return {2 * hm / d, 2 * hp / d, -2 * (hp + hm) / d};
    }
    double apply(const std::array<double, 3>& c, const Vec& v, int self, double vb) const {
        const double vp = plus.k >= 0 ? v(plus.k) : vb;
        const double vm = minus.k >= 0 ? v(minus.k) : vb;
        return c[0] * vp + c[1] * vm + c[2] * v(self);
    }
    void jac(const std::array<double, 3>& c, double scale, int row, int self, std::vector<Trip>& out) const {
        if (plus.k >= 0) out.emplace_back(row, plus.k, scale * c[0]);
        if (minus.k >= 0) out.emplace_back(row, minus.k, scale * c[1]);
        out.emplace_back(row, self, scale * c[2]);
    }
};

// orthogonal pairs for the wide stencil
// the first four also serve the accurate scheme
constexpr std::array<std::array<int, 2>, 8> kMonotoneDirs{
    {{1, 0}, {0, 1}, {1, 1}, {1, -1}, {2, 1}, {-1, 2}, {1, 2}, {-2, 1}}};

// Damped Newton with a residual-decrease line search. Residuals are +inf where
// the iterate leaves the admissible set.
template <class Res>
int newton(Vec& x, const Res& res, double tol, int max_iter, double& rinf, const char* what) {
    for (int it = 0; it < max_iter; ++it) {
        std::vector<Trip> trips;
        const Vec R = res(x, &trips);
        rinf = R.cwiseAbs().maxCoeff();
        if (!std::isfinite(rinf)) throw NoConvergence(std::string(what) + ": iterate left the admissible set");
        if (rinf <= tol) return it;
        SpMat J(x.size(), x.size());
        J.setFromTriplets(trips.begin(), trips.end());
        Eigen::SparseLU<SpMat> lu;
        lu.compute(J);
        if (lu.info() != Eigen::Success) throw NoConvergence(std::string(what) + ": singular Jacobian");
        const Vec dx = lu.solve(-R);
        const double r0 = R.norm();
        double t = 1;
        bool accepted = false;
        for (; t > 1e-10; t *= 0.5) {
            const Vec xn = x + t * dx;
            const Vec Rn = res(xn, nullptr);
            if (Rn.allFinite() && Rn.norm() < (1 - 1e-4 * t) * r0) {
                x = xn;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (rinf <= 1e3 * tol) return it;
            throw NoConvergence(std::string(what) + ": line search failed");
        }
        if ((t * dx).cwiseAbs().maxCoeff() <= 1e-15 * x.cwiseAbs().maxCoeff()) {
            rinf = res(x, nullptr).cwiseAbs().maxCoeff();
            return it + 1;
        }
    }
    rinf = res(x, nullptr).cwiseAbs().maxCoeff();
    if (rinf <= tol) return max_iter;
    throw NoConvergence(std::string(what) + ": iteration limit reached");
}

// ---- n = 1: (-u)^3 u'' = 1 on the cosine-graded grid

void solve_1d(CrossSectionGrid& g, const SolveOptions& opt) {
    g.a = g.cs.lo(0);
    g.b = g.cs.hi(0);
    g.M = static_cast<int>(std::lround(1 / opt.h));
    if (g.M - 1 < 5) throw NoConvergence("grid too coarse: fewer than 5 interior nodes");
    const int M = g.M, n = M - 1;
    const double L = g.b - g.a, hx = 1.0 / M;
    g.spacing = hx;
    Vec sp(n), spp(n), s(n);
    for (int k = 1; k < M; ++k) {
        const double xi = k * hx;
        s(k - 1) = g.a + L * (1 - std::cos(M_PI * xi)) / 2;
        sp(k - 1) = L * M_PI / 2 * std::sin(M_PI * xi);
        spp(k - 1) = L * M_PI * M_PI / 2 * std::cos(M_PI * xi);
    }
    const double ub = -opt.boundary;
    auto res = [&](const Vec& u, std::vector<Trip>* J) {
        Vec R(n);
        for (int i = 0; i < n; ++i) {
            if (!(u(i) < 0)) {
                R(i) = INFINITY;
                continue;
            }
            const double um = i > 0 ? u(i - 1) : ub, up = i < n - 1 ? u(i + 1) : ub;
            const double uxx = (up - 2 * u(i) + um) / (hx * hx), ux = (up - um) / (2 * hx);
            const double d2 = (uxx * sp(i) - ux * spp(i)) / std::pow(sp(i), 3);
            const double c = std::pow(-u(i), 3);
            R(i) = c * d2 - 1;
            if (J) {
                const double wgt = c / std::pow(sp(i), 3);
                J->emplace_back(i, i, -3 * u(i) * u(i) * d2 + wgt * (-2 * sp(i) / (hx * hx)));
                if (i > 0) J->emplace_back(i, i - 1, wgt * (sp(i) / (hx * hx) + spp(i) / (2 * hx)));
                if (i < n - 1) J->emplace_back(i, i + 1, wgt * (sp(i) / (hx * hx) - spp(i) / (2 * hx)));
            }
        }
        return R;
    };
    // exact solution on the segment for zero data: u = -(4/L^2)^{1/4} sqrt((s-a)(b-s))
    Vec u(n);
    const double C = std::pow(4 / (L * L), 0.25);
    for (int i = 0; i < n; ++i) u(i) = -0.8 * C * std::sqrt((s(i) - g.a) * (g.b - s(i))) + ub;
    g.iterations = newton(u, res, opt.tol, opt.max_iter, g.residual, "1d Monge-Ampere");

    g.nodes.clear();
    g.u.resize(M + 1);
    for (int k = 0; k <= M; ++k) {
        Vec node(1);
        node(0) = g.a + L * (1 - std::cos(M_PI * k * hx)) / 2;
        g.nodes.push_back(node);
        g.u(k) = (k == 0 || k == M) ? ub : u(k - 1);
    }
    double mind = INFINITY;
    for (int k = 1; k < M; ++k) {
        const double l = g.nodes[k](0) - g.nodes[k - 1](0), r = g.nodes[k + 1](0) - g.nodes[k](0);
        mind = std::min(mind, 2 * (l * g.u(k + 1) + r * g.u(k - 1) - (l + r) * g.u(k)) / (l * r * (l + r)));
    }
    g.min_second_difference = mind;
}

// ---- n = 2 lattice

struct Lattice {
    std::vector<int> node;                 // unknown -> lattice node
    std::vector<std::array<Dir, 4>> acc;   // accurate stencil
    std::vector<std::array<Dir, 8>> mono;  // wide stencil
};

Arm make_arm(const CrossSectionGrid& g, int i, int j, int a, int b) {
    const int ii = i + a, jj = j + b;
    const double L = g.spacing * std::hypot(a, b);
    if (ii >= 0 && jj >= 0 && ii < g.nx && jj < g.ny) {
        const int k = g.index[ii * g.ny + jj];
        if (k >= 0) return {k, L};
    }
    Vec d(2);
    d << a, b;
    d /= d.norm();
    const Vec s = g.nodes[i * g.ny + j];
    return {-1, std::min(L, g.cs.ray_exit(s, d))};
}

Lattice build_lattice(CrossSectionGrid& g, const SolveOptions& opt) {
    const Vec ext = g.cs.hi - g.cs.lo;
    const double side = ext.maxCoeff();
    g.spacing = opt.h * side;
    g.lo = g.cs.lo;
    g.nx = static_cast<int>(std::ceil(ext(0) / g.spacing)) + 1;
    g.ny = static_cast<int>(std::ceil(ext(1) / g.spacing)) + 1;
    if (std::min(g.nx, g.ny) - 2 < 5) throw NoConvergence("grid too coarse: fewer than 5 interior nodes per axis");
    g.index.assign(static_cast<std::size_t>(g.nx) * g.ny, -1);
    g.nodes.clear();
    Lattice lat;
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            Vec s(2);
            s << g.lo(0) + i * g.spacing, g.lo(1) + j * g.spacing;
            g.nodes.push_back(s);
            if (g.cs.margin(s) > 1e-13) {
                g.index[i * g.ny + j] = static_cast<int>(lat.node.size());
                lat.node.push_back(i * g.ny + j);
            }
        }
    const int n = static_cast<int>(lat.node.size());
    lat.acc.resize(n);
    lat.mono.resize(n);
    for (int k = 0; k < n; ++k) {
        const int i = lat.node[k] / g.ny, j = lat.node[k] % g.ny;
        for (int d = 0; d < 8; ++d) {
            const auto [a, b] = kMonotoneDirs[d];
            const Dir dir{make_arm(g, i, j, a, b), make_arm(g, i, j, -a, -b)};
            lat.mono[k][d] = dir;
            if (d < 4) lat.acc[k][d] = dir;
        }
    }
    return lat;
}

Vec torsion(const Lattice& lat) {
    const int n = static_cast<int>(lat.node.size());
    std::vector<Trip> t;
    for (int k = 0; k < n; ++k)
        for (int d = 0; d < 2; ++d) lat.acc[k][d].jac(lat.acc[k][d].second(), -1.0, k, k, t);
    SpMat A(n, n);
    A.setFromTriplets(t.begin(), t.end());
    Eigen::SparseLU<SpMat> lu(A);
    if (lu.info() != Eigen::Success) throw NoConvergence("singular Poisson system");
    return lu.solve(Vec::Ones(n));
}

// log det M - n log p - e log w with M = (1 - 1/p) Dw Dw^T - w D^2 w.
Vec accurate_residual(const Lattice& lat, const Vec& v, double p, double vb, std::vector<Trip>* J) {
    const int n = static_cast<int>(v.size());
    const double c1 = 1 - 1 / p, e = 4 - 6 / p, rc = 2 * std::log(p);
    Vec R(n);
    for (int k = 0; k < n; ++k) {
        const auto& st = lat.acc[k];
        const double vc = v(k);
        if (!(vc > 0)) {
            R(k) = INFINITY;
            continue;
        }
        const auto f0 = st[0].first(), f1 = st[1].first();
        const auto s0 = st[0].second(), s1 = st[1].second(), s2 = st[2].second(), s3 = st[3].second();
        const double g1 = st[0].apply(f0, v, k, vb), g2 = st[1].apply(f1, v, k, vb);
        const double a11 = st[0].apply(s0, v, k, vb), a22 = st[1].apply(s1, v, k, vb);
        const double a12 = 0.5 * (st[2].apply(s2, v, k, vb) - st[3].apply(s3, v, k, vb));
        const double m11 = c1 * g1 * g1 - vc * a11, m22 = c1 * g2 * g2 - vc * a22, m12 = c1 * g1 * g2 - vc * a12;
        const double det = m11 * m22 - m12 * m12;
        if (!(det > 0) || !(m11 > 0)) {
            R(k) = INFINITY;
            continue;
        }
        R(k) = std::log(det) - rc - e * std::log(vc);
        if (J) {
            const double dm11 = m22 / det, dm22 = m11 / det, dm12 = -2 * m12 / det;
            const double dg1 = c1 * (dm11 * 2 * g1 + dm12 * g2), dg2 = c1 * (dm22 * 2 * g2 + dm12 * g1);
            const double da11 = -dm11 * vc, da22 = -dm22 * vc, da12 = -dm12 * vc;
            J->emplace_back(k, k, -dm11 * a11 - dm22 * a22 - dm12 * a12 - e / vc);
            st[0].jac(f0, dg1, k, k, *J);
            st[1].jac(f1, dg2, k, k, *J);
            st[0].jac(s0, da11, k, k, *J);
            st[1].jac(s1, da22, k, k, *J);
            st[2].jac(s2, 0.5 * da12, k, k, *J);
            st[3].jac(s3, -0.5 * da12, k, k, *J);
        }
    }
    return R;
}

constexpr double kSecondFloor = 1e-12;

// log(min over frames of D_1 u D_2 u) + 4 log(-u)
Vec monotone_residual(const Lattice& lat, const Vec& u, double ub, std::vector<Trip>* J) {
    const int n = static_cast<int>(u.size());
    Vec R(n);
    for (int k = 0; k < n; ++k) {
        if (!(u(k) < 0)) {
            R(k) = INFINITY;
            continue;
        }
        const auto& st = lat.mono[k];
        double best = INFINITY;
        int frame = 0;
        std::array<double, 8> D{};
        for (int d = 0; d < 8; ++d) D[d] = std::max(st[d].apply(st[d].second(), u, k, ub), kSecondFloor);
        for (int f = 0; f < 4; ++f) {
            const double prod = D[2 * f] * D[2 * f + 1];
            if (prod < best) {
                best = prod;
                frame = f;
            }
        }
        R(k) = std::log(best) + 4 * std::log(-u(k));
        if (J) {
            J->emplace_back(k, k, 4 / u(k));
            for (int d : {2 * frame, 2 * frame + 1})
                if (D[d] > kSecondFloor) st[d].jac(st[d].second(), 1 / D[d], k, k, *J);
        }
    }
    return R;
}

double min_second(const Lattice& lat, const Vec& u, double ub) {
    double m = INFINITY;
    for (std::size_t k = 0; k < lat.mono.size(); ++k)
        for (const auto& d : lat.mono[k]) m = std::min(m, d.apply(d.second(), u, static_cast<int>(k), ub));
    return m;
}

// Lower the iterate onto its directional convex envelope along every stencil line.
void convexify(const Lattice& lat, Vec& u, double ub) {
    for (int sweep = 0; sweep < 200; ++sweep) {
        bool changed = false;
        for (std::size_t k = 0; k < lat.mono.size(); ++k)
            for (const auto& d : lat.mono[k]) {
                const double vp = d.plus.k >= 0 ? u(d.plus.k) : ub, vm = d.minus.k >= 0 ? u(d.minus.k) : ub;
                const double chord = (d.minus.len * vp + d.plus.len * vm) / (d.plus.len + d.minus.len);
                if (u(static_cast<int>(k)) > chord + 1e-15 * std::abs(chord)) {
                    u(static_cast<int>(k)) = chord;
                    changed = true;
                }
            }
        if (!changed) return;
    }
}

void solve_2d(CrossSectionGrid& g, const SolveOptions& opt) {
    const Lattice lat = build_lattice(g, opt);
    const int n = static_cast<int>(lat.node.size());
    g.p = is_polyhedral(g.cs.cone) ? 3.0 : 2.0;
    const double p = g.p, ub = -opt.boundary, vb = std::pow(opt.boundary, p);

    // torsion function scaled to balance the residual
    const Vec phi = torsion(lat);
    const Vec R0 = accurate_residual(lat, phi, p, 0.0, nullptr);
    double mean = 0;
    int cnt = 0;
    for (int k = 0; k < n; ++k)
        if (std::isfinite(R0(k))) {
            mean += R0(k);
            ++cnt;
        }
    if (cnt == 0) throw NoConvergence("initial guess is nowhere admissible");
    const double lam = std::exp(-mean / cnt / (4 - (4 - 6 / p)));
    Vec v = (lam * phi).array() + vb;
    auto acc = [&](const Vec& x, std::vector<Trip>* J) { return accurate_residual(lat, x, p, vb, J); };
    // repair nodes where the scaled torsion is not admissible by a few smoothing passes
    for (int pass = 0; pass < 20 && !acc(v, nullptr).allFinite(); ++pass) {
        const Vec R = acc(v, nullptr);
        for (int k = 0; k < n; ++k)
            if (!std::isfinite(R(k))) v(k) *= 1.05;
    }
    g.iterations = newton(v, acc, opt.tol, opt.max_iter, g.residual, "2d Monge-Ampere");
    Vec uA = -v.array().pow(1 / p).matrix();

    Vec u = uA;
    g.monotone_nodes = 0;
    if (opt.monotone) {
        Vec uM = uA;
        auto mono = [&](const Vec& x, std::vector<Trip>* J) { return monotone_residual(lat, x, ub, J); };
        double r = 0;
        try {
            newton(uM, mono, opt.tol, opt.max_iter, r, "wide stencil");
        } catch (const NoConvergence&) {
            // the semismooth iteration can stall where frames switch; settle for the best iterate
            r = mono(uM, nullptr).cwiseAbs().maxCoeff();
        }
        if (min_second(lat, uM, ub) < -1e-8) {
            convexify(lat, uM, ub);
            try {
                newton(uM, mono, opt.tol, opt.max_iter, r, "wide stencil");
            } catch (const NoConvergence&) {
                r = mono(uM, nullptr).cwiseAbs().maxCoeff();
            }
            if (min_second(lat, uM, ub) < -1e-8) throw NonConvexIterate("wide-stencil iterate is not convex");
        }
        g.monotone_residual = r;
        const double gate = std::sqrt(opt.h) * uA.cwiseAbs().maxCoeff();
        for (int k = 0; k < n; ++k)
            if (std::abs(uA(k) - uM(k)) > gate) {
                u(k) = uM(k);
                ++g.monotone_nodes;
            }
    }
    g.min_second_difference = min_second(lat, u, ub);

    g.u = Vec::Constant(static_cast<int>(g.nodes.size()), ub);
    g.w = Vec::Constant(static_cast<int>(g.nodes.size()), vb);
    for (int k = 0; k < n; ++k) {
        g.u(lat.node[k]) = u(k);
        g.w(lat.node[k]) = std::pow(-u(k), p);
    }
}

// Keys cubic convolution kernel (a = -1/2) and its derivatives.
std::array<double, 4> keys(double x) {
    const double ax = std::abs(x), sg = x < 0 ? -1.0 : 1.0;
    if (ax <= 1)
        return {1.5 * ax * ax * ax - 2.5 * ax * ax + 1, sg * (4.5 * ax * ax - 5 * ax), 9 * ax - 5, 9 * sg};
    if (ax < 2)
        return {-0.5 * ax * ax * ax + 2.5 * ax * ax - 4 * ax + 2, sg * (-1.5 * ax * ax + 5 * ax - 4), -3 * ax + 5,
                -3 * sg};
    return {0, 0, 0, 0};
}

// Natural cubic spline second derivatives for uniform knots.
Vec spline_moments(const Vec& y, double h) {
    const int n = static_cast<int>(y.size());
    Vec m = Vec::Zero(n);
    if (n < 3) return m;
    Vec c(n), d(n);
    // Thomas algorithm on h/6 m_{i-1} + 2h/3 m_i + h/6 m_{i+1} = rhs
    std::vector<double> a(n, h / 6), b(n, 2 * h / 3), cc(n, h / 6);
    for (int i = 1; i < n - 1; ++i) d(i) = (y(i + 1) - 2 * y(i) + y(i - 1)) / h;
    Vec cp(n), dp(n);
    cp(1) = cc[1] / b[1];
    dp(1) = d(1) / b[1];
    for (int i = 2; i < n - 1; ++i) {
        const double den = b[i] - a[i] * cp(i - 1);
        cp(i) = cc[i] / den;
        dp(i) = (d(i) - a[i] * dp(i - 1)) / den;
    }
    m(n - 2) = dp(n - 2);
    for (int i = n - 3; i >= 1; --i) m(i) = dp(i) - cp(i) * m(i + 1);
    return m;
}

T3 poly3(double c0, double c1, double c2, double c3, const T3& d) { return c0 + d * (c1 + d * (c2 + d * c3)); }

class NumericModel final : public PotentialModel {
public:
    NumericModel(std::shared_ptr<const CrossSectionGrid> g, double kappa) : g_(std::move(g)), kappa_(kappa) {}
    int dim() const override { return g_->cs.cone.dim; }
    double margin(const Vec& x) const override { return contains(g_->cs.cone, x); }
    double value(const Vec& x) const override { return along(x, Vec::Zero(x.size())).c[0]; }
    T3 along(const Vec& x, const Vec& v) const override {
        const auto& cs = g_->cs;
        const int N = dim(), n = cs.n();
        const T3 t(cs.w.dot(x), cs.w.dot(v));
        if (!(t.c[0] > 0)) throw UnliftablePoint("point does not meet the slice");
        std::vector<T3> q(N);
        for (int i = 0; i < N; ++i) q[i] = T3(x(i), v(i)) / t - cs.origin(i);
        Vec s0(n);
        std::vector<T3> ds(n);
        for (int a = 0; a < n; ++a) {
            T3 sa = 0.0;
            for (int i = 0; i < N; ++i) sa += cs.basis(i, a) * q[i];
            s0(a) = sa.c[0];
            ds[a] = sa - s0(a);
        }
        const T3 u = g_->eval(s0, ds);
        if (!(u.c[0] < 0)) throw NonInteriorPoint("numeric potential is undefined at this point");
        return -static_cast<double>(N) * (log(-kappa_ * u) + log(t));
    }
    Jet3 jet(const Vec& x, int order) const override { return polarized_jet(*this, x, order); }

private:
    std::shared_ptr<const CrossSectionGrid> g_;
    double kappa_;
};

double fd_canonical_log(const PotentialHandle& F, const Vec& x, double step = 0) {
    const int N = static_cast<int>(x.size());
    const double eps = step > 0 ? step : 2e-4 * x.norm();
    const double f0 = F(x);
    Mat H(N, N);
    for (int i = 0; i < N; ++i) {
        const Vec ei = eps * Vec::Unit(N, i);
        H(i, i) = (F(x + ei) - 2 * f0 + F(x - ei)) / (eps * eps);
        for (int j = 0; j < i; ++j) {
            const Vec ej = eps * Vec::Unit(N, j);
            H(i, j) = H(j, i) = (F(x + ei + ej) - F(x + ei - ej) - F(x - ei + ej) + F(x - ei - ej)) / (4 * eps * eps);
        }
    }
    Eigen::LLT<Mat> llt(H);
    if (llt.info() != Eigen::Success) return NAN;
    return 2 * llt.matrixLLT().diagonal().array().log().sum() - 2 * f0;
}

std::vector<std::vector<int>> choose(int n, int k) {
    std::vector<std::vector<int>> out;
    if (k > n) return out;
    std::vector<int> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
        out.push_back(idx);
        int i = k - 1;
        while (i >= 0 && idx[i] == n - k + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
    return out;
}

} // namespace

int CrossSectionGrid::unknowns() const {
    if (n == 1) return M - 1;
    return static_cast<int>(std::count_if(index.begin(), index.end(), [](int k) { return k >= 0; }));
}

bool CrossSectionGrid::interior_node(int k) const {
    if (n == 1) return k > 0 && k < M;
    return index[k] >= 0;
}

T3 CrossSectionGrid::eval(const Vec& s0, const std::vector<T3>& ds) const {
    if (n == 1) {
        const double L = b - a;
        const T3 z = 1.0 - 2.0 * ((s0(0) - a) + ds[0]) / L;
        if (!(std::abs(z.c[0]) < 1)) throw NonInteriorPoint("outside the cross-section");
        const T3 xi = acos(z) / M_PI;
        static thread_local const CrossSectionGrid* cached = nullptr;
        static thread_local Vec moments;
        const double hx = 1.0 / M;
        if (cached != this || moments.size() != u.size()) {
            moments = spline_moments(u, hx);
            cached = this;
        }
        const int i = std::clamp(static_cast<int>(std::floor(xi.c[0] / hx)), 0, M - 1);
        const double tau = xi.c[0] - i * hx;
        const double a0 = u(i), a1 = (u(i + 1) - u(i)) / hx - hx * (2 * moments(i) + moments(i + 1)) / 6;
        const double a2 = moments(i) / 2, a3 = (moments(i + 1) - moments(i)) / (6 * hx);
        const double u0 = a0 + tau * (a1 + tau * (a2 + tau * a3));
        const double u1 = a1 + tau * (2 * a2 + 3 * a3 * tau);
        const double u2 = a2 + 3 * a3 * tau;
        return poly3(u0, u1, u2, a3, xi - xi.c[0]);
    }
    const double fx = (s0(0) - lo(0)) / spacing, fy = (s0(1) - lo(1)) / spacing;
    const int i = static_cast<int>(std::floor(fx)), j = static_cast<int>(std::floor(fy));
    const double vb = std::pow(boundary, p);
    // derivatives of w at s0 in chart units
    double W[4][4] = {};
    for (int di = -1; di <= 2; ++di) {
        const auto kx = keys(fx - (i + di));
        for (int dj = -1; dj <= 2; ++dj) {
            const int ii = i + di, jj = j + dj;
            const double val = (ii >= 0 && jj >= 0 && ii < nx && jj < ny) ? w(ii * ny + jj) : vb;
            if (val == 0) continue;
            const auto ky = keys(fy - (j + dj));
            for (int ax = 0; ax < 4; ++ax)
                for (int ay = 0; ax + ay < 4; ++ay) W[ax][ay] += val * kx[ax] * ky[ay];
        }
    }
    for (int ax = 0; ax < 4; ++ax)
        for (int ay = 0; ax + ay < 4; ++ay) W[ax][ay] /= std::pow(spacing, ax + ay);
    const T3 &dx = ds[0], &dy = ds[1];
    T3 val = W[0][0] + W[1][0] * dx + W[0][1] * dy;
    val += 0.5 * (W[2][0] * dx * dx + 2.0 * W[1][1] * dx * dy + W[0][2] * dy * dy);
    val += (W[3][0] * dx * dx * dx + 3.0 * W[2][1] * dx * dx * dy + 3.0 * W[1][2] * dx * dy * dy +
            W[0][3] * dy * dy * dy) / 6.0;
    if (!(val.c[0] > 0)) throw NonInteriorPoint("numeric potential is undefined at this point");
    return -pow(val, 1 / p);
}

double CrossSectionGrid::eval(const Vec& s) const {
    std::vector<T3> ds(s.size(), T3(0.0));
    return eval(s, ds).c[0];
}

double CrossSectionGrid::chart_distance(const Vec& s) const {
    if (n == 1) return std::min(s(0) - a, b - s(0));
    if (!(cs.margin(s) > 0)) return -1;
    double d = INFINITY;
    for (int k = 0; k < 72; ++k) {
        const double th = 2 * M_PI * k / 72;
        Vec dir(2);
        dir << std::cos(th), std::sin(th);
        d = std::min(d, cs.ray_exit(s, dir));
    }
    return d;
}

CrossSectionGrid solve_dirichlet_ma(const CrossSection& cs, const SolveOptions& opt) {
    if (!(opt.h > 0)) throw NoConvergence("grid spacing must be positive");
    if (opt.boundary < 0) throw NoConvergence("boundary data must be non-positive");
    CrossSectionGrid g;
    g.cs = cs;
    g.n = cs.n();
    g.h = opt.h;
    g.boundary = opt.boundary;
    if (g.n == 1)
        solve_1d(g, opt);
    else if (g.n == 2)
        solve_2d(g, opt);
    else
        throw NoConvergence("the solver handles cones of dimension 2 and 3 only");
    return g;
}

RadialSolution lift_to_cone(const CrossSectionGrid& grid) {
    RadialSolution sol;
    sol.grid = std::make_shared<const CrossSectionGrid>(grid);
    const double N = grid.cs.cone.dim;
    sol.kappa = std::pow(grid.cs.w.squaredNorm() * std::pow(N, N), -1 / (2 * N));
    sol.F.model = std::make_shared<NumericModel>(sol.grid, sol.kappa);
    sol.F.alpha = -N;
    sol.F.label = "numeric";
    sol.F.cone = grid.cs.cone;

    Vec bary = Vec::Zero(grid.n);
    if (grid.n == 1) {
        bary(0) = 0.5 * (grid.a + grid.b);
    } else {
        int c = 0;
        for (std::size_t k = 0; k < grid.nodes.size(); ++k)
            if (grid.index[k] >= 0) {
                bary += grid.nodes[k];
                ++c;
            }
        bary /= c;
    }
    const double lq = fd_canonical_log(sol.F, grid.cs.to_cone(bary));
    sol.k_barycenter = sol.kappa * std::exp(-lq / (2 * N));
    return sol;
}

std::vector<Vec> solver_probes(const CrossSectionGrid& grid, int count, std::uint64_t seed, double min_distance) {
    std::vector<Vec> out;
    const auto& cs = grid.cs;
    std::uint64_t draw = 0;
    while (static_cast<int>(out.size()) < count && draw < static_cast<std::uint64_t>(count) * 1000) {
        auto eng = sample_engine(seed, draw++);
        std::uniform_real_distribution<double> U(0.0, 1.0);
        std::normal_distribution<double> Nd(0.0, 1.0);
        Vec s(grid.n);
        for (int a = 0; a < grid.n; ++a) s(a) = cs.lo(a) + U(eng) * (cs.hi(a) - cs.lo(a));
        if (grid.chart_distance(s) < min_distance) continue;
        out.push_back(cs.to_cone(s) * std::exp(0.5 * Nd(eng)));
    }
    return out;
}

double residual_sup(const RadialSolution& sol, const std::vector<Vec>& probes) {
    // exact Hessian of the interpolant; finite differences need steps far below the boundary distance
    double r = 0;
    for (const Vec& x : probes) {
        double q;
        try {
            q = canonical_residual(sol.F, x);
        } catch (const Error&) {
            q = INFINITY;
        }
        r = std::max(r, std::isfinite(q) ? q : INFINITY);
    }
    return r;
}

double refinement_defect(const RadialSolution& fine, const RadialSolution& coarse, const std::vector<Vec>& probes) {
    double d = 0;
    for (const Vec& x : probes) d = std::max(d, std::abs(fine.F(x) - coarse.F(x)));
    return d;
}

RadialSolution numeric_potential(const ConeSpec& spec, const SolveOptions& opt) {
    const ValidityReport v = validate_proper(spec);
    if (!v.proper) throw MalformedSpec("cone is not proper: " + v.reason);
    return lift_to_cone(solve_dirichlet_ma(cross_section(spec, v.witness), opt));
}

Mat boundary_rays(const ConeSpec& spec, int samples) {
    if (is_polyhedral(spec) && spec.dim <= 4) return extreme_rays(spec);
    const ValidityReport v = validate_proper(spec);
    const CrossSection cs = cross_section(spec, v.witness);
    const int n = cs.n();
    std::vector<Vec> dirs;
    if (n == 1) {
        dirs = {Vec::Ones(1), -Vec::Ones(1)};
    } else if (n == 2) {
        for (int k = 0; k < samples; ++k) {
            Vec d(2);
            d << std::cos(2 * M_PI * k / samples), std::sin(2 * M_PI * k / samples);
            dirs.push_back(d);
        }
    } else {
        auto eng = sample_engine(0x5eed, 0);
        std::normal_distribution<double> Nd(0.0, 1.0);
        for (int k = 0; k < samples; ++k) {
            Vec d(n);
            for (int a = 0; a < n; ++a) d(a) = Nd(eng);
            dirs.push_back(d / d.norm());
        }
    }
    const Vec zero = Vec::Zero(n);
    Mat R(static_cast<int>(dirs.size()), spec.dim);
    for (std::size_t k = 0; k < dirs.size(); ++k) {
        const Vec x = cs.to_cone(cs.ray_exit(zero, dirs[k]) * dirs[k]);
        R.row(static_cast<int>(k)) = x.transpose() / x.norm();
    }
    return R;
}

double simplicial_potential(const Mat& R, const Vec& x) {
    Eigen::PartialPivLU<Mat> lu(R);
    const Vec y = lu.solve(x);
    if (!(y.minCoeff() > 0)) return INFINITY;
    return -y.array().log().sum() - std::log(std::abs(lu.determinant()));
}

double facet_potential(const Mat& N, const Vec& x) {
    const Vec l = N * x;
    if (!(l.minCoeff() > 0)) return INFINITY;
    return -l.array().log().sum() + std::log(std::abs(N.determinant()));
}

SandwichBounds sandwich_bounds(const ConeSpec& spec, const Vec& x) {
    if (!(contains(spec, x) > 0)) throw NonInteriorPoint("point is not interior to the cone");
    const int N = spec.dim;
    SandwichBounds sb;
    const Mat rays = boundary_rays(spec);
    for (const auto& I : choose(static_cast<int>(rays.rows()), N)) {
        Mat R(N, N);
        for (int k = 0; k < N; ++k) R.col(k) = rays.row(I[k]).transpose();
        if (std::abs(R.determinant()) < 1e-10) continue;
        const double u = simplicial_potential(R, x);
        if (!std::isfinite(u)) continue;
        ++sb.inscribed;
        sb.upper = std::min(sb.upper, u);
        sb.inscribed_max = std::max(sb.inscribed_max, u);
    }
    if (sb.inscribed == 0) throw NoInscribedSimplex("no inscribed simplicial cone contains the point");
    const Mat normals = boundary_rays(dual_cone(spec));
    for (const auto& I : choose(static_cast<int>(normals.rows()), N)) {
        Mat Nm(N, N);
        for (int k = 0; k < N; ++k) Nm.row(k) = normals.row(I[k]);
        if (std::abs(Nm.determinant()) < 1e-10) continue;
        const double u = facet_potential(Nm, x);
        if (!std::isfinite(u)) continue;
        ++sb.circumscribed;
        sb.lower = std::max(sb.lower, u);
    }
    return sb;
}

void write_grid_csv(const RadialSolution& sol, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw Error("cannot write " + path);
    const auto& g = *sol.grid;
    f << std::setprecision(17);
    f << "# cone," << cone_to_json(g.cs.cone) << "\n";
    f << "# w";
    for (int i = 0; i < g.cs.w.size(); ++i) f << "," << g.cs.w(i);
    f << "\n# h," << g.h << "\n# spacing," << g.spacing << "\n# p," << g.p << "\n# kappa," << sol.kappa
      << "\n# k_barycenter," << sol.k_barycenter << "\n# residual," << g.residual << "\n# monotone_nodes,"
      << g.monotone_nodes << "\n";
    f << (g.n == 1 ? "s,mask,u\n" : "s1,s2,mask,u\n");
    for (std::size_t k = 0; k < g.nodes.size(); ++k) {
        for (int a = 0; a < g.n; ++a) f << g.nodes[k](a) << ",";
        f << (g.interior_node(static_cast<int>(k)) ? 1 : 0) << "," << g.u(static_cast<int>(k)) + 0.0 << "\n";
    }
}

} // namespace conecanon
