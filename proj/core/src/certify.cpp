#include "conecanon/certify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "conecanon/errors.hpp"
#include "conecanon/random.hpp"
#include "conecanon/sampling.hpp"

namespace conecanon {

namespace {

std::string fmt_point(const Vec& x) {
    std::ostringstream os;
    os.precision(17);
    os << "(";
    for (int i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x(i);
    os << ")";
    return os.str();
}

Eigen::LLT<Mat> factor(const Mat& g) {
    Eigen::LLT<Mat> llt(g);
    if (llt.info() != Eigen::Success) throw DegenerateHessian("Hessian is not positive definite");
    return llt;
}

double nu_of(const PotentialHandle& F) { return F.alpha ? -*F.alpha : static_cast<double>(F.dim()); }

// Candidate directions: radial, g^{-1} dF, a coordinate axis, then random.
std::vector<Vec> base_directions(const Jet3& j, const Vec& x, int count, std::uint64_t seed, std::uint64_t index,
                                 const Eigen::LLT<Mat>& llt) {
    const int n = static_cast<int>(x.size());
    std::vector<Vec> dirs;
    dirs.push_back(x);
    dirs.push_back(llt.solve(j.grad));
    dirs.push_back(Vec::Unit(n, static_cast<int>(index % static_cast<std::uint64_t>(n))));
    auto eng = sample_engine(seed, index);
    while (static_cast<int>(dirs.size()) < count) dirs.push_back(random_direction(eng, n));
    return dirs;
}

// Tensor power iteration for max |F_ijk u^i u^j u^k| on the g-unit sphere.
Vec cubic_ascent(const Jet3& j, const Eigen::LLT<Mat>& llt, Vec v, int steps) {
    const Mat L = llt.matrixL();
    Vec u = L.transpose() * v;
    u /= u.norm();
    auto lift = [&](const Vec& w) -> Vec { return L.transpose().triangularView<Eigen::Upper>().solve(w); };
    for (int s = 0; s < steps; ++s) {
        const Vec vv = lift(u);
        const Vec grad = j.third_contract(vv) * vv;                    // F_ijk v^j v^k
        Vec next = L.triangularView<Eigen::Lower>().solve(grad);       // whitened
        const double nrm = next.norm();
        if (!(nrm > 0)) break;
        next /= nrm;
        if (next.dot(u) < 0) next = -next;
        if ((next - u).norm() < 1e-13) {
            u = next;
            break;
        }
        u = next;
    }
    return lift(u);
}

// Lawson-Hanson non-negative least squares: min |C mu - d|, mu >= 0.
Vec nnls(const Mat& C, const Vec& d) {
    const int m = static_cast<int>(C.cols());
    Vec mu = Vec::Zero(m);
    std::vector<bool> passive(m, false);
    const double tol = 1e-12 * (1 + C.cwiseAbs().maxCoeff() * (1 + d.norm()));
    for (int outer = 0; outer < 3 * m + 10; ++outer) {
        const Vec w = C.transpose() * (d - C * mu);
        int jmax = -1;
        double best = tol;
        for (int j = 0; j < m; ++j)
            if (!passive[j] && w(j) > best) {
                best = w(j);
                jmax = j;
            }
        if (jmax < 0) break;
        passive[jmax] = true;
        for (int inner = 0; inner < 3 * m + 10; ++inner) {
            std::vector<int> P;
            for (int j = 0; j < m; ++j)
                if (passive[j]) P.push_back(j);
            Mat CP(C.rows(), static_cast<int>(P.size()));
            for (std::size_t k = 0; k < P.size(); ++k) CP.col(static_cast<int>(k)) = C.col(P[k]);
            const Vec z = CP.completeOrthogonalDecomposition().solve(d);
            bool ok = true;
            for (double zk : z)
                if (zk <= 0) ok = false;
            if (ok) {
                mu.setZero();
                for (std::size_t k = 0; k < P.size(); ++k) mu(P[k]) = z(static_cast<int>(k));
                break;
            }
            double alpha = 1;
            for (std::size_t k = 0; k < P.size(); ++k) {
                const double zk = z(static_cast<int>(k));
                if (zk <= 0) alpha = std::min(alpha, mu(P[k]) / (mu(P[k]) - zk));
            }
            for (std::size_t k = 0; k < P.size(); ++k) {
                mu(P[k]) += alpha * (z(static_cast<int>(k)) - mu(P[k]));
                if (mu(P[k]) <= 1e-15) {
                    mu(P[k]) = 0;
                    passive[P[k]] = false;
                }
            }
        }
    }
    return mu;
}

std::vector<std::vector<int>> subsets(int d, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    if (k > d) return out;
    while (true) {
        out.push_back(idx);
        int i = k - 1;
        while (i >= 0 && idx[i] == d - k + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
    return out;
}

// p(x) = sum_I det(A_I)^2 prod_{a not in I} l_a(x)^2 and its gradient.
struct CauchyBinet {
    const PolyDomain& P;
    std::vector<std::vector<int>> outside;
    std::vector<double> weight;

    explicit CauchyBinet(const PolyDomain& dom) : P(dom) {
        const int d = static_cast<int>(dom.A.rows()), n = dom.dim();
        for (const auto& I : subsets(d, n)) {
            Mat AI(n, n);
            for (int k = 0; k < n; ++k) AI.row(k) = dom.A.row(I[k]);
            const double det = AI.determinant();
            if (det * det < 1e-28) continue;
            std::vector<int> out;
            for (int a = 0; a < d; ++a)
                if (std::find(I.begin(), I.end(), a) == I.end()) out.push_back(a);
            outside.push_back(out);
            weight.push_back(det * det);
        }
    }
    double value(const Vec& x) const {
        const Vec l = P.A * x + P.b;
        double s = 0;
        for (std::size_t t = 0; t < weight.size(); ++t) {
            double pr = weight[t];
            for (int a : outside[t]) pr *= l(a) * l(a);
            s += pr;
        }
        return s;
    }
    Vec grad(const Vec& x) const {
        const Vec l = P.A * x + P.b;
        Vec g = Vec::Zero(x.size());
        for (std::size_t t = 0; t < weight.size(); ++t)
            for (int b : outside[t]) {
                double pr = weight[t] * 2 * l(b);
                for (int a : outside[t])
                    if (a != b) pr *= l(a) * l(a);
                g += pr * P.A.row(b).transpose();
            }
        return g;
    }
};

// Minimize p - mu sum log l over P for a decreasing sequence of mu, from x.
Vec barrier_descent(const PolyDomain& P, const CauchyBinet& p, Vec x, double scale) {
    const int n = P.dim();
    const double h = 1e-6 * (1 + x.norm());
    auto phi = [&](const Vec& y, double mu) {
        const Vec l = P.A * y + P.b;
        if (l.minCoeff() <= 0) return static_cast<double>(INFINITY);
        return p.value(y) - mu * l.array().log().sum();
    };
    for (double mu = 0.1 * scale; mu > 1e-17 * scale; mu *= 0.1) {
        for (int it = 0; it < 60; ++it) {
            const Vec l = P.A * x + P.b;
            Vec g = p.grad(x);
            Mat Hm(n, n);
            for (int k = 0; k < n; ++k) {
                const Vec e = Vec::Unit(n, k) * h;
                Hm.col(k) = (p.grad(x + e) - p.grad(x - e)) / (2 * h);
            }
            Hm = 0.5 * (Hm + Hm.transpose()).eval();
            for (int a = 0; a < P.A.rows(); ++a) {
                const Vec ar = P.A.row(a).transpose();
                g -= mu * ar / l(a);
                Hm += mu * ar * ar.transpose() / (l(a) * l(a));
            }
            // fall back to gradient steps where p is not convex
            Eigen::SelfAdjointEigenSolver<Mat> es(Hm);
            Vec ev = es.eigenvalues();
            const double floor = 1e-12 * (1 + ev.cwiseAbs().maxCoeff());
            for (int k = 0; k < n; ++k) ev(k) = std::max(std::abs(ev(k)), floor);
            const Vec dx = -(es.eigenvectors() * ((es.eigenvectors().transpose() * g).array() / ev.array()).matrix());
            const double f0 = phi(x, mu);
            double t = 1;
            bool moved = false;
            for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
                const Vec y = x + t * dx;
                if (phi(y, mu) <= f0 + 1e-4 * t * g.dot(dx)) {
                    x = y;
                    moved = true;
                    break;
                }
            }
            if (!moved || std::sqrt(std::abs(g.dot(dx))) < 1e-13 * std::sqrt(scale)) break;
        }
    }
    return x;
}

} // namespace

double self_concordance_ratio(const PotentialHandle& F, const Vec& x, const Vec& v) {
    const T3 t = F.along(x, v);
    const double d2 = t.d2(), d3 = t.d3();
    if (!(d2 > 0)) throw DegenerateHessian("Hessian is not positive along the direction");
    return d3 * d3 / (4 * d2 * d2 * d2);
}

double barrier_parameter_ratio(const PotentialHandle& F, const Vec& x, const Vec& v) {
    const T3 t = F.along(x, v);
    const double d1 = t.d1(), d2 = t.d2();
    if (!(d2 > 0)) throw DegenerateHessian("Hessian is not positive along the direction");
    return d1 * d1 / d2;
}

CertReport self_concordance_sup(const PotentialHandle& F, const std::vector<Vec>& samples, int dirs_per_sample,
                                std::uint64_t seed, double tol) {
    CertReport r;
    r.property = "self_concordance";
    r.seed = seed;
    r.threshold = 1 + tol;
    r.statistic = -INFINITY;
    const int nd = std::max(dirs_per_sample, 4);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const Vec& x = samples[i];
        const Jet3 j = eval_jet3(F, x, 3);
        const auto llt = factor(j.hess);
        auto dirs = base_directions(j, x, nd - 1, seed, i, llt);
        std::size_t best = 0;
        double bestv = -INFINITY;
        std::vector<double> vals;
        for (std::size_t k = 0; k < dirs.size(); ++k) {
            vals.push_back(self_concordance_ratio(F, x, dirs[k]));
            if (vals.back() > bestv) {
                bestv = vals.back();
                best = k;
            }
        }
        dirs.push_back(cubic_ascent(j, llt, dirs[best], 30));
        vals.push_back(self_concordance_ratio(F, x, dirs.back()));
        for (std::size_t k = 0; k < dirs.size(); ++k) {
            ++r.directions;
            if (vals[k] > r.statistic) {
                r.statistic = vals[k];
                r.worst_x = x;
                r.worst_v = dirs[k];
            }
        }
        ++r.samples;
    }
    r.pass = r.statistic <= r.threshold;
    return r;
}

CertReport barrier_parameter_sup(const PotentialHandle& F, const std::vector<Vec>& samples, int dirs_per_sample,
                                 std::uint64_t seed, double tol) {
    CertReport r;
    r.property = "barrier_parameter";
    r.seed = seed;
    r.threshold = nu_of(F) * (1 + tol);
    r.statistic = -INFINITY;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const Vec& x = samples[i];
        const Jet3 j = eval_jet3(F, x, 2);
        const auto llt = factor(j.hess);
        for (const Vec& v : base_directions(j, x, std::max(dirs_per_sample, 3), seed, i, llt)) {
            const double q = barrier_parameter_ratio(F, x, v);
            ++r.directions;
            if (q > r.statistic) {
                r.statistic = q;
                r.worst_x = x;
                r.worst_v = v;
            }
        }
        ++r.samples;
    }
    r.pass = r.statistic <= r.threshold;
    return r;
}

CertReport subsolution_check(const PotentialHandle& G, const std::vector<Vec>& samples, double tol) {
    CertReport r;
    r.property = "subsolution";
    r.threshold = 1 - tol;
    r.statistic = INFINITY;
    for (const Vec& x : samples) {
        const Jet3 j = eval_jet3(G, x, 2);
        Eigen::LLT<Mat> llt(j.hess);
        if (llt.info() != Eigen::Success) throw NonConvexWitness("Hessian not positive definite at " + fmt_point(x));
        const double logdet = 2 * llt.matrixLLT().diagonal().array().log().sum();
        const double q = std::exp(logdet - 2 * j.value);
        if (q < r.statistic) {
            r.statistic = q;
            r.worst_x = x;
        }
        ++r.samples;
    }
    r.pass = r.statistic >= r.threshold;
    return r;
}

CertReport schwarz_dominance(const PotentialHandle& F_ref, const PotentialHandle& G, const std::vector<Vec>& samples,
                             double tol) {
    if (F_ref.dim() != G.dim()) throw DomainMismatch("potentials live in different dimensions");
    CertReport r;
    r.property = "dominance";
    r.threshold = tol;
    r.statistic = -INFINITY;
    for (const Vec& x : samples) {
        if (!G.interior(x)) continue;
        if (!F_ref.interior(x)) throw DomainMismatch("sample in the domain of G lies outside the reference domain");
        const double d = G(x) - F_ref(x);
        if (d > r.statistic) {
            r.statistic = d;
            r.worst_x = x;
        }
        ++r.samples;
    }
    r.pass = r.samples > 0 && r.statistic <= r.threshold;
    return r;
}

double PolyDomain::margin(const Vec& x) const {
    const Vec l = A * x + b;
    return (l.array() / A.rowwise().norm().array()).minCoeff();
}

namespace {

void check_rank(const PolyDomain& P) {
    const int n = P.dim();
    Eigen::JacobiSVD<Mat> svd(P.A);
    const Vec sv = svd.singularValues();
    if (sv.size() < n || sv(n - 1) <= 1e-12 * sv(0)) throw RankDeficient("facet normals do not span");
}

// Bounded iff some strictly positive combination of the normals vanishes.
bool is_bounded(const PolyDomain& P) {
    const int d = static_cast<int>(P.A.rows());
    const Mat C = (P.A.array().colwise() / P.A.rowwise().norm().array()).matrix().transpose();
    const Vec mu = nnls(C, -C * Vec::Ones(d));
    return (C * (Vec::Ones(d) + mu)).norm() <= 1e-9 * (1 + mu.sum());
}

// Phase I on (x, s): minimize s subject to l_hat(x) + s > 0, s > -1, and |x| < R.
Vec feasible_point(const PolyDomain& P) {
    const int n = P.dim(), d = static_cast<int>(P.A.rows());
    const Vec norms = P.A.rowwise().norm();
    const Mat Ah = P.A.array().colwise() / norms.array();
    const Vec bh = P.b.array() / norms.array();
    Vec x = Ah.completeOrthogonalDecomposition().solve(-bh);
    double s = std::max(0.0, -(Ah * x + bh).minCoeff()) + 1;
    const double R2 = std::pow(10 * (1 + x.norm() + bh.cwiseAbs().maxCoeff()), 2);
    for (double t = 1; t < 1e12; t *= 4) {
        for (int it = 0; it < 60; ++it) {
            const Vec l = Ah * x + bh + s * Vec::Ones(d);
            Vec g = Vec::Zero(n + 1);
            Mat H = Mat::Zero(n + 1, n + 1);
            g(n) = t - 1 / (s + 1);
            H(n, n) = 1 / ((s + 1) * (s + 1));
            const double room = R2 - x.squaredNorm();
            g.head(n) += 2 * x / room;
            H.topLeftCorner(n, n) += 2 * Mat::Identity(n, n) / room + 4 * x * x.transpose() / (room * room);
            for (int a = 0; a < d; ++a) {
                Vec ar(n + 1);
                ar << Ah.row(a).transpose(), 1.0;
                g -= ar / l(a);
                H += ar * ar.transpose() / (l(a) * l(a));
            }
            const Vec dz = -H.ldlt().solve(g);
            const double dec = std::sqrt(std::max(0.0, -g.dot(dz)));
            const double step = dec > 0.25 ? 1 / (1 + dec) : 1.0;
            x += step * dz.head(n);
            s += step * dz(n);
            if (dec < 1e-9) break;
        }
        if (s < 0) break;
    }
    if ((Ah * x + bh).minCoeff() <= 0) throw UnboundedDomain("polyhedron has empty interior");
    return x;
}

} // namespace

Vec analytic_center(const PolyDomain& P) {
    check_rank(P);
    if (!is_bounded(P)) throw UnboundedDomain("unbounded polyhedron has no analytic center");
    const int n = P.dim(), d = static_cast<int>(P.A.rows());
    Vec x = feasible_point(P);
    for (int it = 0; it < 100; ++it) {
        const Vec l = P.A * x + P.b;
        Vec g = Vec::Zero(n);
        Mat H = Mat::Zero(n, n);
        for (int a = 0; a < d; ++a) {
            const Vec ar = P.A.row(a).transpose();
            g -= ar / l(a);
            H += ar * ar.transpose() / (l(a) * l(a));
        }
        const Vec dx = -H.ldlt().solve(g);
        const double dec = std::sqrt(std::max(0.0, -g.dot(dx)));
        x += (dec > 0.25 ? 1 / (1 + dec) : 1.0) * dx;
        if (dec < 1e-14) break;
    }
    return x;
}

PotentialHandle polyhedral_log_barrier(const PolyDomain& P, PolyBarrierInfo* info) {
    if (P.A.rows() != P.b.size()) throw DimensionMismatch("A and b disagree");
    check_rank(P);
    const Vec center = is_bounded(P) ? analytic_center(P) : feasible_point(P);
    const CauchyBinet p(P);
    const int n = P.dim(), d = static_cast<int>(P.A.rows());
    const double scale = p.value(center);

    double best = p.value(center);
    Vec arg = center;
    auto consider = [&](const Vec& y) {
        if ((P.A * y + P.b).minCoeff() < -1e-12 * (1 + y.norm())) return;
        const double v = p.value(y);
        if (v < best) {
            best = v;
            arg = y;
        }
    };
    std::vector<Vec> starts{center};
    for (const auto& I : subsets(d, n)) {
        Mat AI(n, n);
        Vec bI(n);
        for (int k = 0; k < n; ++k) {
            AI.row(k) = P.A.row(I[k]);
            bI(k) = P.b(I[k]);
        }
        Eigen::FullPivLU<Mat> lu(AI);
        if (!lu.isInvertible()) continue;
        const Vec v = lu.solve(-bI);
        if ((P.A * v + P.b).minCoeff() < -1e-10 * (1 + v.norm())) continue;
        consider(v);
        starts.push_back(0.5 * (v + center));
        starts.push_back(0.9 * v + 0.1 * center);
    }
    for (const Vec& x0 : starts) {
        const Vec y = barrier_descent(P, p, x0, scale);
        consider(barrier_descent(P, p, y, p.value(y)));
    }

    // on unbounded domains the infimum must still be attained
    if (!(best > 0) || arg.norm() > 1e8 * (1 + center.norm()))
        throw UnboundedDomain("infimum of the Hessian bound is not attained");
    const double c = -0.5 * std::log(best);
    if (info) {
        info->constant = c;
        info->inf_value = best;
        info->argmin = arg;
        info->center = center;
    }
    const Mat A = P.A;
    const Vec b = P.b;
    UserFunction f = [A, b, c](const std::vector<T3>& z) {
        T3 s = -c;
        for (int a = 0; a < A.rows(); ++a) {
            T3 l = b(a);
            for (int k = 0; k < A.cols(); ++k) l += A(a, k) * z[k];
            s -= log(l);
        }
        return s;
    };
    PotentialHandle G = user_potential(n, f, [P](const Vec& x) { return P.margin(x); }, std::nullopt, "polyhedral");
    G.constant = c;
    return G;
}

} // namespace conecanon
