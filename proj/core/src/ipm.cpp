#include "conecanon/ipm.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "conecanon/errors.hpp"
#include "json.hpp"

namespace conecanon {

namespace {

using json = nlohmann::json;

Vec vec_from(const json& j) {
    Vec v(static_cast<int>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<int>(i)) = j[i].get<double>();
    return v;
}

struct Centered {
    Vec x;
    double decrement = 0;
    int newton = 0;
};

// Damped Newton to decrement <= threshold; stop(x, mu) ends early (phase I).
template <class Stop>
Centered center(const PotentialHandle& F, const ConicProgram& prog, Vec x, double mu, double threshold, double scale,
                const Stop& stop) {
    Centered c;
    for (int it = 0; it < 500; ++it) {
        const NewtonStep s = newton_direction(F, prog, x, mu);
        c.decrement = s.decrement;
        if (s.decrement <= threshold || stop(x, mu)) {
            c.x = x;
            return c;
        }
        double t = 1 / (1 + s.decrement);
        Vec xn = x + t * s.step;
        while (!(F.margin(xn) > 0) && t > 1e-12) {
            t *= 0.5;
            xn = x + t * s.step;
        }
        if (!(F.margin(xn) > 0)) throw SingularKKT("Newton step cannot stay interior");
        x = xn;
        ++c.newton;
        if (!(x.norm() <= 1e12 * scale)) throw Unbounded("iterates diverge along the central path");
    }
    throw Unbounded("centering did not converge; the objective appears unbounded below");
}

// mu making the start point as central as possible: minimize the decrement over 1/mu.
double initial_mu(const PotentialHandle& F, const ConicProgram& prog, const Vec& x) {
    const Mat H = F.jet(x, 2).hess;
    ConicProgram p0 = prog;
    p0.c = Vec::Zero(prog.c.size());
    const Vec dF = newton_direction(F, p0, x, 1.0).step;
    const Vec dboth = newton_direction(F, prog, x, 1.0).step;
    const Vec dc = dboth - dF;
    const double cc = dc.dot(H * dc);
    if (!(cc > 1e-300)) return 1.0;
    const double s = -dF.dot(H * dc) / cc;
    return s > 0 ? 1 / s : 1.0;
}

struct PathResult {
    Vec x;
    double mu0 = 0, mu = 0;
    int outer = 0, newton = 0;
    bool stopped = false;
    std::vector<IpmRecord> trace;
};

template <class Stop>
PathResult follow(const ConicProgram& prog, const PotentialHandle& F, const Vec& x0, double nu, double eps,
                  const IpmOptions& opt, const Stop& stop) {
    PathResult r;
    const double scale = 1 + x0.norm();
    r.mu0 = opt.mu0 > 0 ? opt.mu0 : initial_mu(F, prog, x0);
    double mu = r.mu0;
    Centered c = center(F, prog, x0, mu, opt.center, scale, stop);
    r.newton += c.newton;
    auto record = [&](const Vec& x) {
        IpmRecord rec;
        rec.outer = r.outer;
        rec.mu = mu;
        rec.decrement = c.decrement;
        rec.objective = prog.c.dot(x);
        rec.margin = F.margin(x) / x.norm();
        rec.newton = c.newton;
        r.trace.push_back(rec);
    };
    record(c.x);
    while (nu * mu > eps && !stop(c.x, mu)) {
        if (r.outer >= opt.max_outer) throw Unbounded("outer iteration limit reached");
        mu *= 1 - opt.theta / std::sqrt(nu);
        c = center(F, prog, c.x, mu, opt.center, scale, stop);
        r.newton += c.newton;
        ++r.outer;
        record(c.x);
    }
    r.stopped = stop(c.x, mu);
    r.x = c.x;
    r.mu = mu;
    return r;
}

double nu_of(const PotentialHandle& F) { return F.alpha ? -*F.alpha : F.dim(); }

Vec phase_one(const ConicProgram& prog, const PotentialHandle& F, const IpmOptions& opt, int& outer) {
    const int N = prog.cone.dim;
    Vec e = interior_point(prog.cone);
    e /= e.norm();
    const Vec r = prog.b - prog.A * e;
    if (r.norm() <= 1e-12 * std::max(1.0, prog.b.norm())) return e;
    // A x + tau r = b with tau = 2 - sigma, sigma > 0; maximize sigma until tau < 0
    ConicProgram aux;
    aux.cone = ConeSpec::product({prog.cone, ConeSpec::orthant(1)});
    aux.A.resize(prog.A.rows(), N + 1);
    aux.A << prog.A, -r;
    aux.b = prog.b - 2 * r;
    aux.c = Vec::Zero(N + 1);
    aux.c(N) = -1;
    const PotentialHandle G = product_potential({F, orthant_potential(1)});
    Vec z(N + 1);
    z << e, 1.0;
    const double nu = nu_of(G);
    IpmOptions o = opt;
    o.mu0 = 0;
    // sigma* <= sigma + nu mu on the central path, so sigma + nu mu < 2 certifies tau* > 0
    auto done = [&](const Vec& v, double mu) {
        if (v(N) + nu * mu * (1 + 1e-6) < 2) throw Infeasible("phase-I optimum is positive: no strictly feasible point");
        return v(N) > 2;
    };
    const PathResult p = follow(aux, G, z, nu, 1e-12, o, done);
    outer = p.outer;
    if (!p.stopped) throw Infeasible("phase-I optimum is positive: no strictly feasible point");
    const double tau = 2 - p.x(N);
    return (p.x.head(N) - tau * e) / (1 - tau);
}

} // namespace

ConicProgram program_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& ex) {
        throw MalformedSpec(std::string("program is not valid JSON: ") + ex.what());
    }
    for (const char* key : {"c", "A", "b", "cone"})
        if (!j.contains(key)) throw MalformedSpec(std::string("program is missing \"") + key + "\"");
    ConicProgram p;
    p.c = vec_from(j["c"]);
    p.b = vec_from(j["b"]);
    const auto& A = j["A"];
    p.A.resize(static_cast<int>(A.size()), p.c.size());
    for (std::size_t i = 0; i < A.size(); ++i) {
        if (A[i].size() != static_cast<std::size_t>(p.c.size())) throw DimensionMismatch("row of A has wrong length");
        p.A.row(static_cast<int>(i)) = vec_from(A[i]).transpose();
    }
    p.cone = cone_from_json(j["cone"].dump());
    if (p.cone.dim != p.c.size()) throw DimensionMismatch("cone dimension differs from c");
    if (p.b.size() != p.A.rows()) throw DimensionMismatch("b length differs from the rows of A");
    if (j.contains("x0")) p.x0 = vec_from(j["x0"]);
    return p;
}

ConicProgram load_program(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw MalformedSpec("cannot read " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return program_from_json(ss.str());
}

NewtonStep newton_direction(const PotentialHandle& F, const ConicProgram& prog, const Vec& x, double mu) {
    if (!(F.margin(x) > 0)) throw NonInteriorPoint("Newton step needs a strictly feasible point");
    const Jet3 j = F.jet(x, 2);
    const int N = static_cast<int>(x.size()), m = static_cast<int>(prog.A.rows());
    const Vec g = prog.c / mu + j.grad;
    // null-space elimination: never inverts H, whose condition grows like 1/mu^2 near the optimum
    Mat Z = Mat::Identity(N, N);
    Vec dp = Vec::Zero(N);
    if (m > 0) {
        Eigen::HouseholderQR<Mat> qr(prog.A.transpose());
        const Mat Q = qr.householderQ();
        const Mat R = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
        if (!(R.diagonal().cwiseAbs().minCoeff() > 1e-13 * R.diagonal().cwiseAbs().maxCoeff()))
            throw SingularKKT("equality constraints are rank deficient");
        dp = Q.leftCols(m) * R.transpose().triangularView<Eigen::Lower>().solve(prog.b - prog.A * x);
        Z = Q.rightCols(N - m);
    }
    NewtonStep s;
    if (Z.cols() == 0) {
        s.step = dp;
    } else {
        const Mat Hr = Z.transpose() * j.hess * Z;
        Eigen::LDLT<Mat> ldlt(Hr);
        if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().minCoeff() > 0))
            throw SingularKKT("reduced Hessian is not positive definite");
        s.step = dp - Z * ldlt.solve(Z.transpose() * (g + j.hess * dp));
    }
    s.decrement = std::sqrt(std::max(0.0, s.step.dot(j.hess * s.step)));
    return s;
}

IpmResult solve_conic(const ConicProgram& prog, const PotentialHandle& F, const IpmOptions& opt) {
    if (prog.A.rows() > 0) {
        Eigen::FullPivLU<Mat> lu(prog.A);
        if (lu.rank() < prog.A.rows()) throw SingularKKT("equality constraints are not of full row rank");
    }
    IpmResult res;
    res.nu = nu_of(F);
    res.eps_used = opt.eps;
    if (opt.hessian_noise > 0 && 10 * opt.hessian_noise > opt.eps) {
        res.eps_used = 10 * opt.hessian_noise;
        res.flagged = true;
    }
    Vec x0;
    if (prog.x0) {
        x0 = *prog.x0;
        if (!(F.margin(x0) > 0)) throw NonInteriorPoint("start point is not interior");
        if ((prog.A * x0 - prog.b).norm() > 1e-10 * std::max(1.0, prog.b.norm()))
            throw Infeasible("start point violates the equality constraints");
    } else {
        x0 = phase_one(prog, F, opt, res.phase1_outer);
    }
    const PathResult p = follow(prog, F, x0, res.nu, res.eps_used, opt, [](const Vec&, double) { return false; });
    res.x = p.x;
    res.mu_final = p.mu;
    res.gap_bound = res.nu * p.mu;
    res.outer = p.outer;
    res.newton = p.newton;
    res.trace = p.trace;
    res.bound = static_cast<int>(std::ceil(opt.K * std::sqrt(res.nu) * std::log(std::max(1.0, res.nu * p.mu0 / res.eps_used))));
    res.feasibility = (prog.A * p.x - prog.b).norm() / std::max(1.0, prog.b.norm());
    res.status = res.flagged ? "solved (numeric barrier: eps raised to its noise floor)" : "solved";
    return res;
}

void write_trace_csv(const IpmResult& res, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw Error("cannot write " + path);
    f << std::setprecision(17) << "outer,mu,decrement,objective,margin,newton\n";
    for (const auto& r : res.trace)
        f << r.outer << "," << r.mu << "," << r.decrement << "," << r.objective << "," << r.margin << "," << r.newton << "\n";
}

ConicProgram reparametrize(const ConicProgram& prog, const Mat& M) {
    const Mat Minv = M.inverse();
    ConicProgram p;
    p.c = Minv.transpose() * prog.c;
    p.A = prog.A * Minv;
    p.b = prog.b;
    p.cone = ConeSpec::linear_image(prog.cone, M);
    if (prog.x0) p.x0 = M * *prog.x0;
    return p;
}

} // namespace conecanon
