// conecanon: command-line front end.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "conecanon/certify.hpp"
#include "conecanon/duality.hpp"
#include "conecanon/errors.hpp"
#include "conecanon/foliation.hpp"
#include "conecanon/geometry.hpp"
#include "conecanon/ipm.hpp"
#include "conecanon/ma_solver.hpp"
#include "conecanon/sampling.hpp"
#include "json.hpp"
#include "suite.hpp"

using namespace conecanon;
using ojson = nlohmann::ordered_json;

namespace {

// Bad input rather than a failed property: exit 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Config {
    std::string spec, prog, domain, out, trace, csv, json_path, property = "nu", check = "identity";
    std::string h = "1/64";
    std::vector<double> at, anchor;
    double tol = -1, eps = 1e-8, theta = 0.1, level = 0, scale = 1, limit = -1;
    int samples = -1, dirs = 8, res = 16, order = 0;
    std::uint64_t seed = 1;
    bool quick = false, json = false;
};

struct Report {
    ojson j;
    std::vector<std::string> lines;
    bool pass = true;
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v == 0 ? 0.0 : v);
    return buf;
}

std::string fmt(const Vec& v) {
    std::string s;
    for (int i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v(i));
    return s;
}

ojson arr(const Vec& v) {
    ojson a = ojson::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v(i) == 0 ? 0.0 : v(i));
    return a;
}

Vec vec(const std::vector<double>& v) {
    return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

double parse_h(const std::string& s) {
    const auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return std::stod(s);
        return std::stod(s.substr(0, slash)) / std::stod(s.substr(slash + 1));
    } catch (const std::exception&) {
        throw UsageError("cannot parse --h " + s);
    }
}

ConeSpec need_spec(const Config& cfg) {
    if (cfg.spec.empty()) throw UsageError("--spec is required");
    return load_cone(cfg.spec);
}

SolveOptions solve_options(const Config& cfg) {
    SolveOptions o;
    o.h = parse_h(cfg.h);
    if (cfg.tol > 0) o.tol = cfg.tol;
    return o;
}

// Closed form when one exists, otherwise the lifted numeric solution.
struct Handle {
    PotentialHandle F;
    std::shared_ptr<RadialSolution> numeric;
};

Handle handle_for(const ConeSpec& s, const Config& cfg) {
    if (has_closed_form(s)) {
        std::optional<Vec> anchor;
        if (!cfg.anchor.empty()) anchor = vec(cfg.anchor);
        return {canonical_potential(s, anchor), nullptr};
    }
    auto sol = std::make_shared<RadialSolution>(numeric_potential(s, solve_options(cfg)));
    return {sol->F, sol};
}

// Closed forms: seeded cone samples. Numeric handles: probes well inside the solved chart.
std::vector<Vec> points_for(const ConeSpec& s, const Handle& H, int count, std::uint64_t seed, double decades) {
    if (H.numeric) return solver_probes(*H.numeric->grid, count, seed, 5 * H.numeric->grid->spacing);
    SampleOptions so;
    so.count = count;
    so.seed = seed;
    so.decades = decades;
    return sample_cone(s, so);
}

Report cmd_validate(const Config& cfg) {
    Report r;
    const ConeSpec s = need_spec(cfg);
    const ValidityReport v = validate_proper(s);
    r.pass = v.proper;
    r.j["variant"] = variant_name(s.variant);
    r.j["dim"] = s.dim;
    r.j["proper"] = v.proper;
    r.j["closed_form"] = has_closed_form(s);
    if (v.proper) {
        r.j["dual_witness"] = arr(v.witness);
        r.j["interior_point"] = arr(v.interior);
        r.j["witness_margin"] = v.margin;
        r.lines.push_back("proper " + variant_name(s.variant) + " cone in dimension " + std::to_string(s.dim));
        r.lines.push_back("dual witness " + fmt(v.witness) + " margin " + fmt(v.margin));
        r.lines.push_back("interior point " + fmt(v.interior));
    } else {
        r.j["reason"] = v.reason;
        r.lines.push_back("not proper: " + v.reason);
    }
    return r;
}

Report cmd_potential(const Config& cfg) {
    Report r;
    const ConeSpec s = need_spec(cfg);
    if (cfg.at.empty()) throw UsageError("--at is required");
    const Vec x = vec(cfg.at);
    if (x.size() != s.dim) throw UsageError("--at has " + std::to_string(x.size()) + " coordinates, cone has dimension " +
                                            std::to_string(s.dim));
    const Handle H = handle_for(s, cfg);
    if (!H.F.interior(x)) throw UsageError("--at " + fmt(x) + " is not interior to the cone");
    const Jet3 j = H.F.jet(x, std::max(cfg.order, 0));
    r.j["label"] = H.F.label;
    r.j["x"] = arr(x);
    r.j["F"] = j.value == 0 ? 0.0 : j.value;
    r.lines.push_back("F=" + fmt(j.value));
    if (cfg.order >= 1) {
        r.j["gradient"] = arr(j.grad);
        r.lines.push_back("dF=" + fmt(j.grad));
    }
    if (cfg.order >= 2) {
        ojson rows = ojson::array();
        for (int i = 0; i < j.hess.rows(); ++i) {
            rows.push_back(arr(j.hess.row(i).transpose()));
            r.lines.push_back("d2F[" + std::to_string(i) + "]=" + fmt(Vec(j.hess.row(i).transpose())));
        }
        r.j["hessian"] = rows;
        const double res = canonical_residual(H.F, x);
        r.j["canonical_residual"] = res;
        r.lines.push_back("|H(F)e^-2F - 1|=" + fmt(res));
    }
    return r;
}

Report cmd_geom(const Config& cfg) {
    Report r;
    const ConeSpec s = need_spec(cfg);
    const Handle H = handle_for(s, cfg);
    const int count = cfg.samples > 0 ? cfg.samples : 100;
    const auto xs = points_for(s, H, count, cfg.seed, 1);
    const double N = s.dim, n = N - 1;
    std::ofstream csv;
    if (!cfg.csv.empty()) {
        csv.open(cfg.csv);
        if (!csv) throw UsageError("cannot write " + cfg.csv);
        csv << std::setprecision(17);
        for (int i = 0; i < s.dim; ++i) csv << "x" << i << ",";
        csv << "cond,grad_norm2,laplacian,kappa_defect,koszul_defect,scalar,scalar_defect,pick_norm2,ricci_min,ricci_max\n";
    }
    const char* names[5] = {"grad_norm2", "laplacian", "kappa", "koszul", "scalar"};
    const double tol[5] = {1e-10, 1e-8, 1e-9, 1e-10, 1e-8};
    double sup[5] = {0, 0, 0, 0, 0}, ratio[5] = {0, 0, 0, 0, 0};
    double ric_min = INFINITY, ric_max = -INFINITY, pick = 0;
    for (const Vec& x : xs) {
        const GeometryReport g = geometry_at(H.F, x);
        const Vec dF = H.F.jet(x, 1).grad;
        const double d[5] = {std::abs(g.grad_norm2 - N), std::abs(g.laplacian),
                             (g.whitened_kappa + 2 * Mat::Identity(s.dim, s.dim)).cwiseAbs().maxCoeff(),
                             (g.H - 2 * dF).norm() / dF.norm(),
                             std::abs(g.scalar - (0.25 * g.pick_norm2 - n * (n - 1) / (n + 1)))};
        for (int i = 0; i < 5; ++i) {
            sup[i] = std::max(sup[i], d[i]);
            ratio[i] = std::max(ratio[i], d[i] / (tol[i] * (1 + g.cond)));
        }
        ric_min = std::min(ric_min, g.ricci_eigs.minCoeff());
        ric_max = std::max(ric_max, g.ricci_eigs.maxCoeff());
        pick = std::max(pick, g.pick_norm2);
        if (csv)
            csv << fmt(x) << "," << g.cond << "," << g.grad_norm2 << "," << g.laplacian << "," << d[2] << "," << d[3]
                << "," << g.scalar << "," << d[4] << "," << g.pick_norm2 << "," << g.ricci_eigs.minCoeff() << ","
                << g.ricci_eigs.maxCoeff() << "\n";
    }
    r.j["label"] = H.F.label;
    r.j["samples"] = xs.size();
    ojson defects;
    for (int i = 0; i < 5; ++i) {
        const bool ok = H.numeric || ratio[i] <= 1;
        r.pass = r.pass && ok;
        defects[names[i]] = {{"sup", sup[i]}, {"limit", tol[i]}, {"worst_fraction_of_limit", ratio[i]}};
        r.lines.push_back(std::string(ok ? "ok   " : "FAIL ") + names[i] + " defect sup=" + fmt(sup[i]) +
                          " (worst fraction of tol(1+cond): " + fmt(ratio[i]) + ")");
    }
    r.j["defects"] = defects;
    r.j["ricci_eigenvalues"] = {ric_min, ric_max};
    r.j["ricci_floor"] = -(n - 1) / (n + 1);
    r.j["pick_norm2_max"] = pick;
    r.j["pick_bound"] = 4 * n * (n - 1) / (n + 1);
    r.lines.push_back("ricci eigenvalues in [" + fmt(ric_min) + ", " + fmt(ric_max) + "], floor " + fmt(-(n - 1) / (n + 1)));
    r.lines.push_back("max |A|^2 " + fmt(pick) + ", bound " + fmt(4 * n * (n - 1) / (n + 1)));
    if (H.numeric) r.lines.push_back("numeric potential: identities reported, not gated");
    return r;
}

ojson cert_json(const CertReport& c) {
    ojson j;
    j["property"] = c.property;
    j["statistic"] = c.statistic;
    j["threshold"] = c.threshold;
    j["samples"] = c.samples;
    j["directions"] = c.directions;
    j["pass"] = c.pass;
    if (c.worst_x.size()) j["worst_x"] = arr(c.worst_x);
    if (c.worst_v.size()) j["worst_v"] = arr(c.worst_v);
    return j;
}

PolyDomain load_domain(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw UsageError("cannot read " + path);
    ojson j;
    try {
        j = ojson::parse(f);
    } catch (const std::exception& e) {
        throw UsageError(path + " is not valid JSON: " + e.what());
    }
    if (!j.contains("A") || !j.contains("b")) throw UsageError(path + " needs \"A\" and \"b\"");
    PolyDomain P;
    const auto& A = j["A"];
    P.A.resize(static_cast<int>(A.size()), static_cast<int>(A.at(0).size()));
    for (std::size_t i = 0; i < A.size(); ++i)
        for (std::size_t k = 0; k < A[i].size(); ++k) P.A(i, k) = A[i][k].get<double>();
    P.b.resize(static_cast<int>(j["b"].size()));
    for (std::size_t i = 0; i < j["b"].size(); ++i) P.b(i) = j["b"][i].get<double>();
    if (P.b.size() != P.A.rows()) throw UsageError("b length differs from the rows of A");
    return P;
}

Report cmd_certify(const Config& cfg) {
    Report r;
    const int count = cfg.samples > 0 ? cfg.samples : 10000;
    if (cfg.property == "subsol" && !cfg.domain.empty()) {
        const PolyDomain P = load_domain(cfg.domain);
        PolyBarrierInfo info;
        const PotentialHandle G = polyhedral_log_barrier(P, &info);
        SampleOptions so;
        so.count = count;
        so.seed = cfg.seed;
        so.conic = false;
        const auto xs = sample_interior([&](const Vec& x) { return P.margin(x); }, info.center, so);
        const CertReport c = subsolution_check(G, xs, cfg.tol > 0 ? cfg.tol : 1e-9);
        r.j = cert_json(c);
        r.j["constant"] = info.constant;
        r.j["analytic_center"] = arr(info.center);
        r.pass = c.pass;
        r.lines.push_back("G = -sum log l_a - c with c=" + fmt(info.constant));
        r.lines.push_back("inf H(G)e^-2G=" + fmt(c.statistic) + " threshold " + fmt(c.threshold) + " over " +
                          std::to_string(c.samples) + " samples");
        return r;
    }
    const ConeSpec s = need_spec(cfg);
    const Handle H = handle_for(s, cfg);
    const double tol = cfg.tol > 0 ? cfg.tol : (H.numeric ? 1e-6 : 1e-9);
    const auto xs = points_for(s, H, count, cfg.seed, 6);
    CertReport c;
    if (cfg.property == "sc") {
        c = self_concordance_sup(H.F, xs, cfg.dirs, cfg.seed, tol);
    } else if (cfg.property == "nu") {
        c = barrier_parameter_sup(H.F, xs, cfg.dirs, cfg.seed, tol);
    } else if (cfg.property == "subsol") {
        c = subsolution_check(H.F, xs, tol);
    } else if (cfg.property == "dominate") {
        // U_lower <= F <= U_upper, the envelopes over circumscribed and inscribed simplicial cones
        const double slack = H.numeric ? 10 * std::pow(parse_h(cfg.h), 2) : (cfg.tol > 0 ? cfg.tol : 1e-8);
        c.property = "dominance";
        c.threshold = slack;
        c.statistic = -INFINITY;
        const std::vector<Vec> pts(xs.begin(), xs.begin() + std::min<std::size_t>(xs.size(), 2000));
        for (const Vec& x : pts) {
            SandwichBounds sb;
            try {
                sb = sandwich_bounds(s, x);
            } catch (const NoInscribedSimplex&) {
                continue;
            }
            const double f = H.F(x), d = std::max(sb.lower - f, f - sb.upper);
            if (d > c.statistic) {
                c.statistic = d;
                c.worst_x = x;
            }
            ++c.samples;
        }
        c.pass = c.samples > 0 && c.statistic <= c.threshold;
    } else {
        throw UsageError("--property must be sc, nu, subsol or dominate");
    }
    r.j = cert_json(c);
    r.j["label"] = H.F.label;
    r.pass = c.pass;
    r.lines.push_back(c.property + " " + (c.property == "subsolution" ? "inf" : "sup") + "=" + fmt(c.statistic) +
                      " threshold " + fmt(c.threshold) + " over " + std::to_string(c.samples) + " samples" +
                      (c.directions ? " x " + std::to_string(c.directions / std::max(c.samples, 1)) + " directions" : ""));
    if (c.worst_x.size()) r.lines.push_back("worst x " + fmt(c.worst_x));
    return r;
}

Report cmd_solve(const Config& cfg) {
    Report r;
    const ConeSpec s = need_spec(cfg);
    const SolveOptions so = solve_options(cfg);
    const RadialSolution sol = numeric_potential(s, so);
    const auto& g = *sol.grid;
    if (!cfg.out.empty()) write_grid_csv(sol, cfg.out);
    const int count = cfg.samples > 0 ? cfg.samples : 200;
    const auto pr = solver_probes(g, count, cfg.seed, 5 * g.spacing);
    double rs = 0;
    try {
        rs = residual_sup(sol, pr);
    } catch (const Error&) {
        rs = NAN;
    }
    r.pass = g.residual <= so.tol;
    r.j["h"] = g.h;
    r.j["unknowns"] = g.unknowns();
    r.j["iterations"] = g.iterations;
    r.j["discrete_residual"] = g.residual;
    r.j["tol"] = so.tol;
    r.j["monotone_residual"] = g.monotone_residual;
    r.j["monotone_nodes"] = g.monotone_nodes;
    r.j["kappa"] = sol.kappa;
    r.j["kappa_barycenter"] = sol.k_barycenter;
    r.j["lifted_residual_sup"] = std::isfinite(rs) ? ojson(rs) : ojson(nullptr);
    r.lines.push_back(std::to_string(g.unknowns()) + " unknowns, " + std::to_string(g.iterations) +
                      " Newton iterations, discrete residual " + fmt(g.residual) + " (tol " + fmt(so.tol) + ")");
    r.lines.push_back("lift constant " + fmt(sol.kappa) + ", barycenter calibration " + fmt(sol.k_barycenter));
    r.lines.push_back("sup |H(F)e^-2F - 1| at " + std::to_string(pr.size()) + " probes: " + fmt(rs));
    if (has_closed_form(s)) {
        const PotentialHandle F = canonical_potential(s);
        double e = 0;
        for (const Vec& x : pr) e = std::max(e, std::abs(sol.F(x) - F(x)));
        r.j["max_error_vs_closed_form"] = e;
        r.lines.push_back("max |F_numeric - F| at the probes: " + fmt(e));
    }
    if (!cfg.out.empty()) r.lines.push_back("grid written to " + cfg.out);
    return r;
}

Report cmd_dual(const Config& cfg) {
    Report r;
    const ConeSpec s = need_spec(cfg);
    const Handle H = handle_for(s, cfg);
    const SolveOptions so = solve_options(cfg);
    const PotentialHandle Fd = dual_potential(s, so);
    const int count = cfg.samples > 0 ? cfg.samples : 500;
    const auto xs = points_for(s, H, count, cfg.seed, 1);
    double limit = cfg.check == "isometry" ? 1e-8 : 1e-10;
    const bool numeric = H.numeric || Fd.label == "numeric";
    if (numeric) {
        // tolerance of a numeric solve: sup of F_h - F_2h over the same probes
        SolveOptions coarse = so;
        coarse.h = 2 * so.h;
        double tol = 0;
        if (H.numeric) tol = refinement_defect(*H.numeric, numeric_potential(s, coarse), xs);
        if (Fd.label == "numeric") {
            const RadialSolution fine = numeric_potential(dual_cone(s), so);
            const auto pd = solver_probes(*fine.grid, count, cfg.seed + 1, 5 * fine.grid->spacing);
            tol = std::max(tol, refinement_defect(fine, numeric_potential(dual_cone(s), coarse), pd));
        }
        limit = 10 * tol;
        r.j["solver_tolerance"] = tol;
    }
    if (cfg.limit > 0) limit = cfg.limit;
    DualSup d;
    if (cfg.check == "identity")
        d = duality_identity_defect(H.F, Fd, xs);
    else if (cfg.check == "roundtrip")
        d = inverse_map_roundtrip(H.F, Fd, xs);
    else if (cfg.check == "isometry")
        d = isometry_defect(H.F, Fd, xs);
    else
        throw UsageError("--check must be identity, roundtrip or isometry");
    const double margin = min_dual_margin(H.F, s, xs);
    r.pass = d.evaluated > 0 && d.sup <= limit && margin > 0;
    r.j["check"] = cfg.check;
    r.j["sup"] = d.sup;
    r.j["limit"] = limit;
    r.j["evaluated"] = d.evaluated;
    r.j["skipped"] = d.skipped;
    r.j["min_dual_margin"] = margin;
    if (d.worst.size()) r.j["worst_x"] = arr(d.worst);
    r.lines.push_back(cfg.check + " defect sup=" + fmt(d.sup) + " limit " + fmt(limit) + " over " +
                      std::to_string(d.evaluated) + " pairs (" + std::to_string(d.skipped) + " outside the dual solve)");
    r.lines.push_back("min relative dual margin of the gradient image " + fmt(margin));
    return r;
}

Report cmd_foliate(const Config& cfg) {
    Report r;
    const ConeSpec s = need_spec(cfg);
    const Handle H = handle_for(s, cfg);
    const LevelSetMesh m = level_set_mesh(H.F, s, cfg.level, cfg.res);
    if (!cfg.out.empty()) {
        std::string side = cfg.csv;
        if (side.empty()) {
            const auto dot = cfg.out.rfind('.');
            side = (dot == std::string::npos ? cfg.out : cfg.out.substr(0, dot)) + ".csv";
        }
        write_obj(m, cfg.out, side);
        r.j["sidecar"] = side;
    }
    const double expect = level_curvature(s.dim, cfg.level);
    double lam = 0, radial = 0, tangential = 0;
    for (const auto& d : m.data) {
        lam = std::max(lam, std::abs(d.lambda - expect));
        radial = std::max(radial, d.radial);
        tangential = std::max(tangential, d.tangential);
    }
    const double limit = cfg.tol > 0 ? cfg.tol : (H.numeric ? 1e-3 : 1e-8);
    r.pass = lam <= limit && radial <= limit;
    r.j["level"] = cfg.level;
    r.j["vertices"] = m.vertices.size();
    r.j["faces"] = m.faces.size();
    r.j["affine_mean_curvature"] = expect;
    r.j["max_curvature_deviation"] = lam;
    r.j["max_normal_misalignment"] = radial;
    r.j["max_metric_on_normal"] = tangential;
    r.j["max_level_error"] = m.max_level_error;
    r.j["limit"] = limit;
    r.lines.push_back(std::to_string(m.vertices.size()) + " vertices, " + std::to_string(m.faces.size()) +
                      " faces on F = " + fmt(cfg.level));
    r.lines.push_back("affine mean curvature " + fmt(expect) + ", max deviation " + fmt(lam));
    r.lines.push_back("equiaffine normal vs position: max misalignment " + fmt(radial));
    if (!cfg.out.empty()) r.lines.push_back("mesh written to " + cfg.out);
    return r;
}

Report cmd_ipm(const Config& cfg) {
    Report r;
    if (cfg.prog.empty()) throw UsageError("--prog is required");
    ConicProgram p = load_program(cfg.prog);
    if (!cfg.spec.empty()) {
        p.cone = load_cone(cfg.spec);
        if (p.cone.dim != p.c.size()) throw UsageError("cone dimension differs from the program");
    }
    IpmOptions o;
    o.eps = cfg.eps;
    o.theta = cfg.theta;
    Handle H = handle_for(p.cone, cfg);
    if (H.numeric) {
        const auto pr = solver_probes(*H.numeric->grid, 50, cfg.seed, 5 * H.numeric->grid->spacing);
        o.hessian_noise = residual_sup(*H.numeric, pr);
    }
    if (cfg.scale != 1) H.F = scaled(H.F, cfg.scale);
    r.j["barrier"] = H.F.label;
    try {
        const IpmResult res = solve_conic(p, H.F, o);
        if (!cfg.trace.empty()) write_trace_csv(res, cfg.trace);
        r.j["status"] = res.status;
        r.j["x"] = arr(res.x);
        r.j["objective"] = p.c.dot(res.x);
        r.j["nu"] = res.nu;
        r.j["gap_bound"] = res.gap_bound;
        r.j["eps"] = res.eps_used;
        r.j["outer_iterations"] = res.outer;
        r.j["newton_steps"] = res.newton;
        r.j["iteration_bound"] = res.bound;
        r.j["phase1_iterations"] = res.phase1_outer;
        r.j["feasibility"] = res.feasibility;
        r.pass = res.gap_bound <= res.eps_used && res.outer <= res.bound;
        r.lines.push_back(res.status + ": objective " + fmt(p.c.dot(res.x)) + " at x=" + fmt(res.x));
        r.lines.push_back("certified gap <= nu*mu = " + fmt(res.gap_bound) + " (nu " + fmt(res.nu) + ", eps " +
                          fmt(res.eps_used) + ")");
        r.lines.push_back(std::to_string(res.outer) + " outer iterations (bound " + std::to_string(res.bound) + "), " +
                          std::to_string(res.newton) + " Newton steps, phase I " + std::to_string(res.phase1_outer));
    } catch (const Infeasible& e) {
        r.pass = false;
        r.j["status"] = "infeasible";
        r.j["reason"] = e.what();
        r.lines.push_back(std::string("infeasible: ") + e.what());
    } catch (const Unbounded& e) {
        r.pass = false;
        r.j["status"] = "unbounded";
        r.j["reason"] = e.what();
        r.lines.push_back(std::string("unbounded: ") + e.what());
    }
    return r;
}

Report cmd_suite(const Config& cfg) {
    suite::Options o;
    o.quick = cfg.quick;
    o.seed = cfg.seed;
    const auto checks = suite::run(o, [](const suite::Check& c) {
        std::fprintf(stderr, "[%6.2fs] %s %s\n", c.seconds, c.pass ? "PASS" : "FAIL", c.id.c_str());
    });
    Report r;
    for (const auto& c : checks) r.pass = r.pass && c.pass;
    // the suite has its own serializers; the caller prints them verbatim
    r.j = ojson::parse(suite::json_report(o, checks));
    std::istringstream lines(suite::text_report(o, checks));
    for (std::string line; std::getline(lines, line);) r.lines.push_back(line);
    return r;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"conecanon: canonical potentials of proper convex cones"};
    app.require_subcommand(1);
    // --h is the solver spacing, so help is long-form only
    app.set_help_flag("--help", "print this help and exit");
    Config cfg;
    auto common = [&](CLI::App* sc) {
        sc->add_option("--seed", cfg.seed, "random seed");
        sc->add_option("--json", cfg.json_path, "write the report as JSON (to the file if given)")->expected(0, 1);
    };
    auto spec = [&](CLI::App* sc) { sc->add_option("--spec", cfg.spec, "cone spec JSON file"); };
    auto numeric = [&](CLI::App* sc) {
        sc->add_option("--h", cfg.h, "solver spacing, e.g. 1/64 (cones without a closed form)");
        sc->add_option("--anchor", cfg.anchor, "constant-fixing point")->delimiter(',');
    };

    auto* validate = app.add_subcommand("validate", "check that a cone spec is proper");
    spec(validate);
    common(validate);

    auto* potential = app.add_subcommand("potential", "evaluate the canonical potential");
    spec(potential);
    potential->add_option("--at", cfg.at, "point, comma separated")->delimiter(',');
    potential->add_option("--order", cfg.order, "derivatives to print (0-2)")->check(CLI::Range(0, 2));
    numeric(potential);
    common(potential);

    auto* geom = app.add_subcommand("geom", "curvature identities at seeded samples");
    spec(geom);
    geom->add_option("--samples", cfg.samples, "sample count");
    geom->add_option("--csv", cfg.csv, "per-sample CSV");
    numeric(geom);
    common(geom);

    auto* certify = app.add_subcommand("certify", "sampled barrier certification");
    spec(certify);
    certify->add_option("--property", cfg.property, "sc|nu|subsol|dominate")
        ->check(CLI::IsMember({"sc", "nu", "subsol", "dominate"}));
    certify->add_option("--domain", cfg.domain, "polyhedron JSON {A, b} for subsol");
    certify->add_option("--samples", cfg.samples, "sample count");
    certify->add_option("--dirs", cfg.dirs, "directions per sample");
    certify->add_option("--tol", cfg.tol, "tolerance");
    numeric(certify);
    common(certify);

    auto* solve = app.add_subcommand("solve", "numeric canonical potential by slicing");
    spec(solve);
    solve->add_option("--h", cfg.h, "spacing relative to the chart, e.g. 1/64");
    solve->add_option("--tol", cfg.tol, "discrete residual tolerance");
    solve->add_option("--out", cfg.out, "grid CSV");
    solve->add_option("--samples", cfg.samples, "probe count");
    common(solve);

    auto* dual = app.add_subcommand("dual", "duality checks through the gradient map");
    spec(dual);
    dual->add_option("--check", cfg.check, "identity|roundtrip|isometry")
        ->check(CLI::IsMember({"identity", "roundtrip", "isometry"}));
    dual->add_option("--samples", cfg.samples, "sample count");
    dual->add_option("--limit", cfg.limit, "override the pass limit");
    numeric(dual);
    common(dual);

    auto* foliate = app.add_subcommand("foliate", "level-set mesh with equiaffine data");
    spec(foliate);
    foliate->add_option("--level", cfg.level, "level r of F");
    foliate->add_option("--res", cfg.res, "grid resolution")->check(CLI::Range(2, 4096));
    foliate->add_option("--out", cfg.out, "OBJ mesh");
    foliate->add_option("--csv", cfg.csv, "sidecar CSV (default: next to the mesh)");
    foliate->add_option("--tol", cfg.tol, "pass limit");
    numeric(foliate);
    common(foliate);

    auto* ipm = app.add_subcommand("ipm", "short-step path following with the canonical barrier");
    ipm->add_option("--prog", cfg.prog, "program JSON {c, A, b, cone}");
    spec(ipm);
    ipm->add_option("--eps", cfg.eps, "target gap");
    ipm->add_option("--theta", cfg.theta, "mu step factor");
    ipm->add_option("--barrier-scale", cfg.scale, "multiply the barrier (inflates nu)");
    ipm->add_option("--trace", cfg.trace, "per-iteration CSV");
    numeric(ipm);
    common(ipm);

    auto* suite_cmd = app.add_subcommand("suite", "acceptance battery");
    suite_cmd->add_flag("--quick", cfg.quick, "smaller sample counts");
    common(suite_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    CLI::App* sc = app.get_subcommands().front();
    cfg.json = sc->count("--json") > 0;

    const auto t0 = std::chrono::steady_clock::now();
    Report r;
    try {
        const std::string name = sc->get_name();
        if (name == "validate") r = cmd_validate(cfg);
        else if (name == "potential") r = cmd_potential(cfg);
        else if (name == "geom") r = cmd_geom(cfg);
        else if (name == "certify") r = cmd_certify(cfg);
        else if (name == "solve") r = cmd_solve(cfg);
        else if (name == "dual") r = cmd_dual(cfg);
        else if (name == "foliate") r = cmd_foliate(cfg);
        else if (name == "ipm") r = cmd_ipm(cfg);
        else r = cmd_suite(cfg);
    } catch (const UsageError& e) {
        std::cerr << "conecanon: " << e.what() << "\n";
        return 2;
    } catch (const MalformedSpec& e) {
        std::cerr << "conecanon: " << e.what() << "\n";
        return 2;
    } catch (const DimensionMismatch& e) {
        std::cerr << "conecanon: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        // a library failure is a failed property; report it with the seed
        r = Report{};
        r.pass = false;
        r.j["error"] = e.what();
        r.lines.push_back(std::string("error: ") + e.what());
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::fprintf(stderr, "%s: %.3fs\n", sc->get_name().c_str(), dt);

    if (sc->get_name() != "suite") {
        ojson out;
        out["command"] = sc->get_name();
        out["seed"] = cfg.seed;
        if (!cfg.spec.empty()) out["spec"] = cfg.spec;
        for (auto it = r.j.begin(); it != r.j.end(); ++it) out[it.key()] = it.value();
        out["pass"] = r.pass;
        r.j = out;
        r.lines.push_back("seed " + std::to_string(cfg.seed) + (r.pass ? ": pass" : ": FAIL"));
    }
    if (cfg.json) {
        const std::string text = r.j.dump(2) + "\n";
        if (cfg.json_path.empty()) {
            std::cout << text;
        } else {
            std::ofstream f(cfg.json_path);
            if (!f) {
                std::cerr << "conecanon: cannot write " << cfg.json_path << "\n";
                return 2;
            }
            f << text;
            for (const auto& l : r.lines) std::cout << l << "\n";
        }
    } else {
        for (const auto& l : r.lines) std::cout << l << "\n";
    }
    return r.pass ? 0 : 1;
}
