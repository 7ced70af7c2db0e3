#include "conecanon/cone.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "conecanon/errors.hpp"
#include "json.hpp"

namespace conecanon {

namespace {

using json = nlohmann::json;

Mat inverse_checked(const Mat& A) {
    Eigen::FullPivLU<Mat> lu(A);
    if (!lu.isInvertible()) throw MalformedSpec("linear image matrix is singular");
    const double scale = A.cwiseAbs().maxCoeff();
    if (std::abs(lu.determinant()) <= 1e-14 * std::pow(scale, static_cast<double>(A.rows())))
        throw MalformedSpec("linear image matrix is numerically singular");
    return lu.inverse();
}

// Wolfe's minimum-norm point of conv(rows of P).
Vec min_norm_point(const Mat& P) {
    const int m = static_cast<int>(P.rows());
    const double scale = P.rowwise().squaredNorm().maxCoeff();
    const double tol = 1e-12 * scale;

    int j0 = 0;
    P.rowwise().squaredNorm().minCoeff(&j0);
    std::vector<int> S{j0};
    std::vector<double> lam{1.0};
    Vec x = P.row(j0).transpose();

    for (int major = 0; major < 10 * m + 50; ++major) {
        int j = 0;
        const Vec dots = P * x;
        dots.minCoeff(&j);
        if (x.squaredNorm() - dots(j) <= tol) return x;
        if (std::find(S.begin(), S.end(), j) != S.end()) return x;
        S.push_back(j);
        lam.push_back(0.0);

        for (int minor = 0; minor < 10 * m + 50; ++minor) {
            const int k = static_cast<int>(S.size());
            Mat K = Mat::Zero(k + 1, k + 1);
            for (int a = 0; a < k; ++a) {
                for (int b = 0; b < k; ++b) K(a, b) = P.row(S[a]).dot(P.row(S[b]));
                K(a, k) = K(k, a) = 1.0;
            }
            Vec rhs = Vec::Zero(k + 1);
            rhs(k) = 1.0;
            const Vec sol = K.completeOrthogonalDecomposition().solve(rhs);
            const Vec alpha = sol.head(k);

            if (alpha.minCoeff() > 1e-14) {
                for (int a = 0; a < k; ++a) lam[a] = alpha(a);
                break;
            }
            double theta = 1.0;
            for (int a = 0; a < k; ++a)
                if (alpha(a) <= 1e-14) theta = std::min(theta, lam[a] / (lam[a] - alpha(a)));
            for (int a = 0; a < k; ++a) lam[a] += theta * (alpha(a) - lam[a]);
            std::vector<int> S2;
            std::vector<double> l2;
            for (int a = 0; a < k; ++a)
                if (lam[a] > 1e-14) {
                    S2.push_back(S[a]);
                    l2.push_back(lam[a]);
                }
            S.swap(S2);
            lam.swap(l2);
            if (S.empty()) return Vec::Zero(P.cols());
        }
        x.setZero(P.cols());
        for (std::size_t a = 0; a < S.size(); ++a) x += lam[a] * P.row(S[a]).transpose();
    }
    return x;
}

Mat unit_rows(const Mat& N) {
    Mat U = N;
    for (int i = 0; i < U.rows(); ++i) {
        const double nrm = U.row(i).norm();
        if (nrm == 0) throw MalformedSpec("zero facet normal");
        U.row(i) /= nrm;
    }
    return U;
}

int numeric_rank(const Mat& M) {
    if (M.size() == 0) return 0;
    Eigen::JacobiSVD<Mat> svd(M);
    const Vec s = svd.singularValues();
    int r = 0;
    for (int i = 0; i < s.size(); ++i)
        if (s(i) > 1e-10 * s(0)) ++r;
    return r;
}

std::string normalize_name(std::string s) {
    std::string out;
    for (char c : s)
        if (c != '_' && c != '-' && c != ' ') out.push_back(static_cast<char>(std::tolower(c)));
    return out;
}

Mat matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw MalformedSpec("matrix must be a non-empty array of rows");
    const std::size_t rows = j.size();
    const std::size_t cols = j[0].size();
    Mat M(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        if (j[r].size() != cols) throw MalformedSpec("ragged matrix");
        for (std::size_t c = 0; c < cols; ++c) M(r, c) = j[r][c].get<double>();
    }
    return M;
}

json matrix_to_json(const Mat& M) {
    json rows = json::array();
    for (int r = 0; r < M.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
        rows.push_back(row);
    }
    return rows;
}

ConeSpec from_json_value(const json& j) {
    if (!j.is_object() || !j.contains("variant")) throw MalformedSpec("cone spec needs a \"variant\"");
    const std::string v = normalize_name(j.at("variant").get<std::string>());
    if (v == "orthant") return ConeSpec::orthant(j.at("dim").get<int>());
    if (v == "lorentz" || v == "soc") return ConeSpec::lorentz(j.at("dim").get<int>());
    if (v == "psd") {
        if (j.contains("order")) return ConeSpec::psd(j.at("order").get<int>());
        if (j.contains("m")) return ConeSpec::psd(j.at("m").get<int>());
        const int m = smat_order(j.at("dim").get<int>());
        return ConeSpec::psd(m);
    }
    if (v == "polyhedral") {
        ConeSpec s = ConeSpec::polyhedral(matrix_from_json(j.at("normals")));
        if (j.contains("dim") && j.at("dim").get<int>() != s.dim)
            throw MalformedSpec("normals do not match dim");
        return s;
    }
    if (v == "linearimage") return ConeSpec::linear_image(from_json_value(j.at("inner")), matrix_from_json(j.at("A")));
    if (v == "product") {
        std::vector<ConeSpec> fs;
        for (const auto& f : j.at("factors")) fs.push_back(from_json_value(f));
        return ConeSpec::product(fs);
    }
    throw MalformedSpec("unknown variant: " + j.at("variant").get<std::string>());
}

json to_json_value(const ConeSpec& s) {
    json j;
    j["variant"] = variant_name(s.variant);
    j["dim"] = s.dim;
    switch (s.variant) {
    case Variant::PSD: j["order"] = s.order; break;
    case Variant::Polyhedral: j["normals"] = matrix_to_json(s.normals); break;
    case Variant::LinearImage:
        j["A"] = matrix_to_json(s.A);
        j["inner"] = to_json_value(*s.inner);
        break;
    case Variant::Product: {
        json fs = json::array();
        for (const auto& f : s.factors) fs.push_back(to_json_value(f));
        j["factors"] = fs;
        break;
    }
    default: break;
    }
    return j;
}

} // namespace

std::string variant_name(Variant v) {
    switch (v) {
    case Variant::Orthant: return "orthant";
    case Variant::Lorentz: return "lorentz";
    case Variant::PSD: return "psd";
    case Variant::Polyhedral: return "polyhedral";
    case Variant::LinearImage: return "linear_image";
    case Variant::Product: return "product";
    }
    return "?";
}

ConeSpec ConeSpec::orthant(int dim) {
    if (dim < 1) throw MalformedSpec("orthant needs dim >= 1");
    ConeSpec s;
    s.variant = Variant::Orthant;
    s.dim = dim;
    return s;
}

ConeSpec ConeSpec::lorentz(int dim) {
    if (dim < 2) throw MalformedSpec("lorentz cone needs dim >= 2");
    ConeSpec s;
    s.variant = Variant::Lorentz;
    s.dim = dim;
    return s;
}

ConeSpec ConeSpec::psd(int m) {
    if (m < 1) throw MalformedSpec("psd cone needs order >= 1");
    ConeSpec s;
    s.variant = Variant::PSD;
    s.order = m;
    s.dim = svec_size(m);
    return s;
}

ConeSpec ConeSpec::polyhedral(const Mat& normals) {
    if (normals.rows() < 1 || normals.cols() < 1) throw MalformedSpec("polyhedral cone needs normals");
    if (!normals.allFinite()) throw MalformedSpec("non-finite normals");
    ConeSpec s;
    s.variant = Variant::Polyhedral;
    s.dim = static_cast<int>(normals.cols());
    s.normals = normals;
    return s;
}

ConeSpec ConeSpec::linear_image(const ConeSpec& inner, const Mat& A) {
    if (A.rows() != A.cols() || A.rows() != inner.dim)
        throw MalformedSpec("linear image matrix must be square of the inner dimension");
    inverse_checked(A);
    ConeSpec s;
    s.variant = Variant::LinearImage;
    s.dim = inner.dim;
    s.A = A;
    s.inner = std::make_shared<const ConeSpec>(inner);
    return s;
}

ConeSpec ConeSpec::product(const std::vector<ConeSpec>& factors) {
    if (factors.empty()) throw MalformedSpec("product needs factors");
    ConeSpec s;
    s.variant = Variant::Product;
    s.factors = factors;
    s.dim = 0;
    for (const auto& f : factors) s.dim += f.dim;
    return s;
}

ConeSpec cone_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw MalformedSpec(std::string("bad json: ") + e.what());
    }
    try {
        return from_json_value(j);
    } catch (const json::exception& e) {
        throw MalformedSpec(std::string("bad cone spec: ") + e.what());
    }
}

std::string cone_to_json(const ConeSpec& spec) { return to_json_value(spec).dump(); }

ConeSpec load_cone(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MalformedSpec("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return cone_from_json(ss.str());
}

int svec_size(int m) { return m * (m + 1) / 2; }

int smat_order(int n) {
    const int m = static_cast<int>(std::lround((std::sqrt(8.0 * n + 1) - 1) / 2));
    if (svec_size(m) != n) throw MalformedSpec("psd dim is not a triangular number");
    return m;
}

Vec svec(const Mat& X) {
    const int m = static_cast<int>(X.rows());
    Vec v(svec_size(m));
    int k = 0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j <= i; ++j) v(k++) = (i == j) ? X(i, i) : std::sqrt(2.0) * X(i, j);
    return v;
}

Mat smat(const Vec& x) {
    const int m = smat_order(static_cast<int>(x.size()));
    Mat X(m, m);
    int k = 0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j <= i; ++j) {
            const double v = (i == j) ? x(k) : x(k) / std::sqrt(2.0);
            X(i, j) = X(j, i) = v;
            ++k;
        }
    return X;
}

Mat svec_basis(int m, int a) {
    Vec e = Vec::Zero(svec_size(m));
    e(a) = 1.0;
    return smat(e);
}

double contains(const ConeSpec& spec, const Vec& x) {
    if (x.size() != spec.dim) throw DimensionMismatch("point has dimension " + std::to_string(x.size()) +
                                                      ", cone has " + std::to_string(spec.dim));
    switch (spec.variant) {
    case Variant::Orthant: return x.minCoeff();
    case Variant::Lorentz: return x(0) - x.tail(x.size() - 1).norm();
    case Variant::PSD: {
        Eigen::SelfAdjointEigenSolver<Mat> es(smat(x), Eigen::EigenvaluesOnly);
        return es.eigenvalues()(0);
    }
    case Variant::Polyhedral: {
        double m = INFINITY;
        for (int i = 0; i < spec.normals.rows(); ++i)
            m = std::min(m, spec.normals.row(i).dot(x) / spec.normals.row(i).norm());
        return m;
    }
    case Variant::LinearImage: return contains(*spec.inner, spec.A.partialPivLu().solve(x));
    case Variant::Product: {
        double m = INFINITY;
        int off = 0;
        for (const auto& f : spec.factors) {
            m = std::min(m, contains(f, x.segment(off, f.dim)));
            off += f.dim;
        }
        return m;
    }
    }
    return -INFINITY;
}

Vec interior_point(const ConeSpec& spec) {
    switch (spec.variant) {
    case Variant::Orthant: return Vec::Ones(spec.dim);
    case Variant::Lorentz: return Vec::Unit(spec.dim, 0);
    case Variant::PSD: return svec(Mat::Identity(spec.order, spec.order));
    case Variant::Polyhedral: {
        const Vec z = min_norm_point(unit_rows(spec.normals));
        if (z.norm() < 1e-10) throw MalformedSpec("polyhedral cone has empty interior");
        return z / z.norm();
    }
    case Variant::LinearImage: return spec.A * interior_point(*spec.inner);
    case Variant::Product: {
        Vec x(spec.dim);
        int off = 0;
        for (const auto& f : spec.factors) {
            x.segment(off, f.dim) = interior_point(f);
            off += f.dim;
        }
        return x;
    }
    }
    return {};
}

namespace {

Vec dual_witness(const ConeSpec& spec) {
    switch (spec.variant) {
    case Variant::Orthant:
    case Variant::Lorentz:
    case Variant::PSD: return interior_point(spec);
    case Variant::Polyhedral: return unit_rows(spec.normals).colwise().sum().transpose();
    case Variant::LinearImage: return spec.A.transpose().partialPivLu().solve(dual_witness(*spec.inner));
    case Variant::Product: {
        Vec y(spec.dim);
        int off = 0;
        for (const auto& f : spec.factors) {
            y.segment(off, f.dim) = dual_witness(f);
            off += f.dim;
        }
        return y;
    }
    }
    return {};
}

void check_proper(const ConeSpec& spec, std::string& reason) {
    switch (spec.variant) {
    case Variant::Polyhedral: {
        if (numeric_rank(spec.normals) < spec.dim) {
            reason = "facet normals are rank deficient; the cone contains a line";
            return;
        }
        const Vec z = min_norm_point(unit_rows(spec.normals));
        if (z.norm() < 1e-10) reason = "facet inequalities have no common strict solution";
        return;
    }
    case Variant::LinearImage: check_proper(*spec.inner, reason); return;
    case Variant::Product:
        for (const auto& f : spec.factors) {
            check_proper(f, reason);
            if (!reason.empty()) return;
        }
        return;
    default: return;
    }
}

} // namespace

ValidityReport validate_proper(const ConeSpec& spec) {
    ValidityReport r;
    check_proper(spec, r.reason);
    if (!r.reason.empty()) {
        r.proper = false;
        return r;
    }
    r.witness = dual_witness(spec);
    r.interior = interior_point(spec);
    const Vec y = r.witness / r.witness.norm();
    try {
        r.margin = contains(dual_cone(spec), y);
    } catch (const UnsupportedDual&) {
        // no dual representation above the vertex-enumeration cap; the pairing
        // with the primal interior still certifies y
        r.margin = NAN;
    }
    r.proper = r.witness.dot(r.interior) > 0 && !(r.margin <= 0);
    if (!r.proper) r.reason = "dual witness is not interior";
    return r;
}

bool is_polyhedral(const ConeSpec& spec) {
    switch (spec.variant) {
    case Variant::Orthant:
    case Variant::Polyhedral: return true;
    case Variant::Lorentz: return spec.dim <= 2;
    case Variant::PSD: return spec.order == 1;
    case Variant::LinearImage: return is_polyhedral(*spec.inner);
    case Variant::Product:
        return std::all_of(spec.factors.begin(), spec.factors.end(), [](const ConeSpec& f) { return is_polyhedral(f); });
    }
    return false;
}

Mat facet_normals(const ConeSpec& spec) {
    switch (spec.variant) {
    case Variant::Orthant: return Mat::Identity(spec.dim, spec.dim);
    case Variant::Polyhedral: return spec.normals;
    case Variant::Lorentz:
        if (spec.dim == 2) return (Mat(2, 2) << 1, -1, 1, 1).finished();
        break;
    case Variant::PSD:
        if (spec.order == 1) return Mat::Identity(1, 1);
        break;
    case Variant::LinearImage: {
        const Mat Ninner = facet_normals(*spec.inner);
        return spec.A.transpose().partialPivLu().solve(Ninner.transpose()).transpose();
    }
    case Variant::Product: {
        int rows = 0;
        std::vector<Mat> parts;
        for (const auto& f : spec.factors) {
            parts.push_back(facet_normals(f));
            rows += static_cast<int>(parts.back().rows());
        }
        Mat N = Mat::Zero(rows, spec.dim);
        int r = 0, c = 0;
        for (std::size_t k = 0; k < parts.size(); ++k) {
            N.block(r, c, parts[k].rows(), parts[k].cols()) = parts[k];
            r += static_cast<int>(parts[k].rows());
            c += spec.factors[k].dim;
        }
        return N;
    }
    }
    throw UnsupportedDual("cone is not polyhedral");
}

Mat extreme_rays(const ConeSpec& spec) {
    const Mat N = unit_rows(facet_normals(spec));
    const int d = spec.dim;
    const int m = static_cast<int>(N.rows());
    if (d > 4) throw UnsupportedDual("vertex enumeration is limited to dim <= 4");
    if (numeric_rank(N) < d) throw MalformedSpec("rank-deficient facet normals");

    std::vector<Vec> rays;
    auto consider = [&](Vec r) {
        if (r.norm() < 1e-12) return;
        r /= r.norm();
        Vec s = N * r;
        if (s.minCoeff() < -1e-10) {
            r = -r;
            s = -s;
        }
        if (s.minCoeff() < -1e-10) return;
        for (const auto& q : rays)
            if ((q - r).norm() < 1e-9) return;
        rays.push_back(r);
    };

    if (d == 1) {
        consider(Vec::Ones(1));
    } else {
        std::vector<int> idx(d - 1);
        for (int i = 0; i < d - 1; ++i) idx[i] = i;
        while (true) {
            Mat S(d - 1, d);
            for (int i = 0; i < d - 1; ++i) S.row(i) = N.row(idx[i]);
            Eigen::JacobiSVD<Mat> svd(S, Eigen::ComputeFullV);
            const Vec sv = svd.singularValues();
            if (sv(d - 2) > 1e-10 * sv(0)) consider(svd.matrixV().col(d - 1));
            int k = d - 2;
            while (k >= 0 && idx[k] == m - (d - 1) + k) --k;
            if (k < 0) break;
            ++idx[k];
            for (int i = k + 1; i < d - 1; ++i) idx[i] = idx[i - 1] + 1;
        }
    }
    std::sort(rays.begin(), rays.end(), [](const Vec& a, const Vec& b) {
        return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
    });
    Mat R(rays.size(), d);
    for (std::size_t i = 0; i < rays.size(); ++i) R.row(i) = rays[i].transpose();
    return R;
}

ConeSpec dual_cone(const ConeSpec& spec) {
    switch (spec.variant) {
    case Variant::Orthant:
    case Variant::Lorentz:
    case Variant::PSD: return spec;
    case Variant::Polyhedral:
        if (spec.dim > 4) throw UnsupportedDual("polyhedral dual above dimension 4");
        return ConeSpec::polyhedral(extreme_rays(spec));
    case Variant::LinearImage: {
        const Mat AinvT = spec.A.inverse().transpose();
        return ConeSpec::linear_image(dual_cone(*spec.inner), AinvT);
    }
    case Variant::Product: {
        std::vector<ConeSpec> fs;
        for (const auto& f : spec.factors) fs.push_back(dual_cone(f));
        return ConeSpec::product(fs);
    }
    }
    throw UnsupportedDual("unknown variant");
}

Vec CrossSection::to_chart(const Vec& x) const {
    const double t = w.dot(x);
    if (!(t > 0)) throw SliceUnbounded("point does not meet the slice");
    return basis.transpose() * (x / t - origin);
}

double CrossSection::ray_exit(const Vec& s, const Vec& d) const {
    double lo = 0.0;
    double hi = 1.0;
    int k = 0;
    while (margin(s + hi * d) > 0) {
        lo = hi;
        hi *= 2;
        if (++k > 80) throw SliceUnbounded("ray does not leave the slice");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (margin(s + mid * d) > 0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

CrossSection cross_section(const ConeSpec& spec, const Vec& w) {
    if (w.size() != spec.dim) throw DimensionMismatch("slice covector has the wrong dimension");
    if (spec.dim < 2) throw SliceUnbounded("a one-dimensional cone has a point slice");
    const ConeSpec dual = dual_cone(spec);
    if (!(contains(dual, w) > 1e-12 * w.norm())) throw SliceUnbounded("covector is not interior to the dual cone");

    CrossSection cs;
    cs.cone = spec;
    cs.w = w;
    const Vec x0 = interior_point(spec);
    cs.origin = x0 / w.dot(x0);

    const int d = spec.dim;
    int skip = 0;
    w.cwiseAbs().maxCoeff(&skip);
    const Vec wh = w / w.norm();
    cs.basis.resize(d, d - 1);
    int col = 0;
    for (int j = 0; j < d; ++j) {
        if (j == skip) continue;
        Vec e = Vec::Unit(d, j);
        e -= e.dot(wh) * wh;
        for (int c = 0; c < col; ++c) e -= e.dot(cs.basis.col(c)) * cs.basis.col(c);
        cs.basis.col(col++) = e / e.norm();
    }

    const int n = d - 1;
    cs.lo = Vec::Zero(n);
    cs.hi = Vec::Zero(n);
    const Vec zero = Vec::Zero(n);
    auto absorb = [&](const Vec& dir) {
        const Vec p = cs.ray_exit(zero, dir) * dir;
        cs.lo = cs.lo.cwiseMin(p);
        cs.hi = cs.hi.cwiseMax(p);
    };
    if (n == 1) {
        absorb(Vec::Ones(1));
        absorb(-Vec::Ones(1));
    } else if (n == 2) {
        const int rays = 720;
        for (int k = 0; k < rays; ++k) {
            const double th = 2 * M_PI * k / rays;
            Vec dir(2);
            dir << std::cos(th), std::sin(th);
            absorb(dir);
        }
        const Vec pad = 0.02 * (cs.hi - cs.lo);
        cs.lo -= pad;
        cs.hi += pad;
    } else {
        for (int a = 0; a < n; ++a) {
            absorb(Vec::Unit(n, a));
            absorb(-Vec::Unit(n, a));
        }
        const Vec pad = 0.5 * (cs.hi - cs.lo);
        cs.lo -= pad;
        cs.hi += pad;
    }
    return cs;
}

} // namespace conecanon
