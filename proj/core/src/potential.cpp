#include "conecanon/potential.hpp"

#include <cmath>

#include "conecanon/errors.hpp"

namespace conecanon {

double Jet3::third_dir(const Vec& u, const Vec& v, const Vec& w) const {
    double s = 0;
    for (std::size_t i = 0; i < third.size(); ++i) s += u(i) * v.dot(third[i] * w);
    return s;
}

Mat Jet3::third_contract(const Vec& u) const {
    const int n = static_cast<int>(grad.size());
    Mat M = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) M += u(i) * third[i];
    return M;
}

T3 PotentialModel::along(const Vec& x, const Vec& v) const {
    const Jet3 j = jet(x, 3);
    return {j.value, j.grad.dot(v), 0.5 * v.dot(j.hess * v), j.third_dir(v, v, v) / 6.0};
}

bool PotentialHandle::interior(const Vec& x) const {
    if (x.size() != dim() || !x.allFinite()) return false;
    const double m = margin(x);
    return m > 0 && m > kInteriorFloor * x.norm();
}

Jet3 PotentialHandle::jet(const Vec& x, int order) const { return eval_jet3(*this, x, order); }

double PotentialHandle::operator()(const Vec& x) const {
    if (x.size() != dim()) throw DimensionMismatch("point dimension does not match potential");
    if (!interior(x)) throw NonInteriorPoint("point is not interior to the domain");
    return model->value(x);
}

T3 PotentialHandle::along(const Vec& x, const Vec& v) const {
    if (!interior(x)) throw NonInteriorPoint("point is not interior to the domain");
    return model->along(x, v);
}

Jet3 eval_jet3(const PotentialHandle& F, const Vec& x, int order) {
    if (x.size() != F.dim()) throw DimensionMismatch("point dimension does not match potential");
    if (!F.interior(x)) throw NonInteriorPoint("point is not interior to the domain");
    return F.model->jet(x, order);
}

namespace {

Jet3 blank(int n, int order) {
    Jet3 j;
    j.order = order;
    j.grad = Vec::Zero(n);
    if (order >= 2) j.hess = Mat::Zero(n, n);
    if (order >= 3) j.third.assign(n, Mat::Zero(n, n));
    return j;
}

class OrthantModel final : public PotentialModel {
public:
    explicit OrthantModel(int n) : n_(n) {}
    int dim() const override { return n_; }
    double margin(const Vec& x) const override { return x.minCoeff(); }
    double value(const Vec& x) const override { return -x.array().log().sum(); }
    Jet3 jet(const Vec& x, int order) const override {
        Jet3 j = blank(n_, order);
        j.value = value(x);
        j.grad = -x.cwiseInverse();
        for (int i = 0; i < n_; ++i) {
            if (order >= 2) j.hess(i, i) = 1 / (x(i) * x(i));
            if (order >= 3) j.third[i](i, i) = -2 / (x(i) * x(i) * x(i));
        }
        return j;
    }
    T3 along(const Vec& x, const Vec& v) const override {
        T3 s;
        for (int i = 0; i < n_; ++i) {
            const double r = v(i) / x(i);
            s += T3(-std::log(x(i)), -r, 0.5 * r * r, -r * r * r / 3.0);
        }
        return s;
    }

private:
    int n_;
};

// k * (-log q) + c with q = x0^2 - |xbar|^2
class LorentzModel final : public PotentialModel {
public:
    LorentzModel(int n, double c) : n_(n), k_(0.5 * n), c_(c) {}
    int dim() const override { return n_; }
    double margin(const Vec& x) const override { return x(0) - x.tail(n_ - 1).norm(); }
    double value(const Vec& x) const override {
        return -k_ * std::log(form(x)) + c_;
    }
    Jet3 jet(const Vec& x, int order) const override {
        Jet3 j = blank(n_, order);
        Vec Jx = -x;
        Jx(0) = x(0);
        const double q = form(x);
        const Vec dq = 2 * Jx;
        Vec J = -Vec::Ones(n_);
        J(0) = 1;
        j.value = -k_ * std::log(q) + c_;
        j.grad = -k_ * dq / q;
        if (order >= 2) {
            j.hess = k_ * (dq * dq.transpose() / (q * q));
            for (int i = 0; i < n_; ++i) j.hess(i, i) -= k_ * 2 * J(i) / q;
        }
        if (order >= 3) {
            const double q2 = q * q, q3 = q2 * q;
            for (int a = 0; a < n_; ++a)
                for (int b = 0; b < n_; ++b)
                    for (int c = 0; c < n_; ++c) {
                        double t = -2 * dq(a) * dq(b) * dq(c) / q3;
                        if (a == b) t += 2 * J(a) * dq(c) / q2;
                        if (a == c) t += 2 * J(a) * dq(b) / q2;
                        if (b == c) t += 2 * J(b) * dq(a) / q2;
                        j.third[a](b, c) = k_ * t;
                    }
        }
        return j;
    }
    T3 along(const Vec& x, const Vec& v) const override {
        T3 q = T3(x(0), v(0)) * T3(x(0), v(0));
        for (int i = 1; i < n_; ++i) q -= T3(x(i), v(i)) * T3(x(i), v(i));
        q.c[0] = form(x);
        return -k_ * log(q) + c_;
    }

private:
    // x0^2 - |xbar|^2 without cancellation
    double form(const Vec& x) const {
        const double r = x.tail(n_ - 1).norm();
        return (x(0) - r) * (x(0) + r);
    }
    int n_;
    double k_, c_;
};

// k * (-log det X) + c in the scaled svec embedding
class PsdModel final : public PotentialModel {
public:
    PsdModel(int m, double c) : m_(m), n_(svec_size(m)), k_(0.5 * (m + 1)), c_(c) {
        for (int a = 0; a < n_; ++a) basis_.push_back(svec_basis(m, a));
    }
    int dim() const override { return n_; }
    double margin(const Vec& x) const override { return contains(ConeSpec::psd(m_), x); }
    double value(const Vec& x) const override {
        Eigen::LLT<Mat> llt(smat(x));
        if (llt.info() != Eigen::Success) throw NonInteriorPoint("matrix is not positive definite");
        const Mat L = llt.matrixL();
        return -k_ * 2 * L.diagonal().array().log().sum() + c_;
    }
    Jet3 jet(const Vec& x, int order) const override {
        Jet3 j = blank(n_, order);
        const Mat X = smat(x);
        Eigen::LLT<Mat> llt(X);
        if (llt.info() != Eigen::Success) throw NonInteriorPoint("matrix is not positive definite");
        const Mat L = llt.matrixL();
        j.value = -k_ * 2 * L.diagonal().array().log().sum() + c_;
        // congruence by the Cholesky factor keeps the traces well conditioned near the boundary
        std::vector<Mat> M(n_);
        for (int a = 0; a < n_; ++a) M[a] = congruence(L, basis_[a]);
        for (int a = 0; a < n_; ++a) {
            j.grad(a) = -k_ * M[a].trace();
            if (order < 2) continue;
            for (int b = 0; b <= a; ++b) {
                const Mat P = M[a] * M[b];
                j.hess(a, b) = j.hess(b, a) = k_ * P.trace();
                if (order < 3) continue;
                for (int c = 0; c <= b; ++c) {
                    const double t = -2 * k_ * (P * M[c]).trace();
                    for (const auto& [p, q, r] : {std::array<int, 3>{a, b, c}, {a, c, b}, {b, a, c},
                                                 {b, c, a}, {c, a, b}, {c, b, a}})
                        j.third[p](q, r) = t;
                }
            }
        }
        return j;
    }
    T3 along(const Vec& x, const Vec& v) const override {
        Eigen::LLT<Mat> llt(smat(x));
        if (llt.info() != Eigen::Success) throw NonInteriorPoint("matrix is not positive definite");
        const Mat L = llt.matrixL();
        const Mat Y = congruence(L, smat(v));
        const double value = -k_ * 2 * L.diagonal().array().log().sum() + c_;
        // F(x + t v) = F(x) - k log det(I + t Y)
        return {value, -k_ * Y.trace(), 0.5 * k_ * Y.squaredNorm(), -k_ * (Y * Y * Y).trace() / 3};
    }

private:
    static Mat congruence(const Mat& L, const Mat& E) {
        const Mat T = L.triangularView<Eigen::Lower>().solve(E);
        return L.triangularView<Eigen::Lower>().solve(T.transpose()).transpose();
    }
    int m_, n_;
    double k_, c_;
    std::vector<Mat> basis_;
};

class TransportModel final : public PotentialModel {
public:
    TransportModel(std::shared_ptr<const PotentialModel> inner, const Mat& A) : inner_(std::move(inner)), A_(A) {
        Eigen::FullPivLU<Mat> lu(A);
        if (!lu.isInvertible()) throw SingularMatrix("transport matrix is singular");
        B_ = lu.inverse();
        logdet_ = std::log(std::abs(lu.determinant()));
    }
    int dim() const override { return inner_->dim(); }
    double margin(const Vec& x) const override { return inner_->margin(B_ * x); }
    double value(const Vec& x) const override { return inner_->value(B_ * x) - logdet_; }
    Jet3 jet(const Vec& x, int order) const override {
        const Jet3 in = inner_->jet(B_ * x, order);
        Jet3 j;
        j.order = order;
        j.value = in.value - logdet_;
        j.grad = B_.transpose() * in.grad;
        if (order >= 2) j.hess = B_.transpose() * in.hess * B_;
        if (order >= 3) {
            const int n = dim();
            std::vector<Mat> S(n);
            for (int a = 0; a < n; ++a) S[a] = B_.transpose() * in.third[a] * B_;
            j.third.assign(n, Mat::Zero(n, n));
            for (int i = 0; i < n; ++i)
                for (int a = 0; a < n; ++a) j.third[i] += B_(a, i) * S[a];
        }
        return j;
    }
    T3 along(const Vec& x, const Vec& v) const override {
        return inner_->along(B_ * x, B_ * v) - logdet_;
    }

private:
    std::shared_ptr<const PotentialModel> inner_;
    Mat A_, B_;
    double logdet_ = 0;
};

class ProductModel final : public PotentialModel {
public:
    explicit ProductModel(std::vector<std::shared_ptr<const PotentialModel>> fs) : fs_(std::move(fs)) {
        for (const auto& f : fs_) {
            off_.push_back(n_);
            n_ += f->dim();
        }
    }
    int dim() const override { return n_; }
    double margin(const Vec& x) const override {
        double m = INFINITY;
        for (std::size_t k = 0; k < fs_.size(); ++k) m = std::min(m, fs_[k]->margin(x.segment(off_[k], fs_[k]->dim())));
        return m;
    }
    double value(const Vec& x) const override {
        double s = 0;
        for (std::size_t k = 0; k < fs_.size(); ++k) s += fs_[k]->value(x.segment(off_[k], fs_[k]->dim()));
        return s;
    }
    Jet3 jet(const Vec& x, int order) const override {
        Jet3 j = blank(n_, order);
        for (std::size_t k = 0; k < fs_.size(); ++k) {
            const int o = off_[k], d = fs_[k]->dim();
            const Jet3 f = fs_[k]->jet(x.segment(o, d), order);
            j.value += f.value;
            j.grad.segment(o, d) = f.grad;
            if (order >= 2) j.hess.block(o, o, d, d) = f.hess;
            if (order >= 3)
                for (int i = 0; i < d; ++i) j.third[o + i].block(o, o, d, d) = f.third[i];
        }
        return j;
    }
    T3 along(const Vec& x, const Vec& v) const override {
        T3 s;
        for (std::size_t k = 0; k < fs_.size(); ++k) {
            const int o = off_[k], d = fs_[k]->dim();
            s += fs_[k]->along(x.segment(o, d), v.segment(o, d));
        }
        return s;
    }

private:
    std::vector<std::shared_ptr<const PotentialModel>> fs_;
    std::vector<int> off_;
    int n_ = 0;
};

} // namespace

// Jets of any model from directional Taylor coefficients by polarization.
Jet3 polarized_jet(const PotentialModel& m, const Vec& x, int order) {
    const int n_ = m.dim();
    Jet3 j = blank(n_, order);
    auto dir = [&](std::initializer_list<std::pair<int, double>> parts) {
        Vec v = Vec::Zero(n_);
        for (const auto& [i, s] : parts) v(i) += s;
        return m.along(x, v);
    };
    std::vector<T3> axis(n_);
    for (int i = 0; i < n_; ++i) axis[i] = dir({{i, 1.0}});
    j.value = n_ > 0 ? axis[0].c[0] : m.value(x);
    for (int i = 0; i < n_; ++i) j.grad(i) = axis[i].d1();
    if (order < 2) return j;

    std::vector<std::vector<T3>> pair(n_, std::vector<T3>(n_));
    for (int i = 0; i < n_; ++i) {
        j.hess(i, i) = axis[i].d2();
        for (int k = 0; k < i; ++k) {
            pair[i][k] = pair[k][i] = dir({{i, 1.0}, {k, 1.0}});
            j.hess(i, k) = j.hess(k, i) = 0.5 * (pair[i][k].d2() - axis[i].d2() - axis[k].d2());
        }
    }
    if (order < 3) return j;

    auto set = [&](int a, int b, int c, double t) {
        for (const auto& [p, q, r] : {std::array<int, 3>{a, b, c}, {a, c, b}, {b, a, c},
                                     {b, c, a}, {c, a, b}, {c, b, a}})
            j.third[p](q, r) = t;
    };
    for (int i = 0; i < n_; ++i) {
        set(i, i, i, axis[i].d3());
        for (int k = 0; k < i; ++k) {
            const double plus = pair[i][k].d3();
            const double minus = dir({{i, 1.0}, {k, -1.0}}).d3();
            const double tiii = axis[i].d3(), tkkk = axis[k].d3();
            set(i, i, k, (plus - minus - 2 * tkkk) / 6.0);
            set(i, k, k, (plus + minus - 2 * tiii) / 6.0);
        }
    }
    for (int a = 0; a < n_; ++a)
        for (int b = 0; b < a; ++b)
            for (int c = 0; c < b; ++c) {
                const double abc = dir({{a, 1.0}, {b, 1.0}, {c, 1.0}}).d3();
                const double t = abc - pair[a][b].d3() - pair[a][c].d3() - pair[b][c].d3() + axis[a].d3() +
                                 axis[b].d3() + axis[c].d3();
                set(a, b, c, t / 6.0);
            }
    return j;
}

namespace {

// Potential given by a T3-typed function; jets by polarization.
class UserModel final : public PotentialModel {
public:
    UserModel(int n, UserFunction f, std::function<double(const Vec&)> m) : n_(n), f_(std::move(f)), m_(std::move(m)) {}
    int dim() const override { return n_; }
    double margin(const Vec& x) const override { return m_(x); }
    double value(const Vec& x) const override { return along(x, Vec::Zero(n_)).c[0]; }
    T3 along(const Vec& x, const Vec& v) const override {
        std::vector<T3> z(n_);
        for (int i = 0; i < n_; ++i) z[i] = T3(x(i), v(i));
        return f_(z);
    }
    Jet3 jet(const Vec& x, int order) const override { return polarized_jet(*this, x, order); }

private:
    int n_;
    UserFunction f_;
    std::function<double(const Vec&)> m_;
};

class AffineValueModel final : public PotentialModel {
public:
    AffineValueModel(std::shared_ptr<const PotentialModel> inner, double k, double c)
        : inner_(std::move(inner)), k_(k), c_(c) {}
    int dim() const override { return inner_->dim(); }
    double margin(const Vec& x) const override { return inner_->margin(x); }
    double value(const Vec& x) const override { return k_ * inner_->value(x) + c_; }
    Jet3 jet(const Vec& x, int order) const override {
        Jet3 j = inner_->jet(x, order);
        j.value = k_ * j.value + c_;
        j.grad *= k_;
        if (order >= 2) j.hess *= k_;
        for (auto& t : j.third) t *= k_;
        return j;
    }
    T3 along(const Vec& x, const Vec& v) const override { return k_ * inner_->along(x, v) + c_; }

private:
    std::shared_ptr<const PotentialModel> inner_;
    double k_, c_;
};

} // namespace

double log_det_hessian(const Mat& hess) {
    Eigen::LLT<Mat> llt(hess);
    if (llt.info() != Eigen::Success) throw DegenerateHessian("Hessian is not positive definite");
    const Mat L = llt.matrixL();
    return 2 * L.diagonal().array().log().sum();
}

double anchor_constant(const PotentialModel& raw, const Vec& anchor) {
    if (!(raw.margin(anchor) > 0)) throw NonInteriorPoint("anchor point is not interior");
    const Jet3 j = raw.jet(anchor, 2);
    return 0.5 * (log_det_hessian(j.hess) - 2 * j.value);
}

PotentialHandle orthant_potential(int dim) {
    if (dim < 1) throw MalformedSpec("orthant needs dim >= 1");
    PotentialHandle h;
    h.model = std::make_shared<OrthantModel>(dim);
    h.alpha = -dim;
    h.label = "closed-form";
    h.cone = ConeSpec::orthant(dim);
    return h;
}

PotentialHandle lorentz_potential(int dim, const std::optional<Vec>& anchor) {
    if (dim < 2) throw MalformedSpec("lorentz potential needs dim >= 2");
    const Vec a = anchor.value_or(Vec::Unit(dim, 0));
    if (a.size() != dim) throw DimensionMismatch("anchor has the wrong dimension");
    const double c = anchor_constant(LorentzModel(dim, 0.0), a);
    PotentialHandle h;
    h.model = std::make_shared<LorentzModel>(dim, c);
    h.alpha = -dim;
    h.label = "closed-form";
    h.cone = ConeSpec::lorentz(dim);
    h.constant = c;
    return h;
}

PotentialHandle psd_potential(int m, const std::optional<Vec>& anchor) {
    if (m < 1) throw MalformedSpec("psd potential needs m >= 1");
    const int n = svec_size(m);
    const Vec a = anchor.value_or(svec(Mat::Identity(m, m)));
    if (a.size() != n) throw DimensionMismatch("anchor has the wrong dimension");
    const double c = anchor_constant(PsdModel(m, 0.0), a);
    PotentialHandle h;
    h.model = std::make_shared<PsdModel>(m, c);
    h.alpha = -n;
    h.label = "closed-form";
    h.cone = ConeSpec::psd(m);
    h.constant = c;
    return h;
}

PotentialHandle transport(const PotentialHandle& F, const Mat& A) {
    if (A.rows() != F.dim() || A.cols() != F.dim()) throw DimensionMismatch("transport matrix has the wrong shape");
    PotentialHandle h;
    h.model = std::make_shared<TransportModel>(F.model, A);
    h.alpha = F.alpha;
    h.label = "transported";
    if (F.cone) h.cone = ConeSpec::linear_image(*F.cone, A);
    h.constant = F.constant;
    return h;
}

PotentialHandle product_potential(const std::vector<PotentialHandle>& Fs) {
    if (Fs.empty()) throw DimensionMismatch("product of no potentials");
    std::vector<std::shared_ptr<const PotentialModel>> ms;
    std::vector<ConeSpec> cones;
    double alpha = 0;
    bool have_alpha = true, have_cones = true;
    for (const auto& f : Fs) {
        ms.push_back(f.model);
        if (f.alpha) alpha += *f.alpha; else have_alpha = false;
        if (f.cone) cones.push_back(*f.cone); else have_cones = false;
    }
    PotentialHandle h;
    h.model = std::make_shared<ProductModel>(ms);
    if (have_alpha) h.alpha = alpha;
    h.label = "closed-form";
    for (const auto& f : Fs)
        if (f.label != "closed-form") h.label = f.label;
    if (have_cones) h.cone = ConeSpec::product(cones);
    return h;
}

PotentialHandle user_potential(int dim, UserFunction f, std::function<double(const Vec&)> margin,
                               std::optional<double> alpha, std::string label) {
    PotentialHandle h;
    h.model = std::make_shared<UserModel>(dim, std::move(f), std::move(margin));
    h.alpha = alpha;
    h.label = std::move(label);
    return h;
}

PotentialHandle shifted(const PotentialHandle& F, double c) {
    PotentialHandle h = F;
    h.model = std::make_shared<AffineValueModel>(F.model, 1.0, c);
    h.constant = F.constant + c;
    return h;
}

PotentialHandle scaled(const PotentialHandle& F, double k) {
    PotentialHandle h = F;
    h.model = std::make_shared<AffineValueModel>(F.model, k, 0.0);
    if (F.alpha) h.alpha = k * *F.alpha;
    h.constant = k * F.constant;
    return h;
}

bool has_closed_form(const ConeSpec& spec) {
    switch (spec.variant) {
    case Variant::Orthant:
    case Variant::Lorentz:
    case Variant::PSD: return true;
    case Variant::Polyhedral:
        return spec.normals.rows() == spec.dim && Eigen::FullPivLU<Mat>(spec.normals).isInvertible();
    case Variant::LinearImage: return has_closed_form(*spec.inner);
    case Variant::Product:
        for (const auto& f : spec.factors)
            if (!has_closed_form(f)) return false;
        return true;
    }
    return false;
}

PotentialHandle canonical_potential(const ConeSpec& spec, const std::optional<Vec>& anchor) {
    switch (spec.variant) {
    case Variant::Orthant: return orthant_potential(spec.dim);
    case Variant::Lorentz: return lorentz_potential(spec.dim, anchor);
    case Variant::PSD: return psd_potential(spec.order, anchor);
    case Variant::Polyhedral: {
        if (!has_closed_form(spec)) throw Error("no closed-form potential for a non-simplicial polyhedral cone");
        // {x : N x > 0} = N^{-1} * orthant
        PotentialHandle h = transport(orthant_potential(spec.dim), spec.normals.inverse());
        h.cone = spec;
        return h;
    }
    case Variant::LinearImage: {
        PotentialHandle h = transport(canonical_potential(*spec.inner, std::nullopt), spec.A);
        h.cone = spec;
        return h;
    }
    case Variant::Product: {
        std::vector<PotentialHandle> fs;
        for (const auto& f : spec.factors) fs.push_back(canonical_potential(f, std::nullopt));
        return product_potential(fs);
    }
    }
    throw Error("unknown variant");
}

double canonical_residual(const PotentialHandle& F, const Vec& x) {
    const Jet3 j = eval_jet3(F, x, 2);
    return std::abs(std::expm1(log_det_hessian(j.hess) - 2 * j.value));
}

double log_homogeneity_defect(const PotentialHandle& F, const std::vector<Vec>& xs, const std::vector<double>& ts) {
    if (!F.alpha) throw Error("potential has no homogeneity degree");
    double sup = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        try {
            const double t = ts[i % ts.size()];
            const double d = std::abs(F(std::exp(t) * xs[i]) - F(xs[i]) - *F.alpha * t);
            sup = std::max(sup, d);
        } catch (const Error&) {
            return NAN;
        }
    }
    return sup;
}

} // namespace conecanon
