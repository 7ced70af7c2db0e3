#include "doctest.h"

#include "conecanon/errors.hpp"
#include "conecanon/potential.hpp"
#include "conecanon/sampling.hpp"
#include "oracles.hpp"

using namespace conecanon;

namespace {

std::vector<Vec> pts(const ConeSpec& s, int n, std::uint64_t seed = 1) {
    SampleOptions so;
    so.count = n;
    so.seed = seed;
    so.decades = 1;
    return sample_cone(s, so);
}

} // namespace

TEST_CASE("orthant potential is -sum log x") {
    const PotentialHandle F = canonical_potential(ConeSpec::orthant(4));
    for (const Vec& x : pts(ConeSpec::orthant(4), 50)) CHECK(F(x) == doctest::Approx(oracle::orthant(x)).epsilon(1e-13));
    CHECK(F(Vec::Ones(2 + 2)) == 0.0);
}

TEST_CASE("Lorentz potentials match the hand-derived constant") {
    for (int N = 2; N <= 5; ++N) {
        const Vec e = Vec::Unit(N, 0);
        const double c = oracle::lorentz_constant(e);
        Vec y = Vec::Constant(N, 0.1);
        y(0) = 2;
        CHECK(oracle::lorentz_constant(y) == doctest::Approx(c).epsilon(1e-12));
        const PotentialHandle F = canonical_potential(ConeSpec::lorentz(N));
        for (const Vec& x : pts(ConeSpec::lorentz(N), 30, N))
            CHECK(F(x) == doctest::Approx(oracle::lorentz(x, c)).epsilon(1e-12));
    }
    // Lorentz(2): constant log 2
    CHECK(oracle::lorentz_constant(Vec::Unit(2, 0)) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("PSD potentials match the trace-form Hessian constant") {
    for (int m = 2; m <= 3; ++m) {
        const ConeSpec s = ConeSpec::psd(m);
        const Vec I = svec(Mat::Identity(m, m));
        const double c = oracle::psd_constant(I);
        const PotentialHandle F = canonical_potential(s);
        for (const Vec& x : pts(s, 30, m)) {
            CHECK(oracle::psd_constant(x) == doctest::Approx(c).epsilon(1e-10));
            CHECK(F(x) == doctest::Approx(oracle::psd(x, c)).epsilon(1e-12));
        }
    }
}

TEST_CASE("jets agree with finite differences of the value") {
    for (const ConeSpec& s : {ConeSpec::lorentz(3), ConeSpec::psd(2), ConeSpec::orthant(3)}) {
        const PotentialHandle F = canonical_potential(s);
        for (const Vec& x : pts(s, 5, 9)) {
            const double h = 1e-3 * x.norm() * std::min(1.0, contains(s, x) / x.norm());
            const Jet3 j = F.jet(x, 3);
            const Vec g = oracle::fd_gradient([&](const Vec& y) { return F(y); }, x, h);
            CHECK((j.grad - g).norm() <= 1e-7 * j.grad.norm());
            const Mat H = oracle::fd_hessian([&](const Vec& y) { return F(y); }, x, h);
            CHECK((j.hess - H).norm() <= 1e-5 * j.hess.norm());
            // third derivative: differentiate the exact Hessian along a coordinate
            for (int i = 0; i < x.size(); ++i) {
                const Vec e = h * Vec::Unit(x.size(), i);
                const Mat d = (F.jet(x + e, 2).hess - F.jet(x - e, 2).hess) / (2 * h);
                CHECK((j.third[i] - d).norm() <= 1e-4 * j.third[i].norm() + 1e-10);
            }
        }
    }
}

TEST_CASE("canonical residual vanishes for closed forms, images and products") {
    Mat A(3, 3);
    A << 2, 0.5, 0, -0.3, 1, 0.2, 0.1, 0.4, 1.5;
    const std::vector<ConeSpec> cones = {ConeSpec::linear_image(ConeSpec::lorentz(3), A),
                                         ConeSpec::product({ConeSpec::orthant(2), ConeSpec::psd(2)}),
                                         ConeSpec::linear_image(ConeSpec::psd(2), A)};
    for (const ConeSpec& s : cones) {
        const PotentialHandle F = canonical_potential(s);
        for (const Vec& x : pts(s, 50)) CHECK(canonical_residual(F, x) < 1e-10);
    }
}

TEST_CASE("transport subtracts log|det A| at mapped points") {
    Mat A(2, 2);
    A << 3, 1, 0.5, 2;
    const PotentialHandle F = canonical_potential(ConeSpec::orthant(2));
    const PotentialHandle G = transport(F, A);
    Vec x(2);
    x << 0.7, 1.3;
    CHECK(G(A * x) == doctest::Approx(F(x) - std::log(A.determinant())).epsilon(1e-14));
    CHECK_THROWS_AS(transport(F, Mat::Zero(2, 2)), SingularMatrix);
}

TEST_CASE("products add, shifts and scales act on the value") {
    const PotentialHandle a = canonical_potential(ConeSpec::orthant(2)), b = canonical_potential(ConeSpec::lorentz(3));
    const PotentialHandle p = product_potential({a, b});
    Vec x(5);
    x << 1, 2, 3, 1, -1;
    CHECK(p(x) == doctest::Approx(a(x.head(2)) + b(x.tail(3))).epsilon(1e-14));
    REQUIRE(p.alpha);
    CHECK(*p.alpha == -5.0);
    const PotentialHandle s = shifted(a, 0.1);
    CHECK(std::exp(log_det_hessian(s.jet(x.head(2), 2).hess) - 2 * s(x.head(2))) ==
          doctest::Approx(std::exp(-0.2)).epsilon(1e-13));
    const PotentialHandle k = scaled(a, 2);
    CHECK(*k.alpha == -4.0);
    CHECK(k(x.head(2)) == doctest::Approx(2 * a(x.head(2))));
}

TEST_CASE("log-homogeneity degree is -(n+1)") {
    for (const ConeSpec& s : {ConeSpec::orthant(3), ConeSpec::lorentz(4), ConeSpec::psd(3)}) {
        const PotentialHandle F = canonical_potential(s);
        REQUIRE(F.alpha);
        CHECK(*F.alpha == -s.dim);
        CHECK(log_homogeneity_defect(F, pts(s, 20), {-1.0, 0.5, 2.0}) < 1e-12);
    }
}

TEST_CASE("user potentials run through the same jets") {
    const PotentialHandle U = user_potential(
        2, [](const std::vector<T3>& x) { return -log(x[0]) - log(x[1]); },
        [](const Vec& x) { return x.minCoeff(); }, -2.0);
    const PotentialHandle F = canonical_potential(ConeSpec::orthant(2));
    Vec x(2);
    x << 0.4, 2.5;
    const Jet3 a = U.jet(x, 3), b = F.jet(x, 3);
    CHECK(a.value == doctest::Approx(b.value));
    CHECK((a.grad - b.grad).norm() < 1e-13);
    CHECK((a.hess - b.hess).norm() < 1e-12);
    CHECK((a.third[0] - b.third[0]).norm() < 1e-11);
}

TEST_CASE("a different anchor gives the same canonical potential") {
    Vec anchor(3);
    anchor << 2, 0.5, -1;
    const PotentialHandle F = canonical_potential(ConeSpec::lorentz(3)), G = lorentz_potential(3, anchor);
    for (const Vec& x : pts(ConeSpec::lorentz(3), 10)) CHECK(G(x) == doctest::Approx(F(x)).epsilon(1e-12));
}

TEST_CASE("evaluation outside the domain is an error") {
    const PotentialHandle F = canonical_potential(ConeSpec::lorentz(3));
    Vec x(3);
    x << 1, 1, 1;
    CHECK_FALSE(F.interior(x));
    CHECK_THROWS_AS(F.jet(x, 2), NonInteriorPoint);
}
