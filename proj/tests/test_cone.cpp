#include "doctest.h"

#include "conecanon/cone.hpp"
#include "conecanon/errors.hpp"
#include "conecanon/sampling.hpp"
#include "oracles.hpp"

using namespace conecanon;

namespace {

Vec v3(double a, double b, double c) {
    Vec x(3);
    x << a, b, c;
    return x;
}

ConeSpec pentagon() {
    Mat N(5, 3);
    for (int k = 0; k < 5; ++k) N.row(k) << 1, std::cos(2 * M_PI * k / 5), std::sin(2 * M_PI * k / 5);
    return ConeSpec::polyhedral(N);
}

} // namespace

TEST_CASE("membership margins have the right sign and are 1-homogeneous") {
    const ConeSpec o = ConeSpec::orthant(3), l = ConeSpec::lorentz(3);
    CHECK(contains(o, v3(1, 2, 3)) > 0);
    CHECK(contains(o, v3(1, -1, 2)) < 0);
    CHECK(contains(l, v3(2, 1, 1)) > 0);
    CHECK(contains(l, v3(1, 1, 1)) < 0);
    const Vec x = v3(3, 1, -0.5);
    CHECK(contains(l, 2.5 * x) == doctest::Approx(2.5 * contains(l, x)).epsilon(1e-14));
    CHECK(contains(ConeSpec::psd(2), v3(1, 0, 1)) > 0);
    CHECK(contains(ConeSpec::psd(2), v3(1, 2, 1)) < 0);
}

TEST_CASE("svec is an isometry between trace and Euclidean inner products") {
    Mat X(3, 3), Y(3, 3);
    X << 2, 0.3, -1, 0.3, 1, 0.5, -1, 0.5, 4;
    Y << 1, -2, 0, -2, 3, 1, 0, 1, -1;
    CHECK(svec(X).dot(svec(Y)) == doctest::Approx((X * Y).trace()).epsilon(1e-14));
    CHECK((smat(svec(X)) - X).norm() < 1e-14);
    CHECK((oracle::smat(svec(X)) - X).norm() < 1e-14);
    CHECK(svec_size(3) == 6);
    CHECK_THROWS_AS(smat_order(5), MalformedSpec);
}

TEST_CASE("json round trip keeps the cone") {
    Mat A(3, 3);
    A << 1, 0.2, 0, 0, 1, 0.3, 0.1, 0, 1;
    const ConeSpec s = ConeSpec::product({ConeSpec::linear_image(ConeSpec::lorentz(3), A), ConeSpec::orthant(2)});
    const ConeSpec t = cone_from_json(cone_to_json(s));
    CHECK(t.dim == 5);
    SampleOptions so;
    so.count = 50;
    for (const Vec& x : sample_cone(s, so)) CHECK(contains(t, x) == doctest::Approx(contains(s, x)).epsilon(1e-14));
    const ConeSpec p = cone_from_json(R"({"variant": "psd", "dim": 6})");
    CHECK(p.order == 3);
}

TEST_CASE("malformed specs are rejected") {
    CHECK_THROWS_AS(cone_from_json("{"), MalformedSpec);
    CHECK_THROWS_AS(cone_from_json(R"({"variant": "cylinder", "dim": 3})"), MalformedSpec);
    CHECK_THROWS_AS(cone_from_json(R"({"dim": 3})"), MalformedSpec);
    CHECK_THROWS_AS(load_cone("/nonexistent/cone.json"), MalformedSpec);
}

TEST_CASE("validate_proper finds a dual witness or says why not") {
    const ValidityReport r = validate_proper(ConeSpec::lorentz(4));
    CHECK(r.proper);
    CHECK(r.margin > 0);
    CHECK(contains(dual_cone(ConeSpec::lorentz(4)), r.witness) > 0);
    // a wedge in R^3 contains a line
    Mat W(2, 3);
    W << 1, 1, 0, 1, -1, 0;
    CHECK_FALSE(validate_proper(ConeSpec::polyhedral(W)).proper);
    Mat H(1, 2);
    H << 1, 0;
    CHECK_FALSE(validate_proper(ConeSpec::polyhedral(H)).proper);
    CHECK(validate_proper(pentagon()).proper);
}

TEST_CASE("dual cones pair positively with the cone") {
    for (const ConeSpec& s : {ConeSpec::orthant(3), ConeSpec::lorentz(3), ConeSpec::psd(2), pentagon()}) {
        const ConeSpec d = dual_cone(s);
        SampleOptions so;
        so.count = 40;
        so.seed = 3;
        const auto xs = sample_cone(s, so);
        so.seed = 4;
        const auto ys = sample_cone(d, so);
        for (std::size_t i = 0; i < xs.size(); ++i) CHECK(xs[i].dot(ys[i]) > 0);
    }
}

TEST_CASE("extreme rays of the orthant are the coordinate axes") {
    const Mat R = extreme_rays(ConeSpec::orthant(3));
    REQUIRE(R.rows() == 3);
    for (int i = 0; i < 3; ++i) {
        const Vec r = R.row(i).transpose() / R.row(i).norm();
        CHECK(r.maxCoeff() == doctest::Approx(1.0));
        CHECK(r.minCoeff() == doctest::Approx(0.0));
    }
    CHECK(is_polyhedral(pentagon()));
    CHECK_FALSE(is_polyhedral(ConeSpec::lorentz(3)));
    CHECK(extreme_rays(pentagon()).rows() == 5);
}

TEST_CASE("cross-section charts round trip") {
    const ConeSpec l = ConeSpec::lorentz(3);
    const CrossSection cs = cross_section(l, v3(1, 0, 0));
    CHECK(cs.n() == 2);
    Vec s(2);
    s << 0.3, -0.2;
    CHECK((cs.to_chart(cs.to_cone(s)) - s).norm() < 1e-14);
    Vec d(2);
    d << 1, 0;
    // the slice x0 = 1 is the unit disk
    CHECK(cs.ray_exit(Vec::Zero(2), d) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("samples are seeded, interior, and reproducible") {
    SampleOptions so;
    so.count = 100;
    so.seed = 11;
    const auto a = sample_cone(ConeSpec::psd(3), so), b = sample_cone(ConeSpec::psd(3), so);
    REQUIRE(a.size() == 100);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i] == b[i]);
        CHECK(contains(ConeSpec::psd(3), a[i]) > 0);
    }
    so.seed = 12;
    CHECK(sample_cone(ConeSpec::psd(3), so)[0] != a[0]);
}
