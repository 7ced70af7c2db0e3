#include "doctest.h"

#include <cstdio>
#include <fstream>

#include "conecanon/errors.hpp"
#include "conecanon/foliation.hpp"
#include "conecanon/sampling.hpp"

using namespace conecanon;

namespace {

std::vector<Vec> pts(const ConeSpec& s, int n, std::uint64_t seed = 1) {
    SampleOptions so;
    so.count = n;
    so.seed = seed;
    so.decades = 2;
    return sample_cone(s, so);
}

} // namespace

TEST_CASE("the hyperbola xy = 1 has affine curvature -2^{-2/3}") {
    // (e^s, e^-s): det(x', x'') = 2, so affine arc length rescales s by 2^{-1/3} and x_{ss} = 2^{-2/3} x
    const double lam = -std::pow(2.0, -2.0 / 3);
    const EquiaffineData d = equiaffine_data(canonical_potential(ConeSpec::orthant(2)), Vec::Ones(2));
    CHECK(d.lambda == doctest::Approx(lam).epsilon(1e-10));
    CHECK(d.radial < 1e-10);
    CHECK(level_curvature(2, 0) == doctest::Approx(lam).epsilon(1e-14));
}

TEST_CASE("level sets are affine spheres with the predicted curvature") {
    for (const ConeSpec& s : {ConeSpec::orthant(3), ConeSpec::lorentz(3), ConeSpec::psd(2)}) {
        const PotentialHandle F = canonical_potential(s);
        for (const Vec& x : pts(s, 10)) {
            const EquiaffineData d = equiaffine_data(F, x);
            CHECK(d.lambda == doctest::Approx(level_curvature(s.dim, F(x))).epsilon(1e-8));
            CHECK(d.radial < 1e-8);
        }
    }
}

TEST_CASE("meshes sit on the level and write as OBJ") {
    const ConeSpec s = ConeSpec::lorentz(3);
    const LevelSetMesh m = level_set_mesh(canonical_potential(s), s, 1.0, 6);
    CHECK(m.vertices.size() > 10);
    CHECK(m.faces.size() > 10);
    CHECK(m.max_level_error < 1e-10);
    const std::string obj = "conecanon_test.obj", csv = "conecanon_test.csv";
    write_obj(m, obj, csv);
    std::ifstream in(obj);
    std::string line;
    int v = 0, f = 0;
    while (std::getline(in, line)) {
        v += line.rfind("v ", 0) == 0;
        f += line.rfind("f ", 0) == 0;
    }
    CHECK(v == static_cast<int>(m.vertices.size()));
    CHECK(f == static_cast<int>(m.faces.size()));
    std::remove(obj.c_str());
    std::remove(csv.c_str());
}

TEST_CASE("derived metrics") {
    const PotentialHandle F = canonical_potential(ConeSpec::orthant(2));
    Vec x(2);
    x << 0.5, 3;
    // u = -e^{-F} = -x0 x1, Hessian [[0,-1],[-1,0]]
    const DerivedMetricReport u = lorentzian_u(F, x);
    Mat H(2, 2);
    H << 0, -1, -1, 0;
    CHECK((u.metric - H).norm() < 1e-12);
    CHECK(u.positive == 1);
    CHECK(u.negative == 1);
    CHECK(u.residual < 1e-12);
    // the MA metric only exists above log(B/C)
    CHECK_THROWS_AS(ma_riemannian_metric(F, 1, 1, Vec::Ones(2) * 2), OutsideRegion);
    const DerivedMetricReport m = ma_riemannian_metric(F, 1, 1, Vec::Ones(2) * 0.5);
    CHECK(m.positive == 2);
    CHECK(m.residual < 1e-8);
}

TEST_CASE("the cone is a product with its level set") {
    for (const ConeSpec& s : {ConeSpec::orthant(3), ConeSpec::lorentz(3)})
        CHECK(product_isometry_defect(canonical_potential(s), pts(s, 10)) < 1e-6);
}

TEST_CASE("reparametrizations follow the chain rule") {
    const ConeSpec s = ConeSpec::lorentz(3);
    const PotentialHandle F = canonical_potential(s);
    for (double k : {5.0, 3.0, -2.0}) { // k = n+1 makes the Hessian degenerate
        auto d1 = [k](double t) { return std::exp(-t / k); };
        auto d2 = [k](double t) { return -std::exp(-t / k) / k; };
        CHECK(reparametrization_defect(F, d1, d2, pts(s, 10)) < 1e-8);
    }
}
