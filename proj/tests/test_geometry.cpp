#include "doctest.h"

#include "conecanon/geometry.hpp"
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

TEST_CASE("harmonicity: |dF|^2 = n+1 and the Laplacian vanishes") {
    for (const ConeSpec& s : {ConeSpec::orthant(3), ConeSpec::lorentz(4), ConeSpec::psd(2)}) {
        const HarmonicityReport r = harmonicity_check(canonical_potential(s), pts(s, 40));
        CHECK(r.sup_grad_deviation < 1e-9);
        CHECK(r.sup_laplacian < 1e-7);
        CHECK(r.sup_flat_deviation < 1e-8);
    }
}

TEST_CASE("orthant: Koszul form -2/x, kappa = -2g, flat, Pick norm at the bound") {
    const PotentialHandle F = canonical_potential(ConeSpec::orthant(3));
    Vec x(3);
    x << 0.5, 2, 3;
    const GeometryReport g = geometry_at(F, x);
    // F''' = -2/x^3 against g^{ii} = x^2
    CHECK((g.H + 2 * x.cwiseInverse()).norm() < 1e-12);
    CHECK(g.koszul_discrepancy < 1e-10);
    CHECK((g.whitened_kappa + 2 * Mat::Identity(3, 3)).norm() < 1e-10);
    CHECK(g.ricci.norm() < 1e-10);
    CHECK(std::abs(g.scalar) < 1e-10);
    // sum over i of (2)^2 whitened, minus nothing: the orthant sits on the Pick bound 4n(n-1)/(n+1)
    const double n = 2;
    CHECK(g.pick_norm2 == doctest::Approx(4 * n * (n - 1) / (n + 1)).epsilon(1e-9));
}

TEST_CASE("Lorentz(3) has constant scalar curvature -2/3") {
    const PotentialHandle F = canonical_potential(ConeSpec::lorentz(3));
    for (const Vec& x : pts(ConeSpec::lorentz(3), 10)) CHECK(geometry_at(F, x).scalar == doctest::Approx(-2.0 / 3).epsilon(1e-7));
}

TEST_CASE("curvature bounds hold on closed forms") {
    for (const ConeSpec& s : {ConeSpec::orthant(3), ConeSpec::lorentz(3), ConeSpec::lorentz(4), ConeSpec::psd(2)}) {
        const CurvatureBoundsReport r = curvature_bounds_check(canonical_potential(s), pts(s, 30));
        CHECK(r.violations == 0);
        CHECK(r.ricci_floor == doctest::Approx(-double(s.dim - 2) / (s.dim)));
        CHECK(r.max_eig <= 1e-8);
    }
}

TEST_CASE("the metric is invariant under linear transport") {
    Mat A(3, 3);
    A << 1, 0.3, 0, 0.2, 2, 0.1, 0, -0.4, 1;
    const PotentialHandle F = canonical_potential(ConeSpec::lorentz(3));
    const PotentialHandle G = transport(F, A);
    Vec x(3);
    x << 2, 0.5, -0.3;
    const GeometryReport a = geometry_at(F, x), b = geometry_at(G, A * x);
    CHECK(b.scalar == doctest::Approx(a.scalar).epsilon(1e-8));
    CHECK((A.transpose() * b.g * A - a.g).norm() < 1e-10 * a.g.norm());
}
