#include "doctest.h"

#include "conecanon/duality.hpp"
#include "conecanon/errors.hpp"
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

TEST_CASE("orthant gradient map is the coordinatewise inverse") {
    const PotentialHandle F = canonical_potential(ConeSpec::orthant(3));
    Vec x(3);
    x << 0.5, 2, 4;
    CHECK((gradient_map(F, x) - x.cwiseInverse()).norm() < 1e-14);
    const DualPairReport r = dual_pair(F, dual_potential(ConeSpec::orthant(3)), x);
    CHECK(r.identity_defect < 1e-13);
    CHECK(r.roundtrip < 1e-13);
    CHECK(r.dual_margin > 0);
}

TEST_CASE("closed-form duals satisfy the identity, round trip and isometry") {
    Mat A(3, 3);
    A << 1, 0.2, 0, 0.1, 1.5, 0.3, 0, -0.2, 0.8;
    for (const ConeSpec& s : {ConeSpec::lorentz(3), ConeSpec::psd(2), ConeSpec::linear_image(ConeSpec::orthant(3), A)}) {
        const PotentialHandle F = canonical_potential(s), D = dual_potential(s);
        const auto xs = pts(s, 30);
        CHECK(duality_identity_defect(F, D, xs).sup < 1e-10);
        CHECK(inverse_map_roundtrip(F, D, xs).sup < 1e-10);
        CHECK(isometry_defect(F, D, xs).sup < 1e-8);
        CHECK(min_dual_margin(F, s, xs) > 0);
        CHECK(gradient_homogeneity_defect(F, xs) < 1e-12);
    }
}

TEST_CASE("the gradient map commutes with automorphisms") {
    for (const ConeSpec& s : {ConeSpec::orthant(3), ConeSpec::lorentz(3), ConeSpec::psd(2)}) {
        const auto autos = automorphisms(s);
        REQUIRE_FALSE(autos.empty());
        CHECK(equivariance_defect(canonical_potential(s), autos, pts(s, 20)) < 1e-10);
    }
}

TEST_CASE("e^F is completely monotone to third order") {
    for (const ConeSpec& s : {ConeSpec::orthant(2), ConeSpec::lorentz(3)}) {
        const MonotonicityReport m = complete_monotonicity(canonical_potential(s), s, pts(s, 30));
        CHECK(m.pass);
        for (double v : m.min_order) CHECK(v >= 0);
    }
}

TEST_CASE("the gradient map needs an interior point") {
    Vec x(2);
    x << 1, -1;
    CHECK_THROWS_AS(gradient_map(canonical_potential(ConeSpec::orthant(2)), x), NonInteriorPoint);
}
