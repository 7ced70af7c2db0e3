#include "doctest.h"

#include "conecanon/certify.hpp"
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

PolyDomain triangle() {
    PolyDomain P;
    P.A.resize(3, 2);
    P.A << 1, 0, 0, 1, -1, -1;
    P.b.resize(3);
    P.b << 0, 0, 1;
    return P;
}

// e^{-2c} = inf over the closure of det Hess(-sum log l) * prod l^2, by brute force on a grid.
double grid_constant(const PolyDomain& P, double lo, double hi, int m) {
    double best = INFINITY;
    for (int i = 0; i <= m; ++i)
        for (int j = 0; j <= m; ++j) {
            Vec x(2);
            x << lo + (hi - lo) * i / m, lo + (hi - lo) * j / m;
            const Vec l = P.A * x + P.b;
            if (l.minCoeff() <= 0) continue;
            Mat H = Mat::Zero(2, 2);
            for (int a = 0; a < l.size(); ++a) H += P.A.row(a).transpose() * P.A.row(a) / (l(a) * l(a));
            best = std::min(best, H.determinant() * l.array().square().prod());
        }
    return -0.5 * std::log(best);
}

} // namespace

TEST_CASE("pointwise ratios on the orthant") {
    const PotentialHandle F = canonical_potential(ConeSpec::orthant(2));
    const Vec x = Vec::Ones(2);
    CHECK(self_concordance_ratio(F, x, Vec::Unit(2, 0)) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(barrier_parameter_ratio(F, x, Vec::Unit(2, 0)) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(barrier_parameter_ratio(F, x, x) == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("self-concordance and barrier parameter sups") {
    for (const ConeSpec& s : {ConeSpec::orthant(3), ConeSpec::lorentz(3), ConeSpec::psd(2)}) {
        const PotentialHandle F = canonical_potential(s);
        const auto xs = pts(s, 200);
        const CertReport sc = self_concordance_sup(F, xs, 8, 7);
        CHECK(sc.pass);
        CHECK(sc.statistic <= 1 + 1e-9);
        const CertReport nu = barrier_parameter_sup(F, xs, 8, 7);
        CHECK(nu.pass);
        CHECK(nu.statistic <= s.dim + 1e-6);
        CHECK(nu.statistic >= s.dim - 1e-6); // attained along v = x
    }
    // Lorentz is a scaled log barrier, so its sc sup is 1 / scale = 2/3
    const CertReport sc = self_concordance_sup(canonical_potential(ConeSpec::lorentz(3)), pts(ConeSpec::lorentz(3), 300));
    CHECK(sc.statistic <= 2.0 / 3 + 1e-9);
    CHECK(sc.statistic >= 0.6);
}

TEST_CASE("ratios are affine invariant") {
    Mat A(2, 2);
    A << 2, 1, 0.5, 3;
    const PotentialHandle F = canonical_potential(ConeSpec::orthant(2)), G = transport(F, A);
    Vec x(2), v(2);
    x << 0.3, 1.7;
    v << 1, -2;
    CHECK(self_concordance_ratio(G, A * x, A * v) == doctest::Approx(self_concordance_ratio(F, x, v)).epsilon(1e-10));
    CHECK(barrier_parameter_ratio(G, A * x, A * v) == doctest::Approx(barrier_parameter_ratio(F, x, v)).epsilon(1e-10));
}

TEST_CASE("polygon log barrier constants agree with a brute-force minimum") {
    PolyBarrierInfo info;
    const PotentialHandle G = polyhedral_log_barrier(triangle(), &info);
    CHECK(info.constant == doctest::Approx(std::log(std::sqrt(3.0))).epsilon(1e-12));
    CHECK(info.constant == doctest::Approx(grid_constant(triangle(), 0, 1, 400)).epsilon(1e-4));
    PolyDomain sq;
    sq.A.resize(4, 2);
    sq.A << 1, 0, -1, 0, 0, 1, 0, -1;
    sq.b = Vec::Ones(4);
    PolyBarrierInfo si;
    polyhedral_log_barrier(sq, &si);
    CHECK(si.constant == doctest::Approx(grid_constant(sq, -1, 1, 400)).epsilon(1e-4));
    // subsolution on a grid inside the triangle
    std::vector<Vec> xs;
    for (int i = 1; i < 20; ++i)
        for (int j = 1; i + j < 20; ++j) xs.push_back(Vec::Map(std::array<double, 2>{i / 20.0, j / 20.0}.data(), 2));
    const CertReport r = subsolution_check(G, xs);
    CHECK(r.pass);
    CHECK(r.statistic >= 1 - 1e-9);
}

TEST_CASE("a shifted canonical potential is a strict subsolution and is dominated") {
    const ConeSpec s = ConeSpec::lorentz(3);
    const PotentialHandle F = canonical_potential(s), G = shifted(F, 0.1);
    const auto xs = pts(s, 50);
    CHECK(subsolution_check(G, xs).statistic == doctest::Approx(std::exp(-0.2)).epsilon(1e-10));
    CHECK(subsolution_check(F, xs).statistic == doctest::Approx(1.0).epsilon(1e-10));
    const CertReport d = schwarz_dominance(F, G, xs);
    CHECK(d.statistic == doctest::Approx(0.1).epsilon(1e-12));
    CHECK_FALSE(d.pass);
    CHECK(schwarz_dominance(F, shifted(F, -0.1), xs).pass);
    CHECK(std::abs(schwarz_dominance(F, F, xs).statistic) < 1e-14);
}

TEST_CASE("concave witnesses are rejected") {
    const PotentialHandle G = user_potential(
        2, [](const std::vector<T3>& x) { return log(x[0]) + log(x[1]); }, [](const Vec& x) { return x.minCoeff(); });
    CHECK_THROWS_AS(subsolution_check(G, pts(ConeSpec::orthant(2), 5)), NonConvexWitness);
}
