#include "doctest.h"

#include <cstdio>
#include <fstream>

#include "conecanon/errors.hpp"
#include "conecanon/ipm.hpp"
#include "oracles.hpp"

using namespace conecanon;

namespace {

ConicProgram lp() {
    ConicProgram p;
    p.c = Vec::Unit(2, 0);
    p.A = Mat::Ones(1, 2);
    p.b = Vec::Ones(1);
    p.cone = ConeSpec::orthant(2);
    return p;
}

} // namespace

TEST_CASE("Newton step at x = (1/2, 1/2) matches the bordered KKT solve") {
    const ConicProgram p = lp();
    const Vec x = Vec::Constant(2, 0.5);
    const NewtonStep s = newton_direction(canonical_potential(p.cone), p, x, 1.0);
    const Vec g = p.c - x.cwiseInverse();
    const Mat H = x.cwiseInverse().array().square().matrix().asDiagonal();
    const Vec d = oracle::kkt_step(H, p.A, g, Vec::Zero(1));
    CHECK((s.step - d).norm() < 1e-14);
    CHECK(s.step(0) == doctest::Approx(-0.125));
    CHECK(s.decrement == doctest::Approx(std::sqrt(d.dot(H * d))).epsilon(1e-12));
}

TEST_CASE("the decrement is invariant under reparametrization") {
    const ConicProgram p = lp();
    Mat M(2, 2);
    M << 2, 1, 0.5, 3;
    const ConicProgram q = reparametrize(p, M);
    Vec x(2);
    x << 0.3, 0.7;
    const PotentialHandle F = canonical_potential(p.cone);
    const NewtonStep a = newton_direction(F, p, x, 0.7), b = newton_direction(transport(F, M), q, M * x, 0.7);
    CHECK(b.decrement == doctest::Approx(a.decrement).epsilon(1e-10));
    CHECK((b.step - M * a.step).norm() < 1e-10);
}

TEST_CASE("small programs solve to the known optimum") {
    const ConicProgram p = lp();
    const IpmResult r = solve_conic(p, canonical_potential(p.cone));
    CHECK(r.status == "solved");
    CHECK(r.x(0) == doctest::Approx(0).epsilon(1e-7));
    CHECK(r.x(1) == doctest::Approx(1).epsilon(1e-7));
    CHECK(r.gap_bound <= 1e-8 * (1 + 1e-9));
    CHECK(r.outer <= r.bound);
    CHECK(r.nu == 2);

    ConicProgram s;
    s.c = Vec::Unit(2, 0);
    s.A = Mat(1, 2);
    s.A << 0, 1;
    s.b = Vec::Ones(1);
    s.cone = ConeSpec::lorentz(2);
    CHECK(solve_conic(s, canonical_potential(s.cone)).x(0) == doctest::Approx(1).epsilon(1e-7));

    Mat M(2, 2);
    M << 2, 1, 0.5, 3;
    const ConicProgram q = reparametrize(p, M);
    const IpmResult rq = solve_conic(q, canonical_potential(q.cone));
    CHECK((M.inverse() * rq.x - r.x).norm() < 1e-7);
}

TEST_CASE("infeasible and unbounded programs are reported") {
    ConicProgram p = lp();
    p.b(0) = -1;
    CHECK_THROWS_AS(solve_conic(p, canonical_potential(p.cone)), Infeasible);
    ConicProgram u = lp();
    u.c << -1, 0;
    u.A << 1, -1;
    u.b << 0;
    CHECK_THROWS_AS(solve_conic(u, canonical_potential(u.cone)), Unbounded);
}

TEST_CASE("programs parse from JSON and trace to CSV") {
    const ConicProgram p = load_program(CONECANON_SPECS "/lp.json");
    CHECK(p.cone.dim == 2);
    CHECK_THROWS_AS(program_from_json(R"({"c": [1], "A": [[1, 1]], "b": [1], "cone": {"variant": "orthant", "dim": 2}})"),
                    DimensionMismatch);
    const IpmResult r = solve_conic(p, canonical_potential(p.cone));
    const std::string path = "conecanon_test_trace.csv";
    write_trace_csv(r, path);
    std::ifstream in(path);
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows >= static_cast<int>(r.trace.size()));
    std::remove(path.c_str());
}
