#include "doctest.h"

#include <cstdio>
#include <fstream>

#include "conecanon/ma_solver.hpp"

using namespace conecanon;

namespace {

SolveOptions spacing(double h) {
    SolveOptions o;
    o.h = h;
    return o;
}

double sup_error(const RadialSolution& sol, const PotentialHandle& exact, const std::vector<Vec>& xs) {
    double e = 0;
    for (const Vec& x : xs) e = std::max(e, std::abs(sol.F(x) - exact(x)));
    return e;
}

} // namespace

TEST_CASE("orthant(2): the 1D slice converges at second order") {
    const ConeSpec s = ConeSpec::orthant(2);
    const PotentialHandle exact = canonical_potential(s);
    const RadialSolution a = numeric_potential(s, spacing(1.0 / 32)), b = numeric_potential(s, spacing(1.0 / 64));
    const auto xs = solver_probes(*a.grid, 40, 3, 5 * a.grid->spacing);
    const double ea = sup_error(a, exact, xs), eb = sup_error(b, exact, xs);
    CHECK(eb < 1e-3);
    CHECK(ea / eb > 3.0);
    CHECK(a.F.label == "numeric");
    CHECK(a.F.alpha.value_or(0) == -2.0);
}

TEST_CASE("Lorentz(3): the disk solve matches the closed form") {
    const ConeSpec s = ConeSpec::lorentz(3);
    const RadialSolution sol = numeric_potential(s, spacing(1.0 / 32));
    CHECK(sol.grid->n == 2);
    CHECK(sol.grid->residual < 1e-8);
    const auto xs = solver_probes(*sol.grid, 40, 5, 5 * sol.grid->spacing);
    CHECK(sup_error(sol, canonical_potential(s), xs) < 1e-2);
    CHECK(residual_sup(sol, xs) < 1e-2);
}

TEST_CASE("sandwich bounds are exact on simplicial cones and bracket the pentagon") {
    const ConeSpec o = ConeSpec::orthant(3);
    Vec x(3);
    x << 0.5, 1, 2;
    const SandwichBounds b = sandwich_bounds(o, x);
    const double F = canonical_potential(o)(x);
    CHECK(b.lower == doctest::Approx(F).epsilon(1e-10));
    CHECK(b.upper == doctest::Approx(F).epsilon(1e-10));

    Mat N(5, 3);
    for (int k = 0; k < 5; ++k) N.row(k) << 1, std::cos(2 * M_PI * k / 5), std::sin(2 * M_PI * k / 5);
    const ConeSpec pent = ConeSpec::polyhedral(N);
    const RadialSolution sol = numeric_potential(pent, spacing(1.0 / 32));
    const double slack = 10.0 / (32 * 32);
    for (const Vec& y : solver_probes(*sol.grid, 20, 2, 5 * sol.grid->spacing)) {
        const SandwichBounds sb = sandwich_bounds(pent, y);
        CHECK(sb.lower <= sb.upper);
        CHECK(sol.F(y) >= sb.lower - slack);
        CHECK(sol.F(y) <= sb.upper + slack);
    }
}

TEST_CASE("simplicial and facet potentials agree on the same cone") {
    // rays = columns of R, facets = rows of R^{-1}
    Mat R(3, 3);
    R << 1, 1, 1, 0.5, -0.2, 0, 0, 0.4, -0.5;
    Vec x = R * Vec::Ones(3);
    CHECK(simplicial_potential(R, x) == doctest::Approx(facet_potential(R.inverse(), x)).epsilon(1e-12));
}

TEST_CASE("grid CSV starts with a cone header") {
    const RadialSolution sol = numeric_potential(ConeSpec::orthant(2), spacing(1.0 / 16));
    const std::string path = "conecanon_test_grid.csv";
    write_grid_csv(sol, path);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line.rfind("# cone", 0) == 0);
    std::remove(path.c_str());
}
