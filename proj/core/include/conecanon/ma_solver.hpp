#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "conecanon/potential.hpp"

namespace conecanon {

struct SolveOptions {
    double h = 1.0 / 64;   // spacing relative to the longest chart extent
    double tol = 1e-10;    // sup of the discrete residual
    int max_iter = 100;
    double boundary = 0;   // Dirichlet data u = -boundary
    bool monotone = true;  // run the wide-stencil pass and filter (n = 2)
};

// Solution of (-u)^{n+2} det D^2 u = 1, u = -boundary on the edge of a cross-section chart.
struct CrossSectionGrid {
    CrossSection cs;
    int n = 0;
    double h = 0;
    double spacing = 0;     // chart spacing (n = 2) or mapped-coordinate step (n = 1)
    double boundary = 0;

    // n = 1: nodes s_k = a + (b - a)(1 - cos(pi k / M)) / 2, k = 0..M
    double a = 0, b = 0;
    int M = 0;

    // n = 2: lattice lo + spacing * (i, j), i < nx, j < ny; index = -1 off the domain
    int nx = 0, ny = 0;
    Vec lo;
    std::vector<int> index;

    std::vector<Vec> nodes; // chart coordinates of every grid node
    Vec u;                  // nodal values, -boundary off the domain
    Vec w;                  // interpolated unknown (-u)^p (n = 2)
    double p = 1;

    int iterations = 0;
    double residual = 0;          // accurate scheme
    double monotone_residual = 0; // wide-stencil scheme
    int monotone_nodes = 0;       // nodes where the filter kept the monotone value
    double min_second_difference = 0;

    int unknowns() const;
    bool interior_node(int k) const;
    // Taylor coefficients of u along s0 + ds(t), ds(0) = 0.
    T3 eval(const Vec& s0, const std::vector<T3>& ds) const;
    double eval(const Vec& s) const;
    double chart_distance(const Vec& s) const; // distance to the chart boundary
};

CrossSectionGrid solve_dirichlet_ma(const CrossSection& cs, const SolveOptions& opt = {});

struct RadialSolution {
    std::shared_ptr<const CrossSectionGrid> grid;
    double kappa = 0;        // lift constant used by the handle
    double k_barycenter = 0; // residual-calibrated constant at the barycenter (diagnostic)
    PotentialHandle F;
};

// F(x) = -(n+1) log(-kappa u(p)) - (n+1) log(w.x), p the slice point of x.
RadialSolution lift_to_cone(const CrossSectionGrid& grid);
// Interior cone points whose slice points keep chart distance >= min_distance.
std::vector<Vec> solver_probes(const CrossSectionGrid& grid, int count, std::uint64_t seed, double min_distance);
// sup |H(F) e^{-2F} - 1| with H(F) from the Hessian of the interpolant.
double residual_sup(const RadialSolution& sol, const std::vector<Vec>& probes);
// sup |F_h - F_2h| at the probes; the tolerance quoted for numeric cross-checks.
double refinement_defect(const RadialSolution& fine, const RadialSolution& coarse, const std::vector<Vec>& probes);

// Canonical potential of a proper cone in dimension 2 or 3 by slicing at the dual witness.
RadialSolution numeric_potential(const ConeSpec& spec, const SolveOptions& opt = {});

struct SandwichBounds {
    double lower = -INFINITY; // max over circumscribed simplicial cones
    double upper = INFINITY;  // min over inscribed simplicial cones containing x
    double inscribed_max = -INFINITY;
    int inscribed = 0, circumscribed = 0;
};

// Boundary rays used to build simplicial cones: extreme rays or sampled boundary rays.
Mat boundary_rays(const ConeSpec& spec, int samples = 24);
SandwichBounds sandwich_bounds(const ConeSpec& spec, const Vec& x);
// Canonical potentials of the simplicial cones spanned by triples of rays (columns of R).
double simplicial_potential(const Mat& R, const Vec& x);
// u_B for the cone {N x > 0} with square N (rows are covectors).
double facet_potential(const Mat& N, const Vec& x);

void write_grid_csv(const RadialSolution& sol, const std::string& path);

} // namespace conecanon
