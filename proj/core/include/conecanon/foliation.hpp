#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "conecanon/potential.hpp"

namespace conecanon {

struct EquiaffineData {
    Vec nu;              // equiaffine normal
    Mat h;               // equiaffine metric, extended by h(nu, .) = 0
    double lambda = 0;   // affine mean curvature from nu = -lambda x
    double radial = 0;   // |nu ^ x| / (|nu| |x|)
    double tangential = 0; // |h nu| / |h| |nu|
};

// Equiaffine normal from the general log-homogeneous formula with the Koszul form raised by g.
EquiaffineData equiaffine_data(const PotentialHandle& F, const Vec& x);

// -(n+1)^{-(n+1)/(n+2)} e^{2r/(n+2)}: curvature of the level set F = r.
double level_curvature(int dim, double r);

struct LevelSetMesh {
    double r = 0;
    std::vector<Vec> vertices;
    std::vector<std::array<int, 3>> faces; // segments for n = 1 use the first two entries
    std::vector<EquiaffineData> data;
    double max_level_error = 0;
};

// Radial Newton solve F(e^s p) = r from a grid over the cross-section at the dual witness.
LevelSetMesh level_set_mesh(const PotentialHandle& F, const ConeSpec& cone, double r, int resolution);
void write_obj(const LevelSetMesh& mesh, const std::string& obj_path, const std::string& csv_path);

// Pullback of (n+1)(r^-2 dr^2 + (n+1)^{-(n+1)/(n+2)} h) under x -> (e^{-F/(n+1)}, e^{F/(n+1)} x) against g.
double product_isometry_defect(const PotentialHandle& F, const std::vector<Vec>& xs);

struct DerivedMetricReport {
    std::string kind;
    Vec x;
    Mat metric;
    double residual = 0;   // |H - B| or |H(u) + 1|
    int positive = 0, negative = 0;
    double radial = 0;     // metric(x, x)
    double radial_formula = 0;
};

// psi(F)_ij with psi'^{n+1} = e^{-t}(C - B e^{-t}); defined where F > log(B/C).
DerivedMetricReport ma_riemannian_metric(const PotentialHandle& F, double B, double C, const Vec& x);
// u = -((n+1)/2) e^{-2F/(n+1)} and its Hessian.
DerivedMetricReport lorentzian_u(const PotentialHandle& F, const Vec& x);

struct LagrangianReport {
    double nondegeneracy = INFINITY; // inf |eig(D^2 u)| |x|^0
    double conicity = 0;             // sup |y(2x) - 2 y(x)| / |y(x)|
    double mean_curvature = 0;       // sup |x| |d log|H(u)||, central differences
};
LagrangianReport lagrangian_graph_report(const PotentialHandle& F, const std::vector<Vec>& xs);

// H(psi(F)) against psi'^{n+1}(1 + (psi''/psi') |dF|^2_g) H(F), relative.
double reparametrization_defect(const PotentialHandle& F, const std::function<double(double)>& dpsi,
                                const std::function<double(double)>& ddpsi, const std::vector<Vec>& xs);

} // namespace conecanon
