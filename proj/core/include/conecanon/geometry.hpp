#pragma once

#include <vector>

#include "conecanon/potential.hpp"

namespace conecanon {

struct GeometryReport {
    Vec x;
    Mat g, ginv;
    double cond = 0;
    Vec H;           // Koszul form, F_ip^p
    Vec H_logdet;    // d log H(F), differentiated determinant
    double koszul_discrepancy = 0;
    Mat kappa;       // -d_i H_j
    double kappa_scalar = 0;
    Mat ricci;       // R_ij
    double scalar = 0;
    std::vector<Mat> pick; // A_ijk as pick[i](j, k)
    double grad_norm2 = 0, laplacian = 0, flat_laplacian = 0, pick_norm2 = 0;

    // g-whitened quantities (frame W with W^T g W = I)
    Mat whitened_kappa;
    Mat whitened_ricci;
    Vec ricci_eigs;
    double ricci_lower_min = 0; // min eig of R + (n-1)/(n+1)(g - dF dF/(n+1)), whitened
    double pick_trace = 0;      // max |g^{jk} A_ijk|, whitened
    double pick_radial = 0;     // max |E^k A_ijk|, whitened
};

GeometryReport geometry_at(const PotentialHandle& F, const Vec& x);

struct CurvatureBoundsReport {
    int samples = 0;
    int violations = 0;
    double max_eig = -INFINITY;       // whitened Ricci
    double min_eig = INFINITY;
    double min_lower_gap = INFINITY;  // second matrix inequality
    double max_pick = 0;
    double pick_bound = 0;
    double ricci_floor = 0;           // -(n-1)/(n+1)
    Vec worst;
};

CurvatureBoundsReport curvature_bounds_check(const PotentialHandle& F, const std::vector<Vec>& samples,
                                             double tol = 1e-8);

struct HarmonicityReport {
    double sup_laplacian = 0;       // |Delta_g F|
    double sup_flat_deviation = 0;  // |Delta-bar_g F - (n+1)|
    double sup_grad_deviation = 0;  // ||dF|^2_g - (n+1)|
};

HarmonicityReport harmonicity_check(const PotentialHandle& F, const std::vector<Vec>& samples);

inline constexpr double kMaxMetricCondition = 1e12;

} // namespace conecanon
