#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "conecanon/potential.hpp"

namespace conecanon {

struct CertReport {
    std::string property;
    double statistic = 0;
    double threshold = 0;
    int samples = 0;
    int directions = 0;
    std::uint64_t seed = 0;
    Vec worst_x, worst_v;
    bool pass = false;
};

// sup (F_ijk v^i v^j v^k)^2 / (4 (F_ij v^i v^j)^3)
double self_concordance_ratio(const PotentialHandle& F, const Vec& x, const Vec& v);
// (F_i v^i)^2 / (F_ij v^i v^j)
double barrier_parameter_ratio(const PotentialHandle& F, const Vec& x, const Vec& v);

CertReport self_concordance_sup(const PotentialHandle& F, const std::vector<Vec>& samples, int dirs_per_sample = 8,
                                std::uint64_t seed = 1, double tol = 1e-9);
CertReport barrier_parameter_sup(const PotentialHandle& F, const std::vector<Vec>& samples, int dirs_per_sample = 8,
                                 std::uint64_t seed = 1, double tol = 1e-9);
// inf H(G) e^{-2G}; throws NonConvexWitness at a sample where the Hessian is not PD.
CertReport subsolution_check(const PotentialHandle& G, const std::vector<Vec>& samples, double tol = 1e-9);
// sup (G - F_ref) over samples in the domain of G.
CertReport schwarz_dominance(const PotentialHandle& F_ref, const PotentialHandle& G, const std::vector<Vec>& samples,
                             double tol = 1e-9);

// Bounded polyhedron {x : A x + b > 0}, one facet per row.
struct PolyDomain {
    Mat A;
    Vec b;
    int dim() const { return static_cast<int>(A.cols()); }
    double margin(const Vec& x) const;
};

struct PolyBarrierInfo {
    double constant = 0;  // c in G = -sum log l_a - c
    double inf_value = 0; // inf over the closure of sum_I det(A_I)^2 prod_{a not in I} l_a^2
    Vec argmin;
    Vec center;           // analytic center
};

// G = -sum log l_a - c with the largest c such that H(G) >= e^{2G} on P.
PotentialHandle polyhedral_log_barrier(const PolyDomain& P, PolyBarrierInfo* info = nullptr);
Vec analytic_center(const PolyDomain& P);

} // namespace conecanon
