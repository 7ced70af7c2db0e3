#pragma once

#include <vector>

#include "conecanon/ma_solver.hpp"
#include "conecanon/potential.hpp"

namespace conecanon {

// y = -dF(x); lands in the dual cone for canonical F.
Vec gradient_map(const PotentialHandle& F, const Vec& x);

struct DualPairReport {
    Vec x, y;
    double identity_defect = 0; // |F(x) + F*(y)|
    double dual_margin = 0;     // membership margin of y in the dual cone, relative to |y|
    double roundtrip = 0;       // |Phi*(Phi(x)) - x| / |x|
};

DualPairReport dual_pair(const PotentialHandle& F, const PotentialHandle& F_dual, const Vec& x);

struct DualSup {
    double sup = 0;
    int evaluated = 0;
    int skipped = 0; // images outside the domain of a numeric dual
    Vec worst;
};

DualSup duality_identity_defect(const PotentialHandle& F, const PotentialHandle& F_dual, const std::vector<Vec>& xs);
DualSup inverse_map_roundtrip(const PotentialHandle& F, const PotentialHandle& F_dual, const std::vector<Vec>& xs);
// g(x) against the pullback of g*(Phi(x)) through dPhi, measured in the g-whitened frame.
DualSup isometry_defect(const PotentialHandle& F, const PotentialHandle& F_dual, const std::vector<Vec>& xs);
// inf of the dual margin of Phi(x) relative to |Phi(x)|.
double min_dual_margin(const PotentialHandle& F, const ConeSpec& cone, const std::vector<Vec>& xs);
// sup |t Phi(t x) - Phi(x)| / |Phi(x)| for t in {1/2, 2, e}.
double gradient_homogeneity_defect(const PotentialHandle& F, const std::vector<Vec>& xs);

// A few linear automorphisms: diagonal scalings, Lorentz boosts and rotations, PSD congruences.
std::vector<Mat> automorphisms(const ConeSpec& spec);
// sup |Phi(A x) - A^{-T} Phi(x)| / |Phi(x)|.
double equivariance_defect(const PotentialHandle& F, const std::vector<Mat>& autos, const std::vector<Vec>& xs);

// Sign checks of (-1)^k D_{v1..vk} e^F for v_i in the cone, k = 1, 2, 3. Higher orders are untested.
struct MonotonicityReport {
    double min_order[3] = {INFINITY, INFINITY, INFINITY}; // normalized by e^F |v1|..|vk| / |x|^k
    int samples = 0;
    bool pass = false;
};
MonotonicityReport complete_monotonicity(const PotentialHandle& F, const ConeSpec& cone, const std::vector<Vec>& xs,
                                         int dirs = 4, std::uint64_t seed = 1);

// Canonical potential of the dual cone: closed form when available, else a numeric solve.
PotentialHandle dual_potential(const ConeSpec& spec, const SolveOptions& opt = {});

} // namespace conecanon
