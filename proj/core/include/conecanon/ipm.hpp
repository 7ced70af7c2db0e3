#pragma once

#include <optional>
#include <string>
#include <vector>

#include "conecanon/potential.hpp"

namespace conecanon {

// min c.x  s.t.  A x = b, x in the cone.
struct ConicProgram {
    Vec c;
    Mat A;
    Vec b;
    ConeSpec cone;
    std::optional<Vec> x0;
};

ConicProgram program_from_json(const std::string& text);
ConicProgram load_program(const std::string& path);

struct NewtonStep {
    Vec step;
    double decrement = 0;
};

// Newton step for c.x / mu + F(x) restricted to A x = b (the step also absorbs any residual in A x - b).
NewtonStep newton_direction(const PotentialHandle& F, const ConicProgram& prog, const Vec& x, double mu);

struct IpmOptions {
    double eps = 1e-8;
    double theta = 0.1;         // mu <- mu (1 - theta / sqrt(nu))
    double center = 0.25;       // decrement threshold after each centering phase
    double K = 20;              // constant in the iteration bound
    double mu0 = 0;             // 0 picks a scale from the start point
    double hessian_noise = 0;   // residual floor of a numeric barrier
    int max_outer = 100000;
};

struct IpmRecord {
    int outer = 0;
    double mu = 0;
    double decrement = 0;
    double objective = 0;
    double margin = 0;
    int newton = 0;
};

struct IpmResult {
    Vec x;
    std::string status;
    double nu = 0;
    double mu_final = 0;
    double gap_bound = 0;   // nu mu_final
    double eps_used = 0;
    bool flagged = false;   // eps raised to the numeric-barrier floor
    int outer = 0;
    int newton = 0;
    int bound = 0;          // ceil(K sqrt(nu) log(nu mu0 / eps))
    int phase1_outer = 0;
    double feasibility = 0; // |A x - b| / max(1, |b|)
    std::vector<IpmRecord> trace;
};

IpmResult solve_conic(const ConicProgram& prog, const PotentialHandle& F, const IpmOptions& opt = {});
void write_trace_csv(const IpmResult& res, const std::string& path);

// Same program expressed in the coordinates x' = M x over the cone M * cone.
ConicProgram reparametrize(const ConicProgram& prog, const Mat& M);

} // namespace conecanon
