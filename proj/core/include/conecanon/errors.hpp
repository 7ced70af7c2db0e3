#pragma once

#include <stdexcept>
#include <string>

namespace conecanon {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define CONECANON_ERROR(Name)              \
    struct Name : Error {                  \
        using Error::Error;                \
    }

// cone_model
CONECANON_ERROR(MalformedSpec);
CONECANON_ERROR(DimensionMismatch);
CONECANON_ERROR(UnsupportedDual);
CONECANON_ERROR(SliceUnbounded);

// barrier_core
CONECANON_ERROR(NonInteriorPoint);
CONECANON_ERROR(SingularMatrix);

// geometry / certify
CONECANON_ERROR(IllConditionedMetric);
CONECANON_ERROR(DegenerateHessian);
CONECANON_ERROR(NonConvexWitness);
CONECANON_ERROR(DomainMismatch);
CONECANON_ERROR(UnboundedDomain);
CONECANON_ERROR(RankDeficient);

// ma_solver
CONECANON_ERROR(NoConvergence);
CONECANON_ERROR(NonConvexIterate);
CONECANON_ERROR(UnliftablePoint);
CONECANON_ERROR(NoInscribedSimplex);

// foliation
CONECANON_ERROR(RayMiss);
CONECANON_ERROR(OutsideRegion);

// ipm
CONECANON_ERROR(SingularKKT);
CONECANON_ERROR(Infeasible);
CONECANON_ERROR(Unbounded);

#undef CONECANON_ERROR

} // namespace conecanon
