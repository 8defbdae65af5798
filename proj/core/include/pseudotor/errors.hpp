#pragma once

#include <stdexcept>
#include <string>

namespace pseudotor {

/// Base class for all domain errors raised by the toolkit.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define PSEUDOTOR_DEFINE_ERROR(Name)                                        \
    struct Name : Error {                                                   \
        explicit Name(const std::string& msg) : Error(#Name ": " + msg) {}  \
    }

PSEUDOTOR_DEFINE_ERROR(ZeroVector);
PSEUDOTOR_DEFINE_ERROR(NoConvergence);
PSEUDOTOR_DEFINE_ERROR(DomainMismatch);
PSEUDOTOR_DEFINE_ERROR(StepCollapse);
PSEUDOTOR_DEFINE_ERROR(OnBaseSet);
PSEUDOTOR_DEFINE_ERROR(SingularFiberPoint);
PSEUDOTOR_DEFINE_ERROR(LevelOutOfRange);
PSEUDOTOR_DEFINE_ERROR(NoSolution);
PSEUDOTOR_DEFINE_ERROR(DegeneratePair);
PSEUDOTOR_DEFINE_ERROR(OnDivisor);
PSEUDOTOR_DEFINE_ERROR(DegenerateChart);
PSEUDOTOR_DEFINE_ERROR(InsufficientSamples);
PSEUDOTOR_DEFINE_ERROR(EnteredCollar);
PSEUDOTOR_DEFINE_ERROR(DegenerateDistribution);
PSEUDOTOR_DEFINE_ERROR(UsageError);

#undef PSEUDOTOR_DEFINE_ERROR

}  // namespace pseudotor
