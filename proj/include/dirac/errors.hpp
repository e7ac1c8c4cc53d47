#pragma once

#include <stdexcept>
#include <string>

namespace dirac {

/// Base class of every typed failure raised by the library. The CLI maps
/// ConfigError to exit code 2 and everything else to exit code 3.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define DIRAC_DEFINE_ERROR(Name)                                              \
    class Name : public Error {                                               \
    public:                                                                   \
        explicit Name(const std::string& what) : Error(#Name, what) {}        \
    };

DIRAC_DEFINE_ERROR(PreconditionViolation)
DIRAC_DEFINE_ERROR(ConfigError)
DIRAC_DEFINE_ERROR(ConventionError)
DIRAC_DEFINE_ERROR(SpectralFlowUnsupported)
DIRAC_DEFINE_ERROR(GridTooCoarse)
DIRAC_DEFINE_ERROR(DegenerateConstraints)
DIRAC_DEFINE_ERROR(SelfadjointnessViolation)
DIRAC_DEFINE_ERROR(NonConvergedLinearSolve)
DIRAC_DEFINE_ERROR(StepSizeTooLarge)
DIRAC_DEFINE_ERROR(SourceTouchesBoundary)
DIRAC_DEFINE_ERROR(AdmissibilityFailure)

#undef DIRAC_DEFINE_ERROR

inline void require(bool cond, const std::string& what) {
    if (!cond) throw PreconditionViolation(what);
}

}  // namespace dirac
