#pragma once

#include <stdexcept>
#include <string>

namespace wstar {

// Base class for all validation and precondition failures.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& msg)
        : std::runtime_error(code + ": " + msg), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

#define WSTAR_DEFINE_ERROR(Name)                                  \
    class Name : public Error {                                   \
    public:                                                       \
        explicit Name(const std::string& msg) : Error(#Name, msg) {} \
    }

WSTAR_DEFINE_ERROR(NotHermitian);
WSTAR_DEFINE_ERROR(NotUnitTrace);
WSTAR_DEFINE_ERROR(NotFaithful);
WSTAR_DEFINE_ERROR(BadDimension);
WSTAR_DEFINE_ERROR(DimensionMismatch);
WSTAR_DEFINE_ERROR(NonFiniteMultiplier);
WSTAR_DEFINE_ERROR(NonPositiveBandwidth);
WSTAR_DEFINE_ERROR(BadWeights);
WSTAR_DEFINE_ERROR(BadRange);
WSTAR_DEFINE_ERROR(BadExponents);
WSTAR_DEFINE_ERROR(NonPositiveU);
WSTAR_DEFINE_ERROR(ParameterWindowViolation);
WSTAR_DEFINE_ERROR(LengthMismatch);
WSTAR_DEFINE_ERROR(BadInstantiation);
WSTAR_DEFINE_ERROR(BadParameters);
WSTAR_DEFINE_ERROR(UnboundVariable);
WSTAR_DEFINE_ERROR(DomainViolation);
WSTAR_DEFINE_ERROR(UnsupportedKernel);
WSTAR_DEFINE_ERROR(BadInput);

#undef WSTAR_DEFINE_ERROR

} // namespace wstar
