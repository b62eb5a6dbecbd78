#pragma once

#include <stdexcept>
#include <string>

namespace betaforge {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define BETAFORGE_ERROR(Name)                                        \
    class Name : public Error {                                      \
    public:                                                          \
        explicit Name(const std::string& what) : Error(what) {}      \
    }

BETAFORGE_ERROR(DomainError);
BETAFORGE_ERROR(OrderError);
BETAFORGE_ERROR(PositivityError);
BETAFORGE_ERROR(DimensionError);
BETAFORGE_ERROR(DegeneratePlaneError);
BETAFORGE_ERROR(SignatureError);
BETAFORGE_ERROR(LimitUnavailableError);
BETAFORGE_ERROR(LimitError);
BETAFORGE_ERROR(NotKillingError);
BETAFORGE_ERROR(ParamError);
BETAFORGE_ERROR(RootError);
BETAFORGE_ERROR(RadicandError);
BETAFORGE_ERROR(InversionError);
BETAFORGE_ERROR(DomainExhaustedError);
BETAFORGE_ERROR(ConfigError);

#undef BETAFORGE_ERROR

}  // namespace betaforge
