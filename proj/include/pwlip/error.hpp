#pragma once

#include <stdexcept>
#include <string>

namespace pwlip {

enum class ErrorKind {
    InvalidInput,
    Dimension,
    UnsupportedNorm,
    SolverFailure,
    Infeasible,
    NotFixedLinear,
    Guardrail,
    Parse,
    ContractViolation,
};

/// All library failures are reported through this exception; `kind()` lets
/// callers (the CLI in particular) map them onto exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace pwlip
