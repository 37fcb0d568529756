#pragma once

#include <stdexcept>
#include <string>

namespace momentlock {

/// Base of all library errors. `kind()` is the stable machine-readable name
/// rendered by the CLI next to its exit code.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

// -- configuration / input errors ------------------------------------------

struct ConfigError final : Error {
    explicit ConfigError(const std::string& m) : Error("ConfigError", m) {}
};

struct InvalidParams final : Error {
    explicit InvalidParams(const std::string& m) : Error("InvalidParams", m) {}
};

struct Unsupported final : Error {
    explicit Unsupported(const std::string& m) : Error("Unsupported", m) {}
};

struct NonUniformGrid final : Error {
    explicit NonUniformGrid(const std::string& m) : Error("NonUniformGrid", m) {}
};

struct EvenPointCount final : Error {
    explicit EvenPointCount(const std::string& m) : Error("EvenPointCount", m) {}
};

struct NegativeWeight final : Error {
    explicit NegativeWeight(const std::string& m) : Error("NegativeWeight", m) {}
};

struct DegenerateDiscretization final : Error {
    explicit DegenerateDiscretization(const std::string& m)
        : Error("DegenerateDiscretization", m) {}
};

struct NonFiniteValue final : Error {
    explicit NonFiniteValue(const std::string& m) : Error("NonFiniteValue", m) {}
};

struct TooFewPoints final : Error {
    explicit TooFewPoints(const std::string& m) : Error("TooFewPoints", m) {}
};

// -- oracle errors -----------------------------------------------------------

struct NoConvergence final : Error {
    explicit NoConvergence(const std::string& m) : Error("NoConvergence", m) {}
};

// -- solver errors -----------------------------------------------------------

struct DivergedInfeasible final : Error {
    explicit DivergedInfeasible(const std::string& m)
        : Error("DivergedInfeasible", m) {}
};

struct SingularHessian final : Error {
    explicit SingularHessian(const std::string& m) : Error("SingularHessian", m) {}
};

struct AbsoluteContinuityViolated final : Error {
    explicit AbsoluteContinuityViolated(const std::string& m)
        : Error("AbsoluteContinuityViolated", m) {}
};

// -- portfolio errors --------------------------------------------------------

struct DomainViolation final : Error {
    explicit DomainViolation(const std::string& m) : Error("DomainViolation", m) {}
};

struct DegenerateDenominator final : Error {
    explicit DegenerateDenominator(const std::string& m)
        : Error("DegenerateDenominator", m) {}
};

}  // namespace momentlock
