#pragma once

#include <stdexcept>
#include <string>

namespace kpgive {

// Structural misuse of an interface: mismatched sizes, bad indices,
// malformed input objects. Distinct from mathematical failure modes below.
struct StructuralError : std::runtime_error {
    explicit StructuralError(const std::string& msg) : std::runtime_error(msg) {}
};

// Inversion of a series whose constant term is not the ring unit.
struct NonUnitConstantTerm : std::runtime_error {
    explicit NonUnitConstantTerm(const std::string& msg) : std::runtime_error(msg) {}
};

// A computation was asked for more trusted orders than its inputs carry.
struct TrustExceeded : std::runtime_error {
    explicit TrustExceeded(const std::string& msg) : std::runtime_error(msg) {}
};

// The linear part of a coordinate change is singular.
struct NonInvertibleFlatMap : std::runtime_error {
    explicit NonInvertibleFlatMap(const std::string& msg) : std::runtime_error(msg) {}
};

// Input data violates a validity requirement (wrong charge sector,
// inconsistent cutoffs, malformed config values).
struct InconsistentInput : std::runtime_error {
    explicit InconsistentInput(const std::string& msg) : std::runtime_error(msg) {}
};

// A matrix series fails the twist condition it is required to satisfy.
struct NotTwisted : std::runtime_error {
    explicit NotTwisted(const std::string& msg) : std::runtime_error(msg) {}
};

// An identity that must hold exactly has a nonzero residual.
struct VerificationFailed : std::runtime_error {
    explicit VerificationFailed(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace kpgive
