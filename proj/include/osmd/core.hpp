#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace osmd {

using Vector = Eigen::VectorXd;
using VectorRef = Eigen::Ref<const Eigen::VectorXd>;

/// Input outside the domain of an operation (non-positive coordinate for an
/// entropy potential, mismatched dimensions, malformed configuration, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical solver failed to reach its tolerance within the iteration cap.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
    if (!condition) throw DomainError(message);
}

/// ‖v‖_p for p ≥ 1 (p may be +inf).
double lp_norm(const VectorRef& v, double p);

/// Hölder conjugate q with 1/p + 1/q = 1 (p = 1 gives +inf).
double conjugate_exponent(double p);

}  // namespace osmd
