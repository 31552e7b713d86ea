#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace orderdp {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operands of incompatible size.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// An instance violates one of its structural invariants (bad table shape,
/// non-stochastic row, empty feasible set, ...). The message names the
/// first violation found.
class ModelError : public Error {
public:
    using Error::Error;
};

/// A policy selects an action that is not feasible.
class PolicyError : public Error {
public:
    using Error::Error;
};

/// The greedy oracle could not produce a policy for the given value.
class RegularityError : public Error {
public:
    using Error::Error;
};

/// A check was called on an input that does not satisfy its premise
/// (for example an ordering check started outside V_U).
class PremiseError : public Error {
public:
    using Error::Error;
};

/// The model is not well posed (e.g. spectral radius of the discount
/// operator is not below one).
class WellPosednessError : public Error {
public:
    using Error::Error;
};

/// Floating point range exhausted (overflow in log-sum-exp and similar).
class NumericRangeError : public Error {
public:
    using Error::Error;
};

/// An iterative method hit its iteration cap. Carries the last iterate.
class NonConvergenceError : public Error {
public:
    NonConvergenceError(const std::string& what, Eigen::VectorXd last, double residual, int iterations)
        : Error(what + " (residual " + std::to_string(residual) + " after " + std::to_string(iterations) +
                " iterations)"),
          last_iterate(std::move(last)),
          residual(residual),
          iterations(iterations) {}

    Eigen::VectorXd last_iterate;
    double residual;
    int iterations;
};

} // namespace orderdp
