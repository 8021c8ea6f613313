#pragma once

#include <stdexcept>
#include <string>

namespace mrgark {

/// A fast weight is zero or negative where the construction needs diag(b) invertible
/// (stability-decoupled coupling, D-lambda order conditions).
struct SingularWeightsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Eta family violates the sum rule sum_j eta_j(lambda) = lambda.
struct InvalidEtaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Outer tableau of an MIS pair is not explicit with 0 = c_1 < c_2 < ... < c_s < 1.
struct InvalidOuterError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Operation requires a telescopic scheme (same base tableau in both partitions).
struct UnsupportedSchemeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonConvergenceError : std::runtime_error {
    double residual_norm;
    NonConvergenceError(const std::string& what, double res)
        : std::runtime_error(what), residual_norm(res) {}
};

struct SingularJacobianError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// NaN/Inf encountered in a right-hand side or state.
struct DivergedError : std::runtime_error {
    double at_time;
    double step_size;
    DivergedError(const std::string& what, double t, double h)
        : std::runtime_error(what), at_time(t), step_size(h) {}
};

}  // namespace mrgark
