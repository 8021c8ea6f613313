#pragma once

#include <string>
#include <vector>

#include "mrgark/integrator.hpp"

namespace mrgark {

/// Smooth split linear problem with a known exact solution:
/// y_i' = (sigma_s + sigma_f)_i y_i with diagonal slow/fast parts.
PartitionedIvp make_linear2();

/// Nonlinear coupled two-component problem; no closed-form solution.
PartitionedIvp make_nlcoupled2();

/// Dissipative nonlinear problem: both parts satisfy a one-sided Lipschitz
/// condition with negative constant (nu_slow = -1, nu_fast = -10).
PartitionedIvp make_dissipative2();

/// Scalar monotone decay problem certified for the forward-Euler radius
/// rho = 1: f_slow = -2y, f_fast = -2M y, so ||y + rho f_s(y)|| <= ||y|| and
/// ||y + (rho/M) f_f(y)|| <= ||y|| hold with equality at the boundary.
PartitionedIvp make_monotone1(int M);

/// Registered problems for the CLI: linear2, nlcoupled2, dissipative2,
/// monotone1 (the M = 2 variant).
PartitionedIvp problem_by_name(const std::string& name);
std::vector<std::string> problem_names();

}  // namespace mrgark
