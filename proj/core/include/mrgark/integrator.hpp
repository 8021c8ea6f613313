#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mrgark/errors.hpp"
#include "mrgark/tableau.hpp"

namespace mrgark {

using RhsFn = std::function<Vector(double t, const Vector& y)>;
using JacFn = std::function<Matrix(double t, const Vector& y)>;
using ExactFn = std::function<Vector(double t)>;

/// Problem constants used by the stability and monotonicity theorems.
/// mu: one-sided coercivity constant; nu_*: dispersivity constants;
/// rho: forward-Euler monotonicity radius (slow part at rho, fast at rho/M).
struct IvpMetadata {
    std::optional<double> mu;
    std::optional<double> nu_slow;
    std::optional<double> nu_fast;
    std::optional<double> rho;
};

struct PartitionedIvp {
    int dim = 0;
    RhsFn f_slow;
    RhsFn f_fast;
    Vector y0;
    double t0 = 0.0;
    ExactFn exact;      ///< null when no closed-form solution is known
    JacFn jac_slow;     ///< null -> finite differences
    JacFn jac_fast;
    IvpMetadata metadata;
    std::string name;
};

/// Split f into complementary component parts over disjoint index sets
/// covering 0..dim-1. f_slow + f_fast == f pointwise.
struct ComponentSplit {
    RhsFn f_slow;
    RhsFn f_fast;
};
ComponentSplit component_partition(const RhsFn& f, const std::vector<int>& slow_indices,
                                   const std::vector<int>& fast_indices, int dim);

struct SolverConfig {
    double newton_tol = 1e-12;
    int newton_max_iter = 25;
    enum class JacobianMode { Analytic, FiniteDifference };
    /// Analytic falls back to finite differences when the problem carries no
    /// Jacobian for a partition.
    JacobianMode jacobian_mode = JacobianMode::Analytic;
    double fd_epsilon = 1.4901161193847656e-08;  // sqrt(machine eps)
};

struct StepStats {
    long rhs_slow_evals = 0;
    long rhs_fast_evals = 0;
    long newton_iters = 0;
    long jacobian_builds = 0;
    double max_stage_norm = 0.0;

    StepStats& operator+=(const StepStats& o) {
        rhs_slow_evals += o.rhs_slow_evals;
        rhs_fast_evals += o.rhs_fast_evals;
        newton_iters += o.newton_iters;
        jacobian_builds += o.jacobian_builds;
        max_stage_norm = std::max(max_stage_norm, o.max_stage_norm);
        return *this;
    }
};

struct StepResult {
    Vector y;
    StepStats stats;
    std::vector<Vector> micro_states;  ///< y_{n+lambda/M}; filled on request
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Vector> states;
    std::vector<std::vector<Vector>> micro_states;  ///< per step, when recorded
    std::vector<double> stage_norm_max;             ///< per step, when recorded
    StepStats stats;
};

/// Step error wrapper carrying the macro steps completed before the failure.
struct IntegrationError : std::runtime_error {
    Trajectory partial;
    IntegrationError(const std::string& what, Trajectory t)
        : std::runtime_error(what), partial(std::move(t)) {}
};

struct NewtonResult {
    Vector y;
    long iterations = 0;
};

/// Damped-free Newton iteration: stops when ||residual||_inf <= cfg.newton_tol.
NewtonResult newton_solve(const std::function<Vector(const Vector&)>& residual,
                          const std::function<Matrix(const Vector&)>& jac, Vector guess,
                          const SolverConfig& cfg);

/// Structure-exploiting macro stepper for a multirate scheme. The stage
/// schedule (explicit cascade, first-microstep-coupled solve, or one coupled
/// solve over all stages) is fixed by the scheme's structure tag.
class MrGarkStepper {
  public:
    explicit MrGarkStepper(MrGarkScheme scheme);

    const MrGarkScheme& scheme() const { return scheme_; }
    StepResult step(const PartitionedIvp& ivp, const Vector& y_n, double t_n, double H,
                    const SolverConfig& cfg = {}, bool want_micro = false) const;

  private:
    MrGarkScheme scheme_;
    FlatGarkTableau flat_;
    std::vector<std::vector<int>> groups_;  // stage index groups solved in order
};

/// Reference stepper: always solves the full flattened stage system
/// (explicit cascade when the stage graph is acyclic, else one Newton solve).
class FlatGarkStepper {
  public:
    explicit FlatGarkStepper(FlatGarkTableau flat);

    const FlatGarkTableau& flat() const { return flat_; }
    StepResult step(const PartitionedIvp& ivp, const Vector& y_n, double t_n, double H,
                    const SolverConfig& cfg = {}) const;

  private:
    FlatGarkTableau flat_;
};

/// One macro-step of the multirate scheme.
StepResult mgark_step(const MrGarkScheme& scheme, const PartitionedIvp& ivp, const Vector& y_n,
                      double t_n, double H, const SolverConfig& cfg = {});

/// One macro-step through the flattened tableau (the analysis oracle).
Vector flat_gark_step(const FlatGarkTableau& flat, const PartitionedIvp& ivp, const Vector& y_n,
                      double t_n, double H, const SolverConfig& cfg = {});

struct IntegrateOptions {
    bool record_micro_states = false;
    bool record_stage_norms = false;
};

Trajectory integrate(const MrGarkStepper& stepper, const PartitionedIvp& ivp, double t_end,
                     double H, const SolverConfig& cfg = {}, const IntegrateOptions& opts = {});
Trajectory integrate(const FlatGarkStepper& stepper, const PartitionedIvp& ivp, double t_end,
                     double H, const SolverConfig& cfg = {}, const IntegrateOptions& opts = {});

}  // namespace mrgark
