#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mrgark/couplings.hpp"
#include "mrgark/integrator.hpp"
#include "mrgark/tableau.hpp"

namespace mrgark {

struct ConditionResidual {
    std::string id;         ///< stable condition id, e.g. "T1.3", "T3.iv"
    int order;              ///< order of the condition (1..3)
    std::string partition;  ///< "slow", "fast" or "coupling"
    double residual;
    std::string alias_of;   ///< non-empty when this row duplicates another
};

struct OrderReport {
    std::string table_source;
    std::vector<ConditionResidual> entries;
    int classified_order = 0;

    const ConditionResidual& entry(const std::string& id) const;
};

/// Default tolerance for "condition satisfied"; covers the single float
/// rounding of exact rational coefficients under M^2-scaled sums.
inline constexpr double kOrderTol = 1e-10;

/// Largest p such that every condition of order <= p has residual <= tol.
int classify_order(const std::vector<ConditionResidual>& entries, double tol = kOrderTol);

/// All slow order conditions up to order `up_to`, exactly as tabulated.
OrderReport slow_order_residuals(const MrGarkScheme& scheme, int up_to = 3,
                                 double tol = kOrderTol);

/// All fast order conditions up to order `up_to`, exactly as tabulated.
OrderReport fast_order_residuals(const MrGarkScheme& scheme, int up_to = 3,
                                 double tol = kOrderTol);

/// Slow and fast tables combined; classified_order is the scheme order.
OrderReport combined_order_residuals(const MrGarkScheme& scheme, int up_to = 3,
                                     double tol = kOrderTol);

/// Order conditions in the D^lambda = B_f^{-1} A_sf_lambda^T B_s form used for
/// stability-decoupled schemes. The nine independent conditions are evaluated;
/// the five duplicate rows carry their partner's residual and an alias tag.
OrderReport decoupled_order_residuals(const MrGarkScheme& scheme, double tol = kOrderTol);

/// The two order-three conditions left open by internal consistency, plus the
/// consistency residuals themselves and, for eta-built schemes, the
/// first-microstep specialization of the fast condition.
struct RemainingOrder3 {
    double r_sf;
    double r_fs;
    ConsistencyResiduals consistency;
    std::optional<double> eta_specialization;
};
RemainingOrder3 remaining_order3_residuals(const MrGarkScheme& scheme);

/// The same residuals as an OrderReport with the stable ids "E2.18" and
/// "E2.19" (plus "E2.19s" for the eta specialization when available).
OrderReport remaining_order3_report(const MrGarkScheme& scheme);

/// Residual of the single third-order coupling condition of the MIS scheme.
double mis_order3_residual(const MisPair& p);

/// Order conditions evaluated on a flattened tableau in the internally
/// consistent form (c_f = A_ff 1, c_s = A_ss 1): used for MIS tableaus.
OrderReport flat_order_residuals(const FlatGarkTableau& flat, double tol = kOrderTol);

struct ConvergenceResult {
    double slope = 0.0;
    std::vector<double> H;
    std::vector<double> errors;  ///< final-time sup-norm errors
};

/// Fixed-step convergence study; slope is the least-squares fit of
/// log(error) against log(H). Uses the exact solution when the problem has
/// one, otherwise a fine reference computed at H_min/8.
ConvergenceResult observed_order(const MrGarkScheme& scheme, const PartitionedIvp& ivp,
                                 const std::vector<double>& H_list, double t_end,
                                 const SolverConfig& cfg = {});
ConvergenceResult observed_order(const FlatGarkTableau& flat, const PartitionedIvp& ivp,
                                 const std::vector<double>& H_list, double t_end,
                                 const SolverConfig& cfg = {});

}  // namespace mrgark
