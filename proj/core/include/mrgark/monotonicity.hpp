#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mrgark/tableau.hpp"

namespace mrgark {

/// Bordered scheme matrix with the micro-step weighting applied:
/// [[M A_ff, A_fs, 0], [M A_sf, A_ss, 0], [M b_f^T, b_s^T, 0]],
/// of size (M s_f + s_s + 1)^2 with an identically zero last column.
Matrix build_ahat(const FlatGarkTableau& flat);

/// Classical bordered matrix [[A, 0], [b^T, 0]] of a single method.
Matrix build_ahat_rk(const RkTableau& t);

struct AmCheck {
    bool am = false;
    bool singular_resolvent = false;  ///< I + r Ahat was singular; not a.m. at r
    bool ahat_nonnegative = true;
};

/// Absolute monotonicity at r: Ahat >= 0 entrywise,
/// alpha(r) = (I + r Ahat)^{-1} 1 >= 0 and beta(r) = (I + r Ahat)^{-1} Ahat >= 0.
/// Entries are compared against -tol*(1+r); r = 0 is always monotonic.
AmCheck am_check(const Matrix& ahat, double r, double tol = 1e-10);
bool is_absolutely_monotonic(const FlatGarkTableau& flat, double r, double tol = 1e-10);
bool rk_is_absolutely_monotonic(const RkTableau& t, double r, double tol = 1e-10);

struct AmRadius {
    double radius = 0.0;
    bool saturated = false;  ///< absolutely monotonic all the way to r_max
};

/// Radius of absolute monotonicity by bisection over [0, r_max].
AmRadius am_radius(const FlatGarkTableau& flat, double r_max = 100.0, double tol = 1e-6);
AmRadius rk_am_radius(const RkTableau& t, double r_max = 100.0, double tol = 1e-6);

/// Incidence conditions for absolutely monotonic telescopic schemes:
/// "5.6a".."5.6e" always; "5.7a".."5.7d" when the couplings have the
/// first/last-microstep sparsity pattern; "block-triangular" is the
/// necessary-condition diagnostic A_fs_i A_sf_j = 0 for i > j.
std::map<std::string, bool> incidence_conditions(const RkTableau& base,
                                                 const std::vector<Matrix>& couplings_fs,
                                                 const std::vector<Matrix>& couplings_sf, int M);

/// Telescopic wrapper: requires fast and slow base tableaus to coincide.
std::map<std::string, bool> incidence_conditions(const MrGarkScheme& scheme);

/// Monotone step bound H <= radius * rho.
double monotone_step_bound(double radius, double rho);

struct MonotonicityReport {
    double radius = 0.0;
    bool saturated = false;
    bool ahat_nonnegative = true;
    std::vector<std::pair<double, bool>> am_checked_at;
    std::map<std::string, bool> incidence_verdicts;  ///< empty for non-telescopic schemes
    std::optional<double> step_bound;
};

MonotonicityReport analyze_monotonicity(const FlatGarkTableau& flat,
                                        std::optional<double> rho = std::nullopt,
                                        double r_max = 100.0);

}  // namespace mrgark
