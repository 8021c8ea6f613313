#pragma once

#include <optional>
#include <string>

#include "mrgark/tableau.hpp"

namespace mrgark {

/// Which stability question is being asked: additive partitioning needs the
/// full coupled matrix nonnegative definite; component partitioning only needs
/// the two diagonal blocks.
enum class Partitioning { Additive, Component };

struct PBlocks {
    Matrix P_ff;  ///< (M s_f)^2, symmetric
    Matrix P_fs;  ///< (M s_f) x s_s block of the full matrix; P_sf = P_fs^T
    Matrix P_ss;  ///< s_s^2, symmetric
};

/// Algebraic-stability blocks of the flattened tableau.
PBlocks p_blocks(const FlatGarkTableau& flat);

/// Full symmetric stability matrix [[P_ff, P_fs], [P_fs^T, P_ss]].
Matrix full_p_matrix(const PBlocks& blocks);

/// Nonnegative-definiteness of the full stability matrix. The verdict is
/// min eig >= -tol * (1 + max|P|) after symmetrization.
struct PsdVerdict {
    bool verdict;
    double min_eigenvalue;
};
PsdVerdict is_algebraically_stable(const FlatGarkTableau& flat, double tol = 1e-10);

/// True when the coupling block vanishes: max|P_fs| <= tol.
bool is_stability_decoupled(const FlatGarkTableau& flat, double tol = 1e-12);

/// Smallest r in [0, r_max] making [[P_ff + r M B_f, P_fs], [P_sf, P_ss + r B_s]]
/// nonnegative definite, to within 1e-6; absent when infeasible at r_max.
std::optional<double> conditional_stability_weight(const FlatGarkTableau& flat,
                                                   double r_max = 1e3);

/// Step bound H <= -2 mu / r for a coercive problem with constant mu < 0.
double stability_step_bound(double mu, double r);

struct StabilityReport {
    PBlocks blocks;
    bool algebraically_stable = false;
    bool stability_decoupled = false;
    double min_eigenvalue = 0.0;
    double coupling_norm = 0.0;  ///< max|P_fs|
    std::optional<double> conditional_r;
    std::optional<double> step_bound;  ///< -2 mu / r when mu was supplied
    Partitioning partitioning = Partitioning::Additive;
};

/// Combined stability analysis. Under component partitioning the verdict only
/// requires the two diagonal blocks to be nonnegative definite.
StabilityReport analyze_stability(const FlatGarkTableau& flat,
                                  Partitioning partitioning = Partitioning::Additive,
                                  double tol = 1e-10, std::optional<double> mu = std::nullopt);

}  // namespace mrgark
