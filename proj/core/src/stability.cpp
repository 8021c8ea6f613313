#include "mrgark/stability.hpp"

#include <cmath>

namespace mrgark {

namespace {

Matrix weighted_r_term(const FlatGarkTableau& flat, double r) {
    const int nf = flat.fast_stages();
    const int ns = flat.slow_stages();
    Matrix d = Matrix::Zero(nf + ns, nf + ns);
    d.topLeftCorner(nf, nf) = (r * flat.M) * Matrix(flat.b_f.asDiagonal());
    d.bottomRightCorner(ns, ns) = r * Matrix(flat.b_s.asDiagonal());
    return d;
}

bool psd(const Matrix& p, double tol) {
    return min_symmetric_eigenvalue(p) >= -tol * (1.0 + max_abs(p));
}

}  // namespace

PBlocks p_blocks(const FlatGarkTableau& flat) {
    const Matrix Bf = flat.b_f.asDiagonal();
    const Matrix Bs = flat.b_s.asDiagonal();
    PBlocks blocks;
    blocks.P_ff = flat.A_ff.transpose() * Bf + Bf * flat.A_ff - flat.b_f * flat.b_f.transpose();
    blocks.P_ss = flat.A_ss.transpose() * Bs + Bs * flat.A_ss - flat.b_s * flat.b_s.transpose();
    blocks.P_fs = Bf * flat.A_fs + flat.A_sf.transpose() * Bs - flat.b_f * flat.b_s.transpose();
    return blocks;
}

Matrix full_p_matrix(const PBlocks& blocks) {
    const auto nf = blocks.P_ff.rows();
    const auto ns = blocks.P_ss.rows();
    Matrix p(nf + ns, nf + ns);
    p.topLeftCorner(nf, nf) = blocks.P_ff;
    p.topRightCorner(nf, ns) = blocks.P_fs;
    p.bottomLeftCorner(ns, nf) = blocks.P_fs.transpose();
    p.bottomRightCorner(ns, ns) = blocks.P_ss;
    return p;
}

PsdVerdict is_algebraically_stable(const FlatGarkTableau& flat, double tol) {
    const Matrix p = full_p_matrix(p_blocks(flat));
    const double min_eig = min_symmetric_eigenvalue(p);
    return {min_eig >= -tol * (1.0 + max_abs(p)), min_eig};
}

bool is_stability_decoupled(const FlatGarkTableau& flat, double tol) {
    return max_abs(p_blocks(flat).P_fs) <= tol;
}

std::optional<double> conditional_stability_weight(const FlatGarkTableau& flat, double r_max) {
    const double tol = 1e-10;
    const Matrix p = full_p_matrix(p_blocks(flat));
    if (psd(p, tol)) return 0.0;

    // The r-term only helps when all weights are nonnegative; a negative
    // weight makes the weighted diagonal indefinite.
    if (flat.b_f.minCoeff() < -1e-14 || flat.b_s.minCoeff() < -1e-14) {
        return std::nullopt;
    }
    auto feasible = [&](double r) { return psd(p + weighted_r_term(flat, r), tol); };
    if (!feasible(r_max)) return std::nullopt;

    double lo = 0.0, hi = r_max;
    for (int it = 0; it < 60 && hi - lo > 1e-6; ++it) {
        const double mid = 0.5 * (lo + hi);
        (feasible(mid) ? hi : lo) = mid;
    }
    return hi;
}

double stability_step_bound(double mu, double r) {
    if (!(r > 0.0)) throw std::domain_error("stability_step_bound: r must be positive");
    if (!(mu < 0.0)) throw std::domain_error("stability_step_bound: mu must be negative");
    return -2.0 * mu / r;
}

StabilityReport analyze_stability(const FlatGarkTableau& flat, Partitioning partitioning,
                                  double tol, std::optional<double> mu) {
    StabilityReport report;
    report.partitioning = partitioning;
    report.blocks = p_blocks(flat);
    report.coupling_norm = max_abs(report.blocks.P_fs);
    report.stability_decoupled = report.coupling_norm <= 1e-12;

    const Matrix p = full_p_matrix(report.blocks);
    report.min_eigenvalue = min_symmetric_eigenvalue(p);
    if (partitioning == Partitioning::Additive) {
        report.algebraically_stable = report.min_eigenvalue >= -tol * (1.0 + max_abs(p));
    } else {
        report.algebraically_stable =
            psd(report.blocks.P_ff, tol) && psd(report.blocks.P_ss, tol);
    }
    report.conditional_r = conditional_stability_weight(flat);
    if (mu && report.conditional_r && *report.conditional_r > 0.0)
        report.step_bound = stability_step_bound(*mu, *report.conditional_r);
    return report;
}

}  // namespace mrgark
