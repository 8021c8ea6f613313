#pragma once

#include <functional>
#include <vector>

#include "mrgark/tableau.hpp"

namespace mrgark {

/// Scalar ramp functions eta_j(lambda) defining F(lambda) with
/// F_ij(lambda) = eta_j(lambda). Valid families satisfy
/// sum_j eta_j(lambda) = lambda for lambda = 0..M-1.
struct EtaFamily {
    int s_cols;
    std::function<double(int j, int lambda)> eval;  ///< j is 0-based

    Matrix F(int lambda, int rows) const;
};

/// Linear ramp eta_j(lambda) = w_j * lambda.
EtaFamily linear_eta(const Vector& w);

/// Fast-slow couplings that zero the coupling block of the stability matrix:
/// A_fs_lambda = B_f^{-1} (b_f b_s^T - A_sf_lambda^T B_s).
/// Requires strictly positive fast weights.
std::vector<Matrix> stability_decoupled_fs(const RkTableau& fast, const RkTableau& slow,
                                           const std::vector<Matrix>& couplings_sf);

/// First-microstep-coupled scheme with ramped slow-to-fast couplings:
/// couplings_fs[lambda] = a_fs1 + F(lambda - 1)/M, couplings_sf = [a_sf1, 0, ..., 0].
/// Inputs are in the flattened-tableau normalization; when a_fs1 * 1 equals
/// (1/M) A_ff * 1 the result is internally consistent.
MrGarkScheme kr_scheme(const RkTableau& fast, const RkTableau& slow, const Matrix& a_fs1,
                       const Matrix& a_sf1, const EtaFamily& eta, int M);

/// Fast-slow couplings sampled from function-value dense output coefficients:
/// a_fs_lambda(i, j) = d_j((lambda - 1 + c_f(i)) / M).
std::vector<Matrix> dense_output_fs(const RkTableau& slow,
                                    const std::function<double(int j, double theta)>& d,
                                    const Vector& fast_c, int M);

/// Outer explicit / inner pair defining a multirate infinitesimal step method.
struct MisPair {
    RkTableau outer;  ///< explicit, 0 = c_1 < c_2 < ... < c_s < 1
    RkTableau inner;

    MisPair(RkTableau outer_, RkTableau inner_);
};

/// GARK tableau of the MIS scheme that takes one inner step per outer
/// interval, including the trailing (1 - c_s) step. The inner c identities
/// are verified to 1e-13 on construction.
FlatGarkTableau mis_to_gark(const MisPair& p);

/// Multirate additive Runge-Kutta scheme: shared stage values between the
/// partitions, realized as A_ss = A_fs_1 = slow_A, A_ff = A_sf_1 = fast_A,
/// A_sf_lambda = 0 and A_fs_lambda = slow_A_lambda[lambda-2] for lambda >= 2.
MrGarkScheme additive_multirate(const Matrix& fast_A, const Matrix& slow_A,
                                const std::vector<Matrix>& slow_A_lambda, const Vector& b_f,
                                const Vector& b_s, int M);

}  // namespace mrgark
