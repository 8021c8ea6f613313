#pragma once

#include <Eigen/Dense>

namespace mrgark {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Largest absolute entry, 0 for empty matrices.
inline double max_abs(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double max_abs(const Vector& v) {
    return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

inline Vector ones(Eigen::Index n) { return Vector::Ones(n); }

/// 0/1 pattern of the nonzero entries; |x| > threshold counts as nonzero.
inline Matrix incidence(const Matrix& m, double threshold = 1e-14) {
    return (m.cwiseAbs().array() > threshold).cast<double>().matrix();
}

/// Entrywise Inc(x) <= Inc(y).
inline bool incidence_leq(const Matrix& x, const Matrix& y, double threshold = 1e-14) {
    return ((x.cwiseAbs().array() <= threshold) || (y.cwiseAbs().array() > threshold)).all();
}

/// Smallest eigenvalue of the symmetrized matrix (P + P^T)/2.
inline double min_symmetric_eigenvalue(const Matrix& p) {
    if (p.size() == 0) return 0.0;
    Matrix s = 0.5 * (p + p.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(s, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

/// Exact rational entry, rounded to double once.
inline double rat(long long num, long long den) {
    return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace mrgark
