#include "mrgark/monotonicity.hpp"

#include <cmath>

#include "mrgark/errors.hpp"

namespace mrgark {

namespace {

constexpr double kIncThreshold = 1e-14;

AmRadius am_radius_impl(const Matrix& ahat, double r_max, double tol) {
    if ((ahat.array() < -kIncThreshold).any()) return {0.0, false};
    auto ok = [&](double r) { return am_check(ahat, r).am; };
    if (ok(r_max)) return {r_max, true};
    double lo = 0.0, hi = r_max;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (ok(mid) ? lo : hi) = mid;
    }
    return {lo, false};
}

/// M concatenated base steps in bordered unit-step form:
/// [[A, 0, ..., 0], [1 b^T, A, ...], ..., [b^T, ..., b^T, 0]].
Matrix bordered_base_chain(const RkTableau& base, int M) {
    const int s = base.stages();
    Matrix a_m = Matrix::Zero(M * s + 1, M * s + 1);
    const Matrix ones_bT = Vector::Ones(s) * base.b().transpose();
    for (int k = 0; k < M; ++k) {
        for (int m = 0; m < k; ++m) a_m.block(k * s, m * s, s, s) = ones_bT;
        a_m.block(k * s, k * s, s, s) = base.A();
        a_m.block(M * s, k * s, 1, s) = base.b().transpose();
    }
    return a_m;
}

}  // namespace

Matrix build_ahat(const FlatGarkTableau& flat) {
    const int nf = flat.fast_stages();
    const int ns = flat.slow_stages();
    const int n = nf + ns + 1;
    Matrix ahat = Matrix::Zero(n, n);
    ahat.block(0, 0, nf, nf) = flat.M * flat.A_ff;
    ahat.block(0, nf, nf, ns) = flat.A_fs;
    ahat.block(nf, 0, ns, nf) = flat.M * flat.A_sf;
    ahat.block(nf, nf, ns, ns) = flat.A_ss;
    ahat.block(nf + ns, 0, 1, nf) = flat.M * flat.b_f.transpose();
    ahat.block(nf + ns, nf, 1, ns) = flat.b_s.transpose();
    return ahat;
}

Matrix build_ahat_rk(const RkTableau& t) {
    const int s = t.stages();
    Matrix ahat = Matrix::Zero(s + 1, s + 1);
    ahat.block(0, 0, s, s) = t.A();
    ahat.block(s, 0, 1, s) = t.b().transpose();
    return ahat;
}

AmCheck am_check(const Matrix& ahat, double r, double tol) {
    AmCheck check;
    check.ahat_nonnegative = !(ahat.array() < -kIncThreshold).any();
    if (r == 0.0) {
        check.am = true;  // alpha = 1, beta = 0
        return check;
    }
    if (!check.ahat_nonnegative) {
        check.am = false;
        return check;
    }
    const auto n = ahat.rows();
    Eigen::FullPivLU<Matrix> lu(Matrix::Identity(n, n) + r * ahat);
    if (!lu.isInvertible()) {
        check.singular_resolvent = true;
        check.am = false;
        return check;
    }
    const double threshold = -tol * (1.0 + r);
    const Vector alpha = lu.solve(Vector::Ones(n));
    const Matrix beta = lu.solve(ahat);
    check.am = (alpha.array() >= threshold).all() && (beta.array() >= threshold).all();
    return check;
}

bool is_absolutely_monotonic(const FlatGarkTableau& flat, double r, double tol) {
    return am_check(build_ahat(flat), r, tol).am;
}

bool rk_is_absolutely_monotonic(const RkTableau& t, double r, double tol) {
    return am_check(build_ahat_rk(t), r, tol).am;
}

AmRadius am_radius(const FlatGarkTableau& flat, double r_max, double tol) {
    return am_radius_impl(build_ahat(flat), r_max, tol);
}

AmRadius rk_am_radius(const RkTableau& t, double r_max, double tol) {
    return am_radius_impl(build_ahat_rk(t), r_max, tol);
}

std::map<std::string, bool> incidence_conditions(const RkTableau& base,
                                                 const std::vector<Matrix>& couplings_fs,
                                                 const std::vector<Matrix>& couplings_sf, int M) {
    if (static_cast<int>(couplings_fs.size()) != M ||
        static_cast<int>(couplings_sf.size()) != M)
        throw std::invalid_argument("incidence_conditions: need M couplings per direction");
    const int s = base.stages();
    const Matrix& A = base.A();
    const Eigen::RowVectorXd bT = base.b().transpose();
    std::map<std::string, bool> verdicts;

    // (5.6a): chained fast matrix squared plus the coupling products.
    {
        const Matrix a_m = bordered_base_chain(base, M);
        Matrix lhs = a_m * a_m;
        for (int i = 0; i < M; ++i)
            for (int j = 0; j < M; ++j)
                lhs.block(i * s, j * s, s, s) += couplings_fs[i] * couplings_sf[j];
        verdicts["5.6a"] = incidence_leq(lhs, a_m, kIncThreshold);
    }
    // (5.6b): bordered base squared plus the summed cross products.
    {
        Matrix bordered = Matrix::Zero(s + 1, s + 1);
        bordered.block(0, 0, s, s) = A;
        bordered.block(s, 0, 1, s) = bT;
        Matrix lhs = bordered * bordered;
        for (int lam = 0; lam < M; ++lam) {
            lhs.block(0, 0, s, s) += couplings_sf[lam] * couplings_fs[lam];
            lhs.block(s, 0, 1, s) += bT * couplings_fs[lam];
        }
        verdicts["5.6b"] = incidence_leq(lhs, bordered, kIncThreshold);
    }
    // (5.6c): per micro-step fast-slow coupling pattern.
    {
        bool ok = true;
        const Matrix ones_bT = Vector::Ones(s) * bT;
        for (int i = 0; i < M; ++i) {
            Matrix lhs = A * couplings_fs[i] + couplings_fs[i] * A;
            for (int lam = 0; lam < i; ++lam) lhs += ones_bT * couplings_fs[lam];
            ok = ok && incidence_leq(lhs, couplings_fs[i], kIncThreshold);
        }
        verdicts["5.6c"] = ok;
    }
    // (5.6d): per micro-step slow-fast coupling pattern.
    {
        bool ok = true;
        for (int j = 0; j < M; ++j) {
            Matrix lhs = couplings_sf[j] * A + A * couplings_sf[j];
            for (int lam = j + 1; lam < M; ++lam)
                lhs += couplings_sf[lam] * Vector::Ones(s) * bT;
            ok = ok && incidence_leq(lhs, couplings_sf[j], kIncThreshold);
        }
        verdicts["5.6d"] = ok;
    }
    // (5.6e): weight row pattern.
    {
        bool ok = true;
        for (int j = 0; j < M; ++j) {
            const Eigen::RowVectorXd lhs =
                (M - 1.0 - j) * bT + bT * A + bT * couplings_sf[j];
            ok = ok && incidence_leq(lhs, bT, kIncThreshold);
        }
        verdicts["5.6e"] = ok;
    }
    // Necessary-condition diagnostic from the block triangular structure.
    {
        bool ok = true;
        for (int i = 0; i < M; ++i)
            for (int j = 0; j < i; ++j)
                ok = ok && max_abs(Matrix(couplings_fs[i] * couplings_sf[j])) <= kIncThreshold;
        verdicts["block-triangular"] = ok;
    }

    // Simplified set for first-microstep slow coupling and last-microstep
    // fast coupling.
    bool first_last = true;
    for (int lam = 1; lam < M; ++lam)
        if (max_abs(couplings_sf[lam]) > kIncThreshold) first_last = false;
    for (int lam = 0; lam + 1 < M; ++lam)
        if (max_abs(couplings_fs[lam]) > kIncThreshold) first_last = false;
    if (first_last) {
        const Matrix& fsM = couplings_fs[M - 1];
        const Matrix& sf1 = couplings_sf[0];
        verdicts["5.7a"] = incidence_leq(A * A + fsM * sf1, A, kIncThreshold);
        verdicts["5.7b"] = incidence_leq(Matrix(bT * A + bT * fsM), Matrix(bT), kIncThreshold);
        verdicts["5.7c"] = incidence_leq(A * fsM + fsM * A, fsM, kIncThreshold);
        verdicts["5.7d"] = incidence_leq(sf1 * A + A * sf1, sf1, kIncThreshold);
    }
    return verdicts;
}

std::map<std::string, bool> incidence_conditions(const MrGarkScheme& scheme) {
    const auto& f = scheme.fast();
    const auto& s = scheme.slow();
    if (f.stages() != s.stages() || max_abs(Matrix(f.A() - s.A())) > kIncThreshold ||
        max_abs(Vector(f.b() - s.b())) > kIncThreshold)
        throw UnsupportedSchemeError(
            "incidence_conditions: telescopic scheme required (same base both partitions)");
    return incidence_conditions(f, scheme.couplings_fs(), scheme.couplings_sf(), scheme.M());
}

double monotone_step_bound(double radius, double rho) {
    if (!(rho > 0.0)) throw std::domain_error("monotone_step_bound: rho must be positive");
    return radius * rho;
}

MonotonicityReport analyze_monotonicity(const FlatGarkTableau& flat, std::optional<double> rho,
                                        double r_max) {
    MonotonicityReport report;
    const Matrix ahat = build_ahat(flat);
    report.ahat_nonnegative = !(ahat.array() < -kIncThreshold).any();
    const AmRadius rad = am_radius_impl(ahat, r_max, 1e-6);
    report.radius = rad.radius;
    report.saturated = rad.saturated;
    for (double frac : {0.25, 0.5, 0.9, 0.999}) {
        const double r = frac * report.radius;
        report.am_checked_at.emplace_back(r, am_check(ahat, r).am);
    }
    if (rho) report.step_bound = monotone_step_bound(report.radius, *rho);
    return report;
}

}  // namespace mrgark
