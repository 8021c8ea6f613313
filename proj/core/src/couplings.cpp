#include "mrgark/couplings.hpp"

#include <cmath>
#include <stdexcept>

#include "mrgark/errors.hpp"

namespace mrgark {

Matrix EtaFamily::F(int lambda, int rows) const {
    Matrix f(rows, s_cols);
    for (int j = 0; j < s_cols; ++j) f.col(j).setConstant(eval(j, lambda));
    return f;
}

EtaFamily linear_eta(const Vector& w) {
    return EtaFamily{static_cast<int>(w.size()),
                     [w](int j, int lambda) { return w(j) * lambda; }};
}

std::vector<Matrix> stability_decoupled_fs(const RkTableau& fast, const RkTableau& slow,
                                           const std::vector<Matrix>& couplings_sf) {
    for (int i = 0; i < fast.stages(); ++i)
        if (!(fast.b()(i) > 0.0))
            throw SingularWeightsError("stability_decoupled_fs: fast weights must be positive");
    const Vector binv = fast.b().cwiseInverse();
    const Matrix bbT = fast.b() * slow.b().transpose();
    const Matrix Bs = slow.b().asDiagonal();
    std::vector<Matrix> fs;
    fs.reserve(couplings_sf.size());
    for (const Matrix& a_sf : couplings_sf) {
        if (a_sf.rows() != slow.stages() || a_sf.cols() != fast.stages())
            throw std::invalid_argument("stability_decoupled_fs: coupling has wrong shape");
        fs.push_back(binv.asDiagonal() * (bbT - a_sf.transpose() * Bs));
    }
    return fs;
}

MrGarkScheme kr_scheme(const RkTableau& fast, const RkTableau& slow, const Matrix& a_fs1,
                       const Matrix& a_sf1, const EtaFamily& eta, int M) {
    if (M < 1) throw std::invalid_argument("kr_scheme: M must be positive");
    if (eta.s_cols != slow.stages())
        throw std::invalid_argument("kr_scheme: eta family width must match slow stages");
    if (a_fs1.rows() != fast.stages() || a_fs1.cols() != slow.stages())
        throw std::invalid_argument("kr_scheme: a_fs1 has wrong shape");
    if (a_sf1.rows() != slow.stages() || a_sf1.cols() != fast.stages())
        throw std::invalid_argument("kr_scheme: a_sf1 has wrong shape");

    for (int lambda = 0; lambda < M; ++lambda) {
        double sum = 0.0;
        for (int j = 0; j < eta.s_cols; ++j) sum += eta.eval(j, lambda);
        if (std::abs(sum - lambda) > 1e-12)
            throw InvalidEtaError("kr_scheme: sum_j eta_j(lambda) != lambda at lambda=" +
                                  std::to_string(lambda));
    }

    std::vector<Matrix> fs;
    std::vector<Matrix> sf;
    EtaData data;
    data.a_fs1 = a_fs1;
    for (int lambda = 0; lambda < M; ++lambda) {
        Matrix f = eta.F(lambda, fast.stages());
        fs.push_back(a_fs1 + f / M);
        data.F.push_back(std::move(f));
        sf.push_back(lambda == 0 ? a_sf1 : Matrix::Zero(slow.stages(), fast.stages()));
    }
    return MrGarkScheme(fast, slow, M, std::move(fs), std::move(sf), std::move(data));
}

std::vector<Matrix> dense_output_fs(const RkTableau& slow,
                                    const std::function<double(int j, double theta)>& d,
                                    const Vector& fast_c, int M) {
    if (M < 1) throw std::invalid_argument("dense_output_fs: M must be positive");
    std::vector<Matrix> fs;
    fs.reserve(M);
    for (int lambda = 1; lambda <= M; ++lambda) {
        Matrix a(fast_c.size(), slow.stages());
        for (Eigen::Index i = 0; i < fast_c.size(); ++i) {
            const double theta = (lambda - 1 + fast_c(i)) / M;
            if (theta < 0.0 || theta > 1.0)
                throw std::domain_error("dense_output_fs: theta outside [0,1]");
            for (int j = 0; j < slow.stages(); ++j) a(i, j) = d(j, theta);
        }
        fs.push_back(std::move(a));
    }
    return fs;
}

MisPair::MisPair(RkTableau outer_, RkTableau inner_)
    : outer(std::move(outer_)), inner(std::move(inner_)) {
    if (!outer.is_explicit())
        throw InvalidOuterError("MisPair: outer tableau must be strictly lower triangular");
    const Vector& c = outer.c();
    if (std::abs(c(0)) > 1e-14)
        throw InvalidOuterError("MisPair: outer c_1 must be zero");
    for (int i = 1; i < outer.stages(); ++i)
        if (!(c(i) > c(i - 1)))
            throw InvalidOuterError("MisPair: outer abscissae must be strictly increasing");
    if (!(c(outer.stages() - 1) < 1.0))
        throw InvalidOuterError("MisPair: outer c_s must be below 1");
}

FlatGarkTableau mis_to_gark(const MisPair& p) {
    const int so = p.outer.stages();
    const int si = p.inner.stages();
    const Matrix& Ao = p.outer.A();
    const Vector& bo = p.outer.b();
    const Vector& co = p.outer.c();
    const Matrix& Ai = p.inner.A();
    const Vector& bi = p.inner.b();
    const Vector ci = Ai * Vector::Ones(si);
    const int nf = so * si;  // intervals i = 2..so plus the trailing step

    // delta[k] is the length of interval k (block row k, 0-based): c_{i} - c_{i-1}
    // for the outer intervals, then 1 - c_{so} for the trailing step.
    std::vector<double> delta(so);
    for (int k = 0; k + 1 < so; ++k) delta[k] = co(k + 1) - co(k);
    delta[so - 1] = 1.0 - co(so - 1);

    FlatGarkTableau flat;
    flat.M = 1;
    flat.A_ff = Matrix::Zero(nf, nf);
    flat.A_fs = Matrix::Zero(nf, so);
    flat.A_sf = Matrix::Zero(so, nf);
    flat.A_ss = Ao;
    flat.b_f = Vector(nf);
    flat.b_s = bo;

    const Matrix ones_biT = Vector::Ones(si) * bi.transpose();
    for (int k = 0; k < so; ++k) {
        for (int m = 0; m < k; ++m)
            flat.A_ff.block(k * si, m * si, si, si) = delta[m] * ones_biT;
        flat.A_ff.block(k * si, k * si, si, si) = delta[k] * Ai;
        flat.b_f.segment(k * si, si) = delta[k] * bi;

        // Slow coupling rows for interval k: completed tendency 1 e_{i-1}^T A_o
        // plus the ramp c_i (e_i - e_{i-1})^T A_o; the trailing step ramps
        // towards b_o^T instead.
        Eigen::RowVectorXd base(so), ramp(so);
        if (k + 1 < so) {
            base = Ao.row(k);
            ramp = Ao.row(k + 1) - Ao.row(k);
        } else {
            base = Ao.row(so - 1);
            ramp = bo.transpose() - Ao.row(so - 1);
        }
        flat.A_fs.block(k * si, 0, si, so) = Vector::Ones(si) * base + ci * ramp;
    }

    // Slow-fast couplings: outer stage i receives delta_l * b_i^T from every
    // completed interval l <= i-1 (block column l-1), nothing from the trailing step.
    for (int l = 0; l + 1 < so; ++l) {
        for (int i = l + 1; i < so; ++i)
            flat.A_sf.block(i, l * si, 1, si) = delta[l] * bi.transpose();
    }

    flat.c_f = flat.A_ff * Vector::Ones(nf);
    flat.c_s = flat.A_ss * Vector::Ones(so);

    // Theorem c-identities: c_ff = c_fs and c_sf = c_ss = c_o, to 1e-13.
    // They hold whenever both base methods have weights summing to 1.
    const Vector c_fs = flat.A_fs * Vector::Ones(so);
    const Vector c_sf = flat.A_sf * Vector::Ones(nf);
    if (max_abs(Vector(flat.c_f - c_fs)) > 1e-13 || max_abs(Vector(c_sf - co)) > 1e-13 ||
        max_abs(Vector(flat.c_s - co)) > 1e-13)
        throw InvalidOuterError(
            "mis_to_gark: c identities violated (base weights must sum to 1)");
    return flat;
}

MrGarkScheme additive_multirate(const Matrix& fast_A, const Matrix& slow_A,
                                const std::vector<Matrix>& slow_A_lambda, const Vector& b_f,
                                const Vector& b_s, int M) {
    const int s = static_cast<int>(b_f.size());
    auto check = [s](const Matrix& m, const char* what) {
        if (m.rows() != s || m.cols() != s)
            throw std::invalid_argument(std::string("additive_multirate: ") + what +
                                        " has wrong shape");
    };
    check(fast_A, "fast_A");
    check(slow_A, "slow_A");
    if (b_s.size() != s)
        throw std::invalid_argument("additive_multirate: b_s has wrong length");
    if (static_cast<int>(slow_A_lambda.size()) != M - 1)
        throw std::invalid_argument("additive_multirate: need M-1 later slow couplings");
    for (const Matrix& m : slow_A_lambda) check(m, "slow_A_lambda");

    std::vector<Matrix> fs;
    std::vector<Matrix> sf;
    fs.push_back(slow_A);
    sf.push_back(fast_A);
    for (int lambda = 2; lambda <= M; ++lambda) {
        fs.push_back(slow_A_lambda[lambda - 2]);
        sf.push_back(Matrix::Zero(s, s));
    }
    return MrGarkScheme(RkTableau(fast_A, b_f), RkTableau(slow_A, b_s), M, std::move(fs),
                        std::move(sf));
}

}  // namespace mrgark
