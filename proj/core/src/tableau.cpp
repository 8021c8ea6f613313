#include "mrgark/tableau.hpp"

#include <stdexcept>
#include <utility>

namespace mrgark {

namespace {

void require(bool cond, const std::string& what) {
    if (!cond) throw std::invalid_argument(what);
}

// Kahn topological check on the stage dependency graph of a stage matrix:
// stage i depends on stage j when |w_ij| > threshold. Returns true when the
// graph is acyclic, i.e. the stages can be computed explicitly in some order.
bool stage_graph_acyclic(const Matrix& w, double threshold) {
    const Eigen::Index n = w.rows();
    std::vector<int> indeg(n, 0);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (std::abs(w(i, j)) > threshold) ++indeg[i];
    std::vector<Eigen::Index> queue;
    for (Eigen::Index i = 0; i < n; ++i)
        if (indeg[i] == 0) queue.push_back(i);
    Eigen::Index removed = 0;
    while (!queue.empty()) {
        Eigen::Index j = queue.back();
        queue.pop_back();
        ++removed;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (std::abs(w(i, j)) > threshold && --indeg[i] == 0) queue.push_back(i);
        }
    }
    return removed == n;
}

}  // namespace

RkTableau::RkTableau(Matrix A, Vector b) : A_(std::move(A)), b_(std::move(b)) {
    require(A_.rows() == A_.cols(), "RkTableau: A must be square");
    require(A_.rows() == b_.size(), "RkTableau: b length must match A");
    require(b_.size() >= 1, "RkTableau: at least one stage required");
    c_ = A_ * Vector::Ones(A_.cols());
}

RkTableau::RkTableau(Matrix A, Vector b, Vector c)
    : A_(std::move(A)), b_(std::move(b)), c_(std::move(c)) {
    require(A_.rows() == A_.cols(), "RkTableau: A must be square");
    require(A_.rows() == b_.size(), "RkTableau: b length must match A");
    require(A_.rows() == c_.size(), "RkTableau: c length must match A");
    require(b_.size() >= 1, "RkTableau: at least one stage required");
}

bool RkTableau::is_explicit(double threshold) const {
    for (Eigen::Index i = 0; i < A_.rows(); ++i)
        for (Eigen::Index j = i; j < A_.cols(); ++j)
            if (std::abs(A_(i, j)) > threshold) return false;
    return true;
}

ValidationReport validate_rk(const Matrix& A, const Vector& b, const Vector& c, double tol) {
    ValidationReport report;
    auto add = [&report](Finding::Severity sev, std::string code, std::string msg, double res) {
        report.findings.push_back({sev, std::move(code), std::move(msg), res});
        if (sev == Finding::Severity::error) report.ok = false;
    };
    if (A.rows() != A.cols())
        add(Finding::Severity::error, "shape.A", "A is not square", 0.0);
    if (b.size() != A.rows())
        add(Finding::Severity::error, "shape.b", "b length does not match A", 0.0);
    if (c.size() != A.rows())
        add(Finding::Severity::error, "shape.c", "c length does not match A", 0.0);
    if (A.rows() < 1)
        add(Finding::Severity::error, "shape.empty", "stage count must be >= 1", 0.0);
    if (report.ok) {
        const double res = max_abs(Vector(A * Vector::Ones(A.cols()) - c));
        if (res > tol)
            add(Finding::Severity::error, "rowsum",
                "row sums of A do not match c", res);
        else
            report.findings.push_back(
                {Finding::Severity::warning, "rowsum.ok", "row sums match c", res});
    }
    return report;
}

ValidationReport validate_rk(const RkTableau& t, double tol) {
    return validate_rk(t.A(), t.b(), t.c(), tol);
}

std::string to_string(StructureTag tag) {
    switch (tag) {
        case StructureTag::FullyCoupled: return "fully-coupled";
        case StructureTag::FirstMicrostepCoupled: return "first-microstep-coupled";
        case StructureTag::Staggered: return "staggered";
        case StructureTag::Explicit: return "explicit";
    }
    return "unknown";
}

MrGarkScheme::MrGarkScheme(RkTableau fast, RkTableau slow, int M,
                           std::vector<Matrix> couplings_fs, std::vector<Matrix> couplings_sf,
                           std::optional<EtaData> eta)
    : fast_(std::move(fast)),
      slow_(std::move(slow)),
      M_(M),
      fs_(std::move(couplings_fs)),
      sf_(std::move(couplings_sf)),
      tag_(StructureTag::FullyCoupled),
      eta_(std::move(eta)) {
    require(M_ >= 1, "MrGarkScheme: M must be positive");
    require(static_cast<int>(fs_.size()) == M_, "MrGarkScheme: need M fast-slow couplings");
    require(static_cast<int>(sf_.size()) == M_, "MrGarkScheme: need M slow-fast couplings");
    const int sf_stages = fast_.stages();
    const int ss_stages = slow_.stages();
    for (const Matrix& m : fs_)
        require(m.rows() == sf_stages && m.cols() == ss_stages,
                "MrGarkScheme: fast-slow coupling has wrong shape");
    for (const Matrix& m : sf_)
        require(m.rows() == ss_stages && m.cols() == sf_stages,
                "MrGarkScheme: slow-fast coupling has wrong shape");

    // Compute the structure tag. A scheme is explicit when the flattened stage
    // dependency graph is acyclic (the flat matrix is strictly lower triangular
    // after a topological reordering of the stages).
    const double thr = 1e-14;
    bool later_sf_zero = true;
    for (int lambda = 2; lambda <= M_; ++lambda)
        if (max_abs(sf_[lambda - 1]) > thr) later_sf_zero = false;

    // Build the flat stage matrix inline (flatten() needs a complete object).
    const int nf = M_ * sf_stages;
    Matrix w = Matrix::Zero(nf + ss_stages, nf + ss_stages);
    for (int lam = 0; lam < M_; ++lam) {
        for (int mu = 0; mu < lam; ++mu)
            w.block(lam * sf_stages, mu * sf_stages, sf_stages, sf_stages) =
                (1.0 / M_) * Vector::Ones(sf_stages) * fast_.b().transpose();
        w.block(lam * sf_stages, lam * sf_stages, sf_stages, sf_stages) = (1.0 / M_) * fast_.A();
        w.block(lam * sf_stages, nf, sf_stages, ss_stages) = fs_[lam];
        w.block(nf, lam * sf_stages, ss_stages, sf_stages) = (1.0 / M_) * sf_[lam];
    }
    w.block(nf, nf, ss_stages, ss_stages) = slow_.A();

    if (stage_graph_acyclic(w, thr))
        tag_ = StructureTag::Explicit;
    else if (later_sf_zero)
        tag_ = StructureTag::FirstMicrostepCoupled;
    else
        tag_ = StructureTag::FullyCoupled;
}

Matrix MrGarkScheme::sum_fs() const {
    Matrix s = Matrix::Zero(fast_.stages(), slow_.stages());
    for (const Matrix& m : fs_) s += m;
    return s;
}

Matrix MrGarkScheme::sum_sf() const {
    Matrix s = Matrix::Zero(slow_.stages(), fast_.stages());
    for (const Matrix& m : sf_) s += m;
    return s;
}

Matrix FlatGarkTableau::full_A() const {
    const int nf = fast_stages();
    const int ns = slow_stages();
    Matrix w(nf + ns, nf + ns);
    w.topLeftCorner(nf, nf) = A_ff;
    w.topRightCorner(nf, ns) = A_fs;
    w.bottomLeftCorner(ns, nf) = A_sf;
    w.bottomRightCorner(ns, ns) = A_ss;
    return w;
}

Vector FlatGarkTableau::full_b() const {
    Vector b(total_stages());
    b.head(fast_stages()) = b_f;
    b.tail(slow_stages()) = b_s;
    return b;
}

Vector FlatGarkTableau::full_c() const {
    Vector c(total_stages());
    c.head(fast_stages()) = c_f;
    c.tail(slow_stages()) = c_s;
    return c;
}

FlatGarkTableau flatten(const MrGarkScheme& scheme) {
    const int sf = scheme.fast().stages();
    const int ss = scheme.slow().stages();
    const int M = scheme.M();
    const int nf = M * sf;
    const double invM = 1.0 / M;

    FlatGarkTableau flat;
    flat.M = M;
    flat.A_ff = Matrix::Zero(nf, nf);
    flat.A_fs = Matrix::Zero(nf, ss);
    flat.A_sf = Matrix::Zero(ss, nf);
    flat.A_ss = scheme.slow().A();
    flat.b_f = Vector(nf);
    flat.b_s = scheme.slow().b();

    const Matrix ones_bT = Vector::Ones(sf) * scheme.fast().b().transpose();
    for (int lam = 0; lam < M; ++lam) {
        for (int mu = 0; mu < lam; ++mu)
            flat.A_ff.block(lam * sf, mu * sf, sf, sf) = invM * ones_bT;
        flat.A_ff.block(lam * sf, lam * sf, sf, sf) = invM * scheme.fast().A();
        flat.A_fs.block(lam * sf, 0, sf, ss) = scheme.couplings_fs()[lam];
        flat.A_sf.block(0, lam * sf, ss, sf) = invM * scheme.couplings_sf()[lam];
        flat.b_f.segment(lam * sf, sf) = invM * scheme.fast().b();
    }
    flat.c_f = flat.A_ff * Vector::Ones(nf);
    flat.c_s = flat.A_ss * Vector::Ones(ss);
    return flat;
}

ConsistencyResiduals internal_consistency_residuals(const MrGarkScheme& scheme) {
    const int M = scheme.M();
    const Vector cf = scheme.fast().A() * Vector::Ones(scheme.fast().stages());
    const Vector cs = scheme.slow().A() * Vector::Ones(scheme.slow().stages());
    const Vector one_f = Vector::Ones(scheme.fast().stages());

    double res_fast = 0.0;
    for (int lambda = 1; lambda <= M; ++lambda) {
        const Vector actual = scheme.coupling_fs(lambda) * Vector::Ones(scheme.slow().stages());
        const Vector target = cf / M + (static_cast<double>(lambda - 1) / M) * one_f;
        res_fast = std::max(res_fast, max_abs(Vector(actual - target)));
    }

    Vector sf_rowsum = Vector::Zero(scheme.slow().stages());
    for (int lambda = 1; lambda <= M; ++lambda)
        sf_rowsum += scheme.coupling_sf(lambda) * one_f;
    const double res_slow = max_abs(Vector(sf_rowsum / M - cs));
    return {res_fast, res_slow};
}

RkTableau compose_steps(const RkTableau& t, int n) {
    if (n < 1) throw std::invalid_argument("compose_steps: n must be positive");
    const int s = t.stages();
    Matrix A = Matrix::Zero(n * s, n * s);
    Vector b(n * s);
    const Matrix ones_bT = Vector::Ones(s) * t.b().transpose();
    for (int k = 0; k < n; ++k) {
        for (int m = 0; m < k; ++m) A.block(k * s, m * s, s, s) = ones_bT / n;
        A.block(k * s, k * s, s, s) = t.A() / n;
        b.segment(k * s, s) = t.b() / n;
    }
    return RkTableau(std::move(A), std::move(b));
}

}  // namespace mrgark
