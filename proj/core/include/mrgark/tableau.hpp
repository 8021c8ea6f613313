#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mrgark/linalg.hpp"

namespace mrgark {

/// One Runge-Kutta method (A, b, c). Immutable after construction.
///
/// c defaults to the row sums A*1 when omitted; if supplied explicitly it is
/// stored as given and validate_rk reports the row-sum residual.
class RkTableau {
  public:
    RkTableau(Matrix A, Vector b);
    RkTableau(Matrix A, Vector b, Vector c);

    int stages() const { return static_cast<int>(b_.size()); }
    const Matrix& A() const { return A_; }
    const Vector& b() const { return b_; }
    const Vector& c() const { return c_; }

    /// True when A is strictly lower triangular (|a_ij| <= threshold for j >= i).
    bool is_explicit(double threshold = 1e-14) const;

  private:
    Matrix A_;
    Vector b_;
    Vector c_;
};

struct Finding {
    enum class Severity { error, warning };
    Severity severity;
    std::string code;
    std::string message;
    double residual = 0.0;
};

struct ValidationReport {
    bool ok = true;
    std::vector<Finding> findings;
};

/// Shape and row-sum checks. All problems are findings, never exceptions;
/// ok iff no error-severity finding and all residuals <= tol.
ValidationReport validate_rk(const RkTableau& t, double tol = 1e-13);
ValidationReport validate_rk(const Matrix& A, const Vector& b, const Vector& c,
                             double tol = 1e-13);

enum class StructureTag { FullyCoupled, FirstMicrostepCoupled, Staggered, Explicit };

std::string to_string(StructureTag tag);

/// Slow-to-fast coupling family built from an eta ramp, kept with a scheme so
/// the specialized third-order residual can be evaluated later.
struct EtaData {
    Matrix a_fs1;             ///< base coupling, Eq.-(2.4)-normalized
    std::vector<Matrix> F;    ///< F(0), ..., F(M-1); row-constant eta values
};

/// A multirate GARK scheme: fast/slow base tableaus, multirate ratio M, and
/// per-microstep coupling matrices.
///
/// Coupling matrices are stored in the flattened-tableau normalization: the
/// flat tableau places couplings_fs[lambda] unscaled in the fast rows and
/// (1/M) * couplings_sf[lambda] in the slow rows.
class MrGarkScheme {
  public:
    MrGarkScheme(RkTableau fast, RkTableau slow, int M,
                 std::vector<Matrix> couplings_fs, std::vector<Matrix> couplings_sf,
                 std::optional<EtaData> eta = std::nullopt);

    const RkTableau& fast() const { return fast_; }
    const RkTableau& slow() const { return slow_; }
    int M() const { return M_; }
    const std::vector<Matrix>& couplings_fs() const { return fs_; }
    const std::vector<Matrix>& couplings_sf() const { return sf_; }
    const Matrix& coupling_fs(int lambda) const { return fs_.at(lambda - 1); }
    const Matrix& coupling_sf(int lambda) const { return sf_.at(lambda - 1); }
    StructureTag structure_tag() const { return tag_; }
    const std::optional<EtaData>& eta() const { return eta_; }

    /// Sum over lambda of the fast-slow couplings.
    Matrix sum_fs() const;
    /// Sum over lambda of the slow-fast couplings.
    Matrix sum_sf() const;

  private:
    RkTableau fast_;
    RkTableau slow_;
    int M_;
    std::vector<Matrix> fs_;
    std::vector<Matrix> sf_;
    StructureTag tag_;
    std::optional<EtaData> eta_;
};

/// The single-step two-partition GARK tableau equivalent to one macro-step.
/// flatten() fills it with the standard multirate block structure; the MIS
/// construction fills it with its own (non-uniform) blocks.
struct FlatGarkTableau {
    Matrix A_ff;  ///< (M*s_f) x (M*s_f)
    Matrix A_fs;  ///< (M*s_f) x s_s
    Matrix A_sf;  ///< s_s x (M*s_f)
    Matrix A_ss;  ///< s_s x s_s
    Vector b_f;
    Vector b_s;
    Vector c_f;   ///< A_ff * 1
    Vector c_s;   ///< A_ss * 1
    int M = 1;    ///< multirate ratio used for stability/monotonicity weighting

    int fast_stages() const { return static_cast<int>(b_f.size()); }
    int slow_stages() const { return static_cast<int>(b_s.size()); }
    int total_stages() const { return fast_stages() + slow_stages(); }

    /// Full stage matrix [[A_ff, A_fs], [A_sf, A_ss]].
    Matrix full_A() const;
    /// Stacked weights [b_f; b_s].
    Vector full_b() const;
    /// Stacked abscissae [c_f; c_s].
    Vector full_c() const;
};

/// Expand a scheme into the equivalent single-step GARK tableau.
FlatGarkTableau flatten(const MrGarkScheme& scheme);

/// Internal-consistency residuals:
///   fast: max over lambda of || A_fs_lambda*1 - (1/M) A_ff*1 - ((lambda-1)/M) 1 ||_inf
///   slow: || (1/M) sum_lambda A_sf_lambda*1 - A_ss*1 ||_inf
struct ConsistencyResiduals {
    double res_fast;
    double res_slow;
};
ConsistencyResiduals internal_consistency_residuals(const MrGarkScheme& scheme);

/// n equal sub-steps of a method expressed as a single tableau.
RkTableau compose_steps(const RkTableau& t, int n);

}  // namespace mrgark
