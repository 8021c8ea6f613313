#include "mrgark/schemes.hpp"

#include <cmath>
#include <stdexcept>

#include "mrgark/errors.hpp"
#include "mrgark/order.hpp"

namespace mrgark {

RkTableau ssp2_base() {
    Matrix a(2, 2);
    a << 0, 0, 1, 0;
    Vector b(2);
    b << rat(1, 2), rat(1, 2);
    return RkTableau(a, b);
}

RkTableau radau1a_base() {
    Matrix a(2, 2);
    a << rat(1, 4), rat(-1, 4), rat(1, 4), rat(5, 12);
    Vector b(2);
    b << rat(1, 4), rat(3, 4);
    return RkTableau(a, b);
}

RkTableau radau2a_base() {
    Matrix a(2, 2);
    a << rat(5, 12), rat(-1, 12), rat(3, 4), rat(1, 4);
    Vector b(2);
    b << rat(3, 4), rat(1, 4);
    return RkTableau(a, b);
}

RkTableau explicit_midpoint_base() {
    Matrix a(2, 2);
    a << 0, 0, rat(1, 2), 0;
    Vector b(2);
    b << 0, 1;
    return RkTableau(a, b);
}

RkTableau heun3_base() {
    Matrix a(3, 3);
    a << 0, 0, 0, rat(1, 3), 0, 0, 0, rat(2, 3), 0;
    Vector b(3);
    b << rat(1, 4), 0, rat(3, 4);
    return RkTableau(a, b);
}

namespace {

/// Two-stage order-3 coupling tableau [[c1, 0], [c2 - p, p]] with
/// p = (M/6 - b1 c1^2 - b2 c1 c2) / (b2 (c2 - c1)); satisfies Atilde*1 = c
/// and b^T Atilde c = M/6.
Matrix mrk_two_stage_coupling(const RkTableau& base, int M) {
    const double b1 = base.b()(0), b2 = base.b()(1);
    const double c1 = base.c()(0), c2 = base.c()(1);
    const double p = (M / 6.0 - b1 * c1 * c1 - b2 * c1 * c2) / (b2 * (c2 - c1));
    Matrix atilde(2, 2);
    atilde << c1, 0, c2 - p, p;
    return atilde;
}

/// eta_1 = c2/(c2-c1) lambda, eta_2 = -c1/(c2-c1) lambda.
EtaFamily mrk_two_stage_eta(const RkTableau& base) {
    const double c1 = base.c()(0), c2 = base.c()(1);
    Vector w(2);
    w << c2 / (c2 - c1), -c1 / (c2 - c1);
    return linear_eta(w);
}

MrGarkScheme kr_from_coupling(const RkTableau& fast, const RkTableau& slow,
                              const Matrix& atilde, const EtaFamily& eta, int M) {
    return kr_scheme(fast, slow, Matrix(atilde / M), Matrix(M * atilde), eta, M);
}

}  // namespace

MrGarkScheme make_mrk_radau1a(int M) {
    const RkTableau base = radau1a_base();
    return kr_from_coupling(base, base, mrk_two_stage_coupling(base, M),
                            mrk_two_stage_eta(base), M);
}

MrGarkScheme make_mrk_radau2a(int M, bool corrected_base) {
    // Coefficients as printed: eta = (3/2, -1/2) lambda and
    // Atilde = [[1/3, 0], [2 - M, M - 1]], which are the two-stage formulas
    // evaluated for the standard RADAU-IIA abscissae (1/3, 1).
    Matrix atilde(2, 2);
    atilde << rat(1, 3), 0, 2.0 - M, M - 1.0;
    Vector w(2);
    w << rat(3, 2), rat(-1, 2);
    const RkTableau base = corrected_base ? radau2a_base() : radau1a_base();
    return kr_from_coupling(base, base, atilde, linear_eta(w), M);
}

MrGarkScheme make_add_stable2(int M) {
    Vector b_f(2);
    b_f << rat(1, 2), rat(1, 2);
    Vector b_s(2);
    b_s << 3.0 / (4.0 * M + 2.0), (4.0 * M - 1.0) / (4.0 * M + 2.0);
    Matrix a_f(2, 2);
    a_f << rat(1, 4), -M / 2.0, (M + 1.0) / 2.0, rat(1, 4);
    Matrix a_s(2, 2);
    a_s << 1.5, -M * (4.0 * M - 1.0), 3.0 * (M + 1.0), (4.0 * M - 1.0) / 2.0;
    a_s /= 4.0 * M + 2.0;
    std::vector<Matrix> later(static_cast<std::size_t>(M - 1),
                              Matrix(Vector::Ones(2) * b_s.transpose()));
    return additive_multirate(a_f, a_s, later, b_f, b_s, M);
}

MrGarkScheme make_add_stable3_radau(int M) {
    // Doubled RADAU-IA pair: block-diagonal A with disjoint weight vectors,
    // perturbed by (M-1) Atilde keeping row sums and base order intact.
    Matrix a = Matrix::Zero(4, 4);
    Matrix r(2, 2);
    r << rat(1, 4), rat(-1, 4), rat(1, 4), rat(5, 12);
    a.block(0, 0, 2, 2) = r;
    a.block(2, 2, 2, 2) = r;
    Vector b_f(4), b_s(4);
    b_f << rat(1, 4), rat(3, 4), 0, 0;
    b_s << 0, 0, rat(1, 4), rat(3, 4);

    Matrix at_f = Matrix::Zero(4, 4);
    at_f(3, 2) = rat(-1, 3);
    at_f(3, 3) = rat(1, 3);
    Matrix at_s = Matrix::Zero(4, 4);
    at_s(1, 0) = rat(-1, 3);
    at_s(1, 1) = rat(1, 3);

    const Matrix a_fast = a + (M - 1.0) * at_f;
    const Matrix a_slow = a + (M - 1.0) * at_s;
    Vector w(4);
    w << 1, 0, 0, 0;  // eta_1 = lambda, others zero
    return kr_scheme(RkTableau(a_fast, b_f), RkTableau(a_slow, b_s), Matrix(a_slow / M),
                     Matrix(M * a_fast), linear_eta(w), M);
}

MrGarkScheme make_ssp2_mr(int M, Ssp2Coupling coupling) {
    const RkTableau base = ssp2_base();
    const int s = base.stages();
    std::vector<Matrix> sf(static_cast<std::size_t>(M), Matrix::Zero(s, s));
    sf[0](1, 0) = M;

    std::vector<Matrix> fs;
    switch (coupling) {
        case Ssp2Coupling::Decoupled:
            fs = stability_decoupled_fs(base, base, sf);
            break;
        case Ssp2Coupling::FirstFast:
            fs.assign(static_cast<std::size_t>(M), base.A());
            break;
        case Ssp2Coupling::LastSlow:
            fs.assign(static_cast<std::size_t>(M), Matrix::Zero(s, s));
            fs[static_cast<std::size_t>(M - 1)] = M * base.A();
            break;
    }
    return MrGarkScheme(base, base, M, std::move(fs), std::move(sf));
}

MrGarkScheme make_table3_2stage(const RkTableau& base, int M) {
    if (base.stages() != 2)
        throw std::invalid_argument("make_table3_2stage: base must have two stages");
    const double b2 = base.b()(1);
    if (std::abs(b2) < 1e-14)
        throw SingularWeightsError("make_table3_2stage: b2 must be nonzero");
    std::vector<Matrix> sf(static_cast<std::size_t>(M), Matrix::Zero(2, 2));
    sf[0](1, 0) = M / (2.0 * b2);
    std::vector<Matrix> fs = stability_decoupled_fs(base, base, sf);
    return MrGarkScheme(base, base, M, std::move(fs), std::move(sf));
}

MisPair default_mis_pair() { return MisPair(explicit_midpoint_base(), ssp2_base()); }

FlatGarkTableau CatalogEntry::flat() const {
    if (flat_only) return *flat_only;
    return flatten(*scheme);
}

bool CatalogEntry::is_telescopic() const {
    if (!scheme) return false;
    const auto& f = scheme->fast();
    const auto& s = scheme->slow();
    return f.stages() == s.stages() && max_abs(Matrix(f.A() - s.A())) <= 1e-14 &&
           max_abs(Vector(f.b() - s.b())) <= 1e-14;
}

CatalogEntry make_scheme(const std::string& name, int M, const std::string& variant) {
    if (M < 1) throw std::invalid_argument("make_scheme: M must be positive");
    CatalogEntry e;
    e.name = name;
    e.M = M;
    e.variant = variant;
    if (name != "mrk-radau2a-3" && !variant.empty())
        throw std::invalid_argument("make_scheme: unknown variant '" + variant + "' for " + name);

    if (name == "mrk-radau1a-3") {
        e.scheme = make_mrk_radau1a(M);
        e.documented_order = 3;
        e.summary = "RADAU-IA base, first-microstep coupling, order 3, internally consistent";
    } else if (name == "mrk-radau2a-3") {
        if (variant.empty()) {
            e.scheme = make_mrk_radau2a(M, false);
            e.documented_order = 1;
            e.summary = "coefficients as published under the RADAU-IIA label";
            e.note =
                "published base tableau repeats the RADAU-IA entries; the couplings match the "
                "standard RADAU-IIA base (use variant 'corrected-base' for the order-3 scheme)";
        } else if (variant == "corrected-base") {
            e.scheme = make_mrk_radau2a(M, true);
            e.documented_order = 3;
            e.summary = "RADAU-IIA base with the published couplings, order 3";
        } else {
            throw std::invalid_argument("make_scheme: unknown variant '" + variant + "'");
        }
    } else if (name == "add-stable-2") {
        e.scheme = make_add_stable2(M);
        e.documented_order = 2;
        e.summary = "nonlinearly stable additive pair, order 2, stability-decoupled";
    } else if (name == "add-stable-3-radau") {
        e.scheme = make_add_stable3_radau(M);
        e.documented_order = 3;
        e.summary = "doubled RADAU-IA pair, order 3, component-wise stable";
    } else if (name == "ssp2-mr-decoupled") {
        e.scheme = make_ssp2_mr(M, Ssp2Coupling::Decoupled);
        e.documented_order = 2;
        e.summary = "SSP2 telescopic, stability-decoupled coupling (negative entry, radius 0)";
    } else if (name == "ssp2-mr-firstfast") {
        e.scheme = make_ssp2_mr(M, Ssp2Coupling::FirstFast);
        e.documented_order = 2;
        e.summary = "SSP2 telescopic, uniform slow coupling (radius 0 for M >= 2)";
    } else if (name == "ssp2-mr-lastslow") {
        e.scheme = make_ssp2_mr(M, Ssp2Coupling::LastSlow);
        e.documented_order = 2;
        e.summary = "SSP2 telescopic, slow terms in the last micro-step only";
    } else if (name == "table3-2stage") {
        e.scheme = make_table3_2stage(ssp2_base(), M);
        e.documented_order = 2;
        e.summary = "two-stage stability-decoupled scheme over the SSP2 base";
    } else if (name == "mis") {
        const MisPair pair = default_mis_pair();
        e.flat_only = mis_to_gark(pair);
        e.mis_order3 = mis_order3_residual(pair);
        e.documented_order = 2;
        e.summary = "multirate infinitesimal step scheme (explicit midpoint outer, SSP2 inner)";
    } else {
        throw std::invalid_argument("unknown scheme: " + name);
    }
    return e;
}

std::vector<std::string> catalog_names() {
    return {"mrk-radau1a-3",     "mrk-radau2a-3",    "add-stable-2",
            "add-stable-3-radau", "ssp2-mr-decoupled", "ssp2-mr-firstfast",
            "ssp2-mr-lastslow",  "table3-2stage",    "mis"};
}

}  // namespace mrgark
