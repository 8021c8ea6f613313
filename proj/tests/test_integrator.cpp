#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mrgark/couplings.hpp"
#include "mrgark/integrator.hpp"
#include "mrgark/problems.hpp"
#include "mrgark/schemes.hpp"
#include "test_support.hpp"

using namespace mrgark;

namespace {

PartitionedIvp scalar_linear(double lambda_s, double lambda_f) {
    PartitionedIvp ivp;
    ivp.dim = 1;
    ivp.y0 = Vector::Ones(1);
    ivp.f_slow = [lambda_s](double, const Vector& y) { return Vector(lambda_s * y); };
    ivp.f_fast = [lambda_f](double, const Vector& y) { return Vector(lambda_f * y); };
    ivp.jac_slow = [lambda_s](double, const Vector&) {
        return Matrix(Matrix::Constant(1, 1, lambda_s));
    };
    ivp.jac_fast = [lambda_f](double, const Vector&) {
        return Matrix(Matrix::Constant(1, 1, lambda_f));
    };
    ivp.exact = [lambda_s, lambda_f](double t) {
        return Vector(Vector::Constant(1, std::exp((lambda_s + lambda_f) * t)));
    };
    return ivp;
}

/// One plain RK step, used as the degeneration oracle.
Vector rk_step(const RkTableau& t, const RhsFn& f, const Vector& y, double t_n, double h) {
    const int s = t.stages();
    std::vector<Vector> F(s);
    std::vector<Vector> Y(s);
    // All catalog fast bases used here are explicit or solvable by direct
    // fixed-point on the small stage system; use Newton-free evaluation for
    // explicit tableaus and dense solve for implicit ones.
    if (t.is_explicit()) {
        for (int i = 0; i < s; ++i) {
            Vector yi = y;
            for (int j = 0; j < i; ++j) yi += h * t.A()(i, j) * F[j];
            F[i] = f(t_n + t.c()(i) * h, yi);
        }
    } else {
        // Scalar linear problems only: solve the stage system exactly.
        REQUIRE(y.size() == 1);
        const double lambda = f(t_n, Vector::Ones(1))(0);  // f(y) = lambda*y
        Matrix m = Matrix::Identity(s, s) - h * lambda * t.A();
        Vector rhs = Vector::Constant(s, lambda * y(0));
        Vector k = m.fullPivLu().solve(rhs);
        for (int i = 0; i < s; ++i) F[i] = Vector::Constant(1, k(i));
    }
    Vector out = y;
    for (int i = 0; i < s; ++i) out += h * t.b()(i) * F[i];
    return out;
}

}  // namespace

TEST_CASE("component partition splits and reassembles the right-hand side") {
    auto f = [](double, const Vector& y) {
        Vector out(2);
        out << -y(0), -10.0 * y(1);
        return out;
    };
    const ComponentSplit split = component_partition(f, {0}, {1}, 2);
    const Vector y = (Vector(2) << 2.0, 3.0).finished();
    CHECK(split.f_slow(0.0, y)(0) == doctest::Approx(-2.0));
    CHECK(split.f_slow(0.0, y)(1) == 0.0);
    CHECK(split.f_fast(0.0, y)(0) == 0.0);
    CHECK(split.f_fast(0.0, y)(1) == doctest::Approx(-30.0));

    testing::Rng rng(2);
    for (int k = 0; k < 100; ++k) {
        const Vector p = rng.vector(2, -5.0, 5.0);
        const Vector sum = split.f_slow(0.0, p) + split.f_fast(0.0, p);
        CHECK(max_abs(Vector(sum - f(0.0, p))) == 0.0);
    }
}

TEST_CASE("component partition rejects overlapping or incomplete index sets") {
    auto f = [](double, const Vector& y) { return Vector(-y); };
    CHECK_THROWS_AS(component_partition(f, {0, 1}, {1}, 2), std::invalid_argument);
    CHECK_THROWS_AS(component_partition(f, {0}, {}, 2), std::invalid_argument);
    CHECK_THROWS_AS(component_partition(f, {0}, {2}, 2), std::invalid_argument);
}

TEST_CASE("all-fast component partition degenerates to the fast base method") {
    auto f = [](double, const Vector& y) {
        Vector out(2);
        out << -y(0) + 0.3 * y(1) * y(1), -2.0 * y(1);
        return out;
    };
    const ComponentSplit split = component_partition(f, {}, {0, 1}, 2);
    PartitionedIvp ivp;
    ivp.dim = 2;
    ivp.y0 = (Vector(2) << 1.0, 0.5).finished();
    ivp.f_slow = split.f_slow;
    ivp.f_fast = split.f_fast;

    const int M = 2;
    const MrGarkScheme s = make_ssp2_mr(M, Ssp2Coupling::LastSlow);
    const Trajectory traj = integrate(MrGarkStepper(s), ivp, 1.0, 0.1);

    Vector y = ivp.y0;
    for (int step = 0; step < 10 * M; ++step)
        y = rk_step(ssp2_base(), ivp.f_fast, y, 0.0, 0.1 / M);
    CHECK(max_abs(Vector(traj.states.back() - y)) <= 1e-12);
}

TEST_CASE("macro step matches the flattened oracle and the exact flow") {
    const PartitionedIvp ivp = scalar_linear(-1.0, -10.0);
    const MrGarkScheme s = make_mrk_radau1a(2);
    const double H = 0.1;
    const StepResult r = mgark_step(s, ivp, ivp.y0, 0.0, H);
    const Vector oracle = flat_gark_step(flatten(s), ivp, ivp.y0, 0.0, H);
    CHECK(max_abs(Vector(r.y - oracle)) <= 1e-12);

    // One-step error against the exact flow: O(H^4) with a lambda_f^4-sized
    // constant, about 1.4e-3 at H = 0.1 and ~256x smaller at H/4.
    const double err_h = std::abs(r.y(0) - std::exp(-1.1));
    CHECK(err_h <= 2e-3);
    const double h4 = H / 4.0;
    const double err_h4 =
        std::abs(mgark_step(s, ivp, ivp.y0, 0.0, h4).y(0) - std::exp(-11.0 * h4));
    CHECK(err_h4 <= 1e-5);
    CHECK(err_h4 <= err_h / 100.0);
}

TEST_CASE("vanishing slow part telescopes into M fast micro-steps") {
    PartitionedIvp ivp = make_nlcoupled2();
    ivp.f_slow = [](double, const Vector& y) { return Vector(Vector::Zero(y.size())); };
    ivp.jac_slow = nullptr;

    for (const char* name : {"ssp2-mr-lastslow", "mrk-radau1a-3"}) {
        const CatalogEntry entry = make_scheme(name, 3);
        const double H = 0.06;
        const StepResult r = mgark_step(*entry.scheme, ivp, ivp.y0, 0.0, H);

        Vector y = ivp.y0;
        if (entry.scheme->fast().is_explicit()) {
            for (int lam = 0; lam < 3; ++lam)
                y = rk_step(entry.scheme->fast(), ivp.f_fast, y, 0.0, H / 3);
        } else {
            // Implicit fast base: use the flat stepper on a fast-only scheme.
            const RkTableau& fast = entry.scheme->fast();
            std::vector<Matrix> zero_fs(3, Matrix::Zero(2, 2));
            std::vector<Matrix> zero_sf(3, Matrix::Zero(2, 2));
            const MrGarkScheme fast_only(fast, entry.scheme->slow(), 3, zero_fs, zero_sf);
            y = mgark_step(fast_only, ivp, ivp.y0, 0.0, H).y;
        }
        INFO(name);
        CHECK(max_abs(Vector(r.y - y)) <= 1e-12);
    }
}

TEST_CASE("vanishing fast part reduces to one slow step") {
    PartitionedIvp ivp = scalar_linear(-1.0, 0.0);
    ivp.f_fast = [](double, const Vector& y) { return Vector(Vector::Zero(y.size())); };
    const MrGarkScheme s = make_mrk_radau1a(2);
    const double H = 0.2;
    const StepResult r = mgark_step(s, ivp, ivp.y0, 0.0, H);
    const Vector oracle = rk_step(s.slow(), ivp.f_slow, ivp.y0, 0.0, H);
    CHECK(max_abs(Vector(r.y - oracle)) <= 1e-12);
}

TEST_CASE("explicit path runs without Newton and with exact evaluation counts") {
    const int M = 3;
    const MrGarkScheme s = make_ssp2_mr(M, Ssp2Coupling::LastSlow);
    REQUIRE(s.structure_tag() == StructureTag::Explicit);
    const PartitionedIvp ivp = make_nlcoupled2();
    const int n_steps = 5;
    const Trajectory traj = integrate(MrGarkStepper(s), ivp, n_steps * 0.02, 0.02);
    CHECK(traj.stats.newton_iters == 0);
    CHECK(traj.stats.jacobian_builds == 0);
    CHECK(traj.stats.rhs_fast_evals == n_steps * M * s.fast().stages());
    CHECK(traj.stats.rhs_slow_evals == n_steps * s.slow().stages());
    // rhs_fast = M * (s_f / s_s) * rhs_slow for the non-staggered schedule
    CHECK(traj.stats.rhs_fast_evals * s.slow().stages() ==
          traj.stats.rhs_slow_evals * M * s.fast().stages());
}

TEST_CASE("structured and flattened steps agree on the nonlinear problem") {
    const PartitionedIvp ivp = make_nlcoupled2();
    testing::Rng rng(13);
    for (const char* name : {"mrk-radau1a-3", "add-stable-2", "ssp2-mr-lastslow"}) {
        const CatalogEntry entry = make_scheme(name, 2);
        const FlatGarkStepper flat_stepper(entry.flat());
        const MrGarkStepper stepper(*entry.scheme);
        for (int k = 0; k < 20; ++k) {
            const Vector y = rng.vector(2, -1.0, 1.0);
            const double H = rng.uniform(0.01, 0.08);
            const Vector a = stepper.step(ivp, y, 0.0, H).y;
            const Vector b = flat_stepper.step(ivp, y, 0.0, H).y;
            INFO(name);
            CHECK(max_abs(Vector(a - b)) <= 1e-11 * (1.0 + y.norm()));
        }
    }
}

TEST_CASE("a zero step returns the state unchanged") {
    const PartitionedIvp ivp = make_nlcoupled2();
    const FlatGarkTableau flat = flatten(make_ssp2_mr(2, Ssp2Coupling::LastSlow));
    CHECK(flat_gark_step(flat, ivp, ivp.y0, 0.0, 0.0) == ivp.y0);
}

TEST_CASE("newton solves a linear residual in one iteration") {
    Matrix a(2, 2);
    a << 2.0, 1.0, 0.0, 3.0;
    const Vector rhs = (Vector(2) << 1.0, 2.0).finished();
    const NewtonResult res = newton_solve(
        [&](const Vector& y) { return Vector(a * y - rhs); },
        [&](const Vector&) { return a; }, Vector::Zero(2), {});
    CHECK(res.iterations == 1);
    CHECK(max_abs(Vector(a * res.y - rhs)) <= 1e-12);
}

TEST_CASE("implicit Euler stage equation matches the closed form") {
    const double theta = 0.4, lambda = -3.0, a0 = 1.7;
    const NewtonResult res = newton_solve(
        [&](const Vector& y) { return Vector(y - Vector::Constant(1, a0) -
                                             theta * lambda * y); },
        [&](const Vector&) { return Matrix(Matrix::Constant(1, 1, 1.0 - theta * lambda)); },
        Vector::Zero(1), {});
    CHECK(std::abs(res.y(0) - a0 / (1.0 - theta * lambda)) <= 1e-14);
}

TEST_CASE("newton reports non-convergence with the residual norm") {
    SolverConfig cfg;
    cfg.newton_max_iter = 3;
    // Residual with no root: exp(y) has no zero; Newton walks away forever.
    CHECK_THROWS_AS(newton_solve(
                        [](const Vector& y) { return Vector(y.array().exp().matrix()); },
                        [](const Vector& y) {
                            return Matrix(Vector(y.array().exp().matrix()).asDiagonal());
                        },
                        Vector::Zero(1), cfg),
                    NonConvergenceError);
}

TEST_CASE("finite-difference and analytic Jacobians give matching steps") {
    const PartitionedIvp ivp = make_nlcoupled2();
    const MrGarkScheme s = make_add_stable2(2);
    SolverConfig fd;
    fd.jacobian_mode = SolverConfig::JacobianMode::FiniteDifference;
    const Vector a = mgark_step(s, ivp, ivp.y0, 0.0, 0.1).y;
    const Vector b = mgark_step(s, ivp, ivp.y0, 0.0, 0.1, fd).y;
    CHECK(max_abs(Vector(a - b)) <= 1e-9);
}

TEST_CASE("the time grid is formed by products, landing on the end point exactly") {
    const PartitionedIvp ivp = scalar_linear(-0.5, -1.0);
    const Trajectory traj =
        integrate(MrGarkStepper(make_ssp2_mr(2, Ssp2Coupling::LastSlow)), ivp, 1.0, 0.1);
    REQUIRE(traj.times.size() == 11);
    CHECK(traj.times.back() == 1.0);
    for (std::size_t k = 1; k < traj.times.size(); ++k)
        CHECK(traj.times[k] > traj.times[k - 1]);
}

TEST_CASE("non-divisible step sizes are rejected") {
    const PartitionedIvp ivp = scalar_linear(-0.5, -1.0);
    CHECK_THROWS_AS(
        integrate(MrGarkStepper(make_ssp2_mr(2, Ssp2Coupling::LastSlow)), ivp, 1.0, 0.3),
        std::invalid_argument);
}

TEST_CASE("blow-up aborts with the partial trajectory attached") {
    PartitionedIvp ivp;
    ivp.dim = 1;
    ivp.y0 = Vector::Ones(1);
    ivp.f_slow = [](double, const Vector& y) { return Vector(y.array().square().matrix()); };
    ivp.f_fast = [](double, const Vector& y) { return Vector(100.0 * y); };
    try {
        integrate(MrGarkStepper(make_ssp2_mr(2, Ssp2Coupling::LastSlow)), ivp, 50.0, 1.0);
        FAIL("expected IntegrationError");
    } catch (const IntegrationError& e) {
        CHECK(e.partial.states.size() >= 1);
        CHECK(e.partial.times.size() == e.partial.states.size());
    }
}

TEST_CASE("micro states trace the fast sub-integration when the slow part vanishes") {
    const int M = 3;
    const MrGarkScheme s = make_ssp2_mr(M, Ssp2Coupling::LastSlow);
    PartitionedIvp ivp = make_nlcoupled2();
    ivp.f_slow = [](double, const Vector& y) { return Vector(Vector::Zero(y.size())); };
    ivp.jac_slow = nullptr;
    const double H = 0.06;
    const StepResult r = MrGarkStepper(s).step(ivp, ivp.y0, 0.0, H, {}, true);
    REQUIRE(static_cast<int>(r.micro_states.size()) == M);
    Vector y = ivp.y0;
    for (int lam = 0; lam < M; ++lam) {
        y = rk_step(ssp2_base(), ivp.f_fast, y, 0.0, H / M);
        CHECK(max_abs(Vector(r.micro_states[lam] - y)) <= 1e-13);
    }
    // With no slow contribution the macro solution is the last micro state.
    CHECK(max_abs(Vector(r.y - r.micro_states[M - 1])) <= 1e-14);
}

TEST_CASE("MIS flat step reproduces the two-stage tendency recursion") {
    // Independent oracle: the staged fast sub-integration written out directly
    // for a two-stage outer method with one inner step per interval.
    const MisPair pair = default_mis_pair();
    const PartitionedIvp ivp = make_nlcoupled2();
    const double H = 0.08;
    const Matrix& ao = pair.outer.A();
    const Vector& bo = pair.outer.b();
    const Vector& co = pair.outer.c();
    const RkTableau& inner = pair.inner;

    auto inner_step = [&](const Vector& v0, const Vector& tendency, double width) {
        // One step of the inner method on v' = tendency + width * f_fast(v).
        const int si = inner.stages();
        std::vector<Vector> F(si);
        Vector v = v0;
        for (int k = 0; k < si; ++k) {
            Vector vk = v0;
            for (int j = 0; j < k; ++j) vk += H * inner.A()(k, j) * F[j];
            F[k] = tendency + width * ivp.f_fast(0.0, vk);
        }
        for (int k = 0; k < si; ++k) v += H * inner.b()(k) * F[k];
        return v;
    };

    const Vector y1s = ivp.y0;
    const Vector f1 = ivp.f_slow(0.0, y1s);
    const Vector y2s = inner_step(y1s, Vector((ao(1, 0) - 0.0) * f1), co(1) - co(0));
    const Vector f2 = ivp.f_slow(0.0, y2s);
    const Vector y_next = inner_step(
        y2s, Vector((bo(0) - ao(1, 0)) * f1 + (bo(1) - 0.0) * f2), 1.0 - co(1));

    const Vector via_gark = flat_gark_step(mis_to_gark(pair), ivp, ivp.y0, 0.0, H);
    CHECK(max_abs(Vector(via_gark - y_next)) <= 1e-12);
}
