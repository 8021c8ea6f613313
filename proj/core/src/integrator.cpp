#include "mrgark/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace mrgark {

namespace {

constexpr double kZeroThreshold = 1e-14;

bool all_finite(const Vector& v) { return v.allFinite(); }

/// Topological order of the stage subgraph restricted to `group`; dependencies
/// outside the group are treated as known. Returns nullopt on a cycle.
std::optional<std::vector<int>> topo_order(const Matrix& w, const std::vector<int>& group) {
    std::vector<int> order;
    std::vector<char> in_group(w.rows(), 0), done(w.rows(), 0);
    for (int i : group) in_group[i] = 1;
    std::vector<int> indeg(w.rows(), 0);
    for (int i : group)
        for (int j : group)
            if (std::abs(w(i, j)) > kZeroThreshold) ++indeg[i];
    std::vector<int> ready;
    for (int i : group)
        if (indeg[i] == 0) ready.push_back(i);
    while (!ready.empty()) {
        int j = ready.back();
        ready.pop_back();
        order.push_back(j);
        done[j] = 1;
        for (int i : group)
            if (!done[i] && std::abs(w(i, j)) > kZeroThreshold && --indeg[i] == 0)
                ready.push_back(i);
    }
    if (order.size() != group.size()) return std::nullopt;
    return order;
}

/// Shared stage-system state for one macro step.
struct StageWork {
    const Matrix& w;
    const Vector& c;
    const std::vector<char>& is_fast;
    const PartitionedIvp& ivp;
    const SolverConfig& cfg;
    Vector y_n;
    double t_n;
    double H;

    std::vector<Vector> F;
    std::vector<Vector> Y;
    std::vector<char> known;
    StepStats stats;

    StageWork(const Matrix& w_, const Vector& c_, const std::vector<char>& fast_,
              const PartitionedIvp& ivp_, const SolverConfig& cfg_, Vector y, double t, double h)
        : w(w_), c(c_), is_fast(fast_), ivp(ivp_), cfg(cfg_), y_n(std::move(y)), t_n(t), H(h) {
        const auto n = static_cast<std::size_t>(w.rows());
        F.assign(n, Vector());
        Y.assign(n, Vector());
        known.assign(n, 0);
    }

    double stage_time(int i) const { return t_n + c(i) * H; }

    Vector eval_rhs(int i, const Vector& y) {
        Vector f = is_fast[i] ? (++stats.rhs_fast_evals, ivp.f_fast(stage_time(i), y))
                              : (++stats.rhs_slow_evals, ivp.f_slow(stage_time(i), y));
        if (!all_finite(f))
            throw DivergedError("non-finite right-hand side", stage_time(i), H);
        return f;
    }

    Matrix stage_jacobian(int i, const Vector& y) {
        ++stats.jacobian_builds;
        const JacFn& jac = is_fast[i] ? ivp.jac_fast : ivp.jac_slow;
        if (cfg.jacobian_mode == SolverConfig::JacobianMode::Analytic && jac)
            return jac(stage_time(i), y);
        Matrix j(ivp.dim, ivp.dim);
        const Vector f0 = eval_rhs(i, y);
        Vector yp = y;
        for (int k = 0; k < ivp.dim; ++k) {
            const double eps = cfg.fd_epsilon * (1.0 + std::abs(y(k)));
            yp(k) = y(k) + eps;
            j.col(k) = (eval_rhs(i, yp) - f0) / eps;
            yp(k) = y(k);
        }
        return j;
    }

    Vector known_part(int i) const {
        Vector acc = y_n;
        for (Eigen::Index j = 0; j < w.cols(); ++j)
            if (known[j] && std::abs(w(i, j)) > kZeroThreshold) acc += H * w(i, j) * F[j];
        return acc;
    }

    void solve_group(const std::vector<int>& group) {
        auto order = topo_order(w, group);
        if (order) {
            for (int i : *order) {
                Y[i] = known_part(i);
                if (!all_finite(Y[i]))
                    throw DivergedError("non-finite stage value", stage_time(i), H);
                F[i] = eval_rhs(i, Y[i]);
                known[i] = 1;
            }
            return;
        }
        solve_group_newton(group);
    }

    void solve_group_newton(const std::vector<int>& group) {
        const int k = static_cast<int>(group.size());
        const int d = ivp.dim;

        std::vector<Vector> base(k);
        for (int a = 0; a < k; ++a) base[a] = known_part(group[a]);

        auto residual = [&](const Vector& z) {
            // Stash stage values and rhs so the accepted iterate's data is
            // available after the solve without re-evaluating.
            for (int a = 0; a < k; ++a) {
                Y[group[a]] = z.segment(a * d, d);
                F[group[a]] = eval_rhs(group[a], Y[group[a]]);
            }
            Vector r(k * d);
            for (int a = 0; a < k; ++a) {
                Vector acc = Y[group[a]] - base[a];
                for (int b = 0; b < k; ++b) {
                    const double wij = w(group[a], group[b]);
                    if (std::abs(wij) > kZeroThreshold) acc -= H * wij * F[group[b]];
                }
                r.segment(a * d, d) = acc;
            }
            return r;
        };
        auto jacobian = [&](const Vector& z) {
            std::vector<Matrix> jstage(k);
            for (int a = 0; a < k; ++a) jstage[a] = stage_jacobian(group[a], z.segment(a * d, d));
            Matrix j = Matrix::Identity(k * d, k * d);
            for (int a = 0; a < k; ++a)
                for (int b = 0; b < k; ++b) {
                    const double wij = w(group[a], group[b]);
                    if (std::abs(wij) > kZeroThreshold)
                        j.block(a * d, b * d, d, d) -= H * wij * jstage[b];
                }
            return j;
        };

        Vector guess(k * d);
        for (int a = 0; a < k; ++a) guess.segment(a * d, d) = y_n;
        NewtonResult res = newton_solve(residual, jacobian, std::move(guess), cfg);
        stats.newton_iters += res.iterations;
        for (int i : group) known[i] = 1;
    }

    void note_stage_norms() {
        for (std::size_t i = 0; i < Y.size(); ++i)
            if (known[i]) stats.max_stage_norm = std::max(stats.max_stage_norm, Y[i].norm());
    }
};

StepResult run_step(const Matrix& w, const Vector& c, const Vector& b,
                    const std::vector<char>& is_fast, const std::vector<std::vector<int>>& groups,
                    const PartitionedIvp& ivp, const Vector& y_n, double t_n, double H,
                    const SolverConfig& cfg) {
    StageWork work(w, c, is_fast, ivp, cfg, y_n, t_n, H);
    for (const auto& g : groups) work.solve_group(g);
    work.note_stage_norms();

    Vector y1 = y_n;
    for (Eigen::Index i = 0; i < b.size(); ++i)
        if (std::abs(b(i)) > kZeroThreshold) y1 += H * b(i) * work.F[i];
    if (!all_finite(y1)) throw DivergedError("non-finite solution update", t_n, H);

    StepResult result;
    result.y = std::move(y1);
    result.stats = work.stats;
    return result;
}

}  // namespace

ComponentSplit component_partition(const RhsFn& f, const std::vector<int>& slow_indices,
                                   const std::vector<int>& fast_indices, int dim) {
    std::vector<int> seen(dim, 0);
    for (int i : slow_indices) {
        if (i < 0 || i >= dim) throw std::invalid_argument("component_partition: index out of range");
        ++seen[i];
    }
    for (int i : fast_indices) {
        if (i < 0 || i >= dim) throw std::invalid_argument("component_partition: index out of range");
        ++seen[i];
    }
    for (int i = 0; i < dim; ++i)
        if (seen[i] != 1)
            throw std::invalid_argument(
                "component_partition: index sets must partition 0..dim-1 exactly");

    auto mask = [dim](const std::vector<int>& idx) {
        std::vector<char> m(dim, 0);
        for (int i : idx) m[i] = 1;
        return m;
    };
    ComponentSplit split;
    split.f_slow = [f, m = mask(slow_indices), dim](double t, const Vector& y) {
        Vector full = f(t, y);
        Vector out = Vector::Zero(dim);
        for (int i = 0; i < dim; ++i)
            if (m[i]) out(i) = full(i);
        return out;
    };
    split.f_fast = [f, m = mask(fast_indices), dim](double t, const Vector& y) {
        Vector full = f(t, y);
        Vector out = Vector::Zero(dim);
        for (int i = 0; i < dim; ++i)
            if (m[i]) out(i) = full(i);
        return out;
    };
    return split;
}

NewtonResult newton_solve(const std::function<Vector(const Vector&)>& residual,
                          const std::function<Matrix(const Vector&)>& jac, Vector guess,
                          const SolverConfig& cfg) {
    NewtonResult result;
    result.y = std::move(guess);
    Vector r = residual(result.y);
    if (!all_finite(r)) throw DivergedError("non-finite residual", 0.0, 0.0);
    double rnorm = max_abs(r);
    while (rnorm > cfg.newton_tol) {
        if (result.iterations >= cfg.newton_max_iter)
            throw NonConvergenceError("newton_solve: no convergence after " +
                                          std::to_string(cfg.newton_max_iter) + " iterations",
                                      rnorm);
        Eigen::FullPivLU<Matrix> lu(jac(result.y));
        if (!lu.isInvertible())
            throw SingularJacobianError("newton_solve: singular stage Jacobian");
        result.y -= lu.solve(r);
        r = residual(result.y);
        if (!all_finite(r)) throw DivergedError("non-finite residual", 0.0, 0.0);
        rnorm = max_abs(r);
        ++result.iterations;
    }
    return result;
}

MrGarkStepper::MrGarkStepper(MrGarkScheme scheme)
    : scheme_(std::move(scheme)), flat_(flatten(scheme_)) {
    const int sf = scheme_.fast().stages();
    const int nf = flat_.fast_stages();
    const int ns = flat_.slow_stages();
    switch (scheme_.structure_tag()) {
        case StructureTag::Explicit:
        case StructureTag::FullyCoupled:
        case StructureTag::Staggered: {
            std::vector<int> all(nf + ns);
            for (int i = 0; i < nf + ns; ++i) all[i] = i;
            groups_.push_back(std::move(all));
            break;
        }
        case StructureTag::FirstMicrostepCoupled: {
            std::vector<int> first;
            for (int i = 0; i < sf; ++i) first.push_back(i);
            for (int i = nf; i < nf + ns; ++i) first.push_back(i);
            groups_.push_back(std::move(first));
            for (int lam = 1; lam < scheme_.M(); ++lam) {
                std::vector<int> block;
                for (int i = 0; i < sf; ++i) block.push_back(lam * sf + i);
                groups_.push_back(std::move(block));
            }
            break;
        }
    }
}

StepResult MrGarkStepper::step(const PartitionedIvp& ivp, const Vector& y_n, double t_n, double H,
                               const SolverConfig& cfg, bool want_micro) const {
    const int nf = flat_.fast_stages();
    const int ns = flat_.slow_stages();
    std::vector<char> is_fast(nf + ns, 0);
    for (int i = 0; i < nf; ++i) is_fast[i] = 1;

    const Matrix w = flat_.full_A();
    const Vector c = flat_.full_c();
    const Vector b = flat_.full_b();

    StageWork work(w, c, is_fast, ivp, cfg, y_n, t_n, H);
    for (const auto& g : groups_) work.solve_group(g);
    work.note_stage_norms();

    StepResult result;
    result.stats = work.stats;
    Vector y1 = y_n;
    for (int i = 0; i < nf + ns; ++i)
        if (std::abs(b(i)) > kZeroThreshold) y1 += H * b(i) * work.F[i];
    if (!all_finite(y1)) throw DivergedError("non-finite solution update", t_n, H);
    result.y = std::move(y1);

    if (want_micro) {
        const int sf = scheme_.fast().stages();
        const double h = H / scheme_.M();
        Vector micro = y_n;
        for (int lam = 0; lam < scheme_.M(); ++lam) {
            for (int j = 0; j < sf; ++j)
                micro += h * scheme_.fast().b()(j) * work.F[lam * sf + j];
            result.micro_states.push_back(micro);
        }
    }
    return result;
}

FlatGarkStepper::FlatGarkStepper(FlatGarkTableau flat) : flat_(std::move(flat)) {}

StepResult FlatGarkStepper::step(const PartitionedIvp& ivp, const Vector& y_n, double t_n,
                                 double H, const SolverConfig& cfg) const {
    const int nf = flat_.fast_stages();
    const int ns = flat_.slow_stages();
    std::vector<char> is_fast(nf + ns, 0);
    for (int i = 0; i < nf; ++i) is_fast[i] = 1;
    std::vector<int> all(nf + ns);
    for (int i = 0; i < nf + ns; ++i) all[i] = i;

    return run_step(flat_.full_A(), flat_.full_c(), flat_.full_b(), is_fast, {all}, ivp, y_n, t_n,
                    H, cfg);
}

StepResult mgark_step(const MrGarkScheme& scheme, const PartitionedIvp& ivp, const Vector& y_n,
                      double t_n, double H, const SolverConfig& cfg) {
    return MrGarkStepper(scheme).step(ivp, y_n, t_n, H, cfg);
}

Vector flat_gark_step(const FlatGarkTableau& flat, const PartitionedIvp& ivp, const Vector& y_n,
                      double t_n, double H, const SolverConfig& cfg) {
    return FlatGarkStepper(flat).step(ivp, y_n, t_n, H, cfg).y;
}

namespace {

template <class Stepper>
Trajectory integrate_impl(const Stepper& stepper, const PartitionedIvp& ivp, double t_end,
                          double H, const SolverConfig& cfg, const IntegrateOptions& opts) {
    if (!(H > 0.0)) throw std::invalid_argument("integrate: H must be positive");
    const double ratio = (t_end - ivp.t0) / H;
    const auto n_steps = static_cast<long long>(std::llround(ratio));
    if (n_steps < 0 || std::abs(ratio - static_cast<double>(n_steps)) >
                           1e-9 * std::max(1.0, std::abs(ratio)))
        throw std::invalid_argument("integrate: (t_end - t0)/H must be an integer");

    Trajectory traj;
    traj.times.push_back(ivp.t0);
    traj.states.push_back(ivp.y0);
    Vector y = ivp.y0;
    for (long long k = 0; k < n_steps; ++k) {
        const double t_k = ivp.t0 + static_cast<double>(k) * H;
        try {
            StepResult r = [&] {
                if constexpr (std::is_same_v<Stepper, MrGarkStepper>)
                    return stepper.step(ivp, y, t_k, H, cfg, opts.record_micro_states);
                else
                    return stepper.step(ivp, y, t_k, H, cfg);
            }();
            y = r.y;
            traj.stats += r.stats;
            if (opts.record_stage_norms) traj.stage_norm_max.push_back(r.stats.max_stage_norm);
            if (opts.record_micro_states) traj.micro_states.push_back(r.micro_states);
        } catch (const std::exception& e) {
            throw IntegrationError(std::string("integrate: step failed at t=") +
                                       std::to_string(t_k) + ": " + e.what(),
                                   std::move(traj));
        }
        traj.times.push_back(ivp.t0 + static_cast<double>(k + 1) * H);
        traj.states.push_back(y);
    }
    return traj;
}

}  // namespace

Trajectory integrate(const MrGarkStepper& stepper, const PartitionedIvp& ivp, double t_end,
                     double H, const SolverConfig& cfg, const IntegrateOptions& opts) {
    return integrate_impl(stepper, ivp, t_end, H, cfg, opts);
}

Trajectory integrate(const FlatGarkStepper& stepper, const PartitionedIvp& ivp, double t_end,
                     double H, const SolverConfig& cfg, const IntegrateOptions& opts) {
    return integrate_impl(stepper, ivp, t_end, H, cfg, opts);
}

}  // namespace mrgark
