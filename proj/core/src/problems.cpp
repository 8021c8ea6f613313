#include "mrgark/problems.hpp"

#include <cmath>
#include <stdexcept>

namespace mrgark {

PartitionedIvp make_linear2() {
    PartitionedIvp ivp;
    ivp.name = "linear2";
    ivp.dim = 2;
    const Vector sigma_s = (Vector(2) << -0.2, -0.1).finished();
    const Vector sigma_f = (Vector(2) << -2.0, -1.6).finished();
    ivp.y0 = (Vector(2) << 1.0, 0.8).finished();
    ivp.f_slow = [sigma_s](double, const Vector& y) { return Vector(sigma_s.cwiseProduct(y)); };
    ivp.f_fast = [sigma_f](double, const Vector& y) { return Vector(sigma_f.cwiseProduct(y)); };
    ivp.jac_slow = [sigma_s](double, const Vector&) { return Matrix(sigma_s.asDiagonal()); };
    ivp.jac_fast = [sigma_f](double, const Vector&) { return Matrix(sigma_f.asDiagonal()); };
    const Vector y0 = ivp.y0;
    ivp.exact = [sigma_s, sigma_f, y0](double t) {
        return Vector(((sigma_s + sigma_f) * t).array().exp().matrix().cwiseProduct(y0));
    };
    ivp.metadata.nu_slow = -0.1;
    ivp.metadata.nu_fast = -1.6;
    return ivp;
}

PartitionedIvp make_nlcoupled2() {
    PartitionedIvp ivp;
    ivp.name = "nlcoupled2";
    ivp.dim = 2;
    ivp.y0 = (Vector(2) << 0.6, 0.4).finished();
    ivp.f_slow = [](double, const Vector& y) {
        Vector f(2);
        f(0) = -y(0) - y(0) * y(0) * y(0) + 0.1 * y(1);
        f(1) = -0.5 * y(1) + 0.1 * y(0) * y(1);
        return f;
    };
    ivp.f_fast = [](double, const Vector& y) {
        Vector f(2);
        f(0) = -10.0 * y(0) + std::sin(y(1));
        f(1) = -8.0 * y(1) + 0.2 * y(0) * y(0);
        return f;
    };
    ivp.jac_slow = [](double, const Vector& y) {
        Matrix j(2, 2);
        j << -1.0 - 3.0 * y(0) * y(0), 0.1, 0.1 * y(1), -0.5 + 0.1 * y(0);
        return j;
    };
    ivp.jac_fast = [](double, const Vector& y) {
        Matrix j(2, 2);
        j << -10.0, std::cos(y(1)), 0.4 * y(0), -8.0;
        return j;
    };
    return ivp;
}

PartitionedIvp make_dissipative2() {
    PartitionedIvp ivp;
    ivp.name = "dissipative2";
    ivp.dim = 2;
    ivp.y0 = (Vector(2) << 0.4, 0.2).finished();
    // f_slow(y) = -y - ||y||^2 y is monotone with nu = -1; f_fast adds a
    // rotation to a strong linear decay, nu = -10.
    ivp.f_slow = [](double, const Vector& y) {
        return Vector(-y - y.squaredNorm() * y);
    };
    ivp.f_fast = [](double, const Vector& y) {
        Vector f(2);
        f(0) = -10.0 * y(0) + 5.0 * y(1);
        f(1) = -10.0 * y(1) - 5.0 * y(0);
        return f;
    };
    ivp.jac_slow = [](double, const Vector& y) {
        Matrix j = -(1.0 + y.squaredNorm()) * Matrix::Identity(2, 2);
        j -= 2.0 * y * y.transpose();
        return j;
    };
    ivp.jac_fast = [](double, const Vector&) {
        Matrix j(2, 2);
        j << -10.0, 5.0, -5.0, -10.0;
        return j;
    };
    ivp.metadata.nu_slow = -1.0;
    ivp.metadata.nu_fast = -10.0;
    ivp.metadata.mu = -0.1;  // 1/nu_fast-scale coercivity bound for the linear part
    return ivp;
}

PartitionedIvp make_monotone1(int M) {
    if (M < 1) throw std::invalid_argument("make_monotone1: M must be positive");
    PartitionedIvp ivp;
    ivp.name = "monotone1";
    ivp.dim = 1;
    ivp.y0 = (Vector(1) << 1.0).finished();
    ivp.f_slow = [](double, const Vector& y) { return Vector(-2.0 * y); };
    const double fast_rate = -2.0 * M;
    ivp.f_fast = [fast_rate](double, const Vector& y) { return Vector(fast_rate * y); };
    ivp.jac_slow = [](double, const Vector&) {
        return Matrix(Matrix::Constant(1, 1, -2.0));
    };
    ivp.jac_fast = [fast_rate](double, const Vector&) {
        return Matrix(Matrix::Constant(1, 1, fast_rate));
    };
    const double total = -2.0 - 2.0 * M;
    ivp.exact = [total](double t) { return Vector(Vector::Constant(1, std::exp(total * t))); };
    ivp.metadata.rho = 1.0;
    ivp.metadata.nu_slow = -2.0;
    ivp.metadata.nu_fast = fast_rate;
    return ivp;
}

PartitionedIvp problem_by_name(const std::string& name) {
    if (name == "linear2") return make_linear2();
    if (name == "nlcoupled2") return make_nlcoupled2();
    if (name == "dissipative2") return make_dissipative2();
    if (name == "monotone1") return make_monotone1(2);
    throw std::invalid_argument("unknown problem: " + name);
}

std::vector<std::string> problem_names() {
    return {"linear2", "nlcoupled2", "dissipative2", "monotone1"};
}

}  // namespace mrgark
