#pragma once

#include <random>
#include <vector>

#include "mrgark/couplings.hpp"
#include "mrgark/schemes.hpp"
#include "mrgark/tableau.hpp"

namespace mrgark::testing {

/// Deterministic generator for random scheme data.
class Rng {
  public:
    explicit Rng(unsigned seed) : gen_(seed) {}

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(gen_);
    }
    int uniform_int(int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(gen_);
    }
    Matrix matrix(int rows, int cols, double lo = -1.0, double hi = 1.0) {
        Matrix m(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) m(i, j) = uniform(lo, hi);
        return m;
    }
    Vector vector(int n, double lo = -1.0, double hi = 1.0) {
        Vector v(n);
        for (int i = 0; i < n; ++i) v(i) = uniform(lo, hi);
        return v;
    }

  private:
    std::mt19937 gen_;
};

/// Random multirate scheme with strictly positive fast weights and couplings
/// built by the stability-decoupling formula.
inline MrGarkScheme random_decoupled_scheme(Rng& rng) {
    const int sf = rng.uniform_int(1, 4);
    const int ss = rng.uniform_int(1, 4);
    const int M = rng.uniform_int(1, 4);
    RkTableau fast(rng.matrix(sf, sf), rng.vector(sf, 0.1, 1.0));
    RkTableau slow(rng.matrix(ss, ss), rng.vector(ss, -1.0, 1.0));
    std::vector<Matrix> sf_couplings;
    for (int lam = 0; lam < M; ++lam) sf_couplings.push_back(rng.matrix(ss, sf));
    std::vector<Matrix> fs_couplings = stability_decoupled_fs(fast, slow, sf_couplings);
    return MrGarkScheme(fast, slow, M, std::move(fs_couplings), std::move(sf_couplings));
}

/// Random scheme without structural constraints.
inline MrGarkScheme random_scheme(Rng& rng, int M = 0) {
    const int sf = rng.uniform_int(1, 3);
    const int ss = rng.uniform_int(1, 3);
    if (M == 0) M = rng.uniform_int(1, 4);
    RkTableau fast(rng.matrix(sf, sf), rng.vector(sf, 0.1, 1.0));
    RkTableau slow(rng.matrix(ss, ss), rng.vector(ss, 0.1, 1.0));
    std::vector<Matrix> fs, sfc;
    for (int lam = 0; lam < M; ++lam) {
        fs.push_back(rng.matrix(sf, ss));
        sfc.push_back(rng.matrix(ss, sf));
    }
    return MrGarkScheme(fast, slow, M, std::move(fs), std::move(sfc));
}

}  // namespace mrgark::testing
