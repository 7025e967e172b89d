#pragma once

// Fixtures shared by the unit and acceptance suites.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <utility>
#include <vector>

#include "latentscope/core.hpp"
#include "oracle.hpp"

namespace fixtures {

using latentscope::AttributeBatch;
using latentscope::Kind;
using latentscope::LatentBatch;
using latentscope::Matrix;
using latentscope::RegularizationMap;

struct Discrete {
    std::vector<std::vector<double>> z;
    std::vector<std::vector<double>> a;
    std::vector<std::size_t> reg;

    LatentBatch latents() const { return LatentBatch(Matrix::from_columns(z), {Kind::discrete}); }
    AttributeBatch attributes() const {
        return AttributeBatch(Matrix::from_columns(a), {Kind::discrete});
    }
    RegularizationMap reg_map() const { return {reg, z.size()}; }
    oracle::Fixture as_oracle() const { return {z, a, reg}; }
};

/// 64 rows: a_0 uniform on {0..3}, a_1 and z_2 independent of it and of
/// each other; z_0 = a_0, z_1 = a_1; reg = [0, 1].
inline Discrete perfect() {
    Discrete f;
    f.z.assign(3, {});
    f.a.assign(2, {});
    for (int r = 0; r < 64; ++r) {
        f.a[0].push_back(r % 4);
        f.a[1].push_back((r / 4) % 4);
        f.z[0].push_back(r % 4);
        f.z[1].push_back((r / 4) % 4);
        f.z[2].push_back((r / 16) % 4);
    }
    f.reg = {0, 1};
    return f;
}

/// 64 rows: a_0 uniform on {0..3}, a_1 = a_0 mod 2; z_0 = a_0, z_1 = a_1,
/// z_2 independent; reg = [0, 1].
inline Discrete dependent() {
    Discrete f;
    f.z.assign(3, {});
    f.a.assign(2, {});
    for (int r = 0; r < 64; ++r) {
        f.a[0].push_back(r % 4);
        f.a[1].push_back(r % 2);
        f.z[0].push_back(r % 4);
        f.z[1].push_back(r % 2);
        f.z[2].push_back((r / 4) % 4);
    }
    f.reg = {0, 1};
    return f;
}

/// Random all-discrete fixture: N <= 64, D <= 4, A in {2, 3} with A < D,
/// at most 8 symbols per column. Latents are noisy functions of the
/// attributes so that gaps and dependencies are nontrivial.
inline Discrete random_discrete(std::mt19937_64& rng) {
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    Discrete f;
    const int n = pick(8, 64);
    const int attrs = pick(2, 3);
    const int dims = pick(attrs + 1, 4);
    f.a.assign(static_cast<std::size_t>(attrs), {});
    f.z.assign(static_cast<std::size_t>(dims), {});
    std::vector<int> symbols;
    for (int i = 0; i < attrs; ++i) {
        symbols.push_back(pick(2, 8));
    }
    for (int r = 0; r < n; ++r) {
        for (int i = 0; i < attrs; ++i) {
            int v = pick(0, symbols[static_cast<std::size_t>(i)] - 1);
            if (i > 0 && pick(0, 2) == 0) {
                v = static_cast<int>(f.a[0].back()) % symbols[static_cast<std::size_t>(i)];
            }
            f.a[static_cast<std::size_t>(i)].push_back(v);
        }
        for (int d = 0; d < dims; ++d) {
            const auto src = static_cast<std::size_t>(d % attrs);
            int v = static_cast<int>(f.a[src].back());
            switch (pick(0, 3)) {
            case 0:
                v = pick(0, 7);
                break;
            case 1:
                v = v / 2;
                break;
            default:
                break;
            }
            f.z[static_cast<std::size_t>(d)].push_back(v);
        }
    }
    std::vector<std::size_t> perm(static_cast<std::size_t>(dims));
    for (std::size_t d = 0; d < perm.size(); ++d) {
        perm[d] = d;
    }
    std::shuffle(perm.begin(), perm.end(), rng);
    f.reg.assign(perm.begin(), perm.begin() + attrs);
    return f;
}

inline std::pair<std::vector<double>, std::vector<double>> gaussian_pair(std::size_t n, double rho,
                                                                         std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::vector<double> x(n);
    std::vector<double> y(n);
    const double c = std::sqrt(1.0 - rho * rho);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = normal(rng);
        y[i] = rho * x[i] + c * normal(rng);
    }
    return {x, y};
}

inline std::vector<double> gaussian(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::vector<double> x(n);
    for (auto& v : x) {
        v = normal(rng);
    }
    return x;
}

/// Continuous data for determinism checks: 3 attributes (two continuous,
/// one discrete), 5 latents mixing them with noise.
inline std::pair<LatentBatch, AttributeBatch> mixed_batch(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Matrix z(n, 5);
    Matrix a(n, 3);
    for (std::size_t r = 0; r < n; ++r) {
        const double a0 = normal(rng);
        const double a1 = 0.5 * a0 + normal(rng);
        const double a2 = static_cast<double>(r % 3);
        a(r, 0) = a0;
        a(r, 1) = a1;
        a(r, 2) = a2;
        z(r, 0) = a0 + 0.1 * normal(rng);
        z(r, 1) = a1 + 0.3 * normal(rng);
        z(r, 2) = a2 + 0.5 * normal(rng);
        z(r, 3) = normal(rng);
        z(r, 4) = 0.2 * a0 + normal(rng);
    }
    return {LatentBatch(z), AttributeBatch(a, {Kind::continuous, Kind::continuous, Kind::discrete})};
}

}  // namespace fixtures
