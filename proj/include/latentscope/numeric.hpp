#pragma once

// Reduction and special-function helpers. Every reduction in the library
// goes through pairwise_sum over a canonically ordered sequence so that
// results do not depend on input row order.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "latentscope/core.hpp"

namespace latentscope::detail {

/// Balanced binary-tree summation. Exact for 2^m equal terms.
inline double pairwise_sum(std::span<const double> xs) {
    switch (xs.size()) {
    case 0:
        return 0.0;
    case 1:
        return xs[0];
    case 2:
        return xs[0] + xs[1];
    default: {
        const std::size_t half = xs.size() / 2;
        return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
    }
    }
}

/// Sum after sorting, so the result is a function of the multiset only.
inline double sorted_sum(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    return pairwise_sum(xs);
}

inline double sorted_mean(std::vector<double> xs) {
    const auto n = static_cast<double>(xs.size());
    return sorted_sum(std::move(xs)) / n;
}

/// Digamma at a positive integer.
inline double digamma(std::size_t n) {
    constexpr double euler_gamma = 0.57721566490153286061;
    if (n == 0) {
        return -INFINITY;
    }
    if (n < 16) {
        double h = 0.0;
        for (std::size_t m = 1; m < n; ++m) {
            h += 1.0 / static_cast<double>(m);
        }
        return h - euler_gamma;
    }
    // Asymptotic expansion, accurate to ~1e-16 for n >= 16.
    const double x = static_cast<double>(n);
    const double inv2 = 1.0 / (x * x);
    return std::log(x) - 0.5 / x -
           inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 / 240.0)));
}

/// Population standard deviation, reduced in sorted order.
inline double canonical_std(std::span<const double> xs) {
    std::vector<double> sorted(xs.begin(), xs.end());
    std::sort(sorted.begin(), sorted.end());
    const double mean = pairwise_sum(sorted) / static_cast<double>(sorted.size());
    std::vector<double> sq(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double d = sorted[i] - mean;
        sq[i] = d * d;
    }
    std::sort(sq.begin(), sq.end());
    return std::sqrt(pairwise_sum(sq) / static_cast<double>(sq.size()));
}

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based uniform in the open interval (-1, 1), keyed by
/// (seed, role, rank). No state, so the value for a given key never depends
/// on evaluation order.
inline double jitter_unit(std::uint64_t seed, std::uint64_t role, std::uint64_t rank) {
    const std::uint64_t h = mix64(mix64(mix64(seed) ^ role) ^ rank);
    const double u01 = (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
    return 2.0 * u01 - 1.0;
}

inline std::uint64_t resolve_seed(const EstimatorConfig& cfg) {
    if (cfg.seed) {
        return *cfg.seed;
    }
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

}  // namespace latentscope::detail
