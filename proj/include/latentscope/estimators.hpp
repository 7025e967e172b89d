#pragma once

// Entropy, conditional entropy, mutual information and the mutual
// information matrix between attributes and latent dimensions.
//
//   discrete / discrete      plug-in contingency-table estimator
//   continuous / continuous  KSG estimator (variant 1), Chebyshev metric
//   discrete / continuous    Ross nearest-neighbor estimator
//   continuous entropy       Kozachenko-Leonenko estimator
//
// Continuous columns are standardized and then perturbed by
// jitter_scale * u, with u drawn from a counter-based generator keyed by
// (seed, role, rank of the value in its column). The rank of a tied value is
// resolved by its partner value, so estimates are invariant under any joint
// row permutation. All reductions run in a canonical order for the same
// reason.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "latentscope/core.hpp"
#include "latentscope/neighbors.hpp"
#include "latentscope/numeric.hpp"

namespace latentscope {

namespace detail {

struct Coded {
    std::vector<std::size_t> codes;
    std::vector<std::size_t> counts;
};

/// Maps symbols to 0..K-1 in increasing value order.
inline Coded encode(std::span<const double> xs) {
    std::vector<double> symbols(xs.begin(), xs.end());
    std::sort(symbols.begin(), symbols.end());
    symbols.erase(std::unique(symbols.begin(), symbols.end()), symbols.end());
    Coded out;
    out.codes.resize(xs.size());
    out.counts.assign(symbols.size(), 0);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const auto code = static_cast<std::size_t>(
            std::lower_bound(symbols.begin(), symbols.end(), xs[i]) - symbols.begin());
        out.codes[i] = code;
        ++out.counts[code];
    }
    return out;
}

/// Joint cell counts of two coded columns, as (count_xy, count_x, count_y).
struct Cell {
    std::size_t xy;
    std::size_t x;
    std::size_t y;
};

inline std::vector<Cell> joint_cells(const Coded& x, const Coded& y) {
    const std::size_t n = x.codes.size();
    const std::uint64_t stride = y.counts.size();
    std::vector<std::uint64_t> keys(n);
    for (std::size_t i = 0; i < n; ++i) {
        keys[i] = x.codes[i] * stride + y.codes[i];
    }
    std::sort(keys.begin(), keys.end());
    std::vector<Cell> cells;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && keys[j] == keys[i]) {
            ++j;
        }
        const auto cx = static_cast<std::size_t>(keys[i] / stride);
        const auto cy = static_cast<std::size_t>(keys[i] % stride);
        cells.push_back({j - i, x.counts[cx], y.counts[cy]});
        i = j;
    }
    return cells;
}

inline double plugin_entropy(const Coded& x) {
    const auto n = static_cast<double>(x.codes.size());
    std::vector<double> terms;
    terms.reserve(x.counts.size());
    for (std::size_t c : x.counts) {
        const auto cd = static_cast<double>(c);
        terms.push_back(cd / n * std::log(n / cd));
    }
    return sorted_sum(std::move(terms));
}

inline double plugin_mutual_info(const Coded& x, const Coded& y) {
    const auto n = static_cast<double>(x.codes.size());
    std::vector<double> terms;
    for (const Cell& c : joint_cells(x, y)) {
        const auto cxy = static_cast<double>(c.xy);
        const double ratio =
            (cxy * n) / (static_cast<double>(c.x) * static_cast<double>(c.y));
        terms.push_back(cxy / n * std::log(ratio));
    }
    const double mi = sorted_sum(std::move(terms));
    // Rounding can push the estimate a few ulps outside 0 <= I <= min(H(x), H(y)).
    return std::clamp(mi, 0.0, std::min(plugin_entropy(x), plugin_entropy(y)));
}

/// H(a | b) = sum p(a,b) ln(p(b) / p(a,b)).
inline double plugin_conditional_entropy(const Coded& a, const Coded& b) {
    const auto n = static_cast<double>(a.codes.size());
    std::vector<double> terms;
    for (const Cell& c : joint_cells(a, b)) {
        const auto cab = static_cast<double>(c.xy);
        terms.push_back(cab / n * std::log(static_cast<double>(c.y) / cab));
    }
    return std::max(0.0, sorted_sum(std::move(terms)));
}

/// Ranks of xs ordered by (xs, partner); ties in both are interchangeable.
inline std::vector<std::size_t> ranks_by(std::span<const double> xs,
                                         std::span<const double> partner) {
    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (xs[a] != xs[b]) {
            return xs[a] < xs[b];
        }
        return !partner.empty() && partner[a] < partner[b];
    });
    std::vector<std::size_t> rank(xs.size());
    for (std::size_t r = 0; r < order.size(); ++r) {
        rank[order[r]] = r;
    }
    return rank;
}

enum JitterRole : std::uint64_t { first_role = 0x6a09e667, second_role = 0xbb67ae85 };

/// Standardized and jittered copy of a continuous column.
inline std::vector<double> prepare_continuous(std::span<const double> xs, double sd,
                                              std::span<const double> partner,
                                              std::uint64_t seed, JitterRole role,
                                              double jitter_scale) {
    const auto rank = ranks_by(xs, partner);
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        out[i] = xs[i] / sd + jitter_scale * jitter_unit(seed, role, rank[i]);
    }
    return out;
}

inline double mean_digamma(const std::vector<std::size_t>& counts) {
    std::vector<double> terms(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        terms[i] = digamma(counts[i]);
    }
    return sorted_mean(std::move(terms));
}

inline double ksg_mutual_info(std::span<const double> x, std::span<const double> y,
                              const EstimatorConfig& cfg) {
    const std::size_t n = x.size();
    const double sx = canonical_std(x);
    const double sy = canonical_std(y);
    if (sx == 0.0 || sy == 0.0) {
        return 0.0;
    }
    const std::uint64_t seed = resolve_seed(cfg);
    const auto px = prepare_continuous(x, sx, y, seed, first_role, cfg.jitter_scale);
    const auto py = prepare_continuous(y, sy, x, seed, second_role, cfg.jitter_scale);

    std::vector<Point2> pts(n);
    for (std::size_t i = 0; i < n; ++i) {
        pts[i] = {px[i], py[i]};
    }
    std::sort(pts.begin(), pts.end());

    std::vector<double> xs(n);
    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = pts[i].x;
        ys[i] = pts[i].y;
    }
    std::vector<std::size_t> ypos(n);
    {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return ys[a] != ys[b] ? ys[a] < ys[b] : a < b;
        });
        for (std::size_t r = 0; r < n; ++r) {
            ypos[order[r]] = r;
        }
    }
    std::vector<double> ys_sorted(ys);
    std::sort(ys_sorted.begin(), ys_sorted.end());

    std::vector<std::size_t> nx(n);
    std::vector<std::size_t> ny(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double eps = kth_neighbor_distance(std::span<const Point2>(pts), i, cfg.k_neighbors);
        nx[i] = count_within(xs, i, eps);
        ny[i] = count_within(ys_sorted, ypos[i], eps);
    }
    const double mi = digamma(n) + digamma(cfg.k_neighbors) - mean_digamma(nx) - mean_digamma(ny);
    return std::max(0.0, mi);
}

inline double mixed_mutual_info(std::span<const double> labels, std::span<const double> y,
                                const EstimatorConfig& cfg) {
    const std::size_t n = y.size();
    const double sy = canonical_std(y);
    if (sy == 0.0) {
        return 0.0;
    }
    const std::uint64_t seed = resolve_seed(cfg);
    const auto py = prepare_continuous(y, sy, labels, seed, second_role, cfg.jitter_scale);
    const Coded coded = encode(labels);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return py[a] != py[b] ? py[a] < py[b] : coded.codes[a] < coded.codes[b];
    });
    std::vector<double> all(n);
    std::vector<std::vector<double>> by_label(coded.counts.size());
    std::vector<std::size_t> pos_in_label(n);
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t i = order[r];
        all[r] = py[i];
        auto& group = by_label[coded.codes[i]];
        pos_in_label[r] = group.size();
        group.push_back(py[i]);
    }

    std::vector<std::size_t> k_used;
    std::vector<std::size_t> label_counts;
    std::vector<std::size_t> m_counts;
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t code = coded.codes[order[r]];
        const std::size_t count = coded.counts[code];
        if (count < 2) {
            continue;
        }
        const std::size_t k = std::min(cfg.k_neighbors, count - 1);
        const double radius = kth_neighbor_distance(std::span<const double>(by_label[code]),
                                                    pos_in_label[r], k);
        k_used.push_back(k);
        label_counts.push_back(count);
        m_counts.push_back(count_within(all, r, radius));
    }
    if (k_used.empty()) {
        return 0.0;
    }
    const double mi = digamma(k_used.size()) + mean_digamma(k_used) -
                      mean_digamma(label_counts) - mean_digamma(m_counts);
    return std::max(0.0, mi);
}

inline double kl_entropy(std::span<const double> x, const EstimatorConfig& cfg) {
    const std::size_t n = x.size();
    const double sd = canonical_std(x);
    if (sd == 0.0) {
        return -INFINITY;
    }
    const std::uint64_t seed = resolve_seed(cfg);
    auto v = prepare_continuous(x, sd, {}, seed, first_role, cfg.jitter_scale);
    std::sort(v.begin(), v.end());
    std::vector<double> logs(n);
    for (std::size_t i = 0; i < n; ++i) {
        logs[i] = std::log(kth_neighbor_distance(std::span<const double>(v), i, cfg.k_neighbors));
    }
    return digamma(n) - digamma(cfg.k_neighbors) + std::numbers::ln2 + sorted_mean(std::move(logs)) +
           std::log(sd);
}

inline void check_column(std::span<const double> x, Kind kind, const char* what) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i])) {
            throw ValidationError(std::string(what) + "[" + std::to_string(i) + "] is not finite");
        }
        if (kind == Kind::discrete && x[i] != std::floor(x[i])) {
            throw ValidationError(std::string(what) + "[" + std::to_string(i) +
                                  "] is not an integer but the column is discrete");
        }
    }
}

inline void check_pair(std::span<const double> x, Kind x_kind, std::span<const double> y,
                       Kind y_kind, const EstimatorConfig& cfg) {
    cfg.validate();
    if (x.size() != y.size()) {
        throw ValidationError("length mismatch: " + std::to_string(x.size()) + " vs " +
                              std::to_string(y.size()));
    }
    if (x.size() < 2) {
        throw ValidationError("at least 2 samples are required");
    }
    check_column(x, x_kind, "x");
    check_column(y, y_kind, "y");
    const bool any_continuous = x_kind == Kind::continuous || y_kind == Kind::continuous;
    if (any_continuous && cfg.k_neighbors >= x.size()) {
        throw ValidationError("k_neighbors (" + std::to_string(cfg.k_neighbors) +
                              ") must be smaller than the sample count (" +
                              std::to_string(x.size()) + ")");
    }
}

/// Orders the pair so that (x, y) and (y, x) present identical inputs to the
/// continuous estimator.
inline bool should_swap(std::span<const double> x, std::span<const double> y) {
    std::vector<std::pair<double, double>> forward(x.size());
    std::vector<std::pair<double, double>> backward(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        forward[i] = {x[i], y[i]};
        backward[i] = {y[i], x[i]};
    }
    std::sort(forward.begin(), forward.end());
    std::sort(backward.begin(), backward.end());
    return backward < forward;
}

}  // namespace detail

/// Mutual information I(x; y) in nats, clamped at zero.
inline double mutual_info(std::span<const double> x, Kind x_kind, std::span<const double> y,
                          Kind y_kind, const EstimatorConfig& cfg = {}) {
    detail::check_pair(x, x_kind, y, y_kind, cfg);
    if (x_kind == Kind::discrete && y_kind == Kind::discrete) {
        return detail::plugin_mutual_info(detail::encode(x), detail::encode(y));
    }
    if (x_kind == Kind::continuous && y_kind == Kind::continuous) {
        if (detail::should_swap(x, y)) {
            return detail::ksg_mutual_info(y, x, cfg);
        }
        return detail::ksg_mutual_info(x, y, cfg);
    }
    if (x_kind == Kind::discrete) {
        return detail::mixed_mutual_info(x, y, cfg);
    }
    return detail::mixed_mutual_info(y, x, cfg);
}

/// Shannon entropy (discrete) or differential entropy (continuous) in nats.
/// A constant continuous column has entropy -infinity.
inline double entropy(std::span<const double> x, Kind kind, const EstimatorConfig& cfg = {}) {
    cfg.validate();
    if (x.size() < 2) {
        throw ValidationError("at least 2 samples are required");
    }
    detail::check_column(x, kind, "x");
    if (kind == Kind::discrete) {
        return detail::plugin_entropy(detail::encode(x));
    }
    if (cfg.k_neighbors >= x.size()) {
        throw ValidationError("k_neighbors (" + std::to_string(cfg.k_neighbors) +
                              ") must be smaller than the sample count (" +
                              std::to_string(x.size()) + ")");
    }
    return detail::kl_entropy(x, cfg);
}

/// H(a | b) in nats.
inline double conditional_entropy(std::span<const double> a, Kind a_kind,
                                  std::span<const double> b, Kind b_kind,
                                  const EstimatorConfig& cfg = {}) {
    detail::check_pair(a, a_kind, b, b_kind, cfg);
    if (a_kind == Kind::discrete && b_kind == Kind::discrete) {
        return detail::plugin_conditional_entropy(detail::encode(a), detail::encode(b));
    }
    return entropy(a, a_kind, cfg) - mutual_info(a, a_kind, b, b_kind, cfg);
}

/// A x D matrix with entry (i, d) = I(a_i; z_d).
inline Matrix mi_matrix(const LatentBatch& z, const AttributeBatch& a,
                        const EstimatorConfig& cfg = {}) {
    if (z.samples() != a.samples()) {
        throw ValidationError("latents have " + std::to_string(z.samples()) +
                              " rows but attributes have " + std::to_string(a.samples()));
    }
    Matrix out(a.count(), z.dims());
    for (std::size_t i = 0; i < a.count(); ++i) {
        const auto ai = a.values().column(i);
        for (std::size_t d = 0; d < z.dims(); ++d) {
            const auto zd = z.values().column(d);
            out(i, d) = mutual_info(ai, a.kinds()[i], zd, z.kinds()[d], cfg);
        }
    }
    return out;
}

}  // namespace latentscope
