#pragma once

// How well a single latent dimension predicts an attribute, on the full
// batch:
//   continuous attribute  R^2 of the least-squares line a ~ z
//   discrete attribute    balanced accuracy of the best single-threshold
//                         classifier, one-vs-rest and macro-averaged over
//                         classes

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "latentscope/core.hpp"
#include "latentscope/estimators.hpp"
#include "latentscope/numeric.hpp"

namespace latentscope {

namespace detail {

inline double r_squared(std::span<const double> z, std::span<const double> a) {
    const std::size_t n = z.size();
    std::vector<std::pair<double, double>> pairs(n);
    for (std::size_t i = 0; i < n; ++i) {
        pairs[i] = {z[i], a[i]};
    }
    std::sort(pairs.begin(), pairs.end());
    std::vector<double> zs(n);
    std::vector<double> as(n);
    for (std::size_t i = 0; i < n; ++i) {
        zs[i] = pairs[i].first;
        as[i] = pairs[i].second;
    }
    const double nz = static_cast<double>(n);
    const double mz = pairwise_sum(zs) / nz;
    const double ma = pairwise_sum(as) / nz;
    std::vector<double> zz(n);
    std::vector<double> aa(n);
    std::vector<double> za(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double dz = zs[i] - mz;
        const double da = as[i] - ma;
        zz[i] = dz * dz;
        aa[i] = da * da;
        za[i] = dz * da;
    }
    const double szz = pairwise_sum(zz);
    const double saa = pairwise_sum(aa);
    const double sza = pairwise_sum(za);
    if (szz == 0.0 || saa == 0.0) {
        return 0.0;
    }
    return std::clamp(sza / szz * (sza / saa), 0.0, 1.0);
}

/// Best balanced accuracy of "class c iff z is on one side of t".
inline double best_threshold_accuracy(const std::vector<std::pair<double, std::size_t>>& sorted,
                                      std::size_t cls, std::size_t positives) {
    const std::size_t n = sorted.size();
    const auto p = static_cast<double>(positives);
    const auto q = static_cast<double>(n - positives);
    std::size_t pos_left = 0;
    std::size_t neg_left = 0;
    double best = 0.5;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && sorted[j].first == sorted[i].first) {
            (sorted[j].second == cls ? pos_left : neg_left) += 1;
            ++j;
        }
        if (j < n) {
            // Predict "positive" to the right of the threshold.
            const double ba = 0.5 * ((p - static_cast<double>(pos_left)) / p +
                                     static_cast<double>(neg_left) / q);
            best = std::max({best, ba, 1.0 - ba});
        }
        i = j;
    }
    return best;
}

inline double balanced_threshold_accuracy(std::span<const double> z, std::span<const double> a) {
    const Coded coded = encode(a);
    std::vector<std::pair<double, std::size_t>> sorted(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        sorted[i] = {z[i], coded.codes[i]};
    }
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> per_class(coded.counts.size());
    for (std::size_t c = 0; c < coded.counts.size(); ++c) {
        per_class[c] = best_threshold_accuracy(sorted, c, coded.counts[c]);
    }
    return pairwise_sum(per_class) / static_cast<double>(per_class.size());
}

}  // namespace detail

/// Score in [0, 1]. A constant latent column scores 0 for continuous
/// attributes; a constant attribute is an error.
inline double predictability_score(std::span<const double> z_col, std::span<const double> a,
                                   Kind a_kind, const EstimatorConfig& cfg = {}) {
    cfg.validate();
    if (z_col.size() != a.size()) {
        throw ValidationError("length mismatch: " + std::to_string(z_col.size()) + " vs " +
                              std::to_string(a.size()));
    }
    if (a.size() < 4) {
        throw ValidationError("predictability needs at least 4 samples");
    }
    detail::check_column(z_col, Kind::continuous, "z");
    detail::check_column(a, a_kind, "a");
    if (std::all_of(a.begin(), a.end(), [&](double v) { return v == a[0]; })) {
        throw ValidationError("attribute is constant; predictability is undefined");
    }
    if (a_kind == Kind::continuous) {
        return detail::r_squared(z_col, a);
    }
    return detail::balanced_threshold_accuracy(z_col, a);
}

}  // namespace latentscope
