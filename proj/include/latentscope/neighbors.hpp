#pragma once

// Exact k-nearest-neighbor queries under the Chebyshev (max-coordinate)
// metric for the one- and two-dimensional point sets used by the kNN
// estimators. Points are kept sorted along the first coordinate and the
// search sweeps outward from the query, pruning once the coordinate gap
// alone exceeds the current k-th distance.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <queue>
#include <span>
#include <vector>

namespace latentscope::detail {

struct Point2 {
    double x;
    double y;
    friend auto operator<=>(const Point2&, const Point2&) = default;
};

/// Distance from sorted[pos] to its k-th nearest other point (max-norm).
/// `sorted` must be ordered by x. Requires k < sorted.size().
inline double kth_neighbor_distance(std::span<const Point2> sorted, std::size_t pos,
                                    std::size_t k) {
    std::priority_queue<double> best;  // max-heap of the k smallest distances
    const Point2 q = sorted[pos];
    std::size_t left = pos;
    std::size_t right = pos + 1;
    bool left_open = left > 0;
    bool right_open = right < sorted.size();

    while (left_open || right_open) {
        const double dl = left_open ? q.x - sorted[left - 1].x : INFINITY;
        const double dr = right_open ? sorted[right].x - q.x : INFINITY;
        const bool take_left = dl <= dr;
        const double gap = take_left ? dl : dr;
        if (best.size() == k && gap >= best.top()) {
            break;
        }
        const Point2& p = take_left ? sorted[left - 1] : sorted[right];
        const double d = std::max(gap, std::abs(p.y - q.y));
        if (best.size() < k) {
            best.push(d);
        } else if (d < best.top()) {
            best.pop();
            best.push(d);
        }
        if (take_left) {
            --left;
            left_open = left > 0;
        } else {
            ++right;
            right_open = right < sorted.size();
        }
    }
    return best.top();
}

/// Distance from sorted[pos] to its k-th nearest other value on a line.
inline double kth_neighbor_distance(std::span<const double> sorted, std::size_t pos,
                                    std::size_t k) {
    std::size_t left = pos;
    std::size_t right = pos + 1;
    double dist = 0.0;
    for (std::size_t found = 0; found < k; ++found) {
        const double dl = left > 0 ? sorted[pos] - sorted[left - 1] : INFINITY;
        const double dr = right < sorted.size() ? sorted[right] - sorted[pos] : INFINITY;
        if (dl <= dr) {
            dist = dl;
            --left;
        } else {
            dist = dr;
            ++right;
        }
    }
    return dist;
}

/// Number of values v in `sorted` with |v - sorted[pos]| < radius,
/// counting sorted[pos] itself.
inline std::size_t count_within(std::span<const double> sorted, std::size_t pos, double radius) {
    const double c = sorted[pos];
    auto right = std::partition_point(sorted.begin() + static_cast<std::ptrdiff_t>(pos) + 1,
                                      sorted.end(), [&](double v) { return v - c < radius; });
    auto left = std::partition_point(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(pos),
                                     [&](double v) { return c - v >= radius; });
    const auto n = static_cast<std::size_t>(right - left);
    return std::max<std::size_t>(n, 1);
}

}  // namespace latentscope::detail
