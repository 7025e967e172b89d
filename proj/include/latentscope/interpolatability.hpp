#pragma once

// Latent-induced attribute differences (LIAD) and the Smoothness and
// Monotonicity metrics computed from attribute measurements taken along
// equally spaced latent interpolation grids. Acquiring the measurements is
// the caller's job.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "latentscope/core.hpp"
#include "latentscope/numeric.hpp"

namespace latentscope {

/// Dense samples x attributes x points tensor, last index fastest.
class Tensor3 {
public:
    Tensor3() = default;
    Tensor3(std::size_t samples, std::size_t attributes, std::size_t points, double fill = 0.0)
        : samples_(samples), attributes_(attributes), points_(points),
          data_(samples * attributes * points, fill) {}
    Tensor3(std::size_t samples, std::size_t attributes, std::size_t points,
            std::vector<double> data)
        : samples_(samples), attributes_(attributes), points_(points), data_(std::move(data)) {
        if (data_.size() != samples_ * attributes_ * points_) {
            throw ValidationError("tensor data size does not match its shape");
        }
    }

    std::size_t samples() const noexcept { return samples_; }
    std::size_t attributes() const noexcept { return attributes_; }
    std::size_t points() const noexcept { return points_; }

    double& operator()(std::size_t s, std::size_t i, std::size_t k) {
        return data_[(s * attributes_ + i) * points_ + k];
    }
    double operator()(std::size_t s, std::size_t i, std::size_t k) const {
        return data_[(s * attributes_ + i) * points_ + k];
    }

    /// The K measurements of attribute i for sample s.
    std::span<const double> series(std::size_t s, std::size_t i) const {
        return {data_.data() + (s * attributes_ + i) * points_, points_};
    }

    const std::vector<double>& data() const noexcept { return data_; }

    /// Appends the samples of `other`; attribute and point counts must agree.
    void append_samples(const Tensor3& other) {
        if (samples_ != 0 && (other.attributes_ != attributes_ || other.points_ != points_)) {
            throw ValidationError("trace slab shape mismatch: expected " +
                                  std::to_string(attributes_) + " attributes x " +
                                  std::to_string(points_) + " points, got " +
                                  std::to_string(other.attributes_) + " x " +
                                  std::to_string(other.points_));
        }
        attributes_ = other.attributes_;
        points_ = other.points_;
        samples_ += other.samples_;
        data_.insert(data_.end(), other.data_.begin(), other.data_.end());
    }

    friend bool operator==(const Tensor3&, const Tensor3&) = default;

private:
    std::size_t samples_ = 0;
    std::size_t attributes_ = 0;
    std::size_t points_ = 0;
    std::vector<double> data_;
};

/// Measurements (s, i, k) of attribute i at z_s + k * delta * e_d(i).
struct InterpolationTrace {
    Tensor3 measurements;
    double delta = 1.0;
    /// Changes with |LIAD| <= epsilon are ignored by Monotonicity.
    double epsilon = 0.0;

    void validate(std::size_t min_points) const {
        if (!(delta > 0.0) || !std::isfinite(delta)) {
            throw ValidationError("delta must be a positive finite number");
        }
        if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
            throw ValidationError("epsilon must be a finite nonnegative number");
        }
        if (measurements.points() < min_points) {
            throw ValidationError("trace has " + std::to_string(measurements.points()) +
                                  " grid points; at least " + std::to_string(min_points) +
                                  " are required");
        }
        for (double v : measurements.data()) {
            if (!std::isfinite(v)) {
                throw ValidationError("trace measurements must be finite");
            }
        }
    }
};

/// Samples x attributes matrix of possibly undefined values.
struct OptionalMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::optional<double>> data;

    std::optional<double> operator()(std::size_t r, std::size_t c) const {
        return data[r * cols + c];
    }
};

namespace detail {

inline std::vector<double> forward_difference(std::span<const double> xs, double delta) {
    std::vector<double> out(xs.size() - 1);
    for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
        out[k] = (xs[k + 1] - xs[k]) / delta;
    }
    return out;
}

}  // namespace detail

/// First- or second-order LIAD along the grid; shape S x A x (K - order).
inline Tensor3 liad(const InterpolationTrace& trace, int order) {
    if (order != 1 && order != 2) {
        throw ValidationError("LIAD order must be 1 or 2");
    }
    trace.validate(static_cast<std::size_t>(order) + 1);
    const Tensor3& m = trace.measurements;
    const std::size_t out_points = m.points() - static_cast<std::size_t>(order);
    Tensor3 out(m.samples(), m.attributes(), out_points);
    for (std::size_t s = 0; s < m.samples(); ++s) {
        for (std::size_t i = 0; i < m.attributes(); ++i) {
            auto d = detail::forward_difference(m.series(s, i), trace.delta);
            if (order == 2) {
                d = detail::forward_difference(d, trace.delta);
            }
            std::copy(d.begin(), d.end(), &out(s, i, 0));
        }
    }
    return out;
}

/// sum(x^2) / sum(x) over nonnegative inputs, 0 when the sum is 0.
inline double contraharmonic_mean(std::span<const double> xs) {
    if (xs.empty()) {
        throw ValidationError("contraharmonic mean of an empty sequence");
    }
    std::vector<double> sorted(xs.begin(), xs.end());
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() < 0.0) {
        throw ValidationError("contraharmonic mean needs nonnegative inputs");
    }
    const double sum = detail::pairwise_sum(sorted);
    if (sum == 0.0) {
        return 0.0;
    }
    std::vector<double> squares(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        squares[i] = sorted[i] * sorted[i];
    }
    return detail::pairwise_sum(squares) / sum;
}

namespace detail {

inline constexpr double flat_range_ulps = 64.0;

inline double max_abs(std::span<const double> xs) {
    double m = 0.0;
    for (double x : xs) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

inline double smoothness_of(std::span<const double> series, double delta) {
    const auto d1 = forward_difference(series, delta);
    auto d2 = forward_difference(d1, delta);
    const auto [lo, hi] = std::minmax_element(d1.begin(), d1.end());
    const double range = *hi - *lo;
    // A first-order range within rounding of the measurements counts as zero,
    // so affine responses with inexact slopes still score 1.
    if (range * delta <= flat_range_ulps * std::numeric_limits<double>::epsilon() *
                             max_abs(series)) {
        return 1.0;
    }
    for (double& v : d2) {
        v = std::abs(v);
    }
    return std::clamp(1.0 - contraharmonic_mean(d2) / (range / delta), 0.0, 1.0);
}

inline std::optional<double> monotonicity_of(std::span<const double> series, double delta,
                                             double epsilon) {
    const auto d1 = forward_difference(series, delta);
    long long signed_sum = 0;
    long long count = 0;
    for (double v : d1) {
        if (std::abs(v) > epsilon) {
            ++count;
            signed_sum += (v > 0.0) - (v < 0.0);
        }
    }
    if (count == 0) {
        return std::nullopt;
    }
    return static_cast<double>(signed_sum) / static_cast<double>(count);
}

}  // namespace detail

/// Per (sample, attribute) smoothness in [0, 1]. Needs K >= 4.
inline Matrix smoothness(const InterpolationTrace& trace) {
    trace.validate(4);
    const Tensor3& m = trace.measurements;
    Matrix out(m.samples(), m.attributes());
    for (std::size_t s = 0; s < m.samples(); ++s) {
        for (std::size_t i = 0; i < m.attributes(); ++i) {
            out(s, i) = detail::smoothness_of(m.series(s, i), trace.delta);
        }
    }
    return out;
}

/// Per (sample, attribute) monotonicity in [-1, 1]; undefined where no
/// change exceeds epsilon. Needs K >= 2.
inline OptionalMatrix monotonicity(const InterpolationTrace& trace) {
    trace.validate(2);
    const Tensor3& m = trace.measurements;
    OptionalMatrix out{m.samples(), m.attributes(), {}};
    out.data.reserve(m.samples() * m.attributes());
    for (std::size_t s = 0; s < m.samples(); ++s) {
        for (std::size_t i = 0; i < m.attributes(); ++i) {
            out.data.push_back(detail::monotonicity_of(m.series(s, i), trace.delta, trace.epsilon));
        }
    }
    return out;
}

}  // namespace latentscope
