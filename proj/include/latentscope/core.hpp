#pragma once

// Core value types shared by every latentscope module: dense matrices,
// column kinds, sample batches, the regularization map and estimator
// configuration.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace latentscope {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid input: shapes, kinds, degenerate data, bad options.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// The filesystem refused a read or write.
class IoError : public Error {
public:
    using Error::Error;
};

enum class Kind { discrete, continuous };

inline const char* to_string(Kind kind) {
    return kind == Kind::discrete ? "discrete" : "continuous";
}

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != rows_ * cols_) {
            throw ValidationError("matrix data size " + std::to_string(data_.size()) +
                                  " does not match shape " + std::to_string(rows_) + "x" +
                                  std::to_string(cols_));
        }
    }

    /// Builds a matrix from a list of equally long rows.
    static Matrix from_rows(const std::vector<std::vector<double>>& rows) {
        if (rows.empty()) {
            return {};
        }
        Matrix m(rows.size(), rows.front().size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != m.cols_) {
                throw ValidationError("ragged row " + std::to_string(r));
            }
            std::copy(rows[r].begin(), rows[r].end(), m.data_.begin() + r * m.cols_);
        }
        return m;
    }

    /// Builds a matrix whose columns are the given vectors.
    static Matrix from_columns(const std::vector<std::vector<double>>& cols) {
        if (cols.empty()) {
            return {};
        }
        Matrix m(cols.front().size(), cols.size());
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (cols[c].size() != m.rows_) {
                throw ValidationError("ragged column " + std::to_string(c));
            }
            for (std::size_t r = 0; r < m.rows_; ++r) {
                m(r, c) = cols[c][r];
            }
        }
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<const double> row(std::size_t r) const {
        return {data_.data() + r * cols_, cols_};
    }
    std::vector<double> column(std::size_t c) const {
        std::vector<double> out(rows_);
        for (std::size_t r = 0; r < rows_; ++r) {
            out[r] = (*this)(r, c);
        }
        return out;
    }

    const std::vector<double>& data() const noexcept { return data_; }

    /// Appends the rows of `other`; column counts must agree.
    void append_rows(const Matrix& other) {
        if (other.rows_ == 0) {
            return;
        }
        if (rows_ != 0 && other.cols_ != cols_) {
            throw ValidationError("cannot append rows with " + std::to_string(other.cols_) +
                                  " columns to a matrix with " + std::to_string(cols_));
        }
        cols_ = other.cols_;
        rows_ += other.rows_;
        data_.insert(data_.end(), other.data_.begin(), other.data_.end());
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

namespace detail {

inline bool is_integral(double v) { return std::isfinite(v) && v == std::floor(v); }

inline void require_finite(const Matrix& m, const char* what) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (!std::isfinite(m(r, c))) {
                throw ValidationError(std::string(what) + " entry (" + std::to_string(r) + ", " +
                                      std::to_string(c) + ") is not finite");
            }
        }
    }
}

inline void require_discrete_column(const Matrix& m, std::size_t c, const char* what) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
        if (!is_integral(m(r, c))) {
            throw ValidationError(std::string(what) + " column " + std::to_string(c) +
                                  " is discrete but row " + std::to_string(r) +
                                  " is not an integer");
        }
    }
}

inline std::vector<Kind> expand_kinds(std::vector<Kind> kinds, std::size_t cols, Kind fallback,
                                      const char* what) {
    if (kinds.empty()) {
        return std::vector<Kind>(cols, fallback);
    }
    if (kinds.size() == 1 && cols > 1) {
        return std::vector<Kind>(cols, kinds.front());
    }
    if (kinds.size() != cols) {
        throw ValidationError(std::string(what) + ": " + std::to_string(kinds.size()) +
                              " kind flags for " + std::to_string(cols) + " columns");
    }
    return kinds;
}

}  // namespace detail

/// N x D latent codes. Latent columns are continuous unless stated otherwise;
/// discrete latents are accepted so that quantized codes can use the
/// plug-in estimators.
class LatentBatch {
public:
    LatentBatch() = default;
    explicit LatentBatch(Matrix values, std::vector<Kind> kinds = {})
        : values_(std::move(values)),
          kinds_(detail::expand_kinds(std::move(kinds), values_.cols(), Kind::continuous,
                                      "latents")) {
        if (values_.cols() == 0) {
            throw ValidationError("latents must have at least one dimension");
        }
        detail::require_finite(values_, "latents");
        for (std::size_t c = 0; c < kinds_.size(); ++c) {
            if (kinds_[c] == Kind::discrete) {
                detail::require_discrete_column(values_, c, "latents");
            }
        }
    }

    const Matrix& values() const noexcept { return values_; }
    const std::vector<Kind>& kinds() const noexcept { return kinds_; }
    std::size_t samples() const noexcept { return values_.rows(); }
    std::size_t dims() const noexcept { return values_.cols(); }

private:
    Matrix values_;
    std::vector<Kind> kinds_;
};

/// N x A semantic attribute values with one kind flag per attribute.
class AttributeBatch {
public:
    AttributeBatch() = default;
    AttributeBatch(Matrix values, std::vector<Kind> kinds)
        : values_(std::move(values)),
          kinds_(detail::expand_kinds(std::move(kinds), values_.cols(), Kind::continuous,
                                      "attributes")) {
        if (values_.cols() == 0) {
            throw ValidationError("attributes must have at least one column");
        }
        detail::require_finite(values_, "attributes");
        for (std::size_t c = 0; c < kinds_.size(); ++c) {
            if (kinds_[c] == Kind::discrete) {
                detail::require_discrete_column(values_, c, "attributes");
            }
        }
    }

    const Matrix& values() const noexcept { return values_; }
    const std::vector<Kind>& kinds() const noexcept { return kinds_; }
    std::size_t samples() const noexcept { return values_.rows(); }
    std::size_t count() const noexcept { return values_.cols(); }

private:
    Matrix values_;
    std::vector<Kind> kinds_;
};

/// Attribute i is regularized by latent dimension reg_dim[i]. Dimensions
/// that regularize nothing are "blind".
class RegularizationMap {
public:
    RegularizationMap(std::vector<std::size_t> reg_dim, std::size_t latent_dims)
        : reg_dim_(std::move(reg_dim)), latent_dims_(latent_dims) {
        for (std::size_t i = 0; i < reg_dim_.size(); ++i) {
            if (reg_dim_[i] >= latent_dims_) {
                throw ValidationError("reg_dim[" + std::to_string(i) + "] = " +
                                      std::to_string(reg_dim_[i]) + " is out of range for " +
                                      std::to_string(latent_dims_) + " latent dimensions");
            }
            for (std::size_t j = 0; j < i; ++j) {
                if (reg_dim_[j] == reg_dim_[i]) {
                    throw ValidationError("latent dimension " + std::to_string(reg_dim_[i]) +
                                          " regularizes more than one attribute");
                }
            }
        }
    }

    /// Attribute i regularized by dimension i.
    static RegularizationMap identity(std::size_t attributes, std::size_t latent_dims) {
        if (attributes > latent_dims) {
            throw ValidationError("default regularization map needs at least as many latent "
                                  "dimensions as attributes");
        }
        std::vector<std::size_t> reg(attributes);
        for (std::size_t i = 0; i < attributes; ++i) {
            reg[i] = i;
        }
        return {std::move(reg), latent_dims};
    }

    const std::vector<std::size_t>& reg_dim() const noexcept { return reg_dim_; }
    std::size_t latent_dims() const noexcept { return latent_dims_; }
    std::size_t attributes() const noexcept { return reg_dim_.size(); }

    std::optional<std::size_t> attribute_for(std::size_t dim) const {
        auto it = std::find(reg_dim_.begin(), reg_dim_.end(), dim);
        if (it == reg_dim_.end()) {
            return std::nullopt;
        }
        return static_cast<std::size_t>(it - reg_dim_.begin());
    }

    bool is_regularized(std::size_t dim) const { return attribute_for(dim).has_value(); }

    std::vector<std::size_t> blind_dims() const {
        std::vector<std::size_t> out;
        for (std::size_t d = 0; d < latent_dims_; ++d) {
            if (!is_regularized(d)) {
                out.push_back(d);
            }
        }
        return out;
    }

    friend bool operator==(const RegularizationMap&, const RegularizationMap&) = default;

private:
    std::vector<std::size_t> reg_dim_;
    std::size_t latent_dims_ = 0;
};

/// Settings shared by all estimators. Results are in nats.
struct EstimatorConfig {
    /// Absent means a fresh nondeterministic seed per estimate.
    std::optional<std::uint64_t> seed = 42;
    std::size_t k_neighbors = 3;
    /// Relative amplitude of the tie-breaking jitter on continuous columns.
    double jitter_scale = 1e-10;

    void validate() const {
        if (k_neighbors == 0) {
            throw ValidationError("k_neighbors must be positive");
        }
        if (!(jitter_scale >= 0.0) || !std::isfinite(jitter_scale)) {
            throw ValidationError("jitter_scale must be a finite nonnegative number");
        }
    }

    friend bool operator==(const EstimatorConfig&, const EstimatorConfig&) = default;
};

/// Normalization denominators at or below this many nats are undefined.
inline constexpr double denominator_floor = 1e-9;

}  // namespace latentscope
