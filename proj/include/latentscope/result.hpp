#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "latentscope/core.hpp"
#include "latentscope/numeric.hpp"

namespace latentscope {

/// One per-target metric value. A target either has a value, is undefined
/// (no value, no error), or failed with an error message.
struct TargetValue {
    std::optional<double> value;
    std::string error;
    std::string warning;

    static TargetValue ok(double v, std::string warning = {}) {
        return {v, {}, std::move(warning)};
    }
    static TargetValue failed(std::string message) { return {std::nullopt, std::move(message), {}}; }
    static TargetValue undefined() { return {}; }

    bool has_value() const noexcept { return value.has_value(); }
    bool failed() const noexcept { return !error.empty(); }

    friend bool operator==(const TargetValue&, const TargetValue&) = default;
};

enum class TargetKind { attribute, latent };

inline const char* to_string(TargetKind kind) {
    return kind == TargetKind::attribute ? "attribute" : "latent";
}

struct MetricResult {
    std::string metric_id;
    TargetKind target_kind = TargetKind::attribute;
    /// Attribute or latent index of each entry of `values`.
    std::vector<std::size_t> targets;
    std::vector<TargetValue> values;
    /// Mean over the targets that have a value; empty when none do.
    std::optional<double> aggregate;

    friend bool operator==(const MetricResult&, const MetricResult&) = default;
};

using DisentanglementResult = MetricResult;

/// Fills in `aggregate` from `values`.
inline void finalize(MetricResult& result) {
    std::vector<double> defined;
    for (const auto& v : result.values) {
        if (v.value) {
            defined.push_back(*v.value);
        }
    }
    result.aggregate =
        defined.empty() ? std::nullopt : std::optional<double>(detail::sorted_mean(std::move(defined)));
}

struct MetricReport {
    std::vector<MetricResult> metrics;

    const MetricResult& at(const std::string& metric_id) const {
        for (const auto& m : metrics) {
            if (m.metric_id == metric_id) {
                return m;
            }
        }
        throw std::out_of_range("report has no metric '" + metric_id + "'");
    }

    friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

}  // namespace latentscope
