#pragma once

// Disentanglement metrics: MIG, SAP, Modularity, DMIG, XMIG and DLIG.
//
// Every argmax breaks ties toward the lowest index. Normalizations whose
// denominator is at or below `denominator_floor` yield a per-target error
// entry instead of a value.

#include <cstddef>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "latentscope/core.hpp"
#include "latentscope/estimators.hpp"
#include "latentscope/predictability.hpp"
#include "latentscope/result.hpp"

namespace latentscope {

/// Information quantities shared by the MI-based metrics, computed once per
/// batch.
struct InformationTable {
    Matrix mi;                        ///< A x D, I(a_i; z_d)
    std::vector<double> entropy;      ///< H(a_i)
    std::optional<Matrix> conditional;  ///< A x A, H(a_i | a_l); only when requested

    std::size_t attributes() const noexcept { return mi.rows(); }
    std::size_t dims() const noexcept { return mi.cols(); }
};

namespace detail {

inline void require_matched(const LatentBatch& z, const AttributeBatch& a) {
    if (z.samples() != a.samples()) {
        throw ValidationError("latents have " + std::to_string(z.samples()) +
                              " rows but attributes have " + std::to_string(a.samples()));
    }
}

inline void require_reg(const RegularizationMap& reg, std::size_t attributes, std::size_t dims) {
    if (reg.attributes() != attributes) {
        throw ValidationError("regularization map covers " + std::to_string(reg.attributes()) +
                              " attributes but there are " + std::to_string(attributes));
    }
    if (reg.latent_dims() != dims) {
        throw ValidationError("regularization map expects " + std::to_string(reg.latent_dims()) +
                              " latent dimensions but there are " + std::to_string(dims));
    }
}

struct TopTwo {
    std::size_t best;
    std::optional<std::size_t> runner_up;
};

/// Scores closer than this count as tied. Equal information reached through
/// different contingency tables can differ in the last bits.
inline constexpr double tie_tolerance = 1e-12;

/// Top two of values[c] over `candidates` (ascending), lowest index on ties.
inline TopTwo top_two(const std::vector<double>& values, const std::vector<std::size_t>& candidates) {
    TopTwo out{candidates.front(), std::nullopt};
    for (std::size_t c : candidates) {
        if (values[c] > values[out.best] + tie_tolerance) {
            out.best = c;
        }
    }
    for (std::size_t c : candidates) {
        if (c != out.best &&
            (!out.runner_up || values[c] > values[*out.runner_up] + tie_tolerance)) {
            out.runner_up = c;
        }
    }
    return out;
}

inline std::vector<std::size_t> all_indices(std::size_t n) {
    std::vector<std::size_t> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = i;
    }
    return out;
}

inline std::vector<double> row_of(const Matrix& m, std::size_t r) {
    auto row = m.row(r);
    return {row.begin(), row.end()};
}

inline TargetValue normalized_gap(double gap, double denominator, const std::string& what) {
    if (!(denominator > denominator_floor)) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3g", denominator);
        return TargetValue::failed(what + " = " + buf + " nats is at or below the normalization floor");
    }
    return TargetValue::ok(gap / denominator);
}

inline MetricResult attribute_result(std::string id, std::size_t attributes) {
    MetricResult r;
    r.metric_id = std::move(id);
    r.target_kind = TargetKind::attribute;
    r.targets = all_indices(attributes);
    return r;
}

}  // namespace detail

inline InformationTable information_table(const LatentBatch& z, const AttributeBatch& a,
                                          const EstimatorConfig& cfg, bool with_conditional) {
    detail::require_matched(z, a);
    InformationTable t;
    t.mi = mi_matrix(z, a, cfg);
    t.entropy.resize(a.count());
    for (std::size_t i = 0; i < a.count(); ++i) {
        t.entropy[i] = entropy(a.values().column(i), a.kinds()[i], cfg);
    }
    if (with_conditional) {
        Matrix cond(a.count(), a.count());
        for (std::size_t i = 0; i < a.count(); ++i) {
            const auto ai = a.values().column(i);
            for (std::size_t l = 0; l < a.count(); ++l) {
                cond(i, l) = i == l ? 0.0
                                    : conditional_entropy(ai, a.kinds()[i], a.values().column(l),
                                                          a.kinds()[l], cfg);
            }
        }
        t.conditional = std::move(cond);
    }
    return t;
}

/// MIG from a precomputed table.
inline MetricResult mig(const InformationTable& t) {
    if (t.dims() < 2) {
        throw ValidationError("MIG needs at least 2 latent dimensions");
    }
    auto r = detail::attribute_result("mig", t.attributes());
    const auto dims = detail::all_indices(t.dims());
    for (std::size_t i = 0; i < t.attributes(); ++i) {
        const auto row = detail::row_of(t.mi, i);
        const auto top = detail::top_two(row, dims);
        r.values.push_back(detail::normalized_gap(row[top.best] - row[*top.runner_up],
                                                  t.entropy[i], "H(a)"));
    }
    finalize(r);
    return r;
}

/// Modularity from a precomputed table. A dimension carrying no
/// information about any attribute scores 1.0 with a warning.
inline MetricResult modularity(const InformationTable& t) {
    const std::size_t attrs = t.attributes();
    if (attrs < 2) {
        throw ValidationError("Modularity needs at least 2 attributes");
    }
    MetricResult r;
    r.metric_id = "modularity";
    r.target_kind = TargetKind::latent;
    r.targets = detail::all_indices(t.dims());
    const auto attr_idx = detail::all_indices(attrs);
    for (std::size_t d = 0; d < t.dims(); ++d) {
        const auto col = t.mi.column(d);
        const std::size_t j = detail::top_two(col, attr_idx).best;
        if (col[j] == 0.0) {
            r.values.push_back(
                TargetValue::ok(1.0, "latent dimension carries no information about any attribute"));
            continue;
        }
        std::vector<double> ratios;
        for (std::size_t i = 0; i < attrs; ++i) {
            if (i != j) {
                const double q = col[i] / col[j];
                ratios.push_back(q * q);
            }
        }
        r.values.push_back(TargetValue::ok(
            1.0 - detail::pairwise_sum(ratios) / static_cast<double>(attrs - 1)));
    }
    finalize(r);
    return r;
}

/// DMIG from a table built with conditional entropies.
inline MetricResult dmig(const InformationTable& t, const RegularizationMap& reg) {
    if (t.dims() < 2) {
        throw ValidationError("DMIG needs at least 2 latent dimensions");
    }
    if (!t.conditional) {
        throw ValidationError("DMIG needs conditional entropies in the information table");
    }
    detail::require_reg(reg, t.attributes(), t.dims());
    auto r = detail::attribute_result("dmig", t.attributes());
    const auto dims = detail::all_indices(t.dims());
    for (std::size_t i = 0; i < t.attributes(); ++i) {
        const auto row = detail::row_of(t.mi, i);
        const auto top = detail::top_two(row, dims);
        const std::size_t k = *top.runner_up;
        const double gap = row[top.best] - row[k];
        if (auto l = reg.attribute_for(k)) {
            r.values.push_back(detail::normalized_gap(gap, (*t.conditional)(i, *l), "H(a_i|a_l)"));
        } else {
            r.values.push_back(detail::normalized_gap(gap, t.entropy[i], "H(a)"));
        }
    }
    finalize(r);
    return r;
}

/// XMIG: the subtrahend is the best blind dimension other than the global
/// argmax.
inline MetricResult xmig(const InformationTable& t, const RegularizationMap& reg) {
    detail::require_reg(reg, t.attributes(), t.dims());
    const auto blind = reg.blind_dims();
    if (blind.empty()) {
        throw ValidationError("XMIG is undefined without unregularized latent dimensions");
    }
    auto r = detail::attribute_result("xmig", t.attributes());
    const auto dims = detail::all_indices(t.dims());
    for (std::size_t i = 0; i < t.attributes(); ++i) {
        const auto row = detail::row_of(t.mi, i);
        const std::size_t j = detail::top_two(row, dims).best;
        std::vector<std::size_t> others;
        for (std::size_t d : blind) {
            if (d != j) {
                others.push_back(d);
            }
        }
        if (others.empty()) {
            r.values.push_back(TargetValue::failed(
                "no unregularized latent dimension other than the most informative one"));
            continue;
        }
        const std::size_t k = detail::top_two(row, others).best;
        r.values.push_back(detail::normalized_gap(row[j] - row[k], t.entropy[i], "H(a)"));
    }
    finalize(r);
    return r;
}

/// DLIG over the regularized latent dimensions, in attribute order.
inline MetricResult dlig(const InformationTable& t, const RegularizationMap& reg) {
    if (t.attributes() < 2) {
        throw ValidationError("DLIG needs at least 2 attributes");
    }
    if (!t.conditional) {
        throw ValidationError("DLIG needs conditional entropies in the information table");
    }
    detail::require_reg(reg, t.attributes(), t.dims());
    MetricResult r;
    r.metric_id = "dlig";
    r.target_kind = TargetKind::latent;
    r.targets = reg.reg_dim();
    const auto attr_idx = detail::all_indices(t.attributes());
    for (std::size_t d : reg.reg_dim()) {
        const auto col = t.mi.column(d);
        const auto top = detail::top_two(col, attr_idx);
        const std::size_t k = *top.runner_up;
        r.values.push_back(detail::normalized_gap(col[top.best] - col[k],
                                                  (*t.conditional)(top.best, k), "H(a_j|a_k)"));
    }
    finalize(r);
    return r;
}

inline MetricResult mig(const LatentBatch& z, const AttributeBatch& a,
                        const EstimatorConfig& cfg = {}) {
    return mig(information_table(z, a, cfg, false));
}

inline MetricResult modularity(const LatentBatch& z, const AttributeBatch& a,
                               const EstimatorConfig& cfg = {}) {
    return modularity(information_table(z, a, cfg, false));
}

inline MetricResult dmig(const LatentBatch& z, const AttributeBatch& a,
                         const RegularizationMap& reg, const EstimatorConfig& cfg = {}) {
    detail::require_reg(reg, a.count(), z.dims());
    return dmig(information_table(z, a, cfg, true), reg);
}

inline MetricResult xmig(const LatentBatch& z, const AttributeBatch& a,
                         const RegularizationMap& reg, const EstimatorConfig& cfg = {}) {
    detail::require_reg(reg, a.count(), z.dims());
    if (reg.blind_dims().empty()) {
        throw ValidationError("XMIG is undefined without unregularized latent dimensions");
    }
    return xmig(information_table(z, a, cfg, false), reg);
}

inline MetricResult dlig(const LatentBatch& z, const AttributeBatch& a,
                         const RegularizationMap& reg, const EstimatorConfig& cfg = {}) {
    detail::require_reg(reg, a.count(), z.dims());
    return dlig(information_table(z, a, cfg, true), reg);
}

/// SAP: gap between the two best per-dimension predictability scores.
inline MetricResult sap(const LatentBatch& z, const AttributeBatch& a,
                        const EstimatorConfig& cfg = {}) {
    detail::require_matched(z, a);
    if (z.dims() < 2) {
        throw ValidationError("SAP needs at least 2 latent dimensions");
    }
    if (z.samples() < 4) {
        throw ValidationError("SAP needs at least 4 samples");
    }
    auto r = detail::attribute_result("sap", a.count());
    const auto dims = detail::all_indices(z.dims());
    for (std::size_t i = 0; i < a.count(); ++i) {
        const auto ai = a.values().column(i);
        std::vector<double> scores(z.dims());
        try {
            for (std::size_t d = 0; d < z.dims(); ++d) {
                scores[d] = predictability_score(z.values().column(d), ai, a.kinds()[i], cfg);
            }
        } catch (const ValidationError& e) {
            r.values.push_back(TargetValue::failed(e.what()));
            continue;
        }
        const auto top = detail::top_two(scores, dims);
        r.values.push_back(TargetValue::ok(scores[top.best] - scores[*top.runner_up]));
    }
    finalize(r);
    return r;
}

}  // namespace latentscope
