#pragma once

// Streaming accumulators. An Accumulator buffers raw batches through
// update() and evaluates its member metrics on the concatenation of
// everything buffered so far when compute() is called. compute() does not
// consume the buffer, so it can be repeated and interleaved with updates.
//
// An Accumulator is single-writer; distinct accumulators are independent.

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "latentscope/core.hpp"
#include "latentscope/disentanglement.hpp"
#include "latentscope/interpolatability.hpp"
#include "latentscope/result.hpp"

namespace latentscope {

inline constexpr std::array<std::string_view, 6> disentanglement_metric_names{
    "mig", "sap", "modularity", "dmig", "xmig", "dlig"};
inline constexpr std::array<std::string_view, 2> interpolatability_metric_names{"smoothness",
                                                                                "monotonicity"};

inline bool is_disentanglement_metric(std::string_view id) {
    return std::find(disentanglement_metric_names.begin(), disentanglement_metric_names.end(), id) !=
           disentanglement_metric_names.end();
}

inline bool is_interpolatability_metric(std::string_view id) {
    return std::find(interpolatability_metric_names.begin(), interpolatability_metric_names.end(),
                     id) != interpolatability_metric_names.end();
}

inline bool needs_regularization(std::string_view id) {
    return id == "dmig" || id == "xmig" || id == "dlig";
}

/// Comma separated list of every metric name.
inline std::string all_metric_names() {
    std::string out;
    for (auto n : disentanglement_metric_names) {
        out += (out.empty() ? "" : ", ") + std::string(n);
    }
    for (auto n : interpolatability_metric_names) {
        out += ", " + std::string(n);
    }
    return out;
}

struct TraceParams {
    double delta = 1.0;
    double epsilon = 0.0;
};

struct MetricSpec {
    std::string metric_id;
    std::optional<RegularizationMap> reg;
    EstimatorConfig cfg;
    std::optional<TraceParams> trace_params;
};

/// Several metrics evaluated together from one shared (reg, cfg).
struct BundleSpec {
    std::string bundle_id;
    std::vector<std::string> members;
    std::optional<RegularizationMap> reg;
    EstimatorConfig cfg;
    std::optional<TraceParams> trace_params;

    static BundleSpec single(const MetricSpec& m) {
        return {m.metric_id, {m.metric_id}, m.reg, m.cfg, m.trace_params};
    }

    /// The dependency-aware MI bundle: MIG, DMIG, XMIG and DLIG.
    static BundleSpec dami(std::optional<RegularizationMap> reg, EstimatorConfig cfg = {}) {
        return {"dami", {"mig", "dmig", "xmig", "dlig"}, std::move(reg), cfg, std::nullopt};
    }

    /// Looks up a built-in bundle by name.
    static BundleSpec builtin(std::string_view name, std::optional<RegularizationMap> reg = {},
                              EstimatorConfig cfg = {}) {
        if (name == "dami") {
            return dami(std::move(reg), cfg);
        }
        throw ValidationError("unknown bundle '" + std::string(name) + "'; valid bundles: dami");
    }
};

class Accumulator {
public:
    static constexpr std::size_t default_max_entries = 10'000'000;

    explicit Accumulator(BundleSpec spec, std::size_t max_entries = default_max_entries)
        : spec_(std::move(spec)), max_entries_(max_entries) {
        validate_spec();
    }

    explicit Accumulator(const MetricSpec& spec, std::size_t max_entries = default_max_entries)
        : Accumulator(BundleSpec::single(spec), max_entries) {}

    const BundleSpec& spec() const noexcept { return spec_; }
    bool interpolatability() const noexcept { return interp_; }

    /// Buffered samples: latent rows, or trace samples.
    std::size_t row_count() const noexcept {
        return interp_ ? trace_.samples() : z_.rows();
    }

    void update(const LatentBatch& z, const AttributeBatch& a) {
        if (interp_) {
            throw ValidationError("bundle '" + spec_.bundle_id + "' expects interpolation traces");
        }
        detail::require_matched(z, a);
        if (z_.rows() == 0) {
            if (spec_.reg) {
                detail::require_reg(*spec_.reg, a.count(), z.dims());
            }
            z_kinds_ = z.kinds();
            a_kinds_ = a.kinds();
        } else {
            if (z.dims() != z_.cols()) {
                throw ValidationError("latent dimension mismatch: buffered " +
                                      std::to_string(z_.cols()) + ", got " +
                                      std::to_string(z.dims()));
            }
            if (a.count() != a_.cols()) {
                throw ValidationError("attribute count mismatch: buffered " +
                                      std::to_string(a_.cols()) + ", got " +
                                      std::to_string(a.count()));
            }
            if (z.kinds() != z_kinds_ || a.kinds() != a_kinds_) {
                throw ValidationError("column kinds differ from previously buffered batches");
            }
        }
        const std::size_t entries =
            (z_.rows() + z.samples()) * (z.dims() + a.count());
        if (entries > max_entries_) {
            throw ValidationError("buffer limit of " + std::to_string(max_entries_) +
                                  " entries exceeded");
        }
        z_.append_rows(z.values());
        a_.append_rows(a.values());
    }

    void update(const Tensor3& slab) {
        if (!interp_) {
            throw ValidationError("bundle '" + spec_.bundle_id + "' expects latent/attribute batches");
        }
        const std::size_t entries = (trace_.samples() + slab.samples()) * slab.attributes() * slab.points();
        if (entries > max_entries_) {
            throw ValidationError("buffer limit of " + std::to_string(max_entries_) +
                                  " entries exceeded");
        }
        InterpolationTrace check{slab, spec_.trace_params->delta, spec_.trace_params->epsilon};
        check.validate(0);
        trace_.append_samples(slab);
    }

    MetricReport compute() const {
        if (row_count() == 0) {
            throw ValidationError("nothing to compute: no batches have been buffered");
        }
        return interp_ ? compute_interpolatability() : compute_disentanglement();
    }

private:
    void validate_spec() {
        if (spec_.members.empty()) {
            throw ValidationError("bundle '" + spec_.bundle_id + "' has no members");
        }
        spec_.cfg.validate();
        std::size_t interp_count = 0;
        for (const auto& id : spec_.members) {
            if (is_interpolatability_metric(id)) {
                ++interp_count;
            } else if (!is_disentanglement_metric(id)) {
                throw ValidationError("unknown metric '" + id + "'; valid metrics: " +
                                      all_metric_names());
            }
            if (needs_regularization(id) && !spec_.reg) {
                throw ValidationError(id + " requires a regularization map");
            }
            if (id == "xmig" && spec_.reg && spec_.reg->blind_dims().empty()) {
                throw ValidationError("xmig requires at least one unregularized latent dimension");
            }
        }
        if (interp_count != 0 && interp_count != spec_.members.size()) {
            throw ValidationError("a bundle cannot mix disentanglement and interpolatability metrics");
        }
        interp_ = interp_count != 0;
        if (interp_) {
            if (!spec_.trace_params) {
                throw ValidationError("interpolatability metrics require delta and epsilon");
            }
            InterpolationTrace{{}, spec_.trace_params->delta, spec_.trace_params->epsilon}.validate(0);
        }
    }

    bool has_member(std::string_view id) const {
        return std::find(spec_.members.begin(), spec_.members.end(), id) != spec_.members.end();
    }

    MetricReport compute_disentanglement() const {
        const LatentBatch z(z_, z_kinds_);
        const AttributeBatch a(a_, a_kinds_);
        const bool with_conditional = has_member("dmig") || has_member("dlig");
        const bool with_table = with_conditional || has_member("mig") ||
                                has_member("modularity") || has_member("xmig");
        std::optional<InformationTable> table;
        if (with_table) {
            table = information_table(z, a, spec_.cfg, with_conditional);
        }
        MetricReport report;
        for (const auto& id : spec_.members) {
            if (id == "mig") {
                report.metrics.push_back(mig(*table));
            } else if (id == "modularity") {
                report.metrics.push_back(modularity(*table));
            } else if (id == "dmig") {
                report.metrics.push_back(dmig(*table, *spec_.reg));
            } else if (id == "xmig") {
                report.metrics.push_back(xmig(*table, *spec_.reg));
            } else if (id == "dlig") {
                report.metrics.push_back(dlig(*table, *spec_.reg));
            } else {
                report.metrics.push_back(sap(z, a, spec_.cfg));
            }
        }
        return report;
    }

    MetricReport compute_interpolatability() const {
        const InterpolationTrace trace{trace_, spec_.trace_params->delta,
                                       spec_.trace_params->epsilon};
        MetricReport report;
        for (const auto& id : spec_.members) {
            MetricResult r;
            r.metric_id = id;
            r.target_kind = TargetKind::attribute;
            r.targets = detail::all_indices(trace_.attributes());
            if (id == "smoothness") {
                const Matrix s = smoothness(trace);
                for (std::size_t i = 0; i < s.cols(); ++i) {
                    r.values.push_back(TargetValue::ok(detail::sorted_mean(s.column(i))));
                }
            } else {
                const OptionalMatrix m = monotonicity(trace);
                for (std::size_t i = 0; i < m.cols; ++i) {
                    std::vector<double> defined;
                    for (std::size_t s = 0; s < m.rows; ++s) {
                        if (auto v = m(s, i)) {
                            defined.push_back(*v);
                        }
                    }
                    r.values.push_back(defined.empty()
                                           ? TargetValue::undefined()
                                           : TargetValue::ok(detail::sorted_mean(std::move(defined))));
                }
            }
            finalize(r);
            report.metrics.push_back(std::move(r));
        }
        return report;
    }

    BundleSpec spec_;
    std::size_t max_entries_;
    bool interp_ = false;

    Matrix z_;
    Matrix a_;
    std::vector<Kind> z_kinds_;
    std::vector<Kind> a_kinds_;
    Tensor3 trace_;
};

inline Accumulator create(const MetricSpec& spec) { return Accumulator(spec); }
inline Accumulator create(BundleSpec spec) { return Accumulator(std::move(spec)); }

}  // namespace latentscope
