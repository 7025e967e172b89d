#pragma once

// JSON report documents. Floating-point numbers are written with 17
// significant digits so every value survives a write/parse round trip
// exactly; undefined values are null and degenerate targets carry an error
// string. Output bytes depend only on the document.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "latentscope/core.hpp"
#include "latentscope/result.hpp"

namespace latentscope {

inline constexpr int report_schema_version = 1;

struct ReportConfig {
    std::optional<std::string> bundle;
    std::vector<std::string> metrics;
    std::optional<std::uint64_t> seed;
    std::size_t k_neighbors = 3;
    double jitter_scale = 1e-10;
    std::optional<std::vector<std::size_t>> reg_dim;
    std::vector<std::string> attribute_kinds;
    std::vector<std::string> latent_kinds;
    std::optional<double> delta;
    std::optional<double> epsilon;

    friend bool operator==(const ReportConfig&, const ReportConfig&) = default;
};

struct ReportDocument {
    int schema_version = report_schema_version;
    ReportConfig config;
    MetricReport report;

    friend bool operator==(const ReportDocument&, const ReportDocument&) = default;
};

namespace detail {

using ordered_json = nlohmann::ordered_json;

template <typename T>
ordered_json nullable(const std::optional<T>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

inline ordered_json nullable_string(const std::string& s) {
    return s.empty() ? ordered_json(nullptr) : ordered_json(s);
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s(buf);
    if (s.find_first_of(".eEn") == std::string::npos) {
        s += ".0";
    }
    return s;
}

inline bool is_scalar_array(const ordered_json& j) {
    for (const auto& e : j) {
        if (e.is_structured()) {
            return false;
        }
    }
    return true;
}

inline void dump(const ordered_json& j, std::string& out, int indent) {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
    switch (j.type()) {
    case ordered_json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (const auto& [key, value] : j.items()) {
            out += first ? "" : ",\n";
            first = false;
            out += inner + ordered_json(key).dump() + ": ";
            dump(value, out, indent + 1);
        }
        out += "\n" + pad + "}";
        return;
    }
    case ordered_json::value_t::array: {
        if (is_scalar_array(j)) {
            out += "[";
            for (std::size_t i = 0; i < j.size(); ++i) {
                out += i ? ", " : "";
                dump(j[i], out, indent + 1);
            }
            out += "]";
            return;
        }
        out += "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            out += i ? ",\n" : "";
            out += inner;
            dump(j[i], out, indent + 1);
        }
        out += "\n" + pad + "]";
        return;
    }
    case ordered_json::value_t::number_float: {
        const double v = j.get<double>();
        out += std::isfinite(v) ? format_double(v) : "null";
        return;
    }
    default:
        out += j.dump();
        return;
    }
}

template <typename T>
std::optional<T> optional_from(const ordered_json& j) {
    if (j.is_null()) {
        return std::nullopt;
    }
    return j.get<T>();
}

inline std::string string_or_empty(const ordered_json& j) {
    return j.is_null() ? std::string() : j.get<std::string>();
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const ReportDocument& doc) {
    using detail::ordered_json;
    const ReportConfig& c = doc.config;
    ordered_json config = ordered_json::object();
    config["bundle"] = detail::nullable(c.bundle);
    config["metrics"] = c.metrics;
    config["seed"] = detail::nullable(c.seed);
    config["k_neighbors"] = c.k_neighbors;
    config["jitter_scale"] = c.jitter_scale;
    config["reg_dim"] = detail::nullable(c.reg_dim);
    config["attribute_kinds"] = c.attribute_kinds;
    config["latent_kinds"] = c.latent_kinds;
    config["delta"] = detail::nullable(c.delta);
    config["epsilon"] = detail::nullable(c.epsilon);

    ordered_json metrics = ordered_json::object();
    for (const auto& m : doc.report.metrics) {
        ordered_json values = ordered_json::array();
        ordered_json errors = ordered_json::array();
        ordered_json warnings = ordered_json::array();
        for (const auto& v : m.values) {
            values.push_back(detail::nullable(v.value));
            errors.push_back(detail::nullable_string(v.error));
            warnings.push_back(detail::nullable_string(v.warning));
        }
        ordered_json entry = ordered_json::object();
        entry["target_kind"] = to_string(m.target_kind);
        entry["targets"] = m.targets;
        entry["values"] = std::move(values);
        entry["errors"] = std::move(errors);
        entry["warnings"] = std::move(warnings);
        entry["aggregate"] = detail::nullable(m.aggregate);
        metrics[m.metric_id] = std::move(entry);
    }

    ordered_json out = ordered_json::object();
    out["schema_version"] = doc.schema_version;
    out["config"] = std::move(config);
    out["metrics"] = std::move(metrics);
    return out;
}

inline std::string dump_report(const ReportDocument& doc) {
    std::string out;
    detail::dump(to_json(doc), out, 0);
    out += "\n";
    return out;
}

inline ReportDocument parse_report(const std::string& text) {
    using detail::ordered_json;
    ordered_json j;
    try {
        j = ordered_json::parse(text);
        ReportDocument doc;
        doc.schema_version = j.at("schema_version").get<int>();
        if (doc.schema_version != report_schema_version) {
            throw ValidationError("unsupported report schema version " +
                                  std::to_string(doc.schema_version));
        }
        const auto& c = j.at("config");
        doc.config.bundle = detail::optional_from<std::string>(c.at("bundle"));
        doc.config.metrics = c.at("metrics").get<std::vector<std::string>>();
        doc.config.seed = detail::optional_from<std::uint64_t>(c.at("seed"));
        doc.config.k_neighbors = c.at("k_neighbors").get<std::size_t>();
        doc.config.jitter_scale = c.at("jitter_scale").get<double>();
        doc.config.reg_dim = detail::optional_from<std::vector<std::size_t>>(c.at("reg_dim"));
        doc.config.attribute_kinds = c.at("attribute_kinds").get<std::vector<std::string>>();
        doc.config.latent_kinds = c.at("latent_kinds").get<std::vector<std::string>>();
        doc.config.delta = detail::optional_from<double>(c.at("delta"));
        doc.config.epsilon = detail::optional_from<double>(c.at("epsilon"));

        for (const auto& [id, m] : j.at("metrics").items()) {
            MetricResult r;
            r.metric_id = id;
            r.target_kind = m.at("target_kind").get<std::string>() == "latent" ? TargetKind::latent
                                                                            : TargetKind::attribute;
            r.targets = m.at("targets").get<std::vector<std::size_t>>();
            const auto& values = m.at("values");
            const auto& errors = m.at("errors");
            const auto& warnings = m.at("warnings");
            if (values.size() != errors.size() || values.size() != warnings.size() ||
                values.size() != r.targets.size()) {
                throw ValidationError("metric '" + id + "' has inconsistent array lengths");
            }
            for (std::size_t i = 0; i < values.size(); ++i) {
                r.values.push_back({detail::optional_from<double>(values[i]),
                                    detail::string_or_empty(errors[i]),
                                    detail::string_or_empty(warnings[i])});
            }
            r.aggregate = detail::optional_from<double>(m.at("aggregate"));
            doc.report.metrics.push_back(std::move(r));
        }
        return doc;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed report: ") + e.what());
    }
}

}  // namespace latentscope
