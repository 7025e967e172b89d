#pragma once

// Command-line driver.
//
//   disent  --latents PATH --attributes PATH --metrics LIST [--reg-dim INTS]
//           [--discrete BOOL|BOOLS] [--latent-discrete auto|BOOL|BOOLS]
//           [--seed INT|none] [--k-neighbors INT] [--output PATH|-]
//   bundle  --bundle dami  (data flags as for disent, no --metrics)
//   interp  --trace PATH --samples S --attributes A --delta F [--epsilon F]
//           [--metrics LIST] [--output PATH|-]
//
// Exit status: 0 success, 1 invalid input, 2 I/O failure.

#include <charconv>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>

#include "latentscope/core.hpp"
#include "latentscope/report.hpp"
#include "latentscope/session.hpp"
#include "latentscope/table_io.hpp"

namespace latentscope {

namespace detail {

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    for (auto part : split_commas(s)) {
        part = trim(part);
        if (!part.empty()) {
            out.emplace_back(part);
        }
    }
    return out;
}

inline bool parse_bool(std::string_view s) {
    if (s == "true" || s == "1" || s == "yes") {
        return true;
    }
    if (s == "false" || s == "0" || s == "no") {
        return false;
    }
    throw ValidationError("expected a boolean, got '" + std::string(s) + "'");
}

inline std::uint64_t parse_unsigned(std::string_view s, const std::string& what) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw ValidationError(what + ": expected a nonnegative integer, got '" + std::string(s) + "'");
    }
    return v;
}

/// One flag for every column or one per column.
inline std::vector<Kind> parse_kinds(const std::string& spec, std::size_t cols,
                                     const std::string& flag) {
    const auto parts = split_list(spec);
    if (parts.size() != 1 && parts.size() != cols) {
        throw ValidationError(flag + " has " + std::to_string(parts.size()) + " entries for " +
                              std::to_string(cols) + " columns");
    }
    std::vector<Kind> kinds;
    for (std::size_t c = 0; c < cols; ++c) {
        kinds.push_back(parse_bool(parts.size() == 1 ? parts[0] : parts[c]) ? Kind::discrete
                                                                           : Kind::continuous);
    }
    return kinds;
}

inline std::vector<Kind> latent_kinds(const std::string& spec, const Matrix& z) {
    if (spec != "auto") {
        return parse_kinds(spec, z.cols(), "--latent-discrete");
    }
    std::vector<Kind> kinds(z.cols(), Kind::discrete);
    for (std::size_t c = 0; c < z.cols(); ++c) {
        for (std::size_t r = 0; r < z.rows(); ++r) {
            if (!is_integral(z(r, c))) {
                kinds[c] = Kind::continuous;
                break;
            }
        }
    }
    return kinds;
}

inline std::vector<std::string> kind_names(const std::vector<Kind>& kinds) {
    std::vector<std::string> out;
    for (Kind k : kinds) {
        out.emplace_back(to_string(k));
    }
    return out;
}

struct DataOptions {
    std::string latents;
    std::string attributes;
    std::string reg_dim;
    std::string discrete = "false";
    std::string latent_discrete = "auto";
    std::string seed = "42";
    std::size_t k_neighbors = 3;
};

inline void add_data_options(CLI::App& cmd, DataOptions& o) {
    cmd.add_option("--latents", o.latents, "latent codes, N x D (.csv or .npy)");
    cmd.add_option("--attributes", o.attributes, "attribute values, N x A (.csv or .npy)");
    cmd.add_option("--reg-dim", o.reg_dim, "latent dimension regularizing each attribute, e.g. 0,3,7");
    cmd.add_option("--discrete", o.discrete, "attribute kinds: one boolean or one per attribute")
        ->capture_default_str();
    cmd.add_option("--latent-discrete", o.latent_discrete,
                   "latent kinds: auto, one boolean, or one per dimension")
        ->capture_default_str();
    cmd.add_option("--seed", o.seed, "estimator seed, or 'none'")->capture_default_str();
    cmd.add_option("--k-neighbors", o.k_neighbors, "neighbors for the kNN estimators")
        ->capture_default_str();
}

inline std::string require_flag(const std::string& value, const std::string& flag) {
    if (value.empty()) {
        throw ValidationError(flag + " is required");
    }
    return value;
}

inline void write_output(const std::string& text, const std::string& output, std::ostream& out) {
    if (output == "-") {
        out << text;
        out.flush();
        return;
    }
    std::ofstream f(output, std::ios::binary);
    if (!f) {
        throw IoError("cannot open '" + output + "' for writing");
    }
    f << text;
    f.flush();
    if (!f) {
        throw IoError("error while writing '" + output + "'");
    }
}

/// Computes a latent/attribute bundle and returns the serialized report.
inline std::string run_disentanglement(const DataOptions& o, BundleSpec spec,
                                       std::optional<std::string> bundle_name) {
    const Table zt = load_table(require_flag(o.latents, "--latents"));
    const Table at = load_table(require_flag(o.attributes, "--attributes"));
    if (zt.values.rows() != at.values.rows()) {
        throw ValidationError("latents have " + std::to_string(zt.values.rows()) +
                              " rows but attributes have " + std::to_string(at.values.rows()));
    }
    const auto a_kinds = parse_kinds(o.discrete, at.values.cols(), "--discrete");
    const auto z_kinds = latent_kinds(o.latent_discrete, zt.values);
    const LatentBatch z(zt.values, z_kinds);
    const AttributeBatch a(at.values, a_kinds);

    EstimatorConfig cfg;
    cfg.seed = o.seed == "none" ? std::nullopt
                                : std::optional<std::uint64_t>(parse_unsigned(o.seed, "--seed"));
    cfg.k_neighbors = o.k_neighbors;

    std::optional<RegularizationMap> reg;
    if (!o.reg_dim.empty()) {
        std::vector<std::size_t> dims;
        for (const auto& p : split_list(o.reg_dim)) {
            dims.push_back(parse_unsigned(p, "--reg-dim"));
        }
        if (dims.size() != a.count()) {
            throw ValidationError("--reg-dim has " + std::to_string(dims.size()) +
                                  " entries but there are " + std::to_string(a.count()) +
                                  " attributes");
        }
        reg = RegularizationMap(std::move(dims), z.dims());
    } else {
        bool needed = false;
        for (const auto& id : spec.members) {
            needed = needed || needs_regularization(id);
        }
        if (needed) {
            reg = RegularizationMap::identity(a.count(), z.dims());
        }
    }
    spec.reg = reg;
    spec.cfg = cfg;

    Accumulator acc(std::move(spec));
    acc.update(z, a);

    ReportDocument doc;
    doc.config.bundle = std::move(bundle_name);
    doc.config.metrics = acc.spec().members;
    doc.config.seed = cfg.seed;
    doc.config.k_neighbors = cfg.k_neighbors;
    doc.config.jitter_scale = cfg.jitter_scale;
    if (reg) {
        doc.config.reg_dim = reg->reg_dim();
    }
    doc.config.attribute_kinds = kind_names(a.kinds());
    doc.config.latent_kinds = kind_names(z.kinds());
    doc.report = acc.compute();
    return dump_report(doc);
}

inline std::vector<std::string> checked_metrics(const std::string& list, bool interpolatability) {
    auto metrics = split_list(list);
    if (metrics.empty()) {
        throw ValidationError("--metrics is required");
    }
    for (const auto& m : metrics) {
        const bool ok = interpolatability ? is_interpolatability_metric(m)
                                          : is_disentanglement_metric(m);
        if (!ok) {
            std::string valid;
            if (interpolatability) {
                for (auto n : interpolatability_metric_names) {
                    valid += (valid.empty() ? "" : ", ") + std::string(n);
                }
            } else {
                for (auto n : disentanglement_metric_names) {
                    valid += (valid.empty() ? "" : ", ") + std::string(n);
                }
            }
            throw ValidationError("unknown metric '" + m + "'; valid metrics: " + valid);
        }
    }
    return metrics;
}

}  // namespace detail

/// Runs the command line; returns the process exit status.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Disentanglement and interpolatability metrics for latent generative models",
                 "latentscope"};
    app.require_subcommand(1);

    detail::DataOptions disent_opts;
    std::string disent_metrics;
    std::string disent_output = "-";
    auto* disent = app.add_subcommand("disent", "disentanglement metrics from latents and attributes");
    detail::add_data_options(*disent, disent_opts);
    disent->add_option("--metrics", disent_metrics, "comma separated metric names");
    disent->add_option("--output", disent_output, "report path, '-' for standard output")
        ->capture_default_str();

    detail::DataOptions bundle_opts;
    std::string bundle_name;
    std::string bundle_output = "-";
    auto* bundle = app.add_subcommand("bundle", "a built-in metric bundle");
    bundle->add_option("--bundle", bundle_name, "bundle name (dami)")->required();
    detail::add_data_options(*bundle, bundle_opts);
    bundle->add_option("--output", bundle_output, "report path, '-' for standard output")
        ->capture_default_str();

    std::string trace_path;
    std::size_t samples = 0;
    std::size_t attributes = 0;
    double delta = 0.0;
    double epsilon = 0.0;
    std::string interp_metrics = "smoothness,monotonicity";
    std::string interp_output = "-";
    auto* interp = app.add_subcommand("interp", "interpolatability metrics from a measurement trace");
    interp->add_option("--trace", trace_path, "(S*A) x K measurements, sample-major")->required();
    interp->add_option("--samples", samples, "number of samples S")->required();
    interp->add_option("--attributes", attributes, "number of attributes A")->required();
    interp->add_option("--delta", delta, "latent step between grid points")->required();
    interp->add_option("--epsilon", epsilon, "monotonicity noise threshold")->capture_default_str();
    interp->add_option("--metrics", interp_metrics, "comma separated metric names")
        ->capture_default_str();
    interp->add_option("--output", interp_output, "report path, '-' for standard output")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (disent->parsed()) {
            const auto metrics = detail::checked_metrics(disent_metrics, false);
            BundleSpec spec{"disent", metrics, std::nullopt, {}, std::nullopt};
            detail::write_output(detail::run_disentanglement(disent_opts, std::move(spec), std::nullopt),
                                 disent_output, out);
        } else if (bundle->parsed()) {
            BundleSpec spec = BundleSpec::builtin(bundle_name);
            detail::write_output(detail::run_disentanglement(bundle_opts, std::move(spec), bundle_name),
                                 bundle_output, out);
        } else {
            const auto metrics = detail::checked_metrics(interp_metrics, true);
            const Table t = load_table(trace_path);
            if (samples == 0 || attributes == 0 || t.values.rows() != samples * attributes) {
                throw ValidationError("trace has " + std::to_string(t.values.rows()) +
                                      " rows; expected samples * attributes = " +
                                      std::to_string(samples * attributes));
            }
            BundleSpec spec{"interp", metrics, std::nullopt, {}, TraceParams{delta, epsilon}};
            Accumulator acc(std::move(spec));
            acc.update(Tensor3(samples, attributes, t.values.cols(), t.values.data()));

            ReportDocument doc;
            doc.config.metrics = metrics;
            doc.config.seed = std::nullopt;
            doc.config.delta = delta;
            doc.config.epsilon = epsilon;
            doc.report = acc.compute();
            detail::write_output(dump_report(doc), interp_output, out);
        }
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace latentscope
