#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "l2boost/boosting.hpp"
#include "l2boost/cli/config.hpp"
#include "l2boost/cli/csv.hpp"
#include "l2boost/errors.hpp"
#include "l2boost/inference.hpp"
#include "l2boost/montecarlo.hpp"
#include "l2boost/table.hpp"

namespace l2boost::cli {

enum class Format { Text, Csv, Json };

inline std::optional<Format> parse_format(std::string_view s) {
    if (s == "text") return Format::Text;
    if (s == "csv") return Format::Csv;
    if (s == "json") return Format::Json;
    return std::nullopt;
}

/// Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

inline constexpr const char* kSummaryCsv = "summary.csv";
inline constexpr const char* kSummaryJson = "summary.json";
inline constexpr const char* kEffectiveConfig = "effective_config.json";
inline constexpr const char* kFitReport = "fit_report.json";

/// Parsed command line for one invocation. Optional fields left empty fall
/// back to the config file, then to the built-in defaults.
struct RunSpec {
    std::string config_path;
    std::vector<std::string> overrides;  ///< dotted.key=value
    std::string output_dir = "l2boost_out";
    Format format = Format::Text;

    std::optional<std::string> experiment;
    std::vector<std::string> variants;
    std::optional<std::size_t> replications;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    std::optional<std::string> stop;
    std::optional<std::size_t> m_max;

    // fit
    std::string data_path;
    std::string outcome;
    std::string treatment;
    std::string instruments;
    std::string controls;
};

/// defaults <- config file <- --set overrides <- dedicated flags.
inline json effective_config(const RunSpec& spec) {
    json cfg = default_config();
    if (!spec.config_path.empty()) merge_into(cfg, load_config_file(spec.config_path));
    for (const auto& o : spec.overrides) apply_override(cfg, o);
    if (spec.experiment) cfg["experiment"] = *spec.experiment;
    if (!spec.variants.empty()) cfg["variants"] = spec.variants;
    if (spec.replications) cfg["replications"] = *spec.replications;
    if (spec.seed) cfg["seed"] = *spec.seed;
    if (spec.workers) cfg["workers"] = *spec.workers;
    if (spec.stop) cfg["boosting"]["stop"] = *spec.stop;
    if (spec.m_max) cfg["boosting"]["m_max"] = *spec.m_max;
    return cfg;
}

inline std::string render(const mc::Table& t, Format f) {
    switch (f) {
        case Format::Text: return mc::render_text(t);
        case Format::Csv: return mc::render_csv(t);
        case Format::Json: return mc::render_json(t);
    }
    return {};
}

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

template <typename Body>
int guarded(std::ostream& err, Body&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DataError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

}  // namespace detail

/// Runs one Monte Carlo per configured variant and writes summary.csv,
/// summary.json and effective_config.json into the output directory.
inline int cmd_simulate(const RunSpec& spec, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const json cfg = effective_config(spec);
        const SimulationPlan plan = plan_from_json(cfg);

        std::vector<std::pair<std::string, mc::McSummary>> summaries;
        for (Variant v : plan.variants) {
            mc::McConfig run = plan.base;
            run.boosting.variant = v;
            summaries.emplace_back(std::string(display_label(v)), mc::run_mc(run));
        }
        mc::TableMetadata meta{plan.experiment, config_hash(cfg), plan.base.master_seed, plan.base.replications};
        const mc::Table table = mc::compare_table(summaries, plan.references, meta);

        const std::filesystem::path dir(spec.output_dir);
        std::filesystem::create_directories(dir);
        detail::write_file(dir / kSummaryCsv, mc::render_csv(table));
        detail::write_file(dir / kSummaryJson, mc::render_json(table));
        detail::write_file(dir / kEffectiveConfig, cfg.dump(2) + "\n");
        out << render(table, spec.format);
        return kExitOk;
    });
}

/// Re-renders a previous simulate run from its summary.json.
inline int cmd_report(const RunSpec& spec, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const std::filesystem::path path = std::filesystem::path(spec.output_dir) / kSummaryJson;
        if (!std::filesystem::exists(path)) throw DataError("no simulate artifacts: " + path.string() + " not found");
        mc::Table table;
        try {
            table = mc::parse_table_json(detail::read_file(path));
        } catch (const InvalidInput& e) {
            throw DataError(e.what());
        }
        out << render(table, spec.format);
        return kExitOk;
    });
}

namespace detail {

inline std::vector<std::string> names_of(const CsvTable& t, const std::vector<std::size_t>& cols,
                                         const std::vector<std::size_t>& picks) {
    std::vector<std::string> out;
    for (std::size_t k : picks) out.push_back(t.header[cols[k]]);
    return out;
}

}  // namespace detail

/// Fits the IV estimator (--instruments) or double selection (--controls)
/// on a CSV, prints the estimates and writes fit_report.json.
inline int cmd_fit(const RunSpec& spec, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const json cfg = effective_config(spec);
        BoostingConfig boosting = boosting_from_json(cfg.at("boosting"));
        const double level = cfg.at("level").get<double>();
        std::vector<Variant> variants;
        for (const auto& v : cfg.at("variants").get<std::vector<std::string>>()) {
            const auto parsed = parse_variant(v);
            if (!parsed) throw ConfigError("unknown variant '" + v + "'");
            variants.push_back(*parsed);
        }
        if (spec.data_path.empty()) throw ConfigError("fit: --data is required");
        if (spec.outcome.empty() || spec.treatment.empty()) throw ConfigError("fit: --outcome and --treatment are required");
        if (spec.instruments.empty() == spec.controls.empty()) {
            throw ConfigError("fit: give exactly one of --instruments or --controls");
        }

        const CsvTable table = read_csv(spec.data_path);
        const auto y_col = resolve_columns(table, spec.outcome).front();
        const auto d_col = resolve_columns(table, spec.treatment).front();
        const bool iv_mode = !spec.instruments.empty();
        const auto cols = resolve_columns(table, iv_mode ? spec.instruments : spec.controls, {spec.outcome, spec.treatment});
        for (std::size_t c : cols) {
            if (c == y_col || c == d_col) throw ConfigError("fit: outcome/treatment also listed as " + std::string(iv_mode ? "instrument" : "control"));
        }

        const Vector y = table.data.col(static_cast<Index>(y_col));
        const Vector d = table.data.col(static_cast<Index>(d_col));
        const Matrix W = gather_columns(table.data, cols);
        const double z = normal_critical_value(level);

        json report{{"mode", iv_mode ? "iv" : "te"},
                    {"data", spec.data_path},
                    {"n", table.data.rows()},
                    {"outcome", spec.outcome},
                    {"treatment", spec.treatment},
                    {"level", level},
                    {"boosting", cfg.at("boosting")},
                    {"results", json::array()}};
        std::ostringstream text;
        text.precision(6);
        text << std::fixed;
        for (Variant v : variants) {
            boosting.variant = v;
            json r{{"variant", std::string(to_string(v))}};
            double estimate = 0.0, se = 0.0;
            if (iv_mode) {
                const IVEstimate est = iv_estimate(y, d, W, boosting);
                estimate = est.beta_hat;
                se = est.se;
                r["selected"] = detail::names_of(table, cols, est.first_stage_support);
                r["m_star"] = est.m_star;
            } else {
                const TEEstimate est = double_selection(y, d, W, boosting);
                estimate = est.alpha_hat;
                se = est.se;
                r["selected_y"] = detail::names_of(table, cols, est.support_y);
                r["selected_d"] = detail::names_of(table, cols, est.support_d);
                r["selected"] = detail::names_of(table, cols, est.support_union);
                r["m_star_y"] = est.m_star_y;
                r["m_star_d"] = est.m_star_d;
            }
            r["estimate"] = estimate;
            r["se"] = se;
            r["ci_lower"] = estimate - z * se;
            r["ci_upper"] = estimate + z * se;

            text << display_label(v) << ": estimate " << estimate << "  se " << se << "  " << (1.0 - level) * 100.0
                 << "% CI [" << estimate - z * se << ", " << estimate + z * se << "]\n";
            if (iv_mode) {
                text << "  m_star " << r["m_star"].get<std::size_t>();
            } else {
                text << "  m_star y " << r["m_star_y"].get<std::size_t>() << ", d " << r["m_star_d"].get<std::size_t>();
            }
            text << "  selected:";
            for (const auto& name : r["selected"]) text << " " << name.get<std::string>();
            text << "\n";
            report["results"].push_back(std::move(r));
        }

        const std::filesystem::path dir(spec.output_dir);
        std::filesystem::create_directories(dir);
        detail::write_file(dir / kFitReport, report.dump(2) + "\n");
        out << (spec.format == Format::Json ? report.dump(2) + "\n" : text.str());
        return kExitOk;
    });
}

}  // namespace l2boost::cli
