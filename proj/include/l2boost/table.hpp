#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "l2boost/errors.hpp"
#include "l2boost/montecarlo.hpp"

namespace l2boost::mc {

/// One column of the bias/RP comparison table. Reference columns carry
/// literal values transcribed from elsewhere and are never computed.
struct TableColumn {
    std::string label;
    double bias = 0.0;
    double rp = 0.0;
    bool reference = false;
    // computed columns only
    std::optional<double> abs_bias;
    std::optional<double> mc_se_bias;
    std::optional<double> mean_abs_error;
    std::optional<std::uint64_t> replications;
    std::optional<std::uint64_t> failures;
    // reference columns only
    std::string note;

    bool operator==(const TableColumn&) const = default;
};

struct TableMetadata {
    std::string experiment;
    std::string config_hash;
    std::uint64_t master_seed = 0;
    std::uint64_t replications = 0;

    bool operator==(const TableMetadata&) const = default;
};

struct Table {
    TableMetadata metadata;
    std::vector<TableColumn> columns;

    bool operator==(const Table&) const = default;
};

struct ReferenceColumn {
    std::string label;
    double bias = 0.0;
    double rp = 0.0;
    std::string note = "reference, not computed";
};

/// Builds the 2 x k table (rows bias and RP), computed columns first.
inline Table compare_table(const std::vector<std::pair<std::string, McSummary>>& summaries,
                           const std::vector<ReferenceColumn>& references = {}, TableMetadata metadata = {}) {
    if (summaries.empty() && references.empty()) throw InvalidInput("compare_table: no columns");
    Table t;
    t.metadata = std::move(metadata);
    for (const auto& [label, s] : summaries) {
        TableColumn c;
        c.label = label;
        c.bias = s.bias;
        c.rp = s.rp;
        c.abs_bias = s.abs_bias;
        c.mc_se_bias = s.mc_se_bias;
        c.mean_abs_error = s.mean_abs_error;
        c.replications = s.estimates.size();
        c.failures = s.failures;
        t.columns.push_back(std::move(c));
    }
    for (const auto& r : references) {
        TableColumn c;
        c.label = r.label;
        c.bias = r.bias;
        c.rp = r.rp;
        c.reference = true;
        c.note = r.note;
        t.columns.push_back(std::move(c));
    }
    return t;
}

/// Fixed three-decimal rendering. printf rounds the exact binary value to
/// nearest, so only exactly representable midpoints are affected by the
/// round-half-even tie rule.
inline std::string format_value(double v, int decimals = 3) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

namespace detail {

inline std::string column_heading(const TableColumn& c) { return c.reference ? c.label + " (ref)" : c.label; }

}  // namespace detail

inline std::string render_csv(const Table& t) {
    std::string out;
    out += "# experiment=" + t.metadata.experiment + ",master_seed=" + std::to_string(t.metadata.master_seed) +
           ",replications=" + std::to_string(t.metadata.replications) + ",config_hash=" + t.metadata.config_hash + "\n";
    out += "row";
    for (const auto& c : t.columns) out += "," + detail::column_heading(c);
    out += "\nbias";
    for (const auto& c : t.columns) out += "," + format_value(c.bias);
    out += "\nRP";
    for (const auto& c : t.columns) out += "," + format_value(c.rp);
    out += "\n";
    return out;
}

inline std::string render_text(const Table& t) {
    std::vector<std::string> heads{""};
    std::vector<std::string> bias{"bias"};
    std::vector<std::string> rp{"RP"};
    for (const auto& c : t.columns) {
        heads.push_back(detail::column_heading(c));
        bias.push_back(format_value(c.bias));
        rp.push_back(format_value(c.rp));
    }
    std::vector<std::size_t> width(heads.size());
    for (std::size_t k = 0; k < heads.size(); ++k) width[k] = std::max({heads[k].size(), bias[k].size(), rp[k].size()});

    auto line = [&](const std::vector<std::string>& cells) {
        std::string s;
        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (k == 0) {
                s += cells[k] + std::string(width[k] - cells[k].size(), ' ');
            } else {
                s += "  " + std::string(width[k] - cells[k].size(), ' ') + cells[k];
            }
        }
        return s + "\n";
    };
    std::string out = "experiment " + t.metadata.experiment + ", R = " + std::to_string(t.metadata.replications) +
                      ", seed " + std::to_string(t.metadata.master_seed) + "\n";
    out += line(heads) + line(bias) + line(rp);
    if (std::any_of(t.columns.begin(), t.columns.end(), [](const TableColumn& c) { return c.reference; })) {
        out += "(ref) = reference, not computed\n";
    }
    return out;
}

inline nlohmann::json to_json(const Table& t) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["metadata"] = {{"experiment", t.metadata.experiment},
                     {"config_hash", t.metadata.config_hash},
                     {"master_seed", t.metadata.master_seed},
                     {"replications", t.metadata.replications}};
    j["rows"] = {"bias", "RP"};
    j["columns"] = nlohmann::json::array();
    for (const auto& c : t.columns) {
        nlohmann::json col = {{"label", c.label}, {"bias", c.bias}, {"rp", c.rp}, {"reference", c.reference}};
        if (c.abs_bias) col["abs_bias"] = *c.abs_bias;
        if (c.mc_se_bias) col["mc_se_bias"] = *c.mc_se_bias;
        if (c.mean_abs_error) col["mean_abs_error"] = *c.mean_abs_error;
        if (c.replications) col["replications"] = *c.replications;
        if (c.failures) col["failures"] = *c.failures;
        if (c.reference) col["note"] = c.note;
        j["columns"].push_back(std::move(col));
    }
    return j;
}

inline std::string render_json(const Table& t) { return to_json(t).dump(2) + "\n"; }

/// Inverse of to_json. Throws InvalidInput on schema violations.
inline Table table_from_json(const nlohmann::json& j) {
    try {
        if (j.at("schema_version").get<int>() != 1) throw InvalidInput("table: unsupported schema_version");
        Table t;
        const auto& m = j.at("metadata");
        t.metadata.experiment = m.at("experiment").get<std::string>();
        t.metadata.config_hash = m.at("config_hash").get<std::string>();
        t.metadata.master_seed = m.at("master_seed").get<std::uint64_t>();
        t.metadata.replications = m.at("replications").get<std::uint64_t>();
        for (const auto& col : j.at("columns")) {
            TableColumn c;
            c.label = col.at("label").get<std::string>();
            c.bias = col.at("bias").get<double>();
            c.rp = col.at("rp").get<double>();
            c.reference = col.at("reference").get<bool>();
            if (col.contains("abs_bias")) c.abs_bias = col["abs_bias"].get<double>();
            if (col.contains("mc_se_bias")) c.mc_se_bias = col["mc_se_bias"].get<double>();
            if (col.contains("mean_abs_error")) c.mean_abs_error = col["mean_abs_error"].get<double>();
            if (col.contains("replications")) c.replications = col["replications"].get<std::uint64_t>();
            if (col.contains("failures")) c.failures = col["failures"].get<std::uint64_t>();
            if (col.contains("note")) c.note = col["note"].get<std::string>();
            t.columns.push_back(std::move(c));
        }
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("table: malformed summary json: ") + e.what());
    }
}

inline Table parse_table_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("table: invalid json: ") + e.what());
    }
    return table_from_json(j);
}

}  // namespace l2boost::mc
