#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "json.hpp"

#include "l2boost/boosting.hpp"
#include "l2boost/dgp.hpp"
#include "l2boost/errors.hpp"
#include "l2boost/montecarlo.hpp"
#include "l2boost/rng.hpp"
#include "l2boost/table.hpp"

namespace l2boost::cli {

/// Invalid configuration or command line; the CLI maps this to exit code 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

using nlohmann::json;

inline constexpr int kConfigVersion = 1;

inline json reference_literal(const char* label, double bias, double rp) {
    return json{{"label", label}, {"bias", bias}, {"rp", rp}, {"note", "reference value, not computed"}};
}

/// Built-in configuration. Simulation parameters follow the reference
/// designs; the post-Lasso columns are literal reference values that are
/// only displayed.
inline json default_config() {
    const dgp::DgpConfigIV iv;
    const dgp::DgpConfigTE te;
    const BoostingConfig b;
    return json{
        {"version", kConfigVersion},
        {"experiment", "iv"},
        {"replications", 500},
        {"seed", 20170101},
        {"level", 0.05},
        {"workers", 1},
        {"variants", json::array({"ba", "post-ba", "oba"})},
        {"boosting",
         {{"m_max", b.m_max}, {"shrinkage", b.shrinkage}, {"stop", std::string(to_string(b.stop_rule))},
          {"residual_tol", b.residual_tol}}},
        {"iv",
         {{"n", iv.n},
          {"p", iv.p},
          {"s", iv.s},
          {"mu", iv.mu},
          {"rho", iv.rho},
          {"corr_ev", iv.corr_ev},
          {"beta_true", iv.beta_true},
          {"sigma_e", iv.sigma_e}}},
        {"te", {{"n", te.n}, {"p", te.p}, {"alpha0", te.alpha0}, {"rho", te.rho}, {"decay_exponent", te.decay_exponent}}},
        {"reference_columns",
         {{"iv", json::array({reference_literal("post-Lasso", 0.194, 0.032)})},
          {"te", json::array({reference_literal("post-Lasso", 0.082, 0.002)})}}},
    };
}

/// Applies `patch` onto `base` key by key; objects merge recursively,
/// everything else replaces. Unknown keys are rejected.
inline void merge_into(json& base, const json& patch, const std::string& where = "") {
    if (!patch.is_object()) throw ConfigError("config: expected an object at '" + (where.empty() ? "<root>" : where) + "'");
    for (auto it = patch.begin(); it != patch.end(); ++it) {
        const std::string key = where.empty() ? it.key() : where + "." + it.key();
        if (!base.contains(it.key())) throw ConfigError("config: unknown key '" + key + "'");
        json& slot = base[it.key()];
        if (slot.is_object() && it.value().is_object() && it.key() != "reference_columns") {
            merge_into(slot, it.value(), key);
        } else {
            slot = it.value();
        }
    }
}

inline json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return json::parse(buf.str());
    } catch (const json::exception& e) {
        throw ConfigError("config: " + path + " is not valid JSON: " + e.what());
    }
}

/// Applies "dotted.key=value"; value is parsed as JSON when possible, else taken as a string.
inline void apply_override(json& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not key=value");
    const std::string path = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(raw);
    } catch (const json::exception&) {
        value = raw;
    }
    json* node = &cfg;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (!node->is_object() || !node->contains(key)) throw ConfigError("override: unknown key '" + path + "'");
        node = &(*node)[key];
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    *node = value;
}

/// 64-bit FNV-1a of the canonical dump, with "workers" removed because it
/// does not affect results.
inline std::string config_hash(json cfg) {
    cfg.erase("workers");
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng::fnv1a64(cfg.dump())));
    return buf;
}

namespace detail {

template <typename T>
T get(const json& node, const char* key, const std::string& where) {
    try {
        if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T>) {
            const json& v = node.at(key);
            const bool nonnegative = v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
            if (!nonnegative) throw ConfigError("config: '" + where + key + "' must be a nonnegative integer");
        }
        return node.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config: '" + where + key + "' is missing or has the wrong type");
    }
}

}  // namespace detail

inline BoostingConfig boosting_from_json(const json& b) {
    BoostingConfig cfg;
    cfg.m_max = detail::get<std::size_t>(b, "m_max", "boosting.");
    cfg.shrinkage = detail::get<double>(b, "shrinkage", "boosting.");
    cfg.residual_tol = detail::get<double>(b, "residual_tol", "boosting.");
    const auto stop = detail::get<std::string>(b, "stop", "boosting.");
    const auto rule = parse_stop_rule(stop);
    if (!rule) throw ConfigError("config: boosting.stop must be fixed, aicc or tol (got '" + stop + "')");
    cfg.stop_rule = *rule;
    try {
        cfg.validate();
    } catch (const InvalidInput& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

/// Everything cmd_simulate needs, decoded from a validated config tree.
struct SimulationPlan {
    mc::McConfig base;
    std::vector<Variant> variants;
    std::vector<mc::ReferenceColumn> references;
    std::string experiment;
};

inline SimulationPlan plan_from_json(const json& cfg) {
    if (detail::get<int>(cfg, "version", "") != kConfigVersion) {
        throw ConfigError("config: unsupported version (expected " + std::to_string(kConfigVersion) + ")");
    }
    SimulationPlan plan;
    plan.experiment = detail::get<std::string>(cfg, "experiment", "");
    if (plan.experiment == "iv") {
        const json& j = cfg.at("iv");
        dgp::DgpConfigIV iv;
        iv.n = detail::get<std::size_t>(j, "n", "iv.");
        iv.p = detail::get<std::size_t>(j, "p", "iv.");
        iv.s = detail::get<std::size_t>(j, "s", "iv.");
        iv.mu = detail::get<double>(j, "mu", "iv.");
        iv.rho = detail::get<double>(j, "rho", "iv.");
        iv.corr_ev = detail::get<double>(j, "corr_ev", "iv.");
        iv.beta_true = detail::get<double>(j, "beta_true", "iv.");
        iv.sigma_e = detail::get<double>(j, "sigma_e", "iv.");
        plan.base.dgp = iv;
    } else if (plan.experiment == "te") {
        const json& j = cfg.at("te");
        dgp::DgpConfigTE te;
        te.n = detail::get<std::size_t>(j, "n", "te.");
        te.p = detail::get<std::size_t>(j, "p", "te.");
        te.alpha0 = detail::get<double>(j, "alpha0", "te.");
        te.rho = detail::get<double>(j, "rho", "te.");
        te.decay_exponent = detail::get<double>(j, "decay_exponent", "te.");
        plan.base.dgp = te;
    } else {
        throw ConfigError("config: experiment must be iv or te (got '" + plan.experiment + "')");
    }
    plan.base.boosting = boosting_from_json(cfg.at("boosting"));
    plan.base.replications = detail::get<std::size_t>(cfg, "replications", "");
    plan.base.master_seed = detail::get<std::uint64_t>(cfg, "seed", "");
    plan.base.level = detail::get<double>(cfg, "level", "");
    plan.base.workers = detail::get<std::size_t>(cfg, "workers", "");

    for (const auto& v : detail::get<std::vector<std::string>>(cfg, "variants", "")) {
        const auto parsed = parse_variant(v);
        if (!parsed) throw ConfigError("config: unknown variant '" + v + "' (expected ba, post-ba or oba)");
        plan.variants.push_back(*parsed);
    }
    if (plan.variants.empty()) throw ConfigError("config: variants list is empty");

    const json& refs = cfg.at("reference_columns");
    if (refs.contains(plan.experiment)) {
        for (const auto& r : refs.at(plan.experiment)) {
            mc::ReferenceColumn rc;
            rc.label = detail::get<std::string>(r, "label", "reference_columns.");
            rc.bias = detail::get<double>(r, "bias", "reference_columns.");
            rc.rp = detail::get<double>(r, "rp", "reference_columns.");
            if (r.contains("note")) rc.note = detail::get<std::string>(r, "note", "reference_columns.");
            plan.references.push_back(std::move(rc));
        }
    }
    try {
        plan.base.validate();
    } catch (const InvalidInput& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return plan;
}

}  // namespace l2boost::cli
