#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <variant>
#include <vector>

#include "l2boost/boosting.hpp"
#include "l2boost/dgp.hpp"
#include "l2boost/errors.hpp"
#include "l2boost/inference.hpp"
#include "l2boost/rng.hpp"

namespace l2boost::mc {

enum class Experiment { IV, TE };

inline std::string_view to_string(Experiment e) { return e == Experiment::IV ? "iv" : "te"; }

struct McConfig {
    std::variant<dgp::DgpConfigIV, dgp::DgpConfigTE> dgp = dgp::DgpConfigIV{};
    BoostingConfig boosting;
    std::size_t replications = 500;
    std::uint64_t master_seed = 20170101;
    std::optional<double> null_value;  ///< defaults to the true parameter
    double level = 0.05;
    std::size_t workers = 1;
    std::uint64_t first_replication = 1;  ///< replication indices are first .. first + R - 1

    Experiment experiment() const {
        return std::holds_alternative<dgp::DgpConfigIV>(dgp) ? Experiment::IV : Experiment::TE;
    }

    double truth() const {
        if (const auto* iv = std::get_if<dgp::DgpConfigIV>(&dgp)) return iv->beta_true;
        return std::get<dgp::DgpConfigTE>(dgp).alpha0;
    }

    double effective_null() const { return null_value.value_or(truth()); }

    void validate() const {
        if (replications < 1) throw InvalidInput("monte carlo: replications must be at least 1");
        if (!(level > 0.0 && level < 1.0)) throw InvalidInput("monte carlo: level must lie in (0, 1)");
        boosting.validate();
        std::visit([](const auto& c) { c.validate(); }, dgp);
    }
};

/// Per-replication outcomes (index order) and their aggregates. Failed
/// replications hold NaN estimates and are excluded from every aggregate.
struct McSummary {
    std::vector<double> estimates;
    std::vector<double> ses;
    std::vector<std::uint8_t> rejected;
    std::vector<std::uint8_t> failed;
    double truth = 0.0;
    double bias = std::numeric_limits<double>::quiet_NaN();
    double abs_bias = std::numeric_limits<double>::quiet_NaN();
    double mean_abs_error = std::numeric_limits<double>::quiet_NaN();
    double rp = std::numeric_limits<double>::quiet_NaN();
    double mc_se_bias = std::numeric_limits<double>::quiet_NaN();
    std::size_t failures = 0;

    std::size_t effective() const noexcept { return estimates.size() - failures; }
};

/// Aggregates per-replication vectors in index order.
inline McSummary summarize(std::vector<double> estimates, std::vector<double> ses, std::vector<std::uint8_t> rejected,
                           std::vector<std::uint8_t> failed, double truth) {
    const std::size_t R = estimates.size();
    if (ses.size() != R || rejected.size() != R || failed.size() != R) {
        throw InvalidInput("summarize: per-replication vectors differ in length");
    }
    McSummary out;
    out.truth = truth;
    double sum = 0.0, abs_err = 0.0;
    std::size_t rejections = 0;
    for (std::size_t r = 0; r < R; ++r) {
        if (failed[r]) {
            ++out.failures;
            continue;
        }
        sum += estimates[r];
        abs_err += std::abs(estimates[r] - truth);
        rejections += rejected[r];
    }
    const std::size_t used = R - out.failures;
    if (used > 0) {
        const double mean = sum / static_cast<double>(used);
        double ss = 0.0;
        for (std::size_t r = 0; r < R; ++r) {
            if (!failed[r]) ss += (estimates[r] - mean) * (estimates[r] - mean);
        }
        const double sd = used > 1 ? std::sqrt(ss / static_cast<double>(used - 1)) : 0.0;
        out.bias = mean - truth;
        out.abs_bias = std::abs(out.bias);
        out.mean_abs_error = abs_err / static_cast<double>(used);
        out.rp = static_cast<double>(rejections) / static_cast<double>(used);
        out.mc_se_bias = sd / std::sqrt(static_cast<double>(used));
    }
    out.estimates = std::move(estimates);
    out.ses = std::move(ses);
    out.rejected = std::move(rejected);
    out.failed = std::move(failed);
    return out;
}

struct ReplicationResult {
    double estimate = std::numeric_limits<double>::quiet_NaN();
    double se = std::numeric_limits<double>::quiet_NaN();
    bool rejected = false;
    bool failed = true;
};

/// One replication: draw a sample from its derived stream and run the estimator.
inline ReplicationResult run_replication(const McConfig& cfg, std::uint64_t replication) {
    Stream stream(cfg.master_seed, replication, to_string(cfg.experiment()));
    ReplicationResult out;
    try {
        if (const auto* iv = std::get_if<dgp::DgpConfigIV>(&cfg.dgp)) {
            const auto sample = dgp::gen_iv(*iv, stream);
            const auto est = iv_estimate(sample.y, sample.d, sample.Z, cfg.boosting);
            out.estimate = est.beta_hat;
            out.se = est.se;
        } else {
            const auto sample = dgp::gen_te(std::get<dgp::DgpConfigTE>(cfg.dgp), stream);
            const auto est = double_selection(sample.y, sample.d, sample.X, cfg.boosting);
            out.estimate = est.alpha_hat;
            out.se = est.se;
        }
        if (!std::isfinite(out.estimate) || !(out.se > 0.0)) return ReplicationResult{};
        out.rejected = reject_null(out.estimate, out.se, cfg.effective_null(), cfg.level);
        out.failed = false;
    } catch (const WeakFirstStage&) {
        return ReplicationResult{};
    } catch (const RankDeficient&) {
        return ReplicationResult{};
    }
    return out;
}

/// Runs every replication and aggregates. Replication r uses the stream
/// derived from (master_seed, r, experiment label); workers take a strided
/// partition of the indices and write into index-ordered slots, so results
/// do not depend on the worker count.
inline McSummary run_mc(const McConfig& cfg) {
    cfg.validate();
    const std::size_t R = cfg.replications;
    std::vector<ReplicationResult> slots(R);
    const std::size_t workers = std::clamp<std::size_t>(cfg.workers, 1, R);

    auto work = [&](std::size_t offset) {
        for (std::size_t r = offset; r < R; r += workers) slots[r] = run_replication(cfg, cfg.first_replication + r);
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
    }

    std::vector<double> estimates(R), ses(R);
    std::vector<std::uint8_t> rejected(R), failed(R);
    for (std::size_t r = 0; r < R; ++r) {
        estimates[r] = slots[r].estimate;
        ses[r] = slots[r].se;
        rejected[r] = slots[r].rejected ? 1 : 0;
        failed[r] = slots[r].failed ? 1 : 0;
    }
    McSummary out = summarize(std::move(estimates), std::move(ses), std::move(rejected), std::move(failed), cfg.truth());
    if (out.failures == R) throw Error("run_mc: all " + std::to_string(R) + " replications failed");
    return out;
}

}  // namespace l2boost::mc
