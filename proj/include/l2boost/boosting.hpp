#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "l2boost/design.hpp"
#include "l2boost/errors.hpp"
#include "l2boost/ols.hpp"

namespace l2boost {

/// Boosting flavour: componentwise L2Boosting (pure greedy), its OLS refit on
/// the selected support, or the orthogonal (projection) update.
enum class Variant { PGA, PostPGA, OGA };

enum class StopRule { FixedM, Aicc, ResidualTol };

struct BoostingConfig {
    Variant variant = Variant::PGA;
    std::size_t m_max = 500;
    double shrinkage = 1.0;
    StopRule stop_rule = StopRule::Aicc;
    double residual_tol = 1e-4;

    void validate() const {
        if (m_max < 1) throw InvalidInput("boosting: m_max must be at least 1");
        if (!(shrinkage > 0.0 && shrinkage <= 1.0)) throw InvalidInput("boosting: shrinkage must lie in (0, 1]");
        if (!(residual_tol >= 0.0)) throw InvalidInput("boosting: residual_tol must be nonnegative");
    }
};

inline std::string_view to_string(Variant v) {
    switch (v) {
        case Variant::PGA: return "ba";
        case Variant::PostPGA: return "post-ba";
        case Variant::OGA: return "oba";
    }
    return "?";
}

inline std::string_view display_label(Variant v) {
    switch (v) {
        case Variant::PGA: return "BA";
        case Variant::PostPGA: return "post-BA";
        case Variant::OGA: return "oBA";
    }
    return "?";
}

inline std::optional<Variant> parse_variant(std::string_view s) {
    if (s == "ba" || s == "pga") return Variant::PGA;
    if (s == "post-ba" || s == "postpga" || s == "post-pga") return Variant::PostPGA;
    if (s == "oba" || s == "oga") return Variant::OGA;
    return std::nullopt;
}

inline std::string_view to_string(StopRule r) {
    switch (r) {
        case StopRule::FixedM: return "fixed";
        case StopRule::Aicc: return "aicc";
        case StopRule::ResidualTol: return "tol";
    }
    return "?";
}

inline std::optional<StopRule> parse_stop_rule(std::string_view s) {
    if (s == "fixed") return StopRule::FixedM;
    if (s == "aicc") return StopRule::Aicc;
    if (s == "tol") return StopRule::ResidualTol;
    return std::nullopt;
}

struct BoostingFit {
    Variant variant = Variant::PGA;
    std::vector<std::size_t> path;      ///< selected column per step
    std::vector<double> gammas;         ///< unshrunk step coefficient per step (PGA only)
    Vector beta_std;                    ///< standardized scale
    Vector beta_orig;                   ///< original scale
    double intercept = 0.0;
    std::vector<double> residual_norms; ///< squared residual norm after 0..m_star steps
    std::size_t m_star = 0;
    std::vector<std::size_t> support;   ///< distinct entries of path, ascending
};

/// One componentwise least-squares step.
struct GreedyStep {
    std::size_t column = 0;
    double gamma = 0.0;        ///< <U, X_j> / <X_j, X_j>
    double abs_corr = 0.0;     ///< |corr(U, X_j)|
};

namespace detail {

// Candidates whose |corr| is within this relative window of the best are ties.
inline constexpr double kTieWindow = 1e-12;
// Below this |corr| the residual is treated as orthogonal to the column.
inline constexpr double kZeroCorrelation = 1e-12;
// RSS below this fraction of the initial RSS is an exact fit; what remains is rounding.
inline constexpr double kExactFit = 1e-24;

inline bool exact_fit(const std::vector<double>& residual_norms) {
    return residual_norms.back() <= kExactFit * residual_norms.front();
}

inline std::vector<std::size_t> distinct_sorted(std::vector<std::size_t> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

}  // namespace detail

/// Column maximizing |corr(U, X_j)| over candidates; lowest index wins ties.
/// Returns nullopt when every candidate is uncorrelated with U.
inline std::optional<GreedyStep> best_column(const Vector& U, const Matrix& X, const std::vector<bool>& candidate) {
    const double u_norm = U.norm();
    if (!(u_norm > 0.0)) return std::nullopt;
    const Vector inner = X.transpose() * U;
    std::optional<GreedyStep> best;
    for (Index j = 0; j < X.cols(); ++j) {
        if (!candidate[static_cast<std::size_t>(j)]) continue;
        const double sq = X.col(j).squaredNorm();
        if (!(sq > 0.0)) continue;
        const double corr = std::abs(inner(j)) / (std::sqrt(sq) * u_norm);
        if (corr <= detail::kZeroCorrelation) continue;
        if (!best || corr > best->abs_corr * (1.0 + detail::kTieWindow)) {
            best = GreedyStep{static_cast<std::size_t>(j), inner(j) / sq, corr};
        }
    }
    return best;
}

/// Selection step of componentwise L2Boosting. Throws NoDescentDirection when
/// U is orthogonal to every active column.
inline GreedyStep pga_step(const Vector& U, const Matrix& X, const std::vector<bool>& candidate) {
    if (U.size() != X.rows()) throw InvalidInput("pga_step: residual length does not match design rows");
    if (!U.allFinite()) throw InvalidInput("pga_step: non-finite residual");
    if (auto step = best_column(U, X, candidate)) return *step;
    throw NoDescentDirection();
}

inline GreedyStep pga_step(const Vector& U, const Matrix& X) {
    return pga_step(U, X, std::vector<bool>(static_cast<std::size_t>(X.cols()), true));
}

/// Corrected AIC, n log(RSS/n) + 2 k n / (n - k - 1); +inf once k >= n - 1.
inline double aicc_score(double rss, std::size_t k, std::size_t n) {
    const double dn = static_cast<double>(n);
    const double dk = static_cast<double>(k);
    if (dk >= dn - 1.0) return std::numeric_limits<double>::infinity();
    const double fit = rss > 0.0 ? dn * std::log(rss / dn) : -std::numeric_limits<double>::infinity();
    return fit + 2.0 * dk * dn / (dn - dk - 1.0);
}

/// True when the last step raised the AICc score; k counts the intercept.
inline bool aicc_increased(std::span<const double> residual_norms, std::span<const std::size_t> support_sizes,
                           std::size_t n) {
    const std::size_t m = residual_norms.size();
    if (m < 2) return false;
    const double prev = aicc_score(residual_norms[m - 2], support_sizes[m - 2] + 1, n);
    const double curr = aicc_score(residual_norms[m - 1], support_sizes[m - 1] + 1, n);
    return curr > prev;
}

/// Whether boosting should stop after the last recorded step.
///
/// `residual_norms[m]` and `support_sizes[m]` describe the iterate after m
/// steps, so the path length is `residual_norms.size() - 1`. The m_max cap
/// applies under every rule.
inline bool stop_decision(std::span<const double> residual_norms, std::span<const std::size_t> support_sizes,
                          const BoostingConfig& cfg, std::size_t n) {
    if (residual_norms.empty()) throw InvalidInput("stop_decision: empty residual sequence");
    if (support_sizes.size() != residual_norms.size()) {
        throw InvalidInput("stop_decision: support_sizes and residual_norms differ in length");
    }
    const std::size_t path_len = residual_norms.size() - 1;
    if (path_len >= cfg.m_max) return true;
    if (path_len == 0) return false;
    switch (cfg.stop_rule) {
        case StopRule::FixedM:
            return false;
        case StopRule::ResidualTol: {
            const double prev = residual_norms[path_len - 1];
            const double curr = residual_norms[path_len];
            if (!(prev > 0.0)) return true;
            return (prev - curr) / prev < cfg.residual_tol;
        }
        case StopRule::Aicc:
            return aicc_increased(residual_norms, support_sizes, n);
    }
    return true;
}

namespace detail {

inline void finalize(BoostingFit& fit, const DesignData& data, Vector beta_std) {
    fit.m_star = fit.path.size();
    fit.support = distinct_sorted(fit.path);
    RestrictedFit mapped = to_original_scale(data, std::move(beta_std));
    fit.beta_std = std::move(mapped.beta_std);
    fit.beta_orig = std::move(mapped.beta_orig);
    fit.intercept = mapped.intercept;
}

}  // namespace detail

/// Componentwise L2Boosting with step length shrinkage * gamma.
/// For Variant::PostPGA the final coefficients are the OLS refit on the selected support.
inline BoostingFit fit_pga(const DesignData& data, const BoostingConfig& cfg) {
    cfg.validate();
    if (cfg.variant == Variant::OGA) throw InvalidInput("fit_pga: configured variant is OGA");

    const auto n = static_cast<std::size_t>(data.n());
    BoostingFit fit;
    fit.variant = cfg.variant;
    Vector U = data.y;
    Vector beta = Vector::Zero(data.p());
    std::vector<std::size_t> times_selected(static_cast<std::size_t>(data.p()), 0);
    std::vector<std::size_t> support_sizes{0};
    std::size_t distinct = 0;
    fit.residual_norms.push_back(U.squaredNorm());

    while (fit.path.size() < cfg.m_max && !detail::exact_fit(fit.residual_norms)) {
        const auto step = best_column(U, data.X, data.active);
        if (!step) break;
        const double length = cfg.shrinkage * step->gamma;
        const auto j = static_cast<Index>(step->column);
        beta(j) += length;
        U.noalias() -= length * data.X.col(j);
        if (times_selected[step->column]++ == 0) ++distinct;

        fit.path.push_back(step->column);
        fit.gammas.push_back(step->gamma);
        fit.residual_norms.push_back(U.squaredNorm());
        support_sizes.push_back(distinct);

        // a step too small to lower the RSS in floating point means the
        // greedy search has stalled; drop it like an AICc increase
        const bool stalled = !(fit.residual_norms.back() < fit.residual_norms[fit.residual_norms.size() - 2]);
        if (stalled || (cfg.stop_rule == StopRule::Aicc && aicc_increased(fit.residual_norms, support_sizes, n))) {
            // keep the local minimum
            beta(j) -= length;
            U.noalias() += length * data.X.col(j);
            if (--times_selected[step->column] == 0) --distinct;
            fit.path.pop_back();
            fit.gammas.pop_back();
            fit.residual_norms.pop_back();
            support_sizes.pop_back();
            break;
        }
        if (stop_decision(fit.residual_norms, support_sizes, cfg, n)) break;
    }

    if (cfg.variant == Variant::PostPGA) {
        const auto support = detail::distinct_sorted(fit.path);
        Vector refit = post_ols(data, support).beta_std;
        detail::finalize(fit, data, std::move(refit));
    } else {
        detail::finalize(fit, data, std::move(beta));
    }
    return fit;
}

/// Orthogonal L2Boosting: after each selection the fit is the projection of y
/// onto all columns selected so far. A column is never selected twice.
inline BoostingFit fit_oga(const DesignData& data, const BoostingConfig& cfg) {
    cfg.validate();
    if (cfg.variant != Variant::OGA) throw InvalidInput("fit_oga: configured variant is not OGA");

    const auto n = static_cast<std::size_t>(data.n());
    BoostingFit fit;
    fit.variant = cfg.variant;
    Vector U = data.y;
    Vector coef;
    std::vector<bool> candidate = data.active;
    std::vector<std::size_t> support_sizes{0};
    fit.residual_norms.push_back(U.squaredNorm());

    while (fit.path.size() < cfg.m_max && fit.path.size() < n && !detail::exact_fit(fit.residual_norms)) {
        const auto step = best_column(U, data.X, candidate);
        if (!step) break;
        fit.path.push_back(step->column);
        candidate[step->column] = false;

        const Matrix selected = gather_columns(data.X, fit.path);
        Vector next_coef;
        try {
            next_coef = least_squares(selected, data.y, fit.path);
        } catch (const RankDeficient& e) {
            throw RankDeficient(std::string("degenerate selection: ") + e.what(), e.columns());
        }
        Vector next_U = data.y - selected * next_coef;

        fit.residual_norms.push_back(next_U.squaredNorm());
        support_sizes.push_back(fit.path.size());
        const bool stalled = !(fit.residual_norms.back() < fit.residual_norms[fit.residual_norms.size() - 2]);
        if (stalled || (cfg.stop_rule == StopRule::Aicc && aicc_increased(fit.residual_norms, support_sizes, n))) {
            fit.path.pop_back();
            fit.residual_norms.pop_back();
            support_sizes.pop_back();
            break;
        }
        coef = std::move(next_coef);
        U = std::move(next_U);
        if (stop_decision(fit.residual_norms, support_sizes, cfg, n)) break;
    }

    Vector beta = Vector::Zero(data.p());
    for (std::size_t k = 0; k < fit.path.size(); ++k) beta(static_cast<Index>(fit.path[k])) = coef(static_cast<Index>(k));
    detail::finalize(fit, data, std::move(beta));
    return fit;
}

/// Dispatches on cfg.variant.
inline BoostingFit fit(const DesignData& data, const BoostingConfig& cfg) {
    return cfg.variant == Variant::OGA ? fit_oga(data, cfg) : fit_pga(data, cfg);
}

/// intercept + X_new * beta_orig.
inline Vector predict(const BoostingFit& fit, const Matrix& X_new) {
    if (X_new.cols() != fit.beta_orig.size()) {
        throw InvalidInput("predict: expected " + std::to_string(fit.beta_orig.size()) + " columns, got " +
                           std::to_string(X_new.cols()));
    }
    if (!X_new.allFinite()) throw InvalidInput("predict: non-finite entries");
    return (X_new * fit.beta_orig).array() + fit.intercept;
}

/// In-sample fitted values on the original scale.
inline Vector fitted_values(const BoostingFit& fit, const DesignData& data) {
    return (data.X * fit.beta_std).array() + data.y_mean;
}

}  // namespace l2boost
