#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <Eigen/Dense>

#include "l2boost/boosting.hpp"
#include "l2boost/design.hpp"
#include "l2boost/errors.hpp"
#include "l2boost/ols.hpp"

namespace l2boost {

struct IVEstimate {
    double beta_hat = 0.0;
    double se = 0.0;
    std::vector<std::size_t> first_stage_support;
    std::size_t m_star = 0;
};

struct TEEstimate {
    double alpha_hat = 0.0;
    double se = 0.0;
    std::vector<std::size_t> support_y;
    std::vector<std::size_t> support_d;
    std::vector<std::size_t> support_union;
    std::size_t m_star_y = 0;
    std::size_t m_star_d = 0;
};

/// z_{1 - level/2} of the standard normal.
inline double normal_critical_value(double level) {
    if (!(level > 0.0 && level < 1.0)) throw InvalidInput("critical value: level must lie in (0, 1)");
    static const boost::math::normal_distribution<double> standard;
    return boost::math::quantile(standard, 1.0 - level / 2.0);
}

/// Two-sided test: |estimate - null| / se > z_{1 - level/2}.
inline bool reject_null(double estimate_value, double se, double null_value, double level = 0.05) {
    if (!(se > 0.0)) throw InvalidInput("reject_null: se must be positive");
    return std::abs(estimate_value - null_value) / se > normal_critical_value(level);
}

/// 2SLS with instruments d_hat from the given (fitted) first stage. Inner
/// products use centered variables; sigma_e^2 has divisor n.
inline IVEstimate iv_from_first_stage(const Vector& y, const Vector& d, const Vector& d_hat) {
    const Index n = y.size();
    if (d.size() != n || d_hat.size() != n) throw InvalidInput("iv: y, d and d_hat differ in length");
    const Vector yc = y.array() - y.mean();
    const Vector dc = d.array() - d.mean();
    const Vector hc = d_hat.array() - d_hat.mean();
    const double hd = hc.dot(dc);
    const double hh = hc.squaredNorm();
    if (!(hd > 0.0) || !(hh > 0.0)) throw WeakFirstStage("iv: first-stage predictions carry no signal for d", 0);
    IVEstimate out;
    out.beta_hat = hc.dot(yc) / hd;
    const double sigma2 = (yc - out.beta_hat * dc).squaredNorm() / static_cast<double>(n);
    out.se = std::sqrt(sigma2 / hh);
    return out;
}

/// IV estimate of y on d where the first stage d ~ Z is fit by boosting.
inline IVEstimate iv_estimate(const Vector& y, const Vector& d, const Matrix& Z, const BoostingConfig& cfg) {
    const Index n = Z.rows();
    if (y.size() != n || d.size() != n) throw InvalidInput("iv_estimate: y, d and Z differ in rows");
    if (n < 2) throw InvalidInput("iv_estimate: need at least 2 observations");

    const DesignData data = standardize(d, Z);
    const BoostingFit first = fit(data, cfg);
    if (first.support.empty()) throw WeakFirstStage("iv_estimate: empty first stage (0 instruments selected)", 0);

    IVEstimate out;
    try {
        out = iv_from_first_stage(y, d, fitted_values(first, data));
    } catch (const WeakFirstStage&) {
        throw WeakFirstStage("iv_estimate: weak first stage with " + std::to_string(first.support.size()) +
                                 " selected instruments",
                             first.support.size());
    }
    out.first_stage_support = first.support;
    out.m_star = first.m_star;
    return out;
}

/// Classical OLS covariance s^2 (A'A)^{-1}, s^2 = e'e / (n - k).
inline Matrix classical_covariance(const Matrix& A, const Vector& residuals) {
    const double n = static_cast<double>(A.rows());
    const double k = static_cast<double>(A.cols());
    const Matrix bread = (A.transpose() * A).inverse();
    return residuals.squaredNorm() / (n - k) * bread;
}

/// HC1 sandwich: n/(n-k) (A'A)^{-1} A' diag(e^2) A (A'A)^{-1}.
inline Matrix hc1_covariance(const Matrix& A, const Vector& residuals) {
    const double n = static_cast<double>(A.rows());
    const double k = static_cast<double>(A.cols());
    if (!(n > k)) throw InvalidInput("hc1_covariance: need more observations than regressors");
    const Matrix bread = (A.transpose() * A).inverse();
    const Matrix meat = A.transpose() * residuals.array().square().matrix().asDiagonal() * A;
    return n / (n - k) * bread * meat * bread;
}

/// OLS of y on (1, d, X[:, controls]); returns the coefficient on d and its HC1 se.
inline TEEstimate treatment_ols(const Vector& y, const Vector& d, const Matrix& X,
                                const std::vector<std::size_t>& controls) {
    const Index n = X.rows();
    const auto k = static_cast<Index>(controls.size()) + 2;
    if (n <= k) {
        throw RankDeficient("double selection: " + std::to_string(controls.size()) +
                                " selected controls leave no residual degrees of freedom at n = " + std::to_string(n),
                            {});
    }
    Matrix A(n, k);
    A.col(0).setOnes();
    A.col(1) = d;
    for (std::size_t c = 0; c < controls.size(); ++c) A.col(static_cast<Index>(c) + 2) = X.col(static_cast<Index>(controls[c]));

    // labels: intercept and treatment are reported as p and p+1
    std::vector<std::size_t> labels{static_cast<std::size_t>(X.cols()), static_cast<std::size_t>(X.cols()) + 1};
    labels.insert(labels.end(), controls.begin(), controls.end());
    const Vector coef = least_squares(A, y, labels);
    const Vector residuals = y - A * coef;

    TEEstimate out;
    out.alpha_hat = coef(1);
    out.se = std::sqrt(hc1_covariance(A, residuals)(1, 1));
    out.support_union = controls;
    return out;
}

/// Double selection: boost y on X and d on X, then OLS of y on d and the union of selected controls.
inline TEEstimate double_selection(const Vector& y, const Vector& d, const Matrix& X, const BoostingConfig& cfg) {
    const Index n = X.rows();
    if (y.size() != n || d.size() != n) throw InvalidInput("double_selection: y, d and X differ in rows");

    const BoostingFit fit_y = fit(standardize(y, X), cfg);
    const BoostingFit fit_d = fit(standardize(d, X), cfg);

    std::vector<std::size_t> joint;
    std::set_union(fit_y.support.begin(), fit_y.support.end(), fit_d.support.begin(), fit_d.support.end(),
                   std::back_inserter(joint));

    TEEstimate out = treatment_ols(y, d, X, joint);
    out.support_y = fit_y.support;
    out.support_d = fit_d.support;
    out.m_star_y = fit_y.m_star;
    out.m_star_d = fit_d.m_star;
    return out;
}

}  // namespace l2boost
