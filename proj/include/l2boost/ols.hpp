#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "l2boost/design.hpp"
#include "l2boost/errors.hpp"

namespace l2boost {

/// Relative pivot tolerance for column-pivoted QR solves.
inline constexpr double kPivotTolerance = 1e-12;

/// Copies the listed columns of `X` into a dense matrix, in the given order.
inline Matrix gather_columns(const Matrix& X, std::span<const std::size_t> columns) {
    Matrix out(X.rows(), static_cast<Index>(columns.size()));
    for (std::size_t k = 0; k < columns.size(); ++k) out.col(static_cast<Index>(k)) = X.col(static_cast<Index>(columns[k]));
    return out;
}

/// Least-squares coefficients of y on the columns of A via column-pivoted QR.
///
/// Throws RankDeficient when a pivot falls below kPivotTolerance relative to
/// the largest one. `labels[k]` names column k of A in the error; when empty,
/// positions within A are reported.
inline Vector least_squares(const Matrix& A, const Vector& y, std::span<const std::size_t> labels = {}) {
    if (A.cols() == 0) return Vector();
    if (A.rows() < A.cols()) {
        throw RankDeficient("least squares: " + std::to_string(A.cols()) + " columns exceed " +
                                std::to_string(A.rows()) + " observations",
                            {});
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(A);
    qr.setThreshold(kPivotTolerance);
    if (qr.rank() < A.cols()) {
        std::vector<std::size_t> offending;
        std::string names;
        const auto& perm = qr.colsPermutation().indices();
        for (Index k = qr.rank(); k < A.cols(); ++k) {
            const auto pos = static_cast<std::size_t>(perm(k));
            const std::size_t id = labels.empty() ? pos : labels[pos];
            offending.push_back(id);
            names += (names.empty() ? "" : ", ") + std::to_string(id);
        }
        throw RankDeficient("least squares: design is rank deficient; dependent columns: " + names,
                            std::move(offending));
    }
    return qr.solve(y);
}

/// Result of an OLS refit restricted to a support.
struct RestrictedFit {
    Vector beta_std;   ///< length p, standardized scale, zero off support
    Vector beta_orig;  ///< length p, original scale
    double intercept = 0.0;
};

/// Maps standardized coefficients back to the original scale of `data`.
inline RestrictedFit to_original_scale(const DesignData& data, Vector beta_std) {
    RestrictedFit out;
    out.beta_orig = beta_std.cwiseQuotient(data.col_scales);
    out.intercept = data.y_mean - data.col_means.dot(out.beta_orig);
    out.beta_std = std::move(beta_std);
    return out;
}

/// OLS of y restricted to `support`; coefficients outside the support are zero.
inline RestrictedFit post_ols(const DesignData& data, std::span<const std::size_t> support) {
    for (std::size_t j : support) {
        if (j >= static_cast<std::size_t>(data.p())) throw InvalidInput("post_ols: support index out of range");
        if (!data.active[j]) {
            throw RankDeficient("post_ols: column " + std::to_string(j) + " is constant", {j});
        }
    }
    if (support.size() > static_cast<std::size_t>(data.n())) {
        throw RankDeficient("post_ols: support larger than sample size", {});
    }
    Vector beta = Vector::Zero(data.p());
    if (!support.empty()) {
        const Vector coef = least_squares(gather_columns(data.X, support), data.y, support);
        for (std::size_t k = 0; k < support.size(); ++k) beta(static_cast<Index>(support[k])) = coef(static_cast<Index>(k));
    }
    return to_original_scale(data, std::move(beta));
}

}  // namespace l2boost
