#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "l2boost/errors.hpp"

namespace l2boost {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Response and design after centering and scaling.
///
/// Columns of `X` have empirical mean zero and empirical second moment one
/// (divisor n). Constant columns are kept in place as zero columns with
/// `active[j] == false`, so column indices always refer to the caller's
/// original design. `y` is centered but not scaled.
struct DesignData {
    Vector y;
    Matrix X;
    Vector col_means;
    Vector col_scales;  // 1.0 for constant columns
    std::vector<bool> active;
    double y_mean = 0.0;

    Index n() const noexcept { return X.rows(); }
    Index p() const noexcept { return X.cols(); }

    std::size_t active_count() const noexcept {
        std::size_t k = 0;
        for (bool a : active) k += a ? 1 : 0;
        return k;
    }
};

namespace detail {

// Relative threshold below which a column's spread is treated as zero.
inline constexpr double kConstantColumnTol = 1e-12;

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
    return m.allFinite();
}

}  // namespace detail

/// Centers y and centers/scales every column of X (population sd, divisor n).
inline DesignData standardize(const Vector& y_raw, const Matrix& X_raw) {
    const Index n = X_raw.rows();
    const Index p = X_raw.cols();
    if (y_raw.size() != n) {
        throw InvalidInput("standardize: y has " + std::to_string(y_raw.size()) + " rows but X has " +
                           std::to_string(n));
    }
    if (n < 2) throw InvalidInput("standardize: need at least 2 observations");
    if (p < 1) throw InvalidInput("standardize: design has no columns");
    if (!detail::all_finite(X_raw) || !detail::all_finite(y_raw)) {
        throw InvalidInput("standardize: non-finite entries in y or X");
    }

    DesignData out;
    out.y_mean = y_raw.mean();
    out.y = y_raw.array() - out.y_mean;
    out.col_means = X_raw.colwise().mean().transpose();
    out.col_scales = Vector::Ones(p);
    out.X.resize(n, p);
    out.active.assign(static_cast<std::size_t>(p), false);

    const double dn = static_cast<double>(n);
    for (Index j = 0; j < p; ++j) {
        Vector centered = X_raw.col(j).array() - out.col_means(j);
        const double sd = std::sqrt(centered.squaredNorm() / dn);
        const double magnitude = X_raw.col(j).cwiseAbs().maxCoeff();
        if (sd <= detail::kConstantColumnTol * std::max(magnitude, 1.0)) {
            out.X.col(j).setZero();
            continue;
        }
        out.col_scales(j) = sd;
        out.X.col(j) = centered / sd;
        out.active[static_cast<std::size_t>(j)] = true;
    }
    if (out.active_count() == 0) throw InvalidInput("standardize: every column of X is constant");
    return out;
}

}  // namespace l2boost
