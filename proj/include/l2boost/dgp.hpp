#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include <Eigen/Dense>

#include "l2boost/design.hpp"
#include "l2boost/errors.hpp"
#include "l2boost/rng.hpp"

namespace l2boost::dgp {

/// Many-instrument IV design: y = beta d + e, d = Z Pi + v.
struct DgpConfigIV {
    std::size_t n = 100;
    std::size_t p = 100;
    std::size_t s = 5;
    double mu = 180.0;       ///< target concentration parameter
    double rho = 0.5;        ///< Corr(z_h, z_j) = rho^|j-h|
    double corr_ev = 0.6;
    double beta_true = 1.0;
    double sigma_e = 1.0;

    void validate() const {
        if (n < 2) throw InvalidInput("iv dgp: n must be at least 2");
        if (p < 1) throw InvalidInput("iv dgp: p must be at least 1");
        if (s < 1 || s > p) throw InvalidInput("iv dgp: need 1 <= s <= p");
        if (!(mu > 0.0)) throw InvalidInput("iv dgp: mu must be positive");
        if (!(std::abs(rho) < 1.0)) throw InvalidInput("iv dgp: |rho| must be below 1");
        if (!(std::abs(corr_ev) < 1.0)) throw InvalidInput("iv dgp: |corr_ev| must be below 1");
        if (!(sigma_e > 0.0)) throw InvalidInput("iv dgp: sigma_e must be positive");
        if (!std::isfinite(beta_true)) throw InvalidInput("iv dgp: beta_true must be finite");
    }
};

/// High-dimensional controls: y = alpha0 d + X theta + xi, d = X theta + nu,
/// theta_j = 1 / j^decay_exponent.
struct DgpConfigTE {
    std::size_t n = 100;
    std::size_t p = 200;
    double alpha0 = 0.5;
    double rho = 0.5;
    double decay_exponent = 2.0;  ///< +inf keeps only theta_1 = 1

    void validate() const {
        if (n < 2) throw InvalidInput("te dgp: n must be at least 2");
        if (p < 1) throw InvalidInput("te dgp: p must be at least 1");
        if (!std::isfinite(alpha0)) throw InvalidInput("te dgp: alpha0 must be finite");
        if (!(std::abs(rho) < 1.0)) throw InvalidInput("te dgp: |rho| must be below 1");
        if (!(decay_exponent > 0.0)) throw InvalidInput("te dgp: decay_exponent must be positive");
    }
};

struct IvSample {
    Vector y;
    Vector d;
    Matrix Z;
    Vector e;  ///< structural error, kept for diagnostics
    Vector v;  ///< first-stage error
};

struct TeSample {
    Vector y;
    Vector d;
    Matrix X;
};

struct FirstStage {
    double C = 0.0;
    double sigma_v2 = 0.0;
    Vector Pi;
    double q = 0.0;  ///< Pi_tilde' Sigma_Z Pi_tilde
};

/// Sigma[h][j] = rho^|j-h|.
inline Matrix ar1_covariance(std::size_t p, double rho) {
    if (p < 1) throw InvalidInput("ar1_covariance: p must be at least 1");
    if (!(std::abs(rho) < 1.0)) throw InvalidInput("ar1_covariance: |rho| must be below 1");
    const auto dim = static_cast<Index>(p);
    Matrix sigma(dim, dim);
    for (Index h = 0; h < dim; ++h) {
        for (Index j = 0; j < dim; ++j) sigma(h, j) = std::pow(rho, static_cast<double>(std::abs(j - h)));
    }
    return sigma;
}

/// Lower Cholesky factor; throws if `sigma` is not positive definite.
inline Matrix cholesky_factor(const Matrix& sigma) {
    Eigen::LLT<Matrix> llt(sigma);
    if (llt.info() != Eigen::Success) throw InvalidInput("cholesky_factor: matrix is not positive definite");
    return llt.matrixL();
}

/// n rows distributed N(0, L L'). Draws are consumed row-major: row i takes
/// normals i*p .. i*p + p - 1.
inline Matrix chol_sample(const Matrix& L, std::size_t n, Stream& rng) {
    const Index p = L.rows();
    Matrix E(static_cast<Index>(n), p);
    for (Index i = 0; i < E.rows(); ++i) {
        for (Index j = 0; j < p; ++j) E(i, j) = rng.normal();
    }
    return E * L.transpose().triangularView<Eigen::Upper>();
}

/// Scales Pi_tilde = (1,...,1,0,...,0) so the concentration parameter
/// n Pi' Sigma_Z Pi / sigma_v^2 equals mu while Var(d) = Pi' Sigma_Z Pi + sigma_v^2 = 1.
inline FirstStage calibrate_first_stage(const DgpConfigIV& cfg) {
    cfg.validate();
    // q is the sum of the leading s x s block of Sigma_Z
    double q = 0.0;
    for (std::size_t h = 0; h < cfg.s; ++h) {
        for (std::size_t j = 0; j < cfg.s; ++j) {
            const double lag = static_cast<double>(h > j ? h - j : j - h);
            q += std::pow(cfg.rho, lag);
        }
    }
    if (!(q > 0.0)) throw InvalidInput("calibrate_first_stage: Pi_tilde' Sigma_Z Pi_tilde is not positive");
    const double n = static_cast<double>(cfg.n);
    const double share = cfg.mu / (n + cfg.mu);
    FirstStage out;
    out.q = q;
    out.C = std::sqrt(share / q);
    out.sigma_v2 = 1.0 - out.C * out.C * q;
    if (!(out.sigma_v2 > 0.0)) throw InvalidInput("calibrate_first_stage: implied sigma_v^2 is not positive");
    out.Pi = Vector::Zero(static_cast<Index>(cfg.p));
    out.Pi.head(static_cast<Index>(cfg.s)).setConstant(out.C);
    return out;
}

/// Draw order: Z (row-major), then (e_i, w_i) pairs for i = 1..n.
inline IvSample gen_iv(const DgpConfigIV& cfg, Stream& rng) {
    const FirstStage fs = calibrate_first_stage(cfg);
    const Matrix L = cholesky_factor(ar1_covariance(cfg.p, cfg.rho));
    const auto n = static_cast<Index>(cfg.n);

    IvSample out;
    out.Z = chol_sample(L, cfg.n, rng);
    out.e.resize(n);
    out.v.resize(n);
    // v = (sigma_ev / sigma_e^2) e + w, w ~ N(0, sigma_v^2 - sigma_ev^2 / sigma_e^2)
    const double sigma_e2 = cfg.sigma_e * cfg.sigma_e;
    const double sigma_ev = cfg.corr_ev * cfg.sigma_e * std::sqrt(fs.sigma_v2);
    const double slope = sigma_ev / sigma_e2;
    const double w_sd = std::sqrt(fs.sigma_v2 - sigma_ev * sigma_ev / sigma_e2);
    for (Index i = 0; i < n; ++i) {
        out.e(i) = cfg.sigma_e * rng.normal();
        out.v(i) = slope * out.e(i) + w_sd * rng.normal();
    }
    out.d = out.Z * fs.Pi + out.v;
    out.y = cfg.beta_true * out.d + out.e;
    return out;
}

/// theta_j = 1 / j^decay_exponent, j = 1..p.
inline Vector te_coefficients(const DgpConfigTE& cfg) {
    Vector theta(static_cast<Index>(cfg.p));
    for (Index j = 0; j < theta.size(); ++j) theta(j) = 1.0 / std::pow(static_cast<double>(j + 1), cfg.decay_exponent);
    return theta;
}

/// Draw order: X (row-major), then (xi_i, nu_i) pairs for i = 1..n.
inline TeSample gen_te(const DgpConfigTE& cfg, Stream& rng) {
    cfg.validate();
    const Matrix L = cholesky_factor(ar1_covariance(cfg.p, cfg.rho));
    const Vector theta = te_coefficients(cfg);
    const auto n = static_cast<Index>(cfg.n);

    TeSample out;
    out.X = chol_sample(L, cfg.n, rng);
    Vector xi(n), nu(n);
    for (Index i = 0; i < n; ++i) {
        xi(i) = rng.normal();
        nu(i) = rng.normal();
    }
    const Vector signal = out.X * theta;
    out.d = signal + nu;
    out.y = cfg.alpha0 * out.d + signal + xi;
    return out;
}

}  // namespace l2boost::dgp
