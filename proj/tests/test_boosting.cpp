#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "l2boost/boosting.hpp"
#include "oracles.hpp"

using namespace l2boost;
using Catch::Approx;

namespace {

BoostingConfig fixed_steps(Variant v, std::size_t m) {
    BoostingConfig cfg;
    cfg.variant = v;
    cfg.stop_rule = StopRule::FixedM;
    cfg.m_max = m;
    return cfg;
}

// Correlated 10 x 3 design (columns share a common factor).
Matrix correlated_10x3() {
    Matrix X(10, 3);
    X << 0.3, 0.5, -1.2,
         1.1, 0.9, 0.4,
        -0.7, -0.2, -0.9,
         2.0, 1.4, 1.6,
        -1.5, -1.1, 0.2,
         0.4, 0.8, -0.3,
        -0.2, 0.1, 0.7,
         1.3, 0.6, 1.1,
        -0.9, -1.3, -1.4,
         0.6, 0.2, 0.5;
    return X;
}

Vector response_10() {
    Vector y(10);
    y << 1.0, 2.1, -1.3, 3.9, -2.2, 0.7, 0.4, 2.6, -2.5, 0.9;
    return y;
}

}  // namespace

TEST_CASE("pga_step: exact recovery in an orthonormal design", "[boosting][pga_step]") {
    const Matrix X = oracle::orthonormal_design(9, 8, 11);
    const Vector U = 2.0 * X.col(3);
    const GreedyStep step = pga_step(U, X);
    REQUIRE(step.column == 3);
    REQUIRE(step.gamma == Approx(2.0).epsilon(1e-12));
    REQUIRE(step.abs_corr == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("pga_step: residual orthogonal to every column has no descent direction", "[boosting][pga_step]") {
    const Matrix full = oracle::orthonormal_design(9, 8, 12);
    REQUIRE_THROWS_AS(pga_step(full.col(7), full.leftCols(4)), NoDescentDirection);
    // constant vector is orthogonal to every centered column
    REQUIRE_THROWS_AS(pga_step(Vector::Ones(9), full), NoDescentDirection);
    REQUIRE_THROWS_AS(pga_step(Vector::Zero(9), full), NoDescentDirection);
}

TEST_CASE("pga_step: ties go to the lowest index", "[boosting][pga_step]") {
    Matrix X(6, 4);
    X << 0.2, 1.0, -0.4, 0.0,
         1.3, -0.5, 0.8, 0.0,
        -0.6, 0.3, 1.1, 0.0,
         0.9, 0.7, -0.9, 0.0,
        -1.4, -1.2, 0.1, 0.0,
         0.5, 0.2, -0.3, 0.0;
    X.col(3) = -X.col(1);  // mirror: |corr| identical to the last bit
    X = standardize(Vector::LinSpaced(6, 0, 5), X).X;
    Vector U(6);
    U << 0.1, -2.0, 1.0, 0.5, -1.0, 1.4;

    // exhaustive scan for the maximal |corr| and all columns attaining it
    const auto rows = oracle::to_rows(X);
    std::vector<double> corr(4);
    for (std::size_t j = 0; j < 4; ++j) {
        double xu = 0, xx = 0;
        for (std::size_t i = 0; i < 6; ++i) {
            xu += rows[i][j] * U(static_cast<Index>(i));
            xx += rows[i][j] * rows[i][j];
        }
        corr[j] = std::abs(xu) / std::sqrt(xx);
    }
    const double best = *std::max_element(corr.begin(), corr.end());
    REQUIRE(corr[1] == best);
    REQUIRE(corr[3] == best);

    const GreedyStep step = pga_step(U, X);
    REQUIRE(step.column == 1);
}

TEST_CASE("fit_pga: one exact step on an orthonormal design", "[boosting][fit_pga]") {
    const Matrix X = oracle::orthonormal_design(9, 8, 21);
    const Vector y = 2.0 * X.col(3);
    const DesignData data = standardize(y, X);
    const BoostingFit f = fit_pga(data, fixed_steps(Variant::PGA, 10));
    REQUIRE(f.path == std::vector<std::size_t>{3});
    REQUIRE(f.m_star == 1);
    REQUIRE(f.residual_norms.back() < 1e-20);
    REQUIRE(f.beta_std(3) == Approx(2.0).epsilon(1e-12));
}

TEST_CASE("fit_pga: shrinkage 0.5 halves the remaining coefficient each step", "[boosting][fit_pga]") {
    const Matrix X = oracle::orthonormal_design(9, 8, 21);
    const Vector y = 2.0 * X.col(3);
    const DesignData data = standardize(y, X);
    BoostingConfig cfg = fixed_steps(Variant::PGA, 6);
    cfg.shrinkage = 0.5;
    const BoostingFit f = fit_pga(data, cfg);
    REQUIRE(f.path == std::vector<std::size_t>(6, 3));
    const double rss0 = f.residual_norms[0];
    for (std::size_t m = 0; m <= 6; ++m) {
        // remaining coefficient 2 * 0.5^m, so RSS_m = RSS_0 * 0.25^m
        REQUIRE(f.residual_norms[m] == Approx(rss0 * std::pow(0.25, static_cast<double>(m))).epsilon(1e-10));
    }
    REQUIRE(f.beta_std(3) == Approx(2.0 * (1.0 - std::pow(0.5, 6))).epsilon(1e-12));
}

TEST_CASE("fit_pga: three steps on a correlated design match a loop-level re-implementation", "[boosting][fit_pga]") {
    const Matrix X = correlated_10x3();
    const Vector y = response_10();

    // oracle standardization and boosting, both independent of the library
    const auto raw = oracle::to_rows(X);
    oracle::Mat Xs = raw;
    for (std::size_t j = 0; j < 3; ++j) {
        const auto [m, sd] = oracle::mean_sd(raw, j);
        for (auto& r : Xs) r[j] = (r[j] - m) / sd;
    }
    oracle::Vec yc = oracle::to_vec(y);
    const double ym = y.mean();
    for (double& v : yc) v -= ym;
    const auto ref = oracle::naive_pga(Xs, yc, 3);

    const BoostingFit f = fit_pga(standardize(y, X), fixed_steps(Variant::PGA, 3));
    REQUIRE(f.path == ref.path);
    for (std::size_t j = 0; j < 3; ++j) REQUIRE(f.beta_std(static_cast<Index>(j)) == Approx(ref.beta[j]).margin(1e-12));
    for (std::size_t m = 0; m < 4; ++m) REQUIRE(f.residual_norms[m] == Approx(ref.rss[m]).epsilon(1e-12));
}

TEST_CASE("fit_pga: response orthogonal to all columns gives the zero fit", "[boosting][fit_pga]") {
    const Matrix full = oracle::orthonormal_design(9, 8, 5);
    const Matrix X = full.leftCols(4);
    const Vector y = full.col(7).array() + 4.0;
    const BoostingFit f = fit_pga(standardize(y, X), fixed_steps(Variant::PGA, 5));
    REQUIRE(f.path.empty());
    REQUIRE(f.m_star == 0);
    REQUIRE(f.beta_orig.isZero());
    REQUIRE(f.intercept == Approx(4.0));
}

TEST_CASE("fit_pga: PostPGA replaces coefficients by OLS on the support", "[boosting][fit_pga]") {
    const Matrix X = correlated_10x3();
    const Vector y = response_10();
    const DesignData data = standardize(y, X);
    const BoostingFit pga = fit_pga(data, fixed_steps(Variant::PGA, 3));
    const BoostingFit post = fit_pga(data, fixed_steps(Variant::PostPGA, 3));
    REQUIRE(post.path == pga.path);
    const auto refit = post_ols(data, pga.support);
    REQUIRE((post.beta_std - refit.beta_std).cwiseAbs().maxCoeff() < 1e-12);
    REQUIRE(post.intercept == Approx(refit.intercept));
}

TEST_CASE("fit_oga: exhausting a full-rank design reproduces full OLS", "[boosting][fit_oga]") {
    const Matrix X = oracle::gaussian_matrix(15, 5, 31);
    const Vector y = oracle::gaussian_vector(15, 32);
    const DesignData data = standardize(y, X);
    const BoostingFit f = fit_oga(data, fixed_steps(Variant::OGA, 50));
    REQUIRE(f.path.size() == 5);
    const auto ref = oracle::ols_with_intercept(oracle::to_rows(X), oracle::to_vec(y), {0, 1, 2, 3, 4});
    REQUIRE(f.intercept == Approx(ref[0]).margin(1e-10));
    for (std::size_t j = 0; j < 5; ++j) REQUIRE(f.beta_orig(static_cast<Index>(j)) == Approx(ref[j + 1]).margin(1e-10));
}

TEST_CASE("fit_oga: identical to PGA on an orthonormal design", "[boosting][fit_oga]") {
    const Matrix X = oracle::orthonormal_design(20, 10, 41);
    Vector beta = Vector::Zero(10);
    beta << 3.0, 0.0, -2.0, 0.0, 1.5, 0.0, 0.0, 0.7, 0.0, 0.0;
    const Vector y = X * beta + 0.1 * oracle::gaussian_vector(20, 42);
    const DesignData data = standardize(y, X);
    const BoostingFit pga = fit_pga(data, fixed_steps(Variant::PGA, 6));
    const BoostingFit oga = fit_oga(data, fixed_steps(Variant::OGA, 6));
    REQUIRE(pga.path == oga.path);
    REQUIRE((pga.beta_std - oga.beta_std).cwiseAbs().maxCoeff() < 1e-10);
    for (std::size_t m = 0; m < pga.residual_norms.size(); ++m)
        REQUIRE(pga.residual_norms[m] == Approx(oga.residual_norms[m]).epsilon(1e-10));
}

TEST_CASE("fit_oga: three steps equal OLS on the selected columns", "[boosting][fit_oga]") {
    Matrix X = oracle::gaussian_matrix(12, 5, 51);
    X.col(1) += 0.8 * X.col(0);
    X.col(3) += 0.6 * X.col(2) - 0.5 * X.col(0);
    Vector y = 1.5 * X.col(0) - X.col(3) + 0.7 * X.col(4) + 0.3 * oracle::gaussian_vector(12, 52);
    const BoostingFit f = fit_oga(standardize(y, X), fixed_steps(Variant::OGA, 3));
    REQUIRE(f.path.size() == 3);
    const auto ref = oracle::ols_with_intercept(oracle::to_rows(X), oracle::to_vec(y), f.path);
    REQUIRE(f.intercept == Approx(ref[0]).margin(1e-10));
    for (std::size_t k = 0; k < 3; ++k)
        REQUIRE(f.beta_orig(static_cast<Index>(f.path[k])) == Approx(ref[k + 1]).margin(1e-10));
    for (Index j = 0; j < 5; ++j) {
        if (std::find(f.path.begin(), f.path.end(), static_cast<std::size_t>(j)) == f.path.end()) REQUIRE(f.beta_orig(j) == 0.0);
    }
}

TEST_CASE("fit dispatch rejects mismatched variants and bad configs", "[boosting]") {
    const DesignData data = standardize(response_10(), correlated_10x3());
    REQUIRE_THROWS_AS(fit_pga(data, fixed_steps(Variant::OGA, 2)), InvalidInput);
    REQUIRE_THROWS_AS(fit_oga(data, fixed_steps(Variant::PGA, 2)), InvalidInput);
    BoostingConfig bad = fixed_steps(Variant::PGA, 0);
    REQUIRE_THROWS_AS(fit(data, bad), InvalidInput);
    bad = fixed_steps(Variant::PGA, 3);
    bad.shrinkage = 0.0;
    REQUIRE_THROWS_AS(fit(data, bad), InvalidInput);
    bad.shrinkage = 1.5;
    REQUIRE_THROWS_AS(fit(data, bad), InvalidInput);
}

TEST_CASE("post_ols: null model, full model and a two-column support", "[boosting][post_ols]") {
    Matrix X = oracle::gaussian_matrix(10, 4, 61);
    X.col(2) += X.col(1);
    const Vector y = oracle::gaussian_vector(10, 62).array() + 5.0;
    const DesignData data = standardize(y, X);

    const auto null_fit = post_ols(data, std::vector<std::size_t>{});
    REQUIRE(null_fit.beta_orig.isZero());
    REQUIRE(null_fit.intercept == Approx(y.mean()));

    const std::vector<std::size_t> all{0, 1, 2, 3};
    const auto full = post_ols(data, all);
    const auto ref_full = oracle::ols_with_intercept(oracle::to_rows(X), oracle::to_vec(y), all);
    REQUIRE(full.intercept == Approx(ref_full[0]).margin(1e-10));
    for (std::size_t j = 0; j < 4; ++j) REQUIRE(full.beta_orig(static_cast<Index>(j)) == Approx(ref_full[j + 1]).margin(1e-10));

    const std::vector<std::size_t> two{1, 3};
    const auto part = post_ols(data, two);
    const auto ref = oracle::ols_with_intercept(oracle::to_rows(X), oracle::to_vec(y), two);
    REQUIRE(part.intercept == Approx(ref[0]).margin(1e-12));
    REQUIRE(part.beta_orig(1) == Approx(ref[1]).margin(1e-12));
    REQUIRE(part.beta_orig(3) == Approx(ref[2]).margin(1e-12));
    REQUIRE(part.beta_orig(0) == 0.0);
    REQUIRE(part.beta_orig(2) == 0.0);
}

TEST_CASE("post_ols: rank-deficient support names the dependent column", "[boosting][post_ols]") {
    Matrix X = oracle::gaussian_matrix(10, 4, 71);
    X.col(2) = 2.0 * X.col(0) - X.col(1);
    const DesignData data = standardize(oracle::gaussian_vector(10, 72), X);
    const std::vector<std::size_t> support{0, 1, 2};
    try {
        post_ols(data, support);
        FAIL("expected RankDeficient");
    } catch (const RankDeficient& e) {
        REQUIRE(e.columns().size() == 1);
        const std::size_t bad = e.columns().front();
        REQUIRE((bad == 0 || bad == 1 || bad == 2));
        REQUIRE(std::string(e.what()).find(std::to_string(bad)) != std::string::npos);
    }
}

TEST_CASE("stop_decision: cap, stalled descent and AICc first local minimum", "[boosting][stop]") {
    BoostingConfig cfg;
    cfg.stop_rule = StopRule::FixedM;
    cfg.m_max = 5;
    const std::vector<double> six{10, 9, 8, 7, 6, 5};
    const std::vector<std::size_t> sizes6{0, 1, 2, 3, 4, 5};
    REQUIRE(stop_decision(six, sizes6, cfg, 50));
    REQUIRE_FALSE(stop_decision(std::span(six).first(5), std::span(sizes6).first(5), cfg, 50));

    cfg.stop_rule = StopRule::ResidualTol;
    cfg.residual_tol = 1e-6;
    cfg.m_max = 100;
    const std::vector<double> stalled{10, 10};
    const std::vector<std::size_t> sizes2{0, 1};
    REQUIRE(stop_decision(stalled, sizes2, cfg, 50));
    const std::vector<double> moving{10, 9};
    REQUIRE_FALSE(stop_decision(moving, sizes2, cfg, 50));

    // n = 20, k = support + 1: scores 34.411, 26.678, 25.826, 28.588 (computed by hand)
    cfg.stop_rule = StopRule::Aicc;
    const std::vector<double> rss{100, 60, 50, 49};
    const std::vector<std::size_t> sizes{0, 1, 2, 3};
    REQUIRE(aicc_score(100, 1, 20) == Approx(34.41098047090423).epsilon(1e-13));
    REQUIRE(aicc_score(60, 2, 20) == Approx(26.678128126303374).epsilon(1e-13));
    REQUIRE(aicc_score(50, 3, 20) == Approx(25.825814637483102).epsilon(1e-13));
    REQUIRE(aicc_score(49, 4, 20) == Approx(28.58842715779938).epsilon(1e-13));
    REQUIRE_FALSE(stop_decision(std::span(rss).first(2), std::span(sizes).first(2), cfg, 20));
    REQUIRE_FALSE(stop_decision(std::span(rss).first(3), std::span(sizes).first(3), cfg, 20));
    REQUIRE(stop_decision(rss, sizes, cfg, 20));

    REQUIRE_THROWS_AS(stop_decision(std::vector<double>{}, std::vector<std::size_t>{}, cfg, 20), InvalidInput);
}

TEST_CASE("fit with AICc keeps the local minimum", "[boosting][stop]") {
    const Matrix X = oracle::gaussian_matrix(40, 30, 81);
    const Vector y = 2.0 * X.col(0) - 1.5 * X.col(5) + oracle::gaussian_vector(40, 82);
    BoostingConfig cfg;
    cfg.variant = Variant::OGA;
    const DesignData data = standardize(y, X);
    const BoostingFit f = fit(data, cfg);
    REQUIRE(f.m_star >= 2);
    std::vector<double> scores;
    for (std::size_t m = 0; m <= f.m_star; ++m) scores.push_back(aicc_score(f.residual_norms[m], m + 1, 40));
    for (std::size_t m = 1; m < scores.size(); ++m) REQUIRE(scores[m] <= scores[m - 1]);
    // one more step would raise the score
    BoostingConfig longer = cfg;
    longer.stop_rule = StopRule::FixedM;
    longer.m_max = f.m_star + 1;
    const BoostingFit next = fit(data, longer);
    REQUIRE(aicc_score(next.residual_norms.back(), f.m_star + 2, 40) > scores.back());
}

TEST_CASE("predict: zero fit, round trip and a hand-computed row", "[boosting][predict]") {
    const Matrix X = correlated_10x3();
    const Vector y = response_10();
    const DesignData data = standardize(y, X);

    BoostingFit zero;
    zero.beta_orig = Vector::Zero(3);
    zero.intercept = 1.25;
    REQUIRE((predict(zero, X).array() == 1.25).all());

    const BoostingFit f = fit_pga(data, fixed_steps(Variant::PGA, 4));
    REQUIRE((predict(f, X) - fitted_values(f, data)).cwiseAbs().maxCoeff() < 1e-10);

    Matrix row(1, 3);
    row << 0.5, -1.0, 2.0;
    const double expected = f.intercept + 0.5 * f.beta_orig(0) - 1.0 * f.beta_orig(1) + 2.0 * f.beta_orig(2);
    REQUIRE(predict(f, row)(0) == Approx(expected).epsilon(1e-14));

    REQUIRE_THROWS_AS(predict(f, Matrix::Ones(2, 4)), InvalidInput);
}
