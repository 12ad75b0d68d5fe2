#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "l2boost/design.hpp"
#include "oracles.hpp"

using namespace l2boost;
using Catch::Approx;

TEST_CASE("standardize: single column scales to mean 0, variance 1", "[design]") {
    Matrix X(3, 1);
    X << 1, 2, 3;
    Vector y(3);
    y << 1, 0, 2;
    const DesignData d = standardize(y, X);
    REQUIRE(std::abs(d.X.col(0).mean()) < 1e-12);
    REQUIRE(d.X.col(0).squaredNorm() / 3.0 == Approx(1.0).margin(1e-12));
    REQUIRE(d.col_means(0) == Approx(2.0));
    REQUIRE(d.col_scales(0) == Approx(std::sqrt(2.0 / 3.0)));
    REQUIRE(d.y_mean == Approx(1.0));
    REQUIRE(std::abs(d.y.sum()) < 1e-12);
}

TEST_CASE("standardize: already standardized design is left unchanged", "[design]") {
    const Matrix X = oracle::orthonormal_design(12, 4, 3);
    const Vector y = oracle::gaussian_vector(12, 4);
    const DesignData d = standardize(y, X);
    REQUIRE(d.col_means.cwiseAbs().maxCoeff() < 1e-10);
    REQUIRE((d.col_scales.array() - 1.0).abs().maxCoeff() < 1e-10);
    REQUIRE((d.X - X).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("standardize: constant column is excluded, others match arithmetic oracle", "[design]") {
    Matrix X(5, 3);
    X << 1.0, 7.0, 0.5,
         2.0, 7.0, -1.5,
         4.0, 7.0, 2.0,
         0.0, 7.0, 3.5,
         3.0, 7.0, 1.0;
    Vector y(5);
    y << 1, 2, 3, 4, 5;
    const DesignData d = standardize(y, X);

    REQUIRE(d.active == std::vector<bool>{true, false, true});
    REQUIRE(d.active_count() == 2);
    REQUIRE(d.X.col(1).isZero());

    const auto rows = oracle::to_rows(X);
    for (std::size_t j : {0u, 2u}) {
        const auto [m, sd] = oracle::mean_sd(rows, j);
        REQUIRE(d.col_means(j) == Approx(m).epsilon(1e-14));
        REQUIRE(d.col_scales(j) == Approx(sd).epsilon(1e-14));
        for (Index i = 0; i < 5; ++i) REQUIRE(d.X(i, j) == Approx((X(i, j) - m) / sd).epsilon(1e-13));
    }
    // column 0: mean 2, sd sqrt(2)
    REQUIRE(d.col_means(0) == 2.0);
    REQUIRE(d.col_scales(0) == Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("standardize: error paths", "[design]") {
    Matrix X = Matrix::Ones(4, 2);
    Vector y = Vector::Zero(4);
    REQUIRE_THROWS_AS(standardize(y, X), InvalidInput);  // all constant

    Matrix X2 = oracle::gaussian_matrix(4, 2, 1);
    REQUIRE_THROWS_AS(standardize(Vector::Zero(3), X2), InvalidInput);
    REQUIRE_THROWS_AS(standardize(Vector::Zero(1), Matrix::Ones(1, 1)), InvalidInput);

    X2(2, 1) = std::numeric_limits<double>::quiet_NaN();
    REQUIRE_THROWS_AS(standardize(Vector::Zero(4), X2), InvalidInput);
}
