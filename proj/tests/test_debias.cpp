#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "fastdebias/coherence.hpp"
#include "fastdebias/debias.hpp"
#include "fastdebias/model_gen.hpp"
#include "fastdebias/rng.hpp"
#include "test_support.hpp"

using namespace fastdebias;
using fastdebias::testing::gaussian_matrix;
using fastdebias::testing::hadamard;
using fastdebias::testing::rademacher_matrix;

TEST_CASE("identity design gives W = (n/2) I at mu = 1/2") {
    const DesignMatrix A(Eigen::MatrixXd::Identity(4, 4));
    const DebiasWeights W = closed_form_weights(A, 0.5);
    CHECK(W.W == Eigen::MatrixXd::Identity(4, 4) * 2.0);
    CHECK(W.provenance == DebiasWeights::Provenance::ClosedForm);
    REQUIRE(W.feasible.has_value());
    CHECK(*W.feasible);
    for (Eigen::Index j = 0; j < 4; ++j) {
        CHECK(W.per_column_objective(j) == doctest::Approx(1.0).epsilon(1e-15));
    }

    const Eigen::VectorXd margins = feasibility_margin(A, W);
    for (Eigen::Index j = 0; j < 4; ++j) CHECK(margins(j) == 0.5);
}

TEST_CASE("mu = 1 yields the trivial zero solution") {
    const DesignMatrix A = gaussian_matrix(6, 9, 2);
    const DebiasWeights W = closed_form_weights(A, 1.0);
    CHECK(W.W.isZero(0.0));
    CHECK(W.per_column_objective.isZero(0.0));
    const Eigen::VectorXd margins = feasibility_margin(A, W);
    for (Eigen::Index j = 0; j < 9; ++j) CHECK(margins(j) == 1.0);
}

TEST_CASE("unit-scale rademacher weights are (1-mu) times the columns") {
    const DesignMatrix A = rademacher_matrix(16, 24, 3);
    const double mu = 0.4;
    const DebiasWeights W = closed_form_weights(A, mu, std::nullopt, false);
    for (Eigen::Index j = 0; j < A.p(); ++j) {
        for (Eigen::Index i = 0; i < A.n(); ++i) {
            CHECK(W.W(i, j) ==
                  doctest::Approx((1.0 - mu) * A.entries()(i, j)).epsilon(1e-15));
        }
    }
    CHECK(!W.feasible.has_value());  // rho neither supplied nor requested
}

TEST_CASE("mu range and zero columns are validated") {
    const DesignMatrix A = gaussian_matrix(5, 5, 4);
    CHECK_THROWS_AS(closed_form_weights(A, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(closed_form_weights(A, 1.1), std::invalid_argument);

    Eigen::MatrixXd with_zero = Eigen::MatrixXd::Identity(3, 3);
    with_zero.col(2).setZero();
    const DesignMatrix Z(std::move(with_zero));
    CHECK_THROWS_AS(closed_form_weights(Z, 0.5), std::invalid_argument);
}

TEST_CASE("below the threshold the formula violates the constraint") {
    Eigen::MatrixXd m(2, 2);
    m << 1.0, 1.0,
         0.0, 1.0;
    const DesignMatrix A(std::move(m));
    // rho = 1, threshold = 1/2. At mu = 0.4 the cross margin is (1-mu)*rho.
    const DebiasWeights W = closed_form_weights(A, 0.4);
    REQUIRE(W.feasible.has_value());
    CHECK_FALSE(*W.feasible);
    const Eigen::VectorXd margins = feasibility_margin(A, W);
    CHECK(margins.maxCoeff() == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(margins.maxCoeff() > 0.4);
}

TEST_CASE("necessity and feasibility around the threshold on random draws") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const DesignMatrix A = seed <= 10 ? gaussian_matrix(12, 18, seed)
                                          : rademacher_matrix(12, 18, seed);
        const double rho = compute_rho(A);
        REQUIRE(rho > 0.0);
        const double threshold = mu_from_rho(rho);

        const DebiasWeights at = closed_form_weights(A, threshold, rho);
        const Eigen::VectorXd margins_at = feasibility_margin(A, at);
        CHECK(margins_at.maxCoeff() <= threshold + 1e-12);

        const DebiasWeights below = closed_form_weights(A, 0.99 * threshold, rho);
        const Eigen::VectorXd margins_below = feasibility_margin(A, below);
        CHECK(margins_below.maxCoeff() > 0.99 * threshold);
    }
}

TEST_CASE("own-column residual coordinate equals mu exactly") {
    const DesignMatrix A = gaussian_matrix(10, 14, 6);
    const double mu = 0.35;
    const DebiasWeights W = closed_form_weights(A, mu, std::nullopt, false);
    for (Eigen::Index j = 0; j < A.p(); ++j) {
        const double own =
            A.entries().col(j).dot(W.W.col(j)) / static_cast<double>(A.n());
        CHECK(std::abs(own - 1.0) == doctest::Approx(mu).epsilon(1e-12));
    }
}

TEST_CASE("per-column objective matches the recomputed norm") {
    const DesignMatrix A = gaussian_matrix(9, 13, 8);
    const DebiasWeights W = closed_form_weights(A, 0.3, std::nullopt, false);
    for (Eigen::Index j = 0; j < A.p(); ++j) {
        const double direct = W.W.col(j).squaredNorm() / static_cast<double>(A.n());
        CHECK(W.per_column_objective(j) == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("debias with W = 0 returns the lasso estimate") {
    const DesignMatrix A = gaussian_matrix(7, 5, 10);
    Measurement y;
    y.y = Eigen::VectorXd::LinSpaced(7, -1.0, 1.0);
    y.sigma = 0.5;
    LassoEstimate fit;
    fit.beta_hat = Eigen::VectorXd::LinSpaced(5, 0.0, 2.0);
    DebiasWeights W = closed_form_weights(A, 1.0);
    const DebiasedEstimate est = debias(A, y, fit, W);
    CHECK(est.beta_d == fit.beta_hat);
    CHECK(est.std_errors.isZero(0.0));
}

TEST_CASE("orthogonal design at mu = 0 debiases to the exact correlation") {
    const Eigen::MatrixXd H = hadamard(2);  // 4x4, A'A = 4 I
    const DesignMatrix A(H);
    Measurement y;
    y.y = Eigen::VectorXd::LinSpaced(4, 1.0, 4.0);
    y.sigma = 1.0;
    LassoEstimate fit;
    fit.beta_hat = Eigen::VectorXd::Constant(4, 0.25);
    const DebiasWeights W = closed_form_weights(A, 0.0);
    const DebiasedEstimate est = debias(A, y, fit, W);
    const Eigen::VectorXd unbiased = A.entries().transpose() * y.y / 4.0;
    CHECK((est.beta_d - unbiased).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("debias matches an independent dense evaluation") {
    const DesignMatrix A = gaussian_matrix(3, 3, 12);
    Measurement y;
    y.y = Eigen::VectorXd::LinSpaced(3, -2.0, 2.0);
    y.sigma = 0.7;
    LassoEstimate fit;
    fit.beta_hat = Eigen::VectorXd::LinSpaced(3, 0.5, 1.5);
    const DebiasWeights W = closed_form_weights(A, 0.25, std::nullopt, false);

    // Plain triple loop, no shared Eigen expressions.
    const Eigen::Index n = 3, p = 3;
    Eigen::VectorXd residual(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double ri = y.y(i);
        for (Eigen::Index j = 0; j < p; ++j) ri -= A.entries()(i, j) * fit.beta_hat(j);
        residual(i) = ri;
    }
    Eigen::VectorXd expected(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        double dot = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) dot += W.W(i, j) * residual(i);
        expected(j) = fit.beta_hat(j) + dot / static_cast<double>(n);
    }

    const DebiasedEstimate est = debias(A, y, fit, W);
    CHECK((est.beta_d - expected).lpNorm<Eigen::Infinity>() < 1e-12);
    for (Eigen::Index j = 0; j < p; ++j) {
        double norm_sq = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) norm_sq += W.W(i, j) * W.W(i, j);
        CHECK(est.std_errors(j) ==
              doctest::Approx(0.7 * std::sqrt(norm_sq) / 3.0).epsilon(1e-12));
        CHECK(est.std_errors(j) ==
              doctest::Approx(0.7 * std::sqrt(W.per_column_objective(j) / 3.0))
                  .epsilon(1e-12));
    }
}

TEST_CASE("debias is linear in the weight matrix") {
    const DesignMatrix A = gaussian_matrix(8, 6, 14);
    Measurement y;
    y.y = Eigen::VectorXd::Random(8);
    y.sigma = 0.3;
    LassoEstimate fit;
    fit.beta_hat = Eigen::VectorXd::Random(6);

    const DebiasWeights W1 = closed_form_weights(A, 0.2, std::nullopt, false);
    const DebiasWeights W2 = closed_form_weights(A, 0.6, std::nullopt, false);
    DebiasWeights sum = W1;
    sum.W = W1.W + W2.W;

    const Eigen::VectorXd combined = debias(A, y, fit, sum).beta_d;
    const Eigen::VectorXd separate = debias(A, y, fit, W1).beta_d +
                                     debias(A, y, fit, W2).beta_d - fit.beta_hat;
    CHECK((combined - separate).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("matrix-free scales agree with the dense path") {
    const DesignMatrix A = gaussian_matrix(12, 20, 16);
    const double mu = 0.3;
    const DebiasWeights W = closed_form_weights(A, mu, std::nullopt, false);
    const ClosedFormScales s = closed_form_scales(A, mu);
    CHECK((scales_to_dense(A, s) - W.W).lpNorm<Eigen::Infinity>() < 1e-14);

    const SparseSignal beta = generate_signal(20, 3, 1.0, 4.0, 16);
    const Measurement y = sample_measurements(A, beta, 0.2, 16);
    LassoEstimate fit;
    fit.beta_hat = beta.values;
    const DebiasedEstimate dense = debias(A, y, fit, W);
    const DebiasedEstimate light = debias_with_scales(A, y, fit, s);
    CHECK((dense.beta_d - light.beta_d).lpNorm<Eigen::Infinity>() < 1e-12);
    CHECK((dense.std_errors - light.std_errors).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("debias validates dimensions") {
    const DesignMatrix A = gaussian_matrix(6, 4, 18);
    const DesignMatrix B = gaussian_matrix(6, 5, 18);
    Measurement y;
    y.y = Eigen::VectorXd::Ones(6);
    LassoEstimate fit;
    fit.beta_hat = Eigen::VectorXd::Ones(4);
    const DebiasWeights W = closed_form_weights(B, 0.5);
    CHECK_THROWS_AS(debias(A, y, fit, W), std::invalid_argument);
}
