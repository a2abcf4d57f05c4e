#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "fastdebias/errors.hpp"
#include "fastdebias/inference.hpp"
#include "fastdebias/rng.hpp"

using namespace fastdebias;

namespace {

DebiasedEstimate make_estimate(std::initializer_list<double> beta,
                               std::initializer_list<double> se) {
    DebiasedEstimate est;
    est.beta_d = Eigen::VectorXd(static_cast<Eigen::Index>(beta.size()));
    est.std_errors = Eigen::VectorXd(static_cast<Eigen::Index>(se.size()));
    Eigen::Index i = 0;
    for (double b : beta) est.beta_d(i++) = b;
    i = 0;
    for (double s : se) est.std_errors(i++) = s;
    return est;
}

}  // namespace

TEST_CASE("normal quantile accuracy") {
    CHECK(z_critical(0.05) == doctest::Approx(1.959964).epsilon(1e-6));
    CHECK(std::abs(z_critical(0.05) - 1.9599639845400545) < 1e-10);
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));

    // Invert the CDF computed independently via erfc.
    for (double prob : {1e-6, 1e-3, 0.025, 0.2, 0.5, 0.8, 0.975, 0.999, 1.0 - 1e-7}) {
        const double x = normal_quantile(prob);
        const double cdf = 0.5 * std::erfc(-x / std::sqrt(2.0));
        CHECK(std::abs(cdf - prob) < 1e-9);
    }
    CHECK_THROWS_AS(normal_quantile(0.0), std::invalid_argument);
    CHECK_THROWS_AS(normal_quantile(1.0), std::invalid_argument);
    CHECK_THROWS_AS(z_critical(0.0), std::invalid_argument);
}

TEST_CASE("two-sided z-test decisions") {
    const DebiasedEstimate est = make_estimate({0.0, 10.0, 1.5}, {1.0, 1.0, 1.0});
    const SupportCall call = test_support(est, 0.05);
    CHECK(call.b_hat == std::vector<int>{0, 1, 0});
    CHECK(call.z_crit == doctest::Approx(1.959964).epsilon(1e-6));
}

TEST_CASE("zero stderr handling") {
    const DebiasedEstimate ok = make_estimate({0.0}, {0.0});
    CHECK(test_support(ok, 0.05).b_hat == std::vector<int>{0});
    const auto interval = confidence_interval(ok, 0.05);
    CHECK(interval[0].first == 0.0);
    CHECK(interval[0].second == 0.0);

    const DebiasedEstimate bad = make_estimate({1.0}, {0.0});
    CHECK_THROWS_AS(test_support(bad, 0.05), DegenerateTestError);
    try {
        test_support(bad, 0.05);
    } catch (const DegenerateTestError& e) {
        CHECK(e.coordinate() == 0);
    }
}

TEST_CASE("confidence interval values") {
    const DebiasedEstimate est = make_estimate({5.0}, {1.0});
    const auto intervals = confidence_interval(est, 0.05);
    CHECK(intervals[0].first == doctest::Approx(3.0400).epsilon(1e-4));
    CHECK(intervals[0].second == doctest::Approx(6.9600).epsilon(1e-4));
}

TEST_CASE("test/interval duality is exact over random coordinates") {
    SplitMix64 g(13);
    DebiasedEstimate est;
    const Eigen::Index p = 400;
    est.beta_d.resize(p);
    est.std_errors.resize(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        est.beta_d(j) = g.uniform(-3.0, 3.0);
        est.std_errors(j) = g.uniform(0.2, 2.0);
    }
    for (const double alpha : {0.01, 0.05, 0.32}) {
        const SupportCall call = test_support(est, alpha);
        const auto intervals = confidence_interval(est, alpha);
        for (Eigen::Index j = 0; j < p; ++j) {
            const bool outside =
                intervals[static_cast<std::size_t>(j)].first > 0.0 ||
                intervals[static_cast<std::size_t>(j)].second < 0.0;
            CHECK(outside == (call.b_hat[static_cast<std::size_t>(j)] == 1));
        }
    }
}

TEST_CASE("rejections are monotone in alpha") {
    SplitMix64 g(17);
    DebiasedEstimate est;
    est.beta_d.resize(100);
    est.std_errors.resize(100);
    for (Eigen::Index j = 0; j < 100; ++j) {
        est.beta_d(j) = g.uniform(-4.0, 4.0);
        est.std_errors(j) = g.uniform(0.5, 1.5);
    }
    const SupportCall strict = test_support(est, 0.01);
    const SupportCall loose = test_support(est, 0.10);
    for (std::size_t j = 0; j < 100; ++j) {
        if (strict.b_hat[j] == 1) CHECK(loose.b_hat[j] == 1);
    }
}

TEST_CASE("confusion-matrix scoring") {
    Eigen::VectorXd truth_vals(4);
    truth_vals << 2.0, 3.0, 0.0, 0.0;
    const SparseSignal truth = SparseSignal::from_values(truth_vals);

    SupportCall perfect;
    perfect.b_hat = {1, 1, 0, 0};
    const RecoveryScore s1 = score_support(perfect, truth);
    CHECK(s1.sensitivity.value() == 1.0);
    CHECK(s1.specificity.value() == 1.0);
    CHECK(s1.true_defective + s1.false_defective + s1.false_nondefective +
              s1.true_nondefective ==
          4);

    SupportCall none;
    none.b_hat = {0, 0, 0, 0};
    const RecoveryScore s2 = score_support(none, truth);
    CHECK(s2.sensitivity.value() == 0.0);
    CHECK(s2.specificity.value() == 1.0);

    SupportCall half;
    half.b_hat = {1, 0, 0, 1};
    const RecoveryScore s3 = score_support(half, truth);
    CHECK(s3.sensitivity.value() == 0.5);
    CHECK(s3.specificity.value() == 0.5);
    CHECK(s3.true_defective == 1);
    CHECK(s3.false_defective == 1);
    CHECK(s3.false_nondefective == 1);
    CHECK(s3.true_nondefective == 1);
}

TEST_CASE("undefined rates are flagged, not fabricated") {
    const SparseSignal no_signal = SparseSignal::from_values(Eigen::VectorXd::Zero(3));
    SupportCall call;
    call.b_hat = {0, 1, 0};
    const RecoveryScore s = score_support(call, no_signal);
    CHECK(!s.sensitivity.has_value());
    CHECK(s.specificity.has_value());

    Eigen::VectorXd all(2);
    all << 1.0, 2.0;
    const SparseSignal dense_truth = SparseSignal::from_values(all);
    SupportCall call2;
    call2.b_hat = {1, 0};
    const RecoveryScore s2 = score_support(call2, dense_truth);
    CHECK(s2.sensitivity.has_value());
    CHECK(!s2.specificity.has_value());
}

TEST_CASE("scoring validates lengths") {
    const SparseSignal truth = SparseSignal::from_values(Eigen::VectorXd::Zero(3));
    SupportCall call;
    call.b_hat = {0, 1};
    CHECK_THROWS_AS(score_support(call, truth), std::invalid_argument);
}
