#pragma once

#include <optional>
#include <vector>

#include "fastdebias/debias.hpp"

namespace fastdebias {

// Inverse standard-normal CDF. Acklam's rational approximation refined by one
// Halley step against erfc; absolute error below 1e-13 on (0, 1).
double normal_quantile(double prob);

// Two-sided critical value: Phi^{-1}(1 - alpha/2).
double z_critical(double alpha);

struct SupportCall {
    std::vector<int> b_hat;  // 0/1 per coordinate
    double alpha = 0.0;
    double z_crit = 0.0;
};

struct RecoveryScore {
    long true_defective = 0;
    long false_defective = 0;
    long false_nondefective = 0;
    long true_nondefective = 0;
    // Unset when the corresponding denominator is zero.
    std::optional<double> sensitivity;  // TD / (TD + FN)
    std::optional<double> specificity;  // TN / (TN + FD)
};

// Two-sided z-test per coordinate: b_hat[j] = 1 iff |beta_d[j]| / stderr_j
// exceeds z_critical(alpha). Coordinates with stderr 0 and estimate 0 are
// accepted; stderr 0 with a nonzero estimate raises DegenerateTestError.
SupportCall test_support(const DebiasedEstimate& est, double alpha);

// Interval j = beta_d[j] +- z_crit * stderr_j, sharing the exact product
// z_crit * stderr_j with test_support so "reject" and "0 outside interval"
// agree coordinate-for-coordinate in floating point.
std::vector<std::pair<double, double>> confidence_interval(
    const DebiasedEstimate& est, double alpha);

RecoveryScore score_support(const SupportCall& call, const SparseSignal& truth);

}  // namespace fastdebias
