#include "fastdebias/inference.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "fastdebias/errors.hpp"

namespace fastdebias {

// Acklam's rational approximation of the inverse normal CDF (relative error
// below 1.2e-9), followed by one Halley step against erfc, which brings the
// absolute error near machine precision.
double normal_quantile(double prob) {
    if (!(prob > 0.0) || !(prob < 1.0)) {
        throw std::invalid_argument("normal_quantile: prob must lie in (0, 1)");
    }
    static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                    -2.759285104469687e+02, 1.383577518672690e+02,
                                    -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                    -1.556989798598866e+02, 6.680131188771972e+01,
                                    -1.328068155288572e+01};
    static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                    -2.400758277161838e+00, -2.549732539343734e+00,
                                    4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                    2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (prob < p_low) {
        const double q = std::sqrt(-2.0 * std::log(prob));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (prob <= 1.0 - p_low) {
        const double q = prob - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - prob));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    // Halley step: e = Phi(x) - prob, u = e / phi(x).
    constexpr double sqrt_2pi = 2.506628274631000502415765284811;
    const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - prob;
    const double u = e * sqrt_2pi * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

double z_critical(double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw std::invalid_argument("z_critical: alpha must lie in (0, 1)");
    }
    return normal_quantile(1.0 - 0.5 * alpha);
}

SupportCall test_support(const DebiasedEstimate& est, double alpha) {
    const Eigen::Index p = est.beta_d.size();
    if (est.std_errors.size() != p) {
        throw std::invalid_argument("test_support: estimate/stderr length mismatch");
    }
    SupportCall call;
    call.alpha = alpha;
    call.z_crit = z_critical(alpha);
    call.b_hat.resize(static_cast<std::size_t>(p), 0);
    for (Eigen::Index j = 0; j < p; ++j) {
        const double se = est.std_errors(j);
        if (!std::isfinite(se) || se < 0.0) {
            throw std::invalid_argument("test_support: stderr must be finite and >= 0");
        }
        if (se == 0.0) {
            if (est.beta_d(j) != 0.0) {
                throw DegenerateTestError(
                    "test_support: coordinate " + std::to_string(j) +
                        " has zero stderr but nonzero estimate",
                    j);
            }
            continue;  // exact zero with zero spread: accept
        }
        // Same product as the interval half-width, so reject == 0-outside-CI
        // holds exactly in floating point.
        if (std::abs(est.beta_d(j)) > call.z_crit * se) {
            call.b_hat[static_cast<std::size_t>(j)] = 1;
        }
    }
    return call;
}

std::vector<std::pair<double, double>> confidence_interval(
    const DebiasedEstimate& est, double alpha) {
    const Eigen::Index p = est.beta_d.size();
    if (est.std_errors.size() != p) {
        throw std::invalid_argument(
            "confidence_interval: estimate/stderr length mismatch");
    }
    const double z = z_critical(alpha);
    std::vector<std::pair<double, double>> intervals;
    intervals.reserve(static_cast<std::size_t>(p));
    for (Eigen::Index j = 0; j < p; ++j) {
        const double se = est.std_errors(j);
        if (!std::isfinite(se) || se < 0.0) {
            throw std::invalid_argument(
                "confidence_interval: stderr must be finite and >= 0");
        }
        if (se == 0.0 && est.beta_d(j) != 0.0) {
            throw DegenerateTestError(
                "confidence_interval: coordinate " + std::to_string(j) +
                    " has zero stderr but nonzero estimate",
                j);
        }
        const double half = z * se;
        intervals.emplace_back(est.beta_d(j) - half, est.beta_d(j) + half);
    }
    return intervals;
}

RecoveryScore score_support(const SupportCall& call, const SparseSignal& truth) {
    const auto p = static_cast<std::size_t>(truth.p());
    if (call.b_hat.size() != p) {
        throw std::invalid_argument("score_support: length mismatch");
    }
    RecoveryScore score;
    for (std::size_t j = 0; j < p; ++j) {
        const bool truly_nonzero = truth.values(static_cast<Eigen::Index>(j)) != 0.0;
        const bool called = call.b_hat[j] != 0;
        if (truly_nonzero && called) ++score.true_defective;
        else if (!truly_nonzero && called) ++score.false_defective;
        else if (truly_nonzero && !called) ++score.false_nondefective;
        else ++score.true_nondefective;
    }
    if (score.true_defective + score.false_nondefective > 0) {
        score.sensitivity =
            static_cast<double>(score.true_defective) /
            static_cast<double>(score.true_defective + score.false_nondefective);
    }
    if (score.true_nondefective + score.false_defective > 0) {
        score.specificity =
            static_cast<double>(score.true_nondefective) /
            static_cast<double>(score.true_nondefective + score.false_defective);
    }
    return score;
}

}  // namespace fastdebias
