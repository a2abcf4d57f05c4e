#pragma once

#include <optional>
#include <vector>

#include "fastdebias/types.hpp"

namespace fastdebias {

inline double soft_threshold(double x, double t) {
    if (x > t) return x - t;
    if (x < -t) return x + t;
    return 0.0;
}

struct LassoConfig {
    double lambda = 0.0;
    // Convergence when the KKT residual is <= tol * max(1, lambda,
    // ||A'y/n||_inf); tol is relative to the problem scale.
    double tol = 1e-8;
    long max_iters = 100000;  // full coordinate sweeps
    // Optional warm start; default is the cold start at zero.
    std::optional<Eigen::VectorXd> warm_start;
    // When set, the per-sweep objective values are recorded in the estimate
    // (test hook for the monotonicity property).
    bool record_objectives = false;
};

struct LassoEstimate {
    Eigen::VectorXd beta_hat;
    long iterations = 0;        // full sweeps performed
    double kkt_residual = 0.0;  // absolute KKT violation at return
    double objective = 0.0;     // (1/2n)||y - A beta||^2 + lambda ||beta||_1
    double tol_scale = 1.0;     // max(1, lambda, ||A'y/n||_inf) used for stopping
    std::vector<double> sweep_objectives;  // filled when record_objectives
};

// Solves min_beta (1/2n)||y - A beta||_2^2 + lambda ||beta||_1 by cyclic
// coordinate descent with cached column norms, residual updates, and
// active-set sweeps after each full pass. Deterministic for fixed inputs.
//
// lambda = 0 is accepted only when n >= p (unregularized debugging mode);
// otherwise std::invalid_argument. Exceeding max_iters raises
// ConvergenceError carrying the last iterate and KKT residual.
LassoEstimate fit_lasso(const DesignMatrix& A, const Measurement& y,
                        const LassoConfig& cfg);

// Max KKT violation of (A, y, lambda) at beta, with g = (1/n) A'(y - A beta):
// max(|g_j| - lambda, 0) where beta_j = 0, |g_j - lambda sign(beta_j)| where
// beta_j != 0.
double kkt_residual(const DesignMatrix& A, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& beta, double lambda);

double lasso_objective(const DesignMatrix& A, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& beta, double lambda);

// lambda = scale * sigma * sqrt(2 log(p) / n). The experiment harness
// defaults to kDefaultLambdaScale (calibration notes in the README).
double lambda_rule(double sigma, Eigen::Index n, Eigen::Index p, double scale);

inline constexpr double kDefaultLambdaScale = 0.5;

}  // namespace fastdebias
