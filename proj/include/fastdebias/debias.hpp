#pragma once

#include <optional>

#include "fastdebias/lasso.hpp"
#include "fastdebias/types.hpp"

namespace fastdebias {

// Weight matrix entering the debiasing update, with the mu it was built for
// and its provenance. For ClosedForm provenance every column is an exact
// scalar multiple of the corresponding design column.
struct DebiasWeights {
    enum class Provenance { ClosedForm, QpSolver };

    Eigen::MatrixXd W;                    // n x p
    double mu = 0.0;
    Provenance provenance = Provenance::ClosedForm;
    Eigen::VectorXd per_column_objective; // (1/n) ||w_.j||^2
    // For closed-form weights: whether mu >= rho/(1+rho), i.e. whether the
    // columns satisfy the infinity-norm constraint. Unset when rho was not
    // available and not requested.
    std::optional<bool> feasible;
    double build_seconds = 0.0;           // wall clock of the construction
};

// Debiased estimate with per-coordinate standard errors
// stderr_j = sigma * ||w_.j||_2 / n.
struct DebiasedEstimate {
    Eigen::VectorXd beta_d;
    Eigen::VectorXd std_errors;
    double mu = 0.0;
    double sigma = 0.0;
};

// Column j = n (1 - mu) / ||a_.j||^2 * a_.j. Optimal for the per-column QP
// exactly when rho/(1+rho) <= mu <= 1; for smaller mu the same formula is
// returned but flagged infeasible. Passing a precomputed rho avoids the
// O(n p^2) coherence scan (and leaves the flag unset when rho is omitted
// and compute_feasibility is false).
DebiasWeights closed_form_weights(const DesignMatrix& A, double mu,
                                  std::optional<double> precomputed_rho = std::nullopt,
                                  bool compute_feasibility = true);

// Matrix-free variant: only the p column scales n (1 - mu) / ||a_.j||^2.
struct ClosedFormScales {
    Eigen::VectorXd scale;  // length p
    double mu = 0.0;
};

ClosedFormScales closed_form_scales(const DesignMatrix& A, double mu);
Eigen::MatrixXd scales_to_dense(const DesignMatrix& A, const ClosedFormScales& s);

// Entry j = ||(1/n) A' w_.j - e_j||_inf.
Eigen::VectorXd feasibility_margin(const DesignMatrix& A, const DebiasWeights& W);

// beta_d = beta_hat + (1/n) W' (y - A beta_hat), with standard errors from
// W's column norms and y.sigma.
DebiasedEstimate debias(const DesignMatrix& A, const Measurement& y,
                        const LassoEstimate& beta_hat, const DebiasWeights& W);

// Same update using only the closed-form scales (never materializes W).
DebiasedEstimate debias_with_scales(const DesignMatrix& A, const Measurement& y,
                                    const LassoEstimate& beta_hat,
                                    const ClosedFormScales& s);

}  // namespace fastdebias
