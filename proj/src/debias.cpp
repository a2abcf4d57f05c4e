#include "fastdebias/debias.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "fastdebias/coherence.hpp"

namespace fastdebias {
namespace {

void check_mu(double mu) {
    if (!(mu >= 0.0) || !(mu <= 1.0)) {
        throw std::invalid_argument("closed_form_weights: mu must lie in [0, 1]");
    }
}

}  // namespace

ClosedFormScales closed_form_scales(const DesignMatrix& A, double mu) {
    check_mu(mu);
    A.require_nonzero_columns("closed_form_scales");
    ClosedFormScales s;
    s.mu = mu;
    s.scale = (static_cast<double>(A.n()) * (1.0 - mu)) *
              A.col_sq_norms().cwiseInverse();
    return s;
}

Eigen::MatrixXd scales_to_dense(const DesignMatrix& A, const ClosedFormScales& s) {
    return A.entries() * s.scale.asDiagonal();
}

DebiasWeights closed_form_weights(const DesignMatrix& A, double mu,
                                  std::optional<double> precomputed_rho,
                                  bool compute_feasibility) {
    check_mu(mu);
    A.require_nonzero_columns("closed_form_weights");
    const auto start = std::chrono::steady_clock::now();

    DebiasWeights weights;
    weights.mu = mu;
    weights.provenance = DebiasWeights::Provenance::ClosedForm;
    const double nd = static_cast<double>(A.n());
    weights.W.resize(A.n(), A.p());
    weights.per_column_objective.resize(A.p());
    for (Eigen::Index j = 0; j < A.p(); ++j) {
        const double csq = A.col_sq_norms()(j);
        weights.W.col(j) = (nd * (1.0 - mu) / csq) * A.entries().col(j);
        weights.per_column_objective(j) = (1.0 - mu) * (1.0 - mu) / (csq / nd);
    }
    weights.build_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();

    if (precomputed_rho) {
        weights.feasible = mu + 1e-12 >= mu_from_rho(*precomputed_rho);
    } else if (compute_feasibility) {
        weights.feasible = mu + 1e-12 >= mu_from_rho(compute_rho(A));
    }
    return weights;
}

Eigen::VectorXd feasibility_margin(const DesignMatrix& A, const DebiasWeights& W) {
    if (W.W.rows() != A.n() || W.W.cols() != A.p()) {
        throw std::invalid_argument("feasibility_margin: dimension mismatch");
    }
    const double nd = static_cast<double>(A.n());
    Eigen::VectorXd margins(A.p());
    // residual column j = (1/n) A' w_.j - e_j, built a column at a time to
    // keep memory at O(p) rather than materializing the p x p product.
    for (Eigen::Index j = 0; j < A.p(); ++j) {
        Eigen::VectorXd res = A.entries().transpose() * W.W.col(j) / nd;
        res(j) -= 1.0;
        margins(j) = res.lpNorm<Eigen::Infinity>();
    }
    return margins;
}

DebiasedEstimate debias(const DesignMatrix& A, const Measurement& y,
                        const LassoEstimate& beta_hat, const DebiasWeights& W) {
    if (y.y.size() != A.n() || beta_hat.beta_hat.size() != A.p() ||
        W.W.rows() != A.n() || W.W.cols() != A.p()) {
        throw std::invalid_argument("debias: dimension mismatch");
    }
    const double nd = static_cast<double>(A.n());
    DebiasedEstimate est;
    est.mu = W.mu;
    est.sigma = y.sigma;
    const Eigen::VectorXd residual = y.y - A.entries() * beta_hat.beta_hat;
    est.beta_d = beta_hat.beta_hat + W.W.transpose() * residual / nd;
    est.std_errors = y.sigma * W.W.colwise().norm().transpose() / nd;
    return est;
}

DebiasedEstimate debias_with_scales(const DesignMatrix& A, const Measurement& y,
                                    const LassoEstimate& beta_hat,
                                    const ClosedFormScales& s) {
    if (y.y.size() != A.n() || beta_hat.beta_hat.size() != A.p() ||
        s.scale.size() != A.p()) {
        throw std::invalid_argument("debias_with_scales: dimension mismatch");
    }
    const double nd = static_cast<double>(A.n());
    DebiasedEstimate est;
    est.mu = s.mu;
    est.sigma = y.sigma;
    const Eigen::VectorXd residual = y.y - A.entries() * beta_hat.beta_hat;
    est.beta_d = beta_hat.beta_hat +
                 s.scale.cwiseProduct(A.entries().transpose() * residual) / nd;
    // ||w_.j|| = scale_j * ||a_.j||.
    est.std_errors = (y.sigma / nd) *
                     s.scale.cwiseProduct(A.col_sq_norms().cwiseSqrt());
    return est;
}

}  // namespace fastdebias
