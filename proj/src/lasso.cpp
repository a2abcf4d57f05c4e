#include "fastdebias/lasso.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "fastdebias/errors.hpp"

namespace fastdebias {
namespace {

double kkt_violation(const Eigen::VectorXd& gradient, const Eigen::VectorXd& beta,
                     double lambda) {
    double worst = 0.0;
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
        const double v = beta(j) == 0.0
                             ? std::max(std::abs(gradient(j)) - lambda, 0.0)
                             : std::abs(gradient(j) - lambda * (beta(j) > 0 ? 1.0 : -1.0));
        worst = std::max(worst, v);
    }
    return worst;
}

}  // namespace

double lasso_objective(const DesignMatrix& A, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& beta, double lambda) {
    const Eigen::VectorXd r = y - A.entries() * beta;
    return 0.5 * r.squaredNorm() / static_cast<double>(A.n()) +
           lambda * beta.lpNorm<1>();
}

double kkt_residual(const DesignMatrix& A, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& beta, double lambda) {
    if (y.size() != A.n() || beta.size() != A.p()) {
        throw std::invalid_argument("kkt_residual: dimension mismatch");
    }
    const Eigen::VectorXd r = y - A.entries() * beta;
    const Eigen::VectorXd g = A.entries().transpose() * r / static_cast<double>(A.n());
    return kkt_violation(g, beta, lambda);
}

double lambda_rule(double sigma, Eigen::Index n, Eigen::Index p, double scale) {
    return scale * sigma *
           std::sqrt(2.0 * std::log(static_cast<double>(p)) / static_cast<double>(n));
}

LassoEstimate fit_lasso(const DesignMatrix& A, const Measurement& meas,
                        const LassoConfig& cfg) {
    const Eigen::Index n = A.n();
    const Eigen::Index p = A.p();
    if (meas.y.size() != n) {
        throw std::invalid_argument("fit_lasso: y has length " +
                                    std::to_string(meas.y.size()) + ", expected " +
                                    std::to_string(n));
    }
    if (cfg.lambda < 0.0 || !(cfg.tol > 0.0) || cfg.max_iters < 1) {
        throw std::invalid_argument("fit_lasso: invalid config");
    }
    if (cfg.lambda == 0.0 && n < p) {
        throw std::invalid_argument(
            "fit_lasso: lambda = 0 is allowed only when n >= p");
    }

    const Eigen::MatrixXd& X = A.entries();
    const double nd = static_cast<double>(n);
    const Eigen::VectorXd col_scale = A.col_sq_norms() / nd;  // ||a_.j||^2 / n
    for (Eigen::Index j = 0; j < p; ++j) {
        if (col_scale(j) == 0.0 && cfg.lambda == 0.0) {
            throw std::invalid_argument(
                "fit_lasso: zero column with lambda = 0 has no unique update");
        }
    }

    Eigen::VectorXd beta;
    if (cfg.warm_start) {
        if (cfg.warm_start->size() != p) {
            throw std::invalid_argument("fit_lasso: warm start has wrong length");
        }
        beta = *cfg.warm_start;
    } else {
        beta = Eigen::VectorXd::Zero(p);
    }

    Eigen::VectorXd r = meas.y - X * beta;
    const double grad0_inf = (X.transpose() * meas.y / nd).lpNorm<Eigen::Infinity>();
    const double tol_scale = std::max({1.0, cfg.lambda, grad0_inf});
    const double tol_abs = cfg.tol * tol_scale;

    LassoEstimate est;
    est.tol_scale = tol_scale;

    // One pass over the given coordinate list.
    auto sweep = [&](const std::vector<Eigen::Index>& coords) {
        double max_change = 0.0;
        for (Eigen::Index j : coords) {
            if (col_scale(j) == 0.0) continue;  // zero column: beta_j stays put
            const double old = beta(j);
            const double z = col_scale(j) * old + X.col(j).dot(r) / nd;
            const double updated = soft_threshold(z, cfg.lambda) / col_scale(j);
            if (updated != old) {
                beta(j) = updated;
                r.noalias() += X.col(j) * (old - updated);
                max_change = std::max(max_change, std::abs(updated - old));
            }
        }
        return max_change;
    };

    std::vector<Eigen::Index> all(static_cast<std::size_t>(p));
    for (Eigen::Index j = 0; j < p; ++j) all[static_cast<std::size_t>(j)] = j;

    long iters = 0;
    double kkt = std::numeric_limits<double>::infinity();
#ifndef NDEBUG
    double prev_objective = std::numeric_limits<double>::infinity();
#endif
    const double active_change_tol = 1e-12 * std::max(1.0, grad0_inf);

    while (iters < cfg.max_iters) {
        sweep(all);
        ++iters;
#ifndef NDEBUG
        {
            const double obj = lasso_objective(A, meas.y, beta, cfg.lambda);
            assert(obj <= prev_objective + 1e-10 * std::max(1.0, std::abs(prev_objective)));
            prev_objective = obj;
        }
#endif
        if (cfg.record_objectives) {
            est.sweep_objectives.push_back(
                lasso_objective(A, meas.y, beta, cfg.lambda));
        }

        // Polish the active set before paying for the next global pass.
        std::vector<Eigen::Index> active;
        for (Eigen::Index j = 0; j < p; ++j) {
            if (beta(j) != 0.0) active.push_back(j);
        }
        while (!active.empty() && iters < cfg.max_iters) {
            const double change = sweep(active);
            ++iters;
            if (cfg.record_objectives) {
                est.sweep_objectives.push_back(
                    lasso_objective(A, meas.y, beta, cfg.lambda));
            }
            if (change <= active_change_tol) break;
        }

        // Certify against a freshly computed residual so accumulated drift in
        // r cannot fake convergence.
        r = meas.y - X * beta;
        const Eigen::VectorXd g = X.transpose() * r / nd;
        kkt = kkt_violation(g, beta, cfg.lambda);
        if (kkt <= tol_abs) {
            est.beta_hat = beta;
            est.iterations = iters;
            est.kkt_residual = kkt;
            est.objective = lasso_objective(A, meas.y, beta, cfg.lambda);
            return est;
        }
    }

    throw ConvergenceError("fit_lasso: max_iters = " + std::to_string(cfg.max_iters) +
                               " sweeps exhausted with KKT residual " +
                               std::to_string(kkt),
                           beta, kkt, iters);
}

}  // namespace fastdebias
