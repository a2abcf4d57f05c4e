#include "fastdebias/qp_baseline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "fastdebias/errors.hpp"
#include "fastdebias/lasso.hpp"  // soft_threshold
#include "fastdebias/parallel.hpp"

namespace fastdebias {

double conjugate_f(const Eigen::VectorXd& u, Eigen::Index n) {
    return 0.25 * static_cast<double>(n) * u.squaredNorm();
}

double conjugate_g(const Eigen::VectorXd& u, Eigen::Index j, double mu) {
    if (mu < 0.0) throw std::invalid_argument("conjugate_g: mu must be >= 0");
    if (j < 0 || j >= u.size()) {
        throw std::invalid_argument("conjugate_g: j out of range");
    }
    return u(j) + mu * u.lpNorm<1>();
}

double duality_gap(const DesignMatrix& A, const Eigen::VectorXd& w,
                   const Eigen::VectorXd& u, Eigen::Index j, double mu,
                   double feas_tol) {
    if (w.size() != A.n() || u.size() != A.p() || j < 0 || j >= A.p()) {
        throw std::invalid_argument("duality_gap: dimension mismatch");
    }
    const double nd = static_cast<double>(A.n());
    Eigen::VectorXd res = A.entries().transpose() * w / nd;
    res(j) -= 1.0;
    if (res.lpNorm<Eigen::Infinity>() > mu + feas_tol) {
        return std::numeric_limits<double>::infinity();
    }
    const double primal = w.squaredNorm() / nd;
    const Eigen::VectorXd v = A.entries() * u;
    const double dual = -v.squaredNorm() / (4.0 * nd) + u(j) - mu * u.lpNorm<1>();
    return primal - dual;
}

namespace {

struct Certificate {
    double dual = 0.0;
    double primal = 0.0;
    double gap = 0.0;
    double margin = 0.0;
    bool converged = false;
};

}  // namespace

QpSolution solve_column(const DesignMatrix& A, const Eigen::MatrixXd& gram,
                        Eigen::Index j, double mu, const QpOptions& opts,
                        QpColumnStats* stats) {
    const Eigen::Index p = A.p();
    if (gram.rows() != p || gram.cols() != p) {
        throw std::invalid_argument("solve_column: gram must be A'A (p x p)");
    }
    if (j < 0 || j >= p) throw std::invalid_argument("solve_column: j out of range");
    if (mu < 0.0) throw std::invalid_argument("solve_column: mu must be >= 0");
    A.require_nonzero_columns("solve_column");

    const double nd = static_cast<double>(A.n());
    Eigen::VectorXd u = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd S = Eigen::VectorXd::Zero(p);  // S = G u, maintained incrementally
    long iters = 0;
    constexpr double kStallFloor = 1e-16;

    auto refresh = [&] { S.noalias() = gram * u; };

    auto sweep = [&](const std::vector<Eigen::Index>& coords) {
        double max_change = 0.0;
        for (Eigen::Index k : coords) {
            const double gkk = gram(k, k);
            const double a = gkk / (2.0 * nd);
            const double b = (k == j ? 1.0 : 0.0) - (S(k) - gkk * u(k)) / (2.0 * nd);
            const double updated = soft_threshold(b, mu) / a;
            const double old = u(k);
            if (updated != old) {
                u(k) = updated;
                S.noalias() += gram.col(k) * (updated - old);
                max_change = std::max(max_change, std::abs(updated - old));
            }
        }
        return max_change;
    };

    auto certify = [&]() {
        Certificate c;
        const double quad = u.dot(S) / (4.0 * nd);
        c.primal = quad;  // (1/n)||A u / 2||^2 for the recovered primal
        c.dual = -quad + u(j) - mu * u.lpNorm<1>();
        c.gap = c.primal - c.dual;
        for (Eigen::Index k = 0; k < p; ++k) {
            c.margin = std::max(c.margin,
                                std::abs(S(k) / (2.0 * nd) - (k == j ? 1.0 : 0.0)));
        }
        c.converged = c.margin <= mu + opts.feas_tol &&
                      c.gap <= opts.tol * std::max(1.0, std::abs(c.primal));
        return c;
    };

    auto check_divergence = [&](const Certificate& c) {
        if (c.dual > opts.divergence_bound) {
            throw InfeasibleOrUnboundedError(
                "solve_column: dual objective diverged for column " +
                    std::to_string(j) + " (mu = " + std::to_string(mu) +
                    "); problem infeasible or dual unbounded",
                j, c.dual);
        }
    };

    std::vector<Eigen::Index> all(static_cast<std::size_t>(p));
    for (Eigen::Index k = 0; k < p; ++k) all[static_cast<std::size_t>(k)] = k;
    std::vector<Eigen::Index> active;

    Certificate cert;
    bool done = false;
    long sweeps_since_refresh = 0;
    while (!done) {
        if (iters >= opts.max_iters) {
            refresh();
            cert = certify();
            if (cert.converged) break;
            throw ConvergenceError(
                "solve_column: column " + std::to_string(j) + " hit max_iters = " +
                    std::to_string(opts.max_iters) + " with gap " +
                    std::to_string(cert.gap) + " and margin excess " +
                    std::to_string(std::max(0.0, cert.margin - mu)),
                u, cert.gap, iters);
        }

        const bool full_pass = active.empty() || (iters % 8 == 0);
        const double change = sweep(full_pass ? all : active);
        ++iters;
        if (++sweeps_since_refresh >= 16) {
            refresh();
            sweeps_since_refresh = 0;
        }
        cert = certify();
        check_divergence(cert);
        if (stats && opts.record_dual_objectives) {
            stats->dual_objectives.push_back(cert.dual);
        }

        const bool stalled =
            full_pass &&
            change <= kStallFloor * std::max(1.0, u.lpNorm<Eigen::Infinity>());
        if (cert.converged || stalled) {
            // Incremental S drifts; only a fresh certificate counts.
            refresh();
            sweeps_since_refresh = 0;
            cert = certify();
            check_divergence(cert);
            if (cert.converged) {
                done = true;
            } else if (stalled) {
                throw ConvergenceError(
                    "solve_column: column " + std::to_string(j) +
                        " stalled after " + std::to_string(iters) +
                        " sweeps with gap " + std::to_string(cert.gap) +
                        " and margin excess " +
                        std::to_string(std::max(0.0, cert.margin - mu)),
                    u, cert.gap, iters);
            }
        }

        if (full_pass) {
            active.clear();
            for (Eigen::Index k = 0; k < p; ++k) {
                if (u(k) != 0.0) active.push_back(k);
            }
        }
    }

    QpSolution sol;
    sol.w = A.entries() * u / 2.0;
    sol.u.u = std::move(u);
    sol.u.j = j;
    sol.u.dual_objective = cert.dual;
    sol.primal_objective = sol.w.squaredNorm() / nd;
    sol.gap = sol.primal_objective - cert.dual;
    sol.iterations = iters;
    if (stats) {
        stats->gap = sol.gap;
        stats->margin = cert.margin;
        stats->iterations = iters;
    }
    return sol;
}

QpSolution solve_column(const DesignMatrix& A, Eigen::Index j, double mu,
                        const QpOptions& opts) {
    return solve_column(A, A.gram(), j, mu, opts, nullptr);
}

DebiasWeights solve_all(const DesignMatrix& A, double mu, const QpOptions& opts,
                        QpSolveStats* stats) {
    const auto start = std::chrono::steady_clock::now();
    const Eigen::MatrixXd gram = A.gram();

    DebiasWeights weights;
    weights.mu = mu;
    weights.provenance = DebiasWeights::Provenance::QpSolver;
    weights.W.resize(A.n(), A.p());
    weights.per_column_objective.resize(A.p());

    std::vector<QpColumnStats> column_stats(static_cast<std::size_t>(A.p()));
    parallel_for(static_cast<std::size_t>(A.p()), opts.threads, [&](std::size_t jj) {
        const auto j = static_cast<Eigen::Index>(jj);
        QpSolution sol = solve_column(A, gram, j, mu, opts, &column_stats[jj]);
        weights.W.col(j) = sol.w;
        weights.per_column_objective(j) = sol.primal_objective;
    });

    weights.build_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (stats) {
        stats->seconds = weights.build_seconds;
        stats->max_gap = 0.0;
        stats->max_margin = 0.0;
        stats->total_iterations = 0;
        for (const auto& cs : column_stats) {
            stats->max_gap = std::max(stats->max_gap, cs.gap);
            stats->max_margin = std::max(stats->max_margin, cs.margin);
            stats->total_iterations += cs.iterations;
        }
    }
    return weights;
}

}  // namespace fastdebias
