#pragma once

#include <vector>

#include "fastdebias/debias.hpp"
#include "fastdebias/types.hpp"

namespace fastdebias {

// Iterative baseline for the per-column problem
//
//   P_j:  minimize (1/n) w'w   subject to  ||(1/n) A'w - e_j||_inf <= mu,
//
// solved through its Fenchel dual
//
//   sup_u  -(1/4n) u'A'Au + u_j - mu ||u||_1,
//
// an l1-regularized concave quadratic handled by cyclic coordinate descent
// with the Gram matrix cached. Each coordinate update is a closed-form soft
// threshold: with G = A'A and S = Gu,
//
//   u_k <- soft( delta_kj - (S_k - G_kk u_k) / (2n), mu ) / (G_kk / (2n)).
//
// The primal is recovered as w = A u / 2 and optimality is certified by the
// duality gap, which for the recovered primal equals
// u'S/(2n) - u_j + mu ||u||_1 whenever w is feasible.

struct DualIterate {
    Eigen::VectorXd u;          // length p
    Eigen::Index j = 0;         // target column
    double dual_objective = 0.0;
};

struct QpSolution {
    Eigen::VectorXd w;          // length n
    DualIterate u;
    double primal_objective = 0.0;
    double gap = 0.0;           // primal - dual; >= -1e-10 by weak duality
    long iterations = 0;        // full dual sweeps
};

struct QpOptions {
    double tol = 1e-8;           // stop when gap <= tol * max(1, primal)
    double feas_tol = 1e-10;     // allowed margin excess on the recovered primal
    long max_iters = 20000;      // full sweeps per column
    // Dual objective above this certifies infeasible-or-unbounded.
    double divergence_bound = 1e12;
    unsigned threads = 1;        // parallel columns in solve_all
    bool record_dual_objectives = false;  // test hook
};

// f*(u) = (n/4) ||u||_2^2, the conjugate of w -> (1/n)||w||^2.
double conjugate_f(const Eigen::VectorXd& u, Eigen::Index n);

// g_j*(u) = u_j + mu ||u||_1, the support function of the constraint box.
double conjugate_g(const Eigen::VectorXd& u, Eigen::Index j, double mu);

// Primal minus dual objective for the pair (w, u); +infinity when w is
// infeasible (margin beyond mu + feas_tol).
double duality_gap(const DesignMatrix& A, const Eigen::VectorXd& w,
                   const Eigen::VectorXd& u, Eigen::Index j, double mu,
                   double feas_tol = 1e-9);

struct QpColumnStats {
    double gap = 0.0;
    double margin = 0.0;
    long iterations = 0;
    std::vector<double> dual_objectives;  // per sweep, when recorded
};

// Solves P_j from the cold start u = 0. Throws InfeasibleOrUnboundedError on
// dual divergence and ConvergenceError when max_iters sweeps do not reach the
// tolerances. `gram` must be A'A (pass the same matrix to every column).
QpSolution solve_column(const DesignMatrix& A, const Eigen::MatrixXd& gram,
                        Eigen::Index j, double mu, const QpOptions& opts,
                        QpColumnStats* stats = nullptr);

QpSolution solve_column(const DesignMatrix& A, Eigen::Index j, double mu,
                        const QpOptions& opts);

struct QpSolveStats {
    double max_gap = 0.0;
    double max_margin = 0.0;
    long total_iterations = 0;
    double seconds = 0.0;  // wall clock including the Gram build
};

// All p columns; provenance QpSolver, per-column objectives filled, wall
// clock recorded. Per-column failures are rethrown with the column index.
DebiasWeights solve_all(const DesignMatrix& A, double mu, const QpOptions& opts,
                        QpSolveStats* stats = nullptr);

}  // namespace fastdebias
