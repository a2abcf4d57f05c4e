#pragma once

// Test-only reference solvers, deliberately independent of the production
// dual coordinate-descent path.

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <stdexcept>

#include "fastdebias/types.hpp"

namespace fastdebias::testing {

struct AdmmResult {
    Eigen::VectorXd w;
    double objective = 0.0;
    long iterations = 0;
};

// ADMM on  min (1/n)||w||^2  s.t.  v = (1/n)A'w - e_j, ||v||_inf <= mu,
// with the w-step an n x n Cholesky solve and the v-step a box clamp.
inline AdmmResult admm_qp_oracle(const DesignMatrix& A, Eigen::Index j, double mu,
                                 double tol = 1e-10, long max_iters = 200000) {
    const Eigen::Index n = A.n();
    const Eigen::Index p = A.p();
    const double nd = static_cast<double>(n);
    const double rho = 1.0 * nd;  // penalty; scale with n for balance

    const Eigen::MatrixXd AAt = A.entries() * A.entries().transpose();
    const Eigen::LLT<Eigen::MatrixXd> solver(
        2.0 * Eigen::MatrixXd::Identity(n, n) + (rho / nd) * AAt);

    Eigen::VectorXd v = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd d = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd ej = Eigen::VectorXd::Unit(p, j);

    AdmmResult result;
    for (long it = 0; it < max_iters; ++it) {
        w = solver.solve(rho * (A.entries() * (ej + v - d)));
        const Eigen::VectorXd map = A.entries().transpose() * w / nd - ej;
        const Eigen::VectorXd v_new = (map + d).cwiseMax(-mu).cwiseMin(mu);
        const double primal_res = (map - v_new).lpNorm<Eigen::Infinity>();
        const double dual_res = rho * (v_new - v).lpNorm<Eigen::Infinity>();
        v = v_new;
        d += map - v;
        result.iterations = it + 1;
        if (primal_res < tol && dual_res < tol * rho) break;
    }
    result.w = w;
    result.objective = w.squaredNorm() / nd;
    return result;
}

// Grid-search conjugate of f(w) = (1/n)||w||^2 in two dimensions:
// sup over the lattice of u'w - f(w).
inline double lattice_conjugate_f(const Eigen::Vector2d& u, Eigen::Index n,
                                  double radius, int points_per_axis) {
    const double nd = static_cast<double>(n);
    double best = -1e300;
    for (int a = 0; a < points_per_axis; ++a) {
        for (int b = 0; b < points_per_axis; ++b) {
            Eigen::Vector2d w;
            w << -radius + 2.0 * radius * a / (points_per_axis - 1),
                 -radius + 2.0 * radius * b / (points_per_axis - 1);
            best = std::max(best, u.dot(w) - w.squaredNorm() / nd);
        }
    }
    return best;
}

// Corner enumeration of sup{ u'w : ||w - e_j||_inf <= mu }; the maximum of a
// linear function over a box is attained at a corner.
inline double corner_conjugate_g(const Eigen::VectorXd& u, Eigen::Index j,
                                 double mu) {
    const Eigen::Index p = u.size();
    if (p > 20) throw std::invalid_argument("corner oracle: p too large");
    double best = -1e300;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << p); ++mask) {
        double value = 0.0;
        for (Eigen::Index k = 0; k < p; ++k) {
            const double center = k == j ? 1.0 : 0.0;
            const double corner = center + ((mask >> k) & 1 ? mu : -mu);
            value += u(k) * corner;
        }
        best = std::max(best, value);
    }
    return best;
}

}  // namespace fastdebias::testing
