#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "fastdebias/model_gen.hpp"
#include "fastdebias/types.hpp"

namespace fastdebias::testing {

// Sylvester Hadamard matrix of size 2^k: columns are orthogonal with
// A'A = n I, the exact setting where the lasso has a soft-threshold
// closed form.
inline Eigen::MatrixXd hadamard(int k) {
    Eigen::MatrixXd h(1, 1);
    h(0, 0) = 1.0;
    for (int i = 0; i < k; ++i) {
        Eigen::MatrixXd next(2 * h.rows(), 2 * h.cols());
        next.topLeftCorner(h.rows(), h.cols()) = h;
        next.topRightCorner(h.rows(), h.cols()) = h;
        next.bottomLeftCorner(h.rows(), h.cols()) = h;
        next.bottomRightCorner(h.rows(), h.cols()) = -h;
        h = std::move(next);
    }
    return h;
}

inline DesignMatrix gaussian_matrix(Eigen::Index n, Eigen::Index p,
                                    std::uint64_t seed) {
    return generate_design(n, p, EnsembleSpec{EnsembleSpec::Kind::Gaussian, {}},
                           seed);
}

inline DesignMatrix rademacher_matrix(Eigen::Index n, Eigen::Index p,
                                      std::uint64_t seed) {
    return generate_design(n, p, EnsembleSpec{EnsembleSpec::Kind::Rademacher, {}},
                           seed);
}

// Column j attaining rho = max |a_.i' a_.j| / ||a_.j||^2. Its per-column
// threshold equals the global one, so the closed form for it is infeasible
// for any mu below rho/(1+rho).
inline Eigen::Index rho_argmax_column(const DesignMatrix& A) {
    Eigen::Index best_j = 1;
    double best = -1.0;
    for (Eigen::Index j = 0; j < A.p(); ++j) {
        const double den = A.entries().col(j).squaredNorm();
        for (Eigen::Index i = 0; i < A.p(); ++i) {
            if (i == j) continue;
            const double ratio =
                std::abs(A.entries().col(i).dot(A.entries().col(j))) / den;
            if (ratio > best) {
                best = ratio;
                best_j = j;
            }
        }
    }
    return best_j;
}

}  // namespace fastdebias::testing
