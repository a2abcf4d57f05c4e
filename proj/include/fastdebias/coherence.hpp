#pragma once

#include "fastdebias/types.hpp"

namespace fastdebias {

// Column-coherence statistics of a design matrix:
//   rho = max_{i != j} |a_.i' a_.j| / ||a_.j||^2   (ordered pairs; the
//         denominator is the norm of the second column),
//   L   = min_j ||a_.j||^2 / n,
//   nu  = max_{i != j} |a_.i' a_.j| / n,
// and the closed-form optimality threshold rho / (1 + rho). The chain
// rho/(1+rho) <= rho <= nu/L holds deterministically for every matrix.
struct CoherenceStats {
    double rho = 0.0;
    double L = 0.0;
    double nu = 0.0;
    double mu_threshold = 0.0;  // rho / (1 + rho), always < 1
};

// Constants entering the probabilistic bounds: sub-Gaussian norm kappa of the
// whitened rows, eigenvalue bounds of the row covariance, and the free
// constant c in (sqrt(2)/(1+sqrt(2)), 1).
struct TheoreticalBoundParams {
    double kappa = 1.0;
    double c_min = 1.0;
    double c_max = 1.0;
    double c = 0.9;

    void validate() const;  // throws std::invalid_argument
};

// Exact maximum over ordered pairs. Each ratio is evaluated as
// (|g_ij|/n) / (||a_.j||^2/n), the same roundings used by compute_nu and
// compute_L, so the chain inequality also holds exactly in floating point.
// Cost O(n p^2) via blocked Gram products; memory O(p * block).
double compute_rho(const DesignMatrix& A);

double compute_L(const DesignMatrix& A);
double compute_nu(const DesignMatrix& A);

// rho / (1 + rho); strictly increasing, maps [0, inf) into [0, 1).
double mu_from_rho(double rho);

CoherenceStats coherence_stats(const DesignMatrix& A);

// mu = 2*sqrt(2) * (kappa^2/c) * (c_max/c_min) * sqrt(log p / n), with the
// sample-size hypothesis n >= 4 c_max^2 kappa^4 / (c_min^2 (1-c)^2) * log p
// enforced; violations raise SampleSizeError carrying the minimal n.
double theoretical_mu(const TheoreticalBoundParams& params, Eigen::Index n,
                      Eigen::Index p);

// The displayed formula without the hypothesis guard.
double theoretical_mu_value(const TheoreticalBoundParams& params, Eigen::Index n,
                            Eigen::Index p);

// Minimal n admitted by the sample-size hypothesis above.
long theoretical_min_n(const TheoreticalBoundParams& params, Eigen::Index p);

struct BoundChainReport {
    double mu_threshold = 0.0;
    double rho = 0.0;
    double nu_over_L = 0.0;
    bool holds = false;  // always true; usable as a self-test
};

BoundChainReport bound_chain_holds(const DesignMatrix& A);

// Sub-Gaussian norms of the built-in unit-scale ensembles, computed
// analytically under two conventions:
//
//  * `moment`: sup_{q>=1} q^{-1/2} (E|x|^q)^{1/q}. For a standard Gaussian
//    the supremum sits at q = 1, giving sqrt(2/pi); a Rademacher variable
//    has every absolute moment equal to 1, giving exactly 1.
//  * `orlicz`: inf{ t > 0 : E exp(x^2/t^2) <= 2 }, the convention under
//    which the product-of-sub-Gaussians and Bernstein steps of the tail
//    bounds hold with their stated constants. Gaussian: sqrt(8/3);
//    Rademacher: 1/sqrt(log 2).
//
// The two differ by a bounded factor; bound-validation experiments report
// results over this range rather than a single value.
struct KappaConstants {
    double moment;
    double orlicz;
};

KappaConstants kappa_constants(EnsembleSpec::Kind kind);

}  // namespace fastdebias
