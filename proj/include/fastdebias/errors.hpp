#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace fastdebias {

// Iterative solver ran out of iterations. Carries the last iterate and the
// residual (KKT violation for the lasso, duality gap for the QP) so callers
// can inspect or warm-start from it.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, Eigen::VectorXd last_iterate,
                     double residual, long iterations)
        : std::runtime_error(what),
          last_iterate_(std::move(last_iterate)),
          residual_(residual),
          iterations_(iterations) {}

    const Eigen::VectorXd& last_iterate() const { return last_iterate_; }
    double residual() const { return residual_; }
    long iterations() const { return iterations_; }

private:
    Eigen::VectorXd last_iterate_;
    double residual_;
    long iterations_;
};

// Dual objective of a per-column QP diverged past the configured bound:
// the primal is infeasible or the dual unbounded for this (A, mu, j).
class InfeasibleOrUnboundedError : public std::runtime_error {
public:
    InfeasibleOrUnboundedError(const std::string& what, Eigen::Index column,
                               double dual_objective)
        : std::runtime_error(what), column_(column), dual_objective_(dual_objective) {}

    Eigen::Index column() const { return column_; }
    double dual_objective() const { return dual_objective_; }

private:
    Eigen::Index column_;
    double dual_objective_;
};

// A probabilistic-bound hypothesis of the form n >= f(params) * log p failed.
// Carries the minimal admissible n.
class SampleSizeError : public std::invalid_argument {
public:
    SampleSizeError(const std::string& what, long min_n)
        : std::invalid_argument(what), min_n_(min_n) {}

    long min_n() const { return min_n_; }

private:
    long min_n_;
};

// Hypothesis test requested for a coordinate with zero standard error but a
// nonzero estimate.
class DegenerateTestError : public std::runtime_error {
public:
    DegenerateTestError(const std::string& what, Eigen::Index coordinate)
        : std::runtime_error(what), coordinate_(coordinate) {}

    Eigen::Index coordinate() const { return coordinate_; }

private:
    Eigen::Index coordinate_;
};

}  // namespace fastdebias
