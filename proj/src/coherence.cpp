#include "fastdebias/coherence.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "fastdebias/errors.hpp"

namespace fastdebias {
namespace {

// Column-strip width for the Gram scan; keeps the working set at p * block
// doubles no matter how large p grows.
constexpr Eigen::Index kGramBlock = 256;

// Walks every ordered pair (i, j), i != j, handing the visitor the rounded
// values num = fl(|a_.i' a_.j| / n) and den = fl(||a_.j||^2 / n). rho, nu and
// L are all built from these exact same roundings, which makes the chain
// rho/(1+rho) <= rho <= nu/L hold in floating point and not just in exact
// arithmetic: fl(x/y) is monotone in x and 1/y.
template <typename Visitor>
void scan_pairs(const DesignMatrix& A, Visitor&& visit) {
    const Eigen::Index p = A.p();
    const double n = static_cast<double>(A.n());
    const Eigen::MatrixXd& entries = A.entries();
    const Eigen::VectorXd& csq = A.col_sq_norms();
    for (Eigen::Index j0 = 0; j0 < p; j0 += kGramBlock) {
        const Eigen::Index width = std::min(kGramBlock, p - j0);
        const Eigen::MatrixXd strip =
            entries.transpose() * entries.middleCols(j0, width);
        for (Eigen::Index b = 0; b < width; ++b) {
            const Eigen::Index j = j0 + b;
            const double den = csq(j) / n;
            for (Eigen::Index i = 0; i < p; ++i) {
                if (i == j) continue;
                visit(std::abs(strip(i, b)) / n, den);
            }
        }
    }
}

}  // namespace

double compute_rho(const DesignMatrix& A) {
    A.require_nonzero_columns("compute_rho");
    double rho = 0.0;
    scan_pairs(A, [&](double num, double den) {
        const double ratio = num / den;
        if (ratio > rho) rho = ratio;
    });
    return rho;
}

double compute_L(const DesignMatrix& A) {
    const double n = static_cast<double>(A.n());
    double L = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < A.p(); ++j) {
        L = std::min(L, A.col_sq_norms()(j) / n);
    }
    return L;
}

double compute_nu(const DesignMatrix& A) {
    double nu = 0.0;
    scan_pairs(A, [&](double num, double) { nu = std::max(nu, num); });
    return nu;
}

double mu_from_rho(double rho) {
    if (!(rho >= 0.0)) {
        throw std::invalid_argument("mu_from_rho: rho must be >= 0");
    }
    const double mu = rho / (1.0 + rho);
    // For astronomically large rho the division can round up to 1.
    return mu < 1.0 ? mu : std::nextafter(1.0, 0.0);
}

CoherenceStats coherence_stats(const DesignMatrix& A) {
    A.require_nonzero_columns("coherence_stats");
    CoherenceStats stats;
    stats.L = compute_L(A);
    scan_pairs(A, [&](double num, double den) {
        stats.nu = std::max(stats.nu, num);
        const double ratio = num / den;
        if (ratio > stats.rho) stats.rho = ratio;
    });
    stats.mu_threshold = mu_from_rho(stats.rho);
    return stats;
}

void TheoreticalBoundParams::validate() const {
    if (!(kappa > 0.0)) {
        throw std::invalid_argument("bound params: kappa must be > 0");
    }
    if (!(c_min > 0.0) || !(c_min <= c_max)) {
        throw std::invalid_argument("bound params: need 0 < c_min <= c_max");
    }
    const double c_lo = std::sqrt(2.0) / (1.0 + std::sqrt(2.0));
    if (!(c > c_lo) || !(c < 1.0)) {
        throw std::invalid_argument(
            "bound params: c must lie in (sqrt(2)/(1+sqrt(2)), 1)");
    }
}

long theoretical_min_n(const TheoreticalBoundParams& params, Eigen::Index p) {
    const double k2 = params.kappa * params.kappa;
    const double ratio = params.c_max / params.c_min;
    const double bound = 4.0 * ratio * ratio * k2 * k2 /
                         ((1.0 - params.c) * (1.0 - params.c)) *
                         std::log(static_cast<double>(p));
    return static_cast<long>(std::ceil(bound));
}

double theoretical_mu_value(const TheoreticalBoundParams& params, Eigen::Index n,
                            Eigen::Index p) {
    const double k2 = params.kappa * params.kappa;
    return 2.0 * std::sqrt(2.0) * (k2 / params.c) * (params.c_max / params.c_min) *
           std::sqrt(std::log(static_cast<double>(p)) / static_cast<double>(n));
}

double theoretical_mu(const TheoreticalBoundParams& params, Eigen::Index n,
                      Eigen::Index p) {
    params.validate();
    if (p < 2) throw std::invalid_argument("theoretical_mu: p must be >= 2");
    const long min_n = theoretical_min_n(params, p);
    if (n < min_n) {
        throw SampleSizeError("theoretical_mu: n = " + std::to_string(n) +
                                  " below the sample-size hypothesis; need n >= " +
                                  std::to_string(min_n),
                              min_n);
    }
    return theoretical_mu_value(params, n, p);
}

BoundChainReport bound_chain_holds(const DesignMatrix& A) {
    A.require_nonzero_columns("bound_chain_holds");
    const CoherenceStats stats = coherence_stats(A);
    BoundChainReport report;
    report.mu_threshold = stats.mu_threshold;
    report.rho = stats.rho;
    report.nu_over_L = stats.nu / stats.L;
    report.holds =
        report.mu_threshold <= report.rho && report.rho <= report.nu_over_L;
    return report;
}

KappaConstants kappa_constants(EnsembleSpec::Kind kind) {
    switch (kind) {
        case EnsembleSpec::Kind::Gaussian:
            // moment: sup over q of q^{-1/2} (E|N(0,1)|^q)^{1/q} sits at q = 1
            // where E|x| = sqrt(2/pi). orlicz: E exp(x^2/t^2) = (1-2/t^2)^{-1/2}
            // equals 2 at t^2 = 8/3.
            return {std::sqrt(2.0 / M_PI), std::sqrt(8.0 / 3.0)};
        case EnsembleSpec::Kind::Rademacher:
            // |x| = 1 almost surely: every moment term is q^{-1/2}, maximal at
            // q = 1. orlicz: exp(1/t^2) = 2 at t = 1/sqrt(log 2).
            return {1.0, 1.0 / std::sqrt(std::log(2.0))};
    }
    throw std::logic_error("kappa_constants: unknown ensemble kind");
}

}  // namespace fastdebias
