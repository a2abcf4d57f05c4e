#include "fastdebias/model_gen.hpp"

#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "fastdebias/rng.hpp"

namespace fastdebias {

DesignMatrix generate_design(Eigen::Index n, Eigen::Index p,
                             const EnsembleSpec& ensemble, std::uint64_t seed) {
    if (n < 1 || p < 1) {
        throw std::invalid_argument("generate_design: n and p must be >= 1");
    }
    ensemble.validate(p);

    SplitMix64 rng(derive_seed(seed, Stream::Matrix));
    Eigen::MatrixXd m(n, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        const double scale = ensemble.column_scales ? (*ensemble.column_scales)(j) : 1.0;
        if (ensemble.kind == EnsembleSpec::Kind::Gaussian) {
            for (Eigen::Index i = 0; i < n; ++i) m(i, j) = scale * rng.gaussian();
        } else {
            for (Eigen::Index i = 0; i < n; ++i) m(i, j) = scale * rng.rademacher();
        }
    }
    return DesignMatrix(std::move(m), ensemble);
}

SparseSignal generate_signal(Eigen::Index p, Eigen::Index s, double lo, double hi,
                             std::uint64_t seed) {
    if (p < 1) throw std::invalid_argument("generate_signal: p must be >= 1");
    if (s < 0 || s > p) {
        throw std::invalid_argument("generate_signal: need 0 <= s <= p, got s = " +
                                    std::to_string(s));
    }
    if (!(lo < hi)) throw std::invalid_argument("generate_signal: need lo < hi");

    SparseSignal sig;
    sig.values = Eigen::VectorXd::Zero(p);
    if (s == 0) return sig;

    // Partial Fisher-Yates: the first s slots end up a uniform s-subset.
    SplitMix64 support_rng(derive_seed(seed, Stream::SignalSupport));
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(p));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    for (Eigen::Index i = 0; i < s; ++i) {
        const auto offset = static_cast<Eigen::Index>(
            support_rng.below(static_cast<std::uint64_t>(p - i)));
        std::swap(idx[static_cast<std::size_t>(i)],
                  idx[static_cast<std::size_t>(i + offset)]);
    }
    sig.support.assign(idx.begin(), idx.begin() + s);
    std::sort(sig.support.begin(), sig.support.end());

    SplitMix64 value_rng(derive_seed(seed, Stream::SignalValues));
    for (Eigen::Index j : sig.support) sig.values(j) = value_rng.uniform(lo, hi);
    return sig;
}

double noise_sigma(const DesignMatrix& A, const SparseSignal& beta) {
    if (beta.p() != A.p()) {
        throw std::invalid_argument("noise_sigma: signal length " +
                                    std::to_string(beta.p()) + " != p = " +
                                    std::to_string(A.p()));
    }
    const Eigen::VectorXd projections = A.entries() * beta.values;
    return 0.05 * projections.lpNorm<1>() / static_cast<double>(A.n());
}

Measurement sample_measurements(const DesignMatrix& A, const SparseSignal& beta,
                                double sigma, std::uint64_t seed) {
    if (beta.p() != A.p()) {
        throw std::invalid_argument("sample_measurements: dimension mismatch");
    }
    if (sigma < 0.0) {
        throw std::invalid_argument("sample_measurements: sigma must be >= 0");
    }
    Measurement meas;
    meas.y = A.entries() * beta.values;
    meas.sigma = sigma;
    meas.seed = seed;
    if (sigma > 0.0) {
        SplitMix64 rng(derive_seed(seed, Stream::Noise));
        for (Eigen::Index i = 0; i < meas.y.size(); ++i) {
            meas.y(i) += sigma * rng.gaussian();
        }
    }
    return meas;
}

}  // namespace fastdebias
