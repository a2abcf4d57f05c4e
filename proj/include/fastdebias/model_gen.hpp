#pragma once

#include <cstdint>

#include "fastdebias/types.hpp"

namespace fastdebias {

// Draws an n x p matrix with i.i.d. entries from the ensemble, scaled per
// column when column_scales is set. Deterministic: the same (arguments, seed)
// give a bit-identical matrix. Entries are filled column-major from the
// Stream::Matrix substream of `seed`.
DesignMatrix generate_design(Eigen::Index n, Eigen::Index p,
                             const EnsembleSpec& ensemble, std::uint64_t seed);

// s distinct support indices by partial Fisher-Yates over [0, p), values
// uniform on [lo, hi). Support and values use separate substreams of `seed`.
SparseSignal generate_signal(Eigen::Index p, Eigen::Index s, double lo, double hi,
                             std::uint64_t seed);

// sigma := 0.05 * (1/n) * sum_i |<a_i., beta>|.
double noise_sigma(const DesignMatrix& A, const SparseSignal& beta);

// y = A beta + eta with eta i.i.d. N(0, sigma^2); sigma = 0 gives y = A beta
// exactly. Noise comes from the Stream::Noise substream of `seed`.
Measurement sample_measurements(const DesignMatrix& A, const SparseSignal& beta,
                                double sigma, std::uint64_t seed);

}  // namespace fastdebias
