#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

namespace fastdebias {

// Row distribution of a generated design matrix. column_scales, when present,
// holds per-coordinate standard deviations (a diagonal row covariance);
// correlated rows are out of scope and rejected upstream.
struct EnsembleSpec {
    enum class Kind { Gaussian, Rademacher };

    Kind kind = Kind::Gaussian;
    std::optional<Eigen::VectorXd> column_scales;  // strictly positive, length p

    // Throws std::invalid_argument if scales are present but not strictly
    // positive or not of length p.
    void validate(Eigen::Index p) const;
};

// n x p design matrix with cached squared column norms. Immutable after
// construction; safe to share read-only across threads.
class DesignMatrix {
public:
    explicit DesignMatrix(Eigen::MatrixXd entries,
                          std::optional<EnsembleSpec> ensemble = std::nullopt);

    Eigen::Index n() const { return entries_.rows(); }
    Eigen::Index p() const { return entries_.cols(); }
    const Eigen::MatrixXd& entries() const { return entries_; }
    const Eigen::VectorXd& col_sq_norms() const { return col_sq_norms_; }
    const std::optional<EnsembleSpec>& ensemble() const { return ensemble_; }

    // Sample covariance A^T A / n, built densely on request only.
    Eigen::MatrixXd sample_covariance() const;
    Eigen::MatrixXd gram() const { return entries_.transpose() * entries_; }

    bool has_zero_column() const { return col_sq_norms_.minCoeff() == 0.0; }
    // Throws std::invalid_argument when some column is identically zero.
    void require_nonzero_columns(const char* op_name) const;

private:
    Eigen::MatrixXd entries_;
    Eigen::VectorXd col_sq_norms_;
    std::optional<EnsembleSpec> ensemble_;
};

// Ground-truth sparse signal with its explicit support (sorted indices).
struct SparseSignal {
    Eigen::VectorXd values;
    std::vector<Eigen::Index> support;

    Eigen::Index p() const { return values.size(); }
    Eigen::Index s() const { return static_cast<Eigen::Index>(support.size()); }

    // Builds from a dense vector, deriving the support; validates that the
    // support is exactly the set of nonzero entries.
    static SparseSignal from_values(Eigen::VectorXd values);
    void validate() const;
};

struct Measurement {
    Eigen::VectorXd y;
    double sigma = 0.0;        // noise standard deviation used to generate y
    std::uint64_t seed = 0;
};

}  // namespace fastdebias
