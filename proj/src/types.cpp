#include "fastdebias/types.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace fastdebias {

void EnsembleSpec::validate(Eigen::Index p) const {
    if (!column_scales) return;
    if (column_scales->size() != p) {
        throw std::invalid_argument("ensemble: column_scales has length " +
                                    std::to_string(column_scales->size()) +
                                    ", expected p = " + std::to_string(p));
    }
    for (Eigen::Index j = 0; j < p; ++j) {
        if (!((*column_scales)(j) > 0.0)) {
            throw std::invalid_argument(
                "ensemble: column_scales must be strictly positive");
        }
    }
}

DesignMatrix::DesignMatrix(Eigen::MatrixXd entries,
                           std::optional<EnsembleSpec> ensemble)
    : entries_(std::move(entries)), ensemble_(std::move(ensemble)) {
    if (entries_.rows() < 1 || entries_.cols() < 1) {
        throw std::invalid_argument("DesignMatrix: n and p must be >= 1");
    }
    if (!entries_.allFinite()) {
        throw std::invalid_argument("DesignMatrix: entries must be finite");
    }
    if (ensemble_) ensemble_->validate(entries_.cols());
    col_sq_norms_ = entries_.colwise().squaredNorm();
}

Eigen::MatrixXd DesignMatrix::sample_covariance() const {
    return gram() / static_cast<double>(n());
}

void DesignMatrix::require_nonzero_columns(const char* op_name) const {
    if (has_zero_column()) {
        throw std::invalid_argument(std::string(op_name) +
                                    ": matrix has a zero column");
    }
}

SparseSignal SparseSignal::from_values(Eigen::VectorXd values) {
    SparseSignal sig;
    sig.values = std::move(values);
    for (Eigen::Index j = 0; j < sig.values.size(); ++j) {
        if (sig.values(j) != 0.0) sig.support.push_back(j);
    }
    return sig;
}

void SparseSignal::validate() const {
    if (!std::is_sorted(support.begin(), support.end())) {
        throw std::invalid_argument("SparseSignal: support must be sorted");
    }
    std::size_t k = 0;
    for (Eigen::Index j = 0; j < values.size(); ++j) {
        const bool in_support = k < support.size() && support[k] == j;
        if (in_support) ++k;
        if (in_support != (values(j) != 0.0)) {
            throw std::invalid_argument(
                "SparseSignal: support does not match nonzero entries");
        }
    }
    if (k != support.size()) {
        throw std::invalid_argument("SparseSignal: support index out of range");
    }
}

}  // namespace fastdebias
