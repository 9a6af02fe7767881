#pragma once

#include "tspec/models.hpp"
#include "tspec/rng.hpp"

namespace tspec::detail {

LinearParams fit_logistic(const Matrix& X, std::span<const double> y, const Hyperparameters& hp);
LinearParams fit_ridge(const Matrix& X, std::span<const double> y, const Hyperparameters& hp);

struct TreeOptions {
    int max_depth = 1;
    int min_samples_leaf = 1;
    std::size_t max_features = 0;  // 0 = all features
};

// Grows one tree on rows `sample` (repeats allowed). Splits maximise
// S_L^2/n_L + S_R^2/n_R over the target sums, which is variance reduction
// for real targets and Gini reduction for 0/1 targets. Leaves hold
// sum(target) / sum(hessian); pass an empty hessian for plain means.
Tree grow_tree(const Matrix& X, std::span<const double> target, std::span<const double> hessian,
               std::span<const std::size_t> sample, const TreeOptions& options, Rng& rng);

TreeEnsemble fit_forest(const Matrix& X, std::span<const double> y, const ModelSpec& spec);
TreeEnsemble fit_boosting(const Matrix& X, std::span<const double> y, const ModelSpec& spec);

double sigmoid(double z);

}  // namespace tspec::detail
