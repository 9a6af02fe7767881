#include "model_impl.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tspec::detail {

namespace {

struct Split {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

class TreeBuilder {
public:
    TreeBuilder(const Matrix& X, std::span<const double> target, std::span<const double> hessian,
                std::span<const std::size_t> sample, const TreeOptions& options, Rng& rng)
        : X_(X), target_(target), hessian_(hessian), sample_(sample), options_(options), rng_(rng),
          features_(X.cols()), goes_left_(sample.size())
    {
        // One ordering of sample positions per feature; node ranges stay
        // aligned across features through stable partitioning.
        const std::size_t n = sample.size();
        order_.resize(features_);
        for (std::size_t f = 0; f < features_; ++f) {
            auto& ord = order_[f];
            ord.resize(n);
            std::iota(ord.begin(), ord.end(), 0u);
            std::stable_sort(ord.begin(), ord.end(), [&](std::uint32_t a, std::uint32_t b) {
                return value(a, f) < value(b, f);
            });
        }
        candidates_.resize(features_);
        std::iota(candidates_.begin(), candidates_.end(), std::size_t{0});
    }

    Tree build()
    {
        grow(0, sample_.size(), 0);
        return std::move(tree_);
    }

private:
    double value(std::uint32_t pos, std::size_t f) const { return X_(sample_[pos], f); }
    double target(std::uint32_t pos) const { return target_[sample_[pos]]; }
    double hess(std::uint32_t pos) const { return hessian_.empty() ? 1.0 : hessian_[sample_[pos]]; }

    int add_leaf(std::size_t begin, std::size_t end)
    {
        double s = 0.0, h = 0.0;
        for (std::size_t k = begin; k < end; ++k) {
            s += target(order_[0][k]);
            h += hess(order_[0][k]);
        }
        const int id = static_cast<int>(tree_.feature.size());
        tree_.feature.push_back(-1);
        tree_.threshold.push_back(0.0);
        tree_.left.push_back(-1);
        tree_.right.push_back(-1);
        tree_.value.push_back(h > 1e-12 ? s / h : 0.0);
        return id;
    }

    std::vector<std::size_t> pick_features()
    {
        if (options_.max_features == 0 || options_.max_features >= features_)
            return candidates_;
        std::vector<std::size_t> all = candidates_;
        for (std::size_t i = 0; i < options_.max_features; ++i)
            std::swap(all[i], all[i + rng_.below(features_ - i)]);
        all.resize(options_.max_features);
        std::sort(all.begin(), all.end());
        return all;
    }

    Split best_split(std::size_t begin, std::size_t end)
    {
        const std::size_t n = end - begin;
        const auto min_leaf = static_cast<std::size_t>(std::max(1, options_.min_samples_leaf));
        double total = 0.0;
        for (std::size_t k = begin; k < end; ++k)
            total += target(order_[0][k]);
        const double parent = total * total / static_cast<double>(n);

        Split best;
        for (std::size_t f : pick_features()) {
            const auto& ord = order_[f];
            double left_sum = 0.0;
            for (std::size_t k = begin; k + 1 < end; ++k) {
                left_sum += target(ord[k]);
                const std::size_t n_left = k + 1 - begin;
                const double here = value(ord[k], f);
                const double next = value(ord[k + 1], f);
                if (here == next || n_left < min_leaf || n - n_left < min_leaf)
                    continue;
                const double right_sum = total - left_sum;
                const double gain = left_sum * left_sum / static_cast<double>(n_left) +
                                    right_sum * right_sum / static_cast<double>(n - n_left) - parent;
                // Strict comparison: earlier features and lower thresholds win ties.
                if (gain > best.gain + 1e-12 * std::abs(parent) + 1e-15) {
                    double threshold = here + (next - here) / 2.0;
                    if (!(threshold >= here && threshold < next))
                        threshold = here;
                    best = {static_cast<int>(f), threshold, gain};
                }
            }
        }
        return best;
    }

    int grow(std::size_t begin, std::size_t end, int depth)
    {
        const std::size_t n = end - begin;
        const auto min_leaf = static_cast<std::size_t>(std::max(1, options_.min_samples_leaf));
        if (depth >= options_.max_depth || n < 2 * min_leaf || pure(begin, end))
            return add_leaf(begin, end);

        const Split split = best_split(begin, end);
        if (split.feature < 0)
            return add_leaf(begin, end);

        const auto f = static_cast<std::size_t>(split.feature);
        std::size_t n_left = 0;
        for (std::size_t k = begin; k < end; ++k) {
            const auto pos = order_[f][k];
            goes_left_[pos] = value(pos, f) <= split.threshold;
            n_left += goes_left_[pos];
        }
        for (auto& ord : order_) {
            std::stable_partition(ord.begin() + static_cast<std::ptrdiff_t>(begin),
                                  ord.begin() + static_cast<std::ptrdiff_t>(end),
                                  [&](std::uint32_t pos) { return goes_left_[pos] != 0; });
        }

        const int id = static_cast<int>(tree_.feature.size());
        tree_.feature.push_back(split.feature);
        tree_.threshold.push_back(split.threshold);
        tree_.left.push_back(-1);
        tree_.right.push_back(-1);
        tree_.value.push_back(0.0);
        const int l = grow(begin, begin + n_left, depth + 1);
        const int r = grow(begin + n_left, end, depth + 1);
        tree_.left[static_cast<std::size_t>(id)] = l;
        tree_.right[static_cast<std::size_t>(id)] = r;
        return id;
    }

    bool pure(std::size_t begin, std::size_t end) const
    {
        const double first = target(order_[0][begin]);
        for (std::size_t k = begin + 1; k < end; ++k)
            if (target(order_[0][k]) != first)
                return false;
        return true;
    }

    const Matrix& X_;
    std::span<const double> target_;
    std::span<const double> hessian_;
    std::span<const std::size_t> sample_;
    TreeOptions options_;
    Rng& rng_;
    std::size_t features_;
    std::vector<std::vector<std::uint32_t>> order_;
    std::vector<std::uint8_t> goes_left_;
    std::vector<std::size_t> candidates_;
    Tree tree_;
};

}  // namespace

Tree grow_tree(const Matrix& X, std::span<const double> target, std::span<const double> hessian,
               std::span<const std::size_t> sample, const TreeOptions& options, Rng& rng)
{
    return TreeBuilder(X, target, hessian, sample, options, rng).build();
}

TreeEnsemble fit_forest(const Matrix& X, std::span<const double> y, const ModelSpec& spec)
{
    const auto& hp = spec.hyperparameters;
    const std::size_t m = X.rows(), d = X.cols();
    TreeOptions opt;
    opt.max_depth = hp.max_depth;
    opt.min_samples_leaf = hp.min_samples_leaf;
    if (hp.max_features > 0) {
        opt.max_features = static_cast<std::size_t>(hp.max_features);
    } else if (spec.task == Task::Classify) {
        opt.max_features = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))));
    } else {
        opt.max_features = static_cast<std::size_t>(std::ceil(static_cast<double>(d) / 3.0));
    }
    opt.max_features = std::max<std::size_t>(1, std::min(opt.max_features, d));

    TreeEnsemble ens;
    ens.trees.reserve(static_cast<std::size_t>(hp.n_trees));
    std::vector<std::size_t> sample(m);
    for (int t = 0; t < hp.n_trees; ++t) {
        // Each tree draws from its own stream so trees can be grown in any order.
        // TODO: grow trees on a thread pool once multi-core runs matter.
        Rng rng(derive_seed(spec.seed, "forest-tree", static_cast<std::uint64_t>(t)));
        for (auto& s : sample)
            s = rng.below(m);
        ens.trees.push_back(grow_tree(X, y, {}, sample, opt, rng));
    }
    ens.base = 0.0;
    ens.shrinkage = 1.0;
    return ens;
}

TreeEnsemble fit_boosting(const Matrix& X, std::span<const double> y, const ModelSpec& spec)
{
    const auto& hp = spec.hyperparameters;
    const std::size_t m = X.rows();
    const bool classify = spec.task == Task::Classify;
    TreeOptions opt;
    opt.max_depth = hp.max_depth;
    opt.min_samples_leaf = hp.min_samples_leaf;
    opt.max_features = 0;

    TreeEnsemble ens;
    ens.shrinkage = hp.shrinkage;
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(m);
    if (classify) {
        const double p = std::clamp(mean, 1e-6, 1.0 - 1e-6);
        ens.base = std::log(p / (1.0 - p));
    } else {
        ens.base = mean;
    }

    std::vector<double> score(m, ens.base), residual(m), hessian;
    if (classify)
        hessian.resize(m);
    std::vector<std::size_t> all(m);
    std::iota(all.begin(), all.end(), std::size_t{0});
    const auto rows_per_tree =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(hp.subsample * static_cast<double>(m))));

    for (int t = 0; t < hp.n_trees; ++t) {
        for (std::size_t i = 0; i < m; ++i) {
            if (classify) {
                const double p = sigmoid(score[i]);
                residual[i] = y[i] - p;
                hessian[i] = p * (1.0 - p);
            } else {
                residual[i] = y[i] - score[i];
            }
        }
        Rng rng(derive_seed(spec.seed, "boosting-tree", static_cast<std::uint64_t>(t)));
        std::vector<std::size_t> sample = all;
        if (rows_per_tree < m) {
            rng.shuffle(sample.begin(), sample.end());
            sample.resize(rows_per_tree);
            std::sort(sample.begin(), sample.end());
        }
        Tree tree = grow_tree(X, residual, hessian, sample, opt, rng);
        for (std::size_t i = 0; i < m; ++i)
            score[i] += hp.shrinkage * tree.predict(X.row(i));
        ens.trees.push_back(std::move(tree));
    }
    return ens;
}

}  // namespace tspec::detail
