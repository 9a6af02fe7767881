#include "tspec/models.hpp"

#include "model_impl.hpp"
#include "tspec/error.hpp"
#include "tspec/textio.hpp"

#include <algorithm>
#include <cmath>

namespace tspec {

std::string_view to_string(ModelFamily f)
{
    switch (f) {
    case ModelFamily::GlmBinomial: return "glm_binomial";
    case ModelFamily::GlmGaussian: return "glm_gaussian";
    case ModelFamily::RandomForest: return "random_forest";
    case ModelFamily::Gbm: return "gbm";
    }
    return "?";
}

std::string_view to_string(Task t)
{
    return t == Task::Classify ? "classify" : "regress";
}

ModelFamily parse_model_family(std::string_view s)
{
    if (s == "glm_binomial") return ModelFamily::GlmBinomial;
    if (s == "glm_gaussian") return ModelFamily::GlmGaussian;
    if (s == "random_forest" || s == "rf") return ModelFamily::RandomForest;
    if (s == "gbm") return ModelFamily::Gbm;
    throw ConfigError("unknown model family '" + std::string(s) + "'");
}

Task parse_task(std::string_view s)
{
    if (s == "classify") return Task::Classify;
    if (s == "regress") return Task::Regress;
    throw ConfigError("unknown task '" + std::string(s) + "'");
}

Hyperparameters Hyperparameters::defaults(ModelFamily family)
{
    Hyperparameters hp;
    switch (family) {
    case ModelFamily::RandomForest:
        hp.n_trees = 25;
        hp.max_depth = 10;
        break;
    case ModelFamily::Gbm:
        hp.n_trees = 50;
        hp.max_depth = 5;
        hp.shrinkage = 0.1;
        hp.subsample = 1.0;
        break;
    default: break;
    }
    return hp;
}

nlohmann::json Hyperparameters::to_json() const
{
    return {{"l2", l2},
            {"learning_rate", learning_rate},
            {"max_iterations", max_iterations},
            {"tolerance", tolerance},
            {"ridge", ridge},
            {"n_trees", n_trees},
            {"max_depth", max_depth},
            {"min_samples_leaf", min_samples_leaf},
            {"shrinkage", shrinkage},
            {"subsample", subsample},
            {"max_features", max_features}};
}

Hyperparameters Hyperparameters::from_json(const nlohmann::json& j)
{
    Hyperparameters hp;
    hp.l2 = j.value("l2", hp.l2);
    hp.learning_rate = j.value("learning_rate", hp.learning_rate);
    hp.max_iterations = j.value("max_iterations", hp.max_iterations);
    hp.tolerance = j.value("tolerance", hp.tolerance);
    hp.ridge = j.value("ridge", hp.ridge);
    hp.n_trees = j.value("n_trees", hp.n_trees);
    hp.max_depth = j.value("max_depth", hp.max_depth);
    hp.min_samples_leaf = j.value("min_samples_leaf", hp.min_samples_leaf);
    hp.shrinkage = j.value("shrinkage", hp.shrinkage);
    hp.subsample = j.value("subsample", hp.subsample);
    hp.max_features = j.value("max_features", hp.max_features);
    return hp;
}

ModelSpec ModelSpec::make(ModelFamily family, Task task, std::uint64_t seed)
{
    ModelSpec s{family, task, Hyperparameters::defaults(family), seed};
    s.validate();
    return s;
}

void ModelSpec::validate() const
{
    if (family == ModelFamily::GlmBinomial && task != Task::Classify)
        throw ConfigError("glm_binomial only supports classification");
    if (family == ModelFamily::GlmGaussian && task != Task::Regress)
        throw ConfigError("glm_gaussian only supports regression");
    const auto& hp = hyperparameters;
    if (family == ModelFamily::RandomForest || family == ModelFamily::Gbm) {
        if (hp.n_trees < 1 || hp.max_depth < 1)
            throw ConfigError(std::string(to_string(family)) + ": n_trees and max_depth must be >= 1");
        if (!(hp.subsample > 0.0 && hp.subsample <= 1.0))
            throw ConfigError("gbm: subsample must be in (0, 1]");
    }
    if (hp.ridge < 0.0 || hp.l2 < 0.0)
        throw ConfigError("regularisation strengths must be non-negative");
}

nlohmann::json ModelSpec::to_json() const
{
    return {{"family", std::string(to_string(family))},
            {"task", std::string(to_string(task))},
            {"seed", seed},
            {"hyperparameters", hyperparameters.to_json()}};
}

ModelSpec ModelSpec::from_json(const nlohmann::json& j)
{
    ModelSpec s;
    s.family = parse_model_family(j.at("family").get<std::string>());
    s.task = parse_task(j.at("task").get<std::string>());
    s.seed = j.at("seed").get<std::uint64_t>();
    s.hyperparameters = Hyperparameters::from_json(j.at("hyperparameters"));
    s.validate();
    return s;
}

double Tree::predict(std::span<const double> x) const
{
    std::size_t node = 0;
    while (feature[node] >= 0) {
        node = x[static_cast<std::size_t>(feature[node])] <= threshold[node] ? static_cast<std::size_t>(left[node])
                                                                             : static_cast<std::size_t>(right[node]);
    }
    return value[node];
}

std::size_t Tree::depth() const
{
    std::vector<std::size_t> level(feature.size(), 0);
    std::size_t deepest = 0;
    for (std::size_t n = 0; n < feature.size(); ++n) {
        deepest = std::max(deepest, level[n]);
        if (feature[n] >= 0) {
            level[static_cast<std::size_t>(left[n])] = level[n] + 1;
            level[static_cast<std::size_t>(right[n])] = level[n] + 1;
        }
    }
    return deepest;
}

TrainedModel train(const ModelSpec& spec, const Matrix& X, std::span<const double> y)
{
    spec.validate();
    if (X.rows() != y.size())
        throw DataError("train: X has " + std::to_string(X.rows()) + " rows but y has " + std::to_string(y.size()));
    if (X.rows() < 2)
        throw DataError("train: need at least 2 rows");
    if (X.cols() == 0)
        throw DataError("train: no feature columns");
    for (double v : X.data())
        if (!std::isfinite(v))
            throw DataError("train: non-finite feature value");
    for (double v : y)
        if (!std::isfinite(v))
            throw DataError("train: non-finite target");
    if (spec.task == Task::Classify) {
        std::size_t ones = 0;
        for (double v : y) {
            if (v != 0.0 && v != 1.0)
                throw DataError("train: classification targets must be 0 or 1");
            ones += v == 1.0;
        }
        if (spec.family == ModelFamily::GlmBinomial && (ones == 0 || ones == y.size()))
            throw DataError("train: glm_binomial needs both classes present");
    }

    TrainedModel model;
    model.spec = spec;
    model.feature_count = X.cols();
    switch (spec.family) {
    case ModelFamily::GlmBinomial: model.parameters = detail::fit_logistic(X, y, spec.hyperparameters); break;
    case ModelFamily::GlmGaussian: model.parameters = detail::fit_ridge(X, y, spec.hyperparameters); break;
    case ModelFamily::RandomForest: model.parameters = detail::fit_forest(X, y, spec); break;
    case ModelFamily::Gbm: model.parameters = detail::fit_boosting(X, y, spec); break;
    }
    return model;
}

std::vector<double> predict(const TrainedModel& model, const Matrix& X)
{
    if (X.rows() == 0)
        return {};
    if (X.cols() != model.feature_count)
        throw DataError("predict: model expects " + std::to_string(model.feature_count) + " features, got " +
                        std::to_string(X.cols()));
    std::vector<double> out(X.rows());
    const bool classify = model.spec.task == Task::Classify;
    if (const auto* lin = std::get_if<LinearParams>(&model.parameters)) {
        for (std::size_t i = 0; i < X.rows(); ++i) {
            double z = lin->intercept;
            const auto row = X.row(i);
            for (std::size_t j = 0; j < row.size(); ++j)
                z += lin->weights[j] * row[j];
            out[i] = classify ? detail::sigmoid(z) : z;
        }
        return out;
    }
    const auto& ens = std::get<TreeEnsemble>(model.parameters);
    const bool boosted = model.spec.family == ModelFamily::Gbm;
    for (std::size_t i = 0; i < X.rows(); ++i) {
        double sum = 0.0;
        for (const auto& tree : ens.trees)
            sum += tree.predict(X.row(i));
        if (boosted) {
            const double score = ens.base + ens.shrinkage * sum;
            out[i] = classify ? detail::sigmoid(score) : score;
        } else {
            out[i] = ens.trees.empty() ? 0.0 : sum / static_cast<double>(ens.trees.size());
            if (classify)
                out[i] = std::clamp(out[i], 0.0, 1.0);
        }
    }
    return out;
}

nlohmann::json model_to_json(const TrainedModel& model)
{
    nlohmann::json j;
    j["format"] = "tspec-model";
    j["version"] = model.version;
    j["spec"] = model.spec.to_json();
    j["feature_count"] = model.feature_count;
    if (const auto* lin = std::get_if<LinearParams>(&model.parameters)) {
        j["parameters"] = {{"kind", "linear"}, {"weights", lin->weights}, {"intercept", lin->intercept}};
    } else {
        const auto& ens = std::get<TreeEnsemble>(model.parameters);
        nlohmann::json trees = nlohmann::json::array();
        for (const auto& t : ens.trees) {
            trees.push_back({{"feature", t.feature},
                             {"threshold", t.threshold},
                             {"left", t.left},
                             {"right", t.right},
                             {"value", t.value}});
        }
        j["parameters"] = {
            {"kind", "trees"}, {"base", ens.base}, {"shrinkage", ens.shrinkage}, {"trees", std::move(trees)}};
    }
    j["metadata"] = model.metadata;
    return j;
}

namespace {

void check_tree(const Tree& t, std::size_t feature_count)
{
    const std::size_t n = t.feature.size();
    if (n == 0 || t.threshold.size() != n || t.left.size() != n || t.right.size() != n || t.value.size() != n)
        throw DataError("model file: malformed tree arrays");
    for (std::size_t i = 0; i < n; ++i) {
        if (t.feature[i] < 0)
            continue;
        const auto l = t.left[i], r = t.right[i];
        if (static_cast<std::size_t>(t.feature[i]) >= feature_count || l <= static_cast<int>(i) ||
            r <= static_cast<int>(i) || static_cast<std::size_t>(l) >= n || static_cast<std::size_t>(r) >= n)
            throw DataError("model file: tree node " + std::to_string(i) + " is inconsistent");
    }
}

}  // namespace

TrainedModel model_from_json(const nlohmann::json& j)
{
    try {
        if (j.at("format").get<std::string>() != "tspec-model")
            throw DataError("model file: unknown format");
        const int version = j.at("version").get<int>();
        if (version != TrainedModel::format_version)
            throw DataError("model file: unsupported version " + std::to_string(version));
        TrainedModel m;
        m.version = version;
        m.spec = ModelSpec::from_json(j.at("spec"));
        m.feature_count = j.at("feature_count").get<std::size_t>();
        const auto& p = j.at("parameters");
        const auto kind = p.at("kind").get<std::string>();
        if (kind == "linear") {
            LinearParams lin;
            lin.weights = p.at("weights").get<std::vector<double>>();
            lin.intercept = p.at("intercept").get<double>();
            if (lin.weights.size() != m.feature_count)
                throw DataError("model file: weight count does not match feature_count");
            m.parameters = std::move(lin);
        } else if (kind == "trees") {
            TreeEnsemble ens;
            ens.base = p.at("base").get<double>();
            ens.shrinkage = p.at("shrinkage").get<double>();
            for (const auto& t : p.at("trees")) {
                Tree tree;
                tree.feature = t.at("feature").get<std::vector<int>>();
                tree.threshold = t.at("threshold").get<std::vector<double>>();
                tree.left = t.at("left").get<std::vector<int>>();
                tree.right = t.at("right").get<std::vector<int>>();
                tree.value = t.at("value").get<std::vector<double>>();
                check_tree(tree, m.feature_count);
                ens.trees.push_back(std::move(tree));
            }
            m.parameters = std::move(ens);
        } else {
            throw DataError("model file: unknown parameter kind '" + kind + "'");
        }
        const bool linear_family =
            m.spec.family == ModelFamily::GlmBinomial || m.spec.family == ModelFamily::GlmGaussian;
        if (linear_family != (kind == "linear"))
            throw DataError("model file: parameters do not match family");
        m.metadata = j.value("metadata", nlohmann::json::object());
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("model file: ") + e.what());
    } catch (const ConfigError& e) {
        throw DataError(std::string("model file: ") + e.what());
    }
}

void save_model(const TrainedModel& model, const std::filesystem::path& path)
{
    textio::write_file(path, model_to_json(model).dump(1) + "\n");
}

TrainedModel load_model(const std::filesystem::path& path)
{
    if (!std::filesystem::exists(path))
        throw DataError("model file: no such file " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(textio::read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw DataError("model file " + path.string() + ": " + e.what());
    }
    return model_from_json(j);
}

}  // namespace tspec
