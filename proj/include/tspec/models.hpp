#pragma once

#include "tspec/matrix.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace tspec {

enum class ModelFamily { GlmBinomial, GlmGaussian, RandomForest, Gbm };
enum class Task { Classify, Regress };

std::string_view to_string(ModelFamily f);
std::string_view to_string(Task t);
ModelFamily parse_model_family(std::string_view s);
Task parse_task(std::string_view s);

struct Hyperparameters {
    // GLM
    double l2 = 1e-4;            // logistic L2 strength
    double learning_rate = 0.1;  // logistic gradient step
    int max_iterations = 500;
    double tolerance = 1e-8;  // stop once the loss moves less than this
    double ridge = 1e-6;      // gaussian ridge strength

    // Tree ensembles
    int n_trees = 0;
    int max_depth = 0;
    int min_samples_leaf = 1;
    double shrinkage = 0.1;  // GBM only
    double subsample = 1.0;  // GBM row fraction per tree
    int max_features = 0;    // RF features tried per split; 0 picks the task default

    static Hyperparameters defaults(ModelFamily family);

    nlohmann::json to_json() const;
    static Hyperparameters from_json(const nlohmann::json& j);
    friend bool operator==(const Hyperparameters&, const Hyperparameters&) = default;
};

struct ModelSpec {
    ModelFamily family = ModelFamily::RandomForest;
    Task task = Task::Classify;
    Hyperparameters hyperparameters;
    std::uint64_t seed = 0;

    // Family defaults for the given task. Throws ConfigError when the family
    // cannot serve the task (binomial GLM only classifies, gaussian only
    // regresses).
    static ModelSpec make(ModelFamily family, Task task, std::uint64_t seed = 0);
    void validate() const;

    nlohmann::json to_json() const;
    static ModelSpec from_json(const nlohmann::json& j);
    friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

struct LinearParams {
    std::vector<double> weights;
    double intercept = 0.0;
};

// Binary tree in flat arrays. Internal nodes send x[feature] <= threshold to
// `left`; leaves have feature == -1 and carry `value`.
struct Tree {
    std::vector<int> feature;
    std::vector<double> threshold;
    std::vector<int> left;
    std::vector<int> right;
    std::vector<double> value;

    double predict(std::span<const double> x) const;
    std::size_t node_count() const { return feature.size(); }
    std::size_t depth() const;
};

// Forest: prediction = mean of tree outputs.
// Boosting: raw score = base + shrinkage * sum of tree outputs.
struct TreeEnsemble {
    std::vector<Tree> trees;
    double base = 0.0;
    double shrinkage = 1.0;
};

struct TrainedModel {
    static constexpr int format_version = 1;

    ModelSpec spec;
    std::variant<LinearParams, TreeEnsemble> parameters;
    std::size_t feature_count = 0;
    int version = format_version;
    nlohmann::json metadata = nlohmann::json::object();  // caller-owned, persisted verbatim
};

// y holds 0/1 values for classification and finite reals for regression.
TrainedModel train(const ModelSpec& spec, const Matrix& X, std::span<const double> y);

// Classification: probability of class 1 per row. Regression: prediction.
std::vector<double> predict(const TrainedModel& model, const Matrix& X);

nlohmann::json model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const nlohmann::json& j);
void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace tspec
