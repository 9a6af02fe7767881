#pragma once

#include "tspec/dataprep.hpp"
#include "tspec/evalharness.hpp"
#include "tspec/identify.hpp"
#include "tspec/ingest.hpp"
#include "tspec/models.hpp"
#include "tspec/spectrum.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace tspec {

// How the comparison method labels a window.
enum class BaselineRule {
    Any,       // 1 iff any attack packet
    Majority,  // 1 iff more than half the packets are attacks
};

// Everything a run needs. Loaded from one JSON file, then overridden by
// command-line flags.
struct RunConfig {
    std::optional<std::filesystem::path> input;          // flow CSV
    std::optional<std::filesystem::path> schema;         // schema JSON for `input`
    std::optional<SyntheticScenario> scenario;           // used when no input CSV is given
    std::optional<std::filesystem::path> feature_list;   // JSON array of feature names
    std::size_t window = 30;
    std::size_t stride = 1;
    std::vector<LabelMethod> methods{LabelMethod::Baseline, LabelMethod::Coap, LabelMethod::Sspe};
    int d_model = 8;
    ThresholdMode threshold_mode = ThresholdMode::RankDefault;
    BaselineRule baseline_rule = BaselineRule::Any;
    std::vector<std::string> families{"glm", "random_forest", "gbm"};
    std::vector<std::string> tasks{"detect", "identify"};
    std::vector<double> ratios{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    double noise_scale = 1.0;
    double train_noise_ratio = 0.0;  // noise training features too (0 = clean training)
    double test_fraction = 0.3;
    bool stratify = true;
    std::optional<double> downsample;  // majority rows kept per minority row in training data
    std::size_t bins = 50;
    bool signatures_include_normal = false;
    std::optional<std::filesystem::path> registry;  // overrides the built signature registry
    std::uint64_t seed = 1;
    std::filesystem::path out = "tspec-out";

    void validate() const;
    nlohmann::json to_json() const;
    // Keys absent from `j` keep their current values.
    void merge_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
    static RunConfig load(const std::filesystem::path& path);
};

struct ArtifactPaths {
    std::filesystem::path root;

    std::filesystem::path datasets() const { return root / "datasets"; }
    std::filesystem::path models() const { return root / "models"; }
    std::filesystem::path report() const { return root / "report"; }
    std::filesystem::path train_csv(LabelMethod m) const;
    std::filesystem::path test_csv(LabelMethod m) const;
    std::filesystem::path sidecar(LabelMethod m) const;
    std::filesystem::path signatures(LabelMethod m) const;
    std::filesystem::path model(LabelMethod m, ModelFamily f, Task t) const;
    std::filesystem::path identification() const { return root / "identify.json"; }
};

// Window-level targets before splitting, shared by every label method.
struct WindowTable {
    Matrix features;  // raw flattened windows
    std::vector<std::uint8_t> baseline_any;
    std::vector<std::uint8_t> baseline_majority;
    std::vector<double> coap;
    std::vector<double> sspe;
    std::vector<std::string> attack;
    std::vector<int> segment;
};

// ingest -> fill -> select -> window -> flatten -> spectrum labels.
PacketTimeline load_timeline(const RunConfig& cfg);
WindowTable build_window_table(const PacketTimeline& timeline, std::size_t window, std::size_t stride,
                               int d_model);

// Training and test splits for one method, standardized with the training
// split's z-score parameters.
struct BuiltDataset {
    Dataset train;
    Dataset test;
    ZScoreParams zscore;
    double attack_fraction = 0.0;
    std::vector<std::string> feature_names;
};
std::vector<BuiltDataset> build_datasets(const RunConfig& cfg, const PacketTimeline& timeline);

// Threshold for detection targets: n1 = round(N * attack_fraction).
ThresholdSpec detection_threshold(std::span<const double> spectrum_labels, double attack_fraction,
                                  ThresholdMode mode);

// "glm" resolves to the binomial or gaussian GLM depending on the task.
ModelFamily resolve_family(const std::string& name, Task task);

// CLI subcommands. Each returns normally on success and throws DataError,
// ConfigError or std::runtime_error otherwise.
void cmd_synth(const RunConfig& cfg);
void cmd_build_dataset(const RunConfig& cfg);
void cmd_train(const RunConfig& cfg);
EvalReport cmd_sweep(const RunConfig& cfg);
nlohmann::json cmd_identify(const RunConfig& cfg);
std::vector<GridScore> cmd_grid(const RunConfig& cfg, std::span<const std::size_t> windows,
                                std::span<const int> d_models);

// Table-style configuration shipped with the project.
struct EncodingGrid {
    std::vector<int> d_models;
    std::vector<std::size_t> windows;
};
EncodingGrid load_encoding_grid(const std::filesystem::path& path);

struct AttackProfile {
    std::string name;
    std::size_t feature_count = 0;
    int d_model = 0;
    std::size_t window = 0;
};
std::vector<AttackProfile> load_attack_profiles(const std::filesystem::path& path);

std::vector<std::string> load_feature_list(const std::filesystem::path& path);

// Exclusive marker file held for the lifetime of a command.
class OutputLock {
public:
    explicit OutputLock(const std::filesystem::path& dir);
    ~OutputLock();
    OutputLock(const OutputLock&) = delete;
    OutputLock& operator=(const OutputLock&) = delete;

private:
    std::filesystem::path path_;
};

}  // namespace tspec
