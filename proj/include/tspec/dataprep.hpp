#pragma once

#include "tspec/ingest.hpp"
#include "tspec/matrix.hpp"
#include "tspec/spectrum.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace tspec {

// Per-column population mean and standard deviation.
struct ZScoreParams {
    std::vector<double> means;
    std::vector<double> stds;
    std::vector<std::uint8_t> constant_mask;  // 1 where std == 0

    nlohmann::json to_json() const;
    static ZScoreParams from_json(const nlohmann::json& j);
};

ZScoreParams zscore_fit(const Matrix& features);
// (x - mean) / std per column; constant columns map to 0.
Matrix zscore_apply(const Matrix& features, const ZScoreParams& params);

struct Provenance {
    std::size_t window_size = 0;
    std::size_t stride = 1;
    LabelMethod method = LabelMethod::Baseline;
    std::optional<int> d_model;

    nlohmann::json to_json() const;
    static Provenance from_json(const nlohmann::json& j);
    friend bool operator==(const Provenance&, const Provenance&) = default;
};

// Flattened windows with their targets. Row metadata (attack name, segment
// id) travels with each row so identification can group test windows.
struct Dataset {
    Matrix features;                          // M x D, D = W * F
    std::vector<double> spectrum_labels;      // M
    std::vector<std::uint8_t> binary_labels;  // M; 1 iff the window holds an attack packet
    std::vector<std::string> row_attack;      // M; empty for attack-free windows
    std::vector<int> row_segment;             // M; -1 for attack-free windows
    std::optional<std::string> attack_name;
    Provenance provenance;

    std::size_t size() const { return spectrum_labels.size(); }
    // Throws DataError if the per-row vectors disagree in length.
    void validate() const;
    Dataset subset(std::span<const std::size_t> rows) const;

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

// Rows are kept in their original relative order on both sides. |test| is
// round(M * test_fraction), clamped so neither side is empty.
std::pair<Dataset, Dataset> split_dataset(const Dataset& ds, double test_fraction, std::uint64_t seed,
                                          bool stratify);

// Keeps every minority-class row and a seeded sample of the majority class
// so that majority/minority is at most `majority_per_minority`.
Dataset downsample_majority(const Dataset& ds, double majority_per_minority, std::uint64_t seed);

struct NoiseSpec {
    double ratio = 0.0;  // fraction of rows to perturb
    double scale = 1.0;  // Gaussian standard deviation, in standardized units
    std::uint64_t seed = 0;
};

// Perturbs exactly round(ratio * M) rows, chosen without replacement, with
// independent N(0, scale^2) noise on every feature. Labels are untouched.
Dataset inject_noise(const Dataset& ds, const NoiseSpec& spec);

// Seed for one noise ratio, independent of which other ratios are run.
std::uint64_t noise_seed(std::uint64_t base_seed, double ratio);

// Ratios 0.0, 0.1, ..., 1.0.
std::vector<NoiseSpec> noise_grid(double scale = 1.0, std::uint64_t base_seed = 0);
std::vector<NoiseSpec> noise_grid(std::span<const double> ratios, double scale, std::uint64_t base_seed);

enum class AttackPattern {
    Burst,     // every second of the segment
    Periodic,  // every k-th second starting at the segment start
    Ramp,      // density rising linearly from 0 to 1 across the segment
};

struct AttackSegment {
    std::string name;
    AttackPattern pattern = AttackPattern::Burst;
    std::int64_t start = 0;
    std::int64_t length = 0;
    std::int64_t period = 1;     // periodic only
    std::vector<double> offset;  // added to feature means; size 1 broadcasts

    // Number of attack seconds the pattern produces.
    std::int64_t attack_seconds() const;
    bool is_attack_second(std::int64_t second) const;
};

struct SyntheticScenario {
    std::int64_t duration = 0;
    std::size_t feature_count = 1;
    std::vector<double> normal_means;  // size F or empty for 0
    std::vector<double> normal_stds;   // size F or empty for 1
    double missing_rate = 0.0;         // chance that a normal interior second is dropped
    std::vector<AttackSegment> attacks;

    void validate() const;
    static SyntheticScenario from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

PacketTimeline generate_synthetic(const SyntheticScenario& scenario, std::uint64_t seed);

// Dataset CSV: f0..f{D-1},spectrum_label,binary_label,attack,segment.
std::string format_dataset_csv(const Dataset& ds);
void write_dataset_csv(const Dataset& ds, const std::filesystem::path& path);
Dataset read_dataset_csv(const std::filesystem::path& path, const Provenance& provenance);

}  // namespace tspec
