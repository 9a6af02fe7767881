#pragma once

#include "tspec/dataprep.hpp"
#include "tspec/identify.hpp"
#include "tspec/models.hpp"
#include "tspec/spectrum.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace tspec {

struct Confusion {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    std::size_t total() const { return tp + fp + fn + tn; }
    friend bool operator==(const Confusion&, const Confusion&) = default;
};

// Binary metrics for the positive class, plus support-weighted averages over
// both classes (weighted recall always equals accuracy) and micro averages
// (all equal to accuracy for single-label binary problems).
struct DetectionMetrics {
    Confusion confusion;
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double weighted_precision = 0.0;
    double weighted_recall = 0.0;
    double weighted_f1 = 0.0;
    double micro_f1 = 0.0;

    static DetectionMetrics from_confusion(const Confusion& c);
    nlohmann::json to_json() const;
    static DetectionMetrics from_json(const nlohmann::json& j);
    friend bool operator==(const DetectionMetrics&, const DetectionMetrics&) = default;
};

DetectionMetrics detection_metrics(std::span<const std::uint8_t> y_true, std::span<const std::uint8_t> y_pred);

// Fraction of results whose predicted attack matches the truth.
double identification_accuracy(std::span<const IdentificationResult> results, std::span<const std::string> truth);

struct ReportRow {
    std::string family;
    LabelMethod method = LabelMethod::Baseline;
    std::string task;  // "detect" or "identify"
    double noise_ratio = 0.0;
    std::uint64_t seed = 0;  // noise seed used for this ratio
    std::optional<DetectionMetrics> detection;
    std::optional<double> identification_accuracy;
    std::size_t identified = 0;  // identify rows: correct segments
    std::size_t segments = 0;    // identify rows: evaluated segments

    nlohmann::json to_json() const;
    static ReportRow from_json(const nlohmann::json& j);
    friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

struct EvalReport {
    static constexpr int schema_version = 1;
    nlohmann::json config = nlohmann::json::object();
    std::vector<ReportRow> rows;

    nlohmann::json to_json() const;
    static EvalReport from_json(const nlohmann::json& j);
    friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

// A trained detector with the test windows and the truth it is scored on.
struct DetectorCell {
    LabelMethod method = LabelMethod::Baseline;
    TrainedModel model;
    const Dataset* test = nullptr;
    std::vector<std::uint8_t> truth;
};

// A trained spectrum regressor with its test windows and reference signatures.
struct IdentifierCell {
    LabelMethod method = LabelMethod::Sspe;
    TrainedModel model;
    const Dataset* test = nullptr;
    std::vector<SpectrumSignature> signatures;
};

struct SweepPlan {
    std::vector<DetectorCell> detectors;
    std::vector<IdentifierCell> identifiers;
    std::vector<NoiseSpec> noise;
    nlohmann::json config = nlohmann::json::object();
};

// Hard 0/1 decisions at probability 0.5.
std::vector<std::uint8_t> decide(std::span<const double> probabilities);

DetectionMetrics evaluate_detector(const TrainedModel& model, const Dataset& test, std::span<const std::uint8_t> truth);

struct SegmentIdentification {
    SegmentRows segment;
    IdentificationResult result;
};
std::vector<SegmentIdentification> identify_segments(const TrainedModel& model, const Dataset& test,
                                                     std::span<const SpectrumSignature> signatures);

// For every noise spec, perturbs each cell's test features and scores it.
// Rows come out grouped by ratio, then detectors, then identifiers.
EvalReport run_noise_sweep(const SweepPlan& plan);

// Mean of a detection metric (or identification accuracy) per noise ratio
// and method, averaged over the families present.
struct FigureSeries {
    std::vector<double> ratios;
    std::map<LabelMethod, std::vector<std::optional<double>>> mean;
};
FigureSeries figure_series(const EvalReport& report, const std::string& metric);
std::string format_figure_csv(const FigureSeries& series);

// Writes report.json, one figure CSV per metric, and one histogram CSV per
// method from `histograms` (signatures sharing their binning).
void emit_report(const EvalReport& report, const std::filesystem::path& out_dir,
                 const std::map<LabelMethod, std::vector<SpectrumSignature>>& histograms = {});

}  // namespace tspec
