#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tspec {

// How a window's label sequence becomes its training target.
enum class LabelMethod {
    Baseline,  // 1 iff any attack packet in the window
    Coap,      // count of attack packets
    Sspe,      // sum of sinusoidal positional encodings at attack positions
};

std::string_view to_string(LabelMethod m);
LabelMethod parse_label_method(std::string_view s);

// Sinusoidal encoding dimension. Only even dimensions are accepted since
// components come in (sin, cos) pairs.
class EncodingConfig {
public:
    static constexpr double base = 10000.0;

    explicit EncodingConfig(int d_model);
    int d_model() const { return d_model_; }

private:
    int d_model_;
};

// PE(pos)[2i] = sin(pos / base^(2i/d)), PE(pos)[2i+1] = cos(same angle).
std::vector<double> positional_encoding(std::size_t pos, const EncodingConfig& config);

// Sum of all d_model components of PE(pos); the contribution of one attack
// packet at `pos` to its window's SSPE label.
double position_weight(std::size_t pos, const EncodingConfig& config);

struct SpectrumLabel {
    double value = 0.0;
    LabelMethod method = LabelMethod::Coap;
    std::optional<int> d_model;
    std::size_t window_size = 0;
};

SpectrumLabel coap(std::span<const std::uint8_t> labels);
SpectrumLabel sspe(std::span<const std::uint8_t> labels, const EncodingConfig& config);

// Precomputed position weights for labelling many windows of one length.
class SspeTable {
public:
    SspeTable(std::size_t window_size, const EncodingConfig& config);
    double operator()(std::span<const std::uint8_t> labels) const;
    std::size_t window_size() const { return weights_.size(); }

private:
    std::vector<double> weights_;
};

enum class ThresholdMode {
    RankDefault,  // tau = n1-th largest value, so n1 samples come out positive
    AsPaper,      // tau = nearest-rank percentile n1/N of the ascending values
};

std::string_view to_string(ThresholdMode m);
ThresholdMode parse_threshold_mode(std::string_view s);

struct ThresholdSpec {
    double tau = 0.0;
    ThresholdMode mode = ThresholdMode::RankDefault;
    std::size_t n1 = 0;
    std::size_t n = 0;
};

// With n1 = 0 in rank-default mode tau sits above the maximum, so nothing
// binarizes positive.
ThresholdSpec compute_threshold(std::span<const double> spectrum_labels, std::size_t n1, ThresholdMode mode);

// 1 iff value >= tau.
std::vector<std::uint8_t> binarize(std::span<const double> spectrum_labels, const ThresholdSpec& spec);

// Normality proxy |skewness| + |excess kurtosis| over the nonzero labels.
// Lower means closer to a bell shape. Throws DataError with fewer than ten
// nonzero labels or when they have zero variance.
double score_label_distribution(std::span<const double> spectrum_labels);

struct GridScore {
    std::size_t window_size = 0;
    int d_model = 0;
    double score = 0.0;
    bool valid = false;  // false when the distribution was degenerate
};

// Scores every (window, d_model) SSPE configuration over a packet label
// sequence; result is sorted best first, invalid candidates last.
std::vector<GridScore> score_encoding_grid(std::span<const std::uint8_t> packet_labels,
                                           std::span<const std::size_t> window_sizes,
                                           std::span<const int> d_models, std::size_t stride = 1);

}  // namespace tspec
