#include "tspec/spectrum.hpp"

#include "tspec/error.hpp"
#include "tspec/windowing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tspec {

std::string_view to_string(LabelMethod m)
{
    switch (m) {
    case LabelMethod::Baseline: return "baseline";
    case LabelMethod::Coap: return "coap";
    case LabelMethod::Sspe: return "sspe";
    }
    return "?";
}

LabelMethod parse_label_method(std::string_view s)
{
    if (s == "baseline") return LabelMethod::Baseline;
    if (s == "coap") return LabelMethod::Coap;
    if (s == "sspe") return LabelMethod::Sspe;
    throw ConfigError("unknown label method '" + std::string(s) + "' (expected baseline, coap or sspe)");
}

std::string_view to_string(ThresholdMode m)
{
    return m == ThresholdMode::RankDefault ? "rank-default" : "as-paper";
}

ThresholdMode parse_threshold_mode(std::string_view s)
{
    if (s == "rank-default") return ThresholdMode::RankDefault;
    if (s == "as-paper") return ThresholdMode::AsPaper;
    throw ConfigError("unknown threshold mode '" + std::string(s) + "' (expected rank-default or as-paper)");
}

EncodingConfig::EncodingConfig(int d_model) : d_model_(d_model)
{
    if (d_model < 2 || d_model % 2 != 0)
        throw ConfigError("d_model must be an even integer >= 2, got " + std::to_string(d_model));
}

std::vector<double> positional_encoding(std::size_t pos, const EncodingConfig& config)
{
    const int d = config.d_model();
    std::vector<double> pe(static_cast<std::size_t>(d));
    for (int i = 0; i < d / 2; ++i) {
        const double angle =
            static_cast<double>(pos) / std::pow(EncodingConfig::base, 2.0 * i / static_cast<double>(d));
        pe[2 * i] = std::sin(angle);
        pe[2 * i + 1] = std::cos(angle);
    }
    return pe;
}

double position_weight(std::size_t pos, const EncodingConfig& config)
{
    double sum = 0.0;
    for (double c : positional_encoding(pos, config))
        sum += c;
    return sum;
}

namespace {

void check_labels(std::span<const std::uint8_t> labels, const char* who)
{
    if (labels.empty())
        throw DataError(std::string(who) + ": empty label sequence");
    for (auto b : labels)
        if (b > 1)
            throw DataError(std::string(who) + ": labels must be 0 or 1");
}

}  // namespace

SpectrumLabel coap(std::span<const std::uint8_t> labels)
{
    check_labels(labels, "coap");
    std::size_t count = 0;
    for (auto b : labels)
        count += b;
    return {static_cast<double>(count), LabelMethod::Coap, std::nullopt, labels.size()};
}

SpectrumLabel sspe(std::span<const std::uint8_t> labels, const EncodingConfig& config)
{
    check_labels(labels, "sspe");
    double value = 0.0;
    for (std::size_t pos = 0; pos < labels.size(); ++pos)
        if (labels[pos])
            value += position_weight(pos, config);
    return {value, LabelMethod::Sspe, config.d_model(), labels.size()};
}

SspeTable::SspeTable(std::size_t window_size, const EncodingConfig& config)
{
    weights_.reserve(window_size);
    for (std::size_t pos = 0; pos < window_size; ++pos)
        weights_.push_back(position_weight(pos, config));
}

double SspeTable::operator()(std::span<const std::uint8_t> labels) const
{
    double value = 0.0;
    const std::size_t n = std::min(labels.size(), weights_.size());
    for (std::size_t pos = 0; pos < n; ++pos)
        if (labels[pos])
            value += weights_[pos];
    return value;
}

ThresholdSpec compute_threshold(std::span<const double> spectrum_labels, std::size_t n1, ThresholdMode mode)
{
    const std::size_t n = spectrum_labels.size();
    if (n == 0)
        throw DataError("compute_threshold: empty label vector");
    if (n1 > n)
        throw ConfigError("compute_threshold: n1 = " + std::to_string(n1) + " exceeds N = " + std::to_string(n));

    std::vector<double> sorted(spectrum_labels.begin(), spectrum_labels.end());
    std::sort(sorted.begin(), sorted.end());

    ThresholdSpec spec{0.0, mode, n1, n};
    if (mode == ThresholdMode::RankDefault) {
        if (n1 == 0) {
            const double top = sorted.back();
            spec.tau = top + 1.0 > top ? top + 1.0 : std::numeric_limits<double>::infinity();
        } else {
            spec.tau = sorted[n - n1];
        }
    } else {
        // Nearest rank at percentile p = n1/N*100: rank = ceil(p/100 * N) = n1.
        const std::size_t rank = std::max<std::size_t>(1, n1);
        spec.tau = sorted[rank - 1];
    }
    return spec;
}

std::vector<std::uint8_t> binarize(std::span<const double> spectrum_labels, const ThresholdSpec& spec)
{
    std::vector<std::uint8_t> out;
    out.reserve(spectrum_labels.size());
    for (double x : spectrum_labels)
        out.push_back(x >= spec.tau ? 1 : 0);
    return out;
}

double score_label_distribution(std::span<const double> spectrum_labels)
{
    std::vector<double> nz;
    for (double x : spectrum_labels)
        if (x != 0.0)
            nz.push_back(x);
    if (nz.size() < 10)
        throw DataError("score_label_distribution: need at least 10 nonzero labels, got " +
                        std::to_string(nz.size()));

    const double n = static_cast<double>(nz.size());
    double mean = 0.0;
    for (double x : nz)
        mean += x;
    mean /= n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double x : nz) {
        const double d = x - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    // Relative cutoff so that rounding noise on a constant sample counts as zero variance.
    if (m2 <= 1e-24 * std::max(1.0, mean * mean))
        throw DataError("score_label_distribution: nonzero labels have zero variance");
    const double skew = m3 / std::pow(m2, 1.5);
    const double excess_kurtosis = m4 / (m2 * m2) - 3.0;
    return std::abs(skew) + std::abs(excess_kurtosis);
}

std::vector<GridScore> score_encoding_grid(std::span<const std::uint8_t> packet_labels,
                                           std::span<const std::size_t> window_sizes,
                                           std::span<const int> d_models, std::size_t stride)
{
    std::vector<GridScore> scores;
    for (std::size_t w : window_sizes) {
        const std::size_t count = window_count(packet_labels.size(), w, stride);
        for (int d : d_models) {
            GridScore g{w, d, std::numeric_limits<double>::infinity(), false};
            if (count > 0) {
                const SspeTable table(w, EncodingConfig(d));
                std::vector<double> values;
                values.reserve(count);
                for (std::size_t k = 0; k < count; ++k)
                    values.push_back(table(packet_labels.subspan(k * stride, w)));
                try {
                    g.score = score_label_distribution(values);
                    g.valid = true;
                } catch (const DataError&) {
                }
            }
            scores.push_back(g);
        }
    }
    std::stable_sort(scores.begin(), scores.end(), [](const GridScore& a, const GridScore& b) {
        if (a.valid != b.valid)
            return a.valid;
        return a.score < b.score;
    });
    return scores;
}

}  // namespace tspec
