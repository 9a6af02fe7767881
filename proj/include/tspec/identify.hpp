#pragma once

#include "tspec/dataprep.hpp"
#include "tspec/spectrum.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace tspec {

// Uniform bins over [lo, hi]. Values outside the range land in the edge bins.
struct Binning {
    std::size_t bins = 50;
    double lo = 0.0;
    double hi = 1.0;

    Binning() = default;
    Binning(std::size_t bins, double lo, double hi);

    // Range spanning every value of every set; a degenerate range is widened
    // by 0.5 on each side.
    static Binning covering(std::span<const std::vector<double>> label_sets, std::size_t bins);

    std::vector<double> edges() const;
    std::size_t bin_of(double x) const;
};

// L1-normalised histogram; all zeros when `values` is empty.
std::vector<double> histogram(std::span<const double> values, const Binning& binning);

struct SpectrumSignature {
    std::string attack_name;
    std::vector<double> bin_edges;  // B + 1, uniform
    std::vector<double> counts;     // B, sums to 1
    LabelMethod method = LabelMethod::Sspe;
    std::optional<int> d_model;

    bool empty() const;
    Binning binning() const;

    nlohmann::json to_json() const;
    static SpectrumSignature from_json(const nlohmann::json& j);
    friend bool operator==(const SpectrumSignature&, const SpectrumSignature&) = default;
};

SpectrumSignature build_signature(std::span<const double> labels, const std::string& attack_name,
                                  const Binning& binning, LabelMethod method = LabelMethod::Sspe,
                                  std::optional<int> d_model = std::nullopt);

// u.v / (|u||v|). Throws DataError on a length mismatch or a zero vector.
double cosine_similarity(std::span<const double> u, std::span<const double> v);

struct IdentificationResult {
    std::string predicted_attack;
    std::size_t predicted_index = 0;
    std::vector<double> similarities;  // one per signature, in registry order
    double margin = 0.0;               // best minus runner-up (runner-up is -1 with one signature)

    nlohmann::json to_json(std::span<const SpectrumSignature> signatures) const;
};

// Argmax cosine between `hist` and each signature's counts; the lowest
// index wins ties.
IdentificationResult identify_histogram(std::span<const double> hist, std::span<const SpectrumSignature> signatures);

// Histograms the predicted spectrum labels with the signatures' shared
// binning, then identifies.
IdentificationResult identify_attack(std::span<const double> predicted_labels,
                                     std::span<const SpectrumSignature> signatures);

// Attack-bearing rows of a dataset grouped by segment id.
struct SegmentRows {
    int segment = -1;
    std::string attack;
    std::vector<std::size_t> rows;
};
std::vector<SegmentRows> group_segments(const Dataset& ds);

// One signature per attack name from the dataset's own spectrum labels over
// a shared binning. Attack-free rows are skipped unless `include_normal`.
std::vector<SpectrumSignature> build_signatures(const Dataset& ds, std::size_t bins, bool include_normal = false);

nlohmann::json registry_to_json(std::span<const SpectrumSignature> signatures);
std::vector<SpectrumSignature> registry_from_json(const nlohmann::json& j);
void save_registry(std::span<const SpectrumSignature> signatures, const std::filesystem::path& path);
std::vector<SpectrumSignature> load_registry(const std::filesystem::path& path);

}  // namespace tspec
