#include "tspec/identify.hpp"

#include "tspec/error.hpp"
#include "tspec/textio.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace tspec {

Binning::Binning(std::size_t bins_, double lo_, double hi_) : bins(bins_), lo(lo_), hi(hi_)
{
    if (bins < 2)
        throw ConfigError("binning: need at least 2 bins");
    if (!(std::isfinite(lo) && std::isfinite(hi) && hi > lo))
        throw ConfigError("binning: range must be finite with hi > lo");
}

Binning Binning::covering(std::span<const std::vector<double>> label_sets, std::size_t bins)
{
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& set : label_sets)
        for (double x : set) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
    if (!std::isfinite(lo))
        throw DataError("binning: no labels to cover");
    if (!(hi > lo)) {
        lo -= 0.5;
        hi += 0.5;
    }
    return Binning(bins, lo, hi);
}

std::vector<double> Binning::edges() const
{
    std::vector<double> e(bins + 1);
    for (std::size_t k = 0; k <= bins; ++k)
        e[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(bins);
    e.back() = hi;
    return e;
}

std::size_t Binning::bin_of(double x) const
{
    if (!(x > lo))
        return 0;
    if (x >= hi)
        return bins - 1;
    const auto k = static_cast<std::size_t>((x - lo) / (hi - lo) * static_cast<double>(bins));
    return std::min(k, bins - 1);
}

std::vector<double> histogram(std::span<const double> values, const Binning& binning)
{
    std::vector<double> h(binning.bins, 0.0);
    for (double x : values)
        h[binning.bin_of(x)] += 1.0;
    if (!values.empty())
        for (double& c : h)
            c /= static_cast<double>(values.size());
    return h;
}

bool SpectrumSignature::empty() const
{
    return std::all_of(counts.begin(), counts.end(), [](double c) { return c == 0.0; });
}

Binning SpectrumSignature::binning() const
{
    if (bin_edges.size() < 3)
        throw DataError("signature '" + attack_name + "': needs at least 2 bins");
    return Binning(bin_edges.size() - 1, bin_edges.front(), bin_edges.back());
}

nlohmann::json SpectrumSignature::to_json() const
{
    return {{"attack_name", attack_name},
            {"bin_edges", bin_edges},
            {"counts", counts},
            {"method", std::string(to_string(method))},
            {"d_model", d_model ? nlohmann::json(*d_model) : nlohmann::json(nullptr)}};
}

SpectrumSignature SpectrumSignature::from_json(const nlohmann::json& j)
{
    SpectrumSignature s;
    s.attack_name = j.at("attack_name").get<std::string>();
    s.bin_edges = j.at("bin_edges").get<std::vector<double>>();
    s.counts = j.at("counts").get<std::vector<double>>();
    s.method = parse_label_method(j.at("method").get<std::string>());
    if (j.contains("d_model") && !j.at("d_model").is_null())
        s.d_model = j.at("d_model").get<int>();
    if (s.bin_edges.size() != s.counts.size() + 1)
        throw DataError("signature '" + s.attack_name + "': edge and count lengths disagree");
    for (std::size_t k = 1; k < s.bin_edges.size(); ++k)
        if (!(s.bin_edges[k] > s.bin_edges[k - 1]))
            throw DataError("signature '" + s.attack_name + "': bin edges must increase strictly");
    return s;
}

SpectrumSignature build_signature(std::span<const double> labels, const std::string& attack_name,
                                  const Binning& binning, LabelMethod method, std::optional<int> d_model)
{
    if (labels.empty())
        throw DataError("build_signature: no labels for '" + attack_name + "'");
    if (binning.bins < 2)
        throw ConfigError("build_signature: need at least 2 bins");
    return {attack_name, binning.edges(), histogram(labels, binning), method, d_model};
}

double cosine_similarity(std::span<const double> u, std::span<const double> v)
{
    if (u.size() != v.size())
        throw DataError("cosine_similarity: length mismatch");
    double dot = 0.0, uu = 0.0, vv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        uu += u[i] * u[i];
        vv += v[i] * v[i];
    }
    if (uu == 0.0 || vv == 0.0)
        throw DataError("cosine_similarity: zero-norm vector");
    return std::clamp(dot / (std::sqrt(uu) * std::sqrt(vv)), -1.0, 1.0);
}

nlohmann::json IdentificationResult::to_json(std::span<const SpectrumSignature> signatures) const
{
    nlohmann::json sims = nlohmann::json::object();
    for (std::size_t i = 0; i < similarities.size() && i < signatures.size(); ++i)
        sims[signatures[i].attack_name] = similarities[i];
    return {{"predicted_attack", predicted_attack}, {"similarities", sims}, {"margin", margin}};
}

IdentificationResult identify_histogram(std::span<const double> hist, std::span<const SpectrumSignature> signatures)
{
    if (signatures.empty())
        throw DataError("identify: signature registry is empty");
    IdentificationResult r;
    for (const auto& sig : signatures)
        r.similarities.push_back(cosine_similarity(hist, sig.counts));
    for (std::size_t i = 1; i < r.similarities.size(); ++i)
        if (r.similarities[i] > r.similarities[r.predicted_index])
            r.predicted_index = i;
    double runner_up = -1.0;
    for (std::size_t i = 0; i < r.similarities.size(); ++i)
        if (i != r.predicted_index)
            runner_up = std::max(runner_up, r.similarities[i]);
    r.predicted_attack = signatures[r.predicted_index].attack_name;
    r.margin = r.similarities[r.predicted_index] - runner_up;
    return r;
}

IdentificationResult identify_attack(std::span<const double> predicted_labels,
                                     std::span<const SpectrumSignature> signatures)
{
    if (predicted_labels.empty())
        throw DataError("identify: no predictions");
    if (signatures.empty())
        throw DataError("identify: signature registry is empty");
    const auto& edges = signatures.front().bin_edges;
    for (const auto& s : signatures)
        if (s.bin_edges != edges)
            throw DataError("identify: signatures do not share bin edges");
    const auto hist = histogram(predicted_labels, signatures.front().binning());
    return identify_histogram(hist, signatures);
}

std::vector<SegmentRows> group_segments(const Dataset& ds)
{
    std::map<int, SegmentRows> by_id;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (ds.row_segment[i] < 0)
            continue;
        auto& g = by_id[ds.row_segment[i]];
        g.segment = ds.row_segment[i];
        if (g.attack.empty())
            g.attack = ds.row_attack[i];
        g.rows.push_back(i);
    }
    std::vector<SegmentRows> out;
    for (auto& [id, g] : by_id)
        out.push_back(std::move(g));
    return out;
}

std::vector<SpectrumSignature> build_signatures(const Dataset& ds, std::size_t bins, bool include_normal)
{
    std::vector<std::string> names;
    std::map<std::string, std::vector<double>> labels;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (ds.row_attack[i].empty() && !include_normal)
            continue;
        const std::string name = ds.row_attack[i].empty() ? "normal" : ds.row_attack[i];
        if (!labels.contains(name))
            names.push_back(name);
        labels[name].push_back(ds.spectrum_labels[i]);
    }
    if (names.empty())
        throw DataError("build_signatures: dataset has no attack-bearing rows");
    std::sort(names.begin(), names.end());
    std::vector<std::vector<double>> sets;
    for (const auto& n : names)
        sets.push_back(labels[n]);
    const Binning binning = Binning::covering(sets, bins);
    std::vector<SpectrumSignature> out;
    for (std::size_t k = 0; k < names.size(); ++k)
        out.push_back(build_signature(sets[k], names[k], binning, ds.provenance.method, ds.provenance.d_model));
    return out;
}

nlohmann::json registry_to_json(std::span<const SpectrumSignature> signatures)
{
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& s : signatures)
        arr.push_back(s.to_json());
    return arr;
}

std::vector<SpectrumSignature> registry_from_json(const nlohmann::json& j)
{
    if (!j.is_array())
        throw DataError("signature registry: expected a JSON array");
    std::vector<SpectrumSignature> out;
    try {
        for (const auto& item : j)
            out.push_back(SpectrumSignature::from_json(item));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("signature registry: ") + e.what());
    }
    return out;
}

void save_registry(std::span<const SpectrumSignature> signatures, const std::filesystem::path& path)
{
    textio::write_file(path, registry_to_json(signatures).dump(1) + "\n");
}

std::vector<SpectrumSignature> load_registry(const std::filesystem::path& path)
{
    if (!std::filesystem::exists(path))
        throw DataError("signature registry: no such file " + path.string());
    try {
        return registry_from_json(nlohmann::json::parse(textio::read_file(path)));
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError("signature registry " + path.string() + ": " + e.what());
    }
}

}  // namespace tspec
