#include "tspec/dataprep.hpp"

#include "tspec/error.hpp"
#include "tspec/rng.hpp"
#include "tspec/textio.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tspec {

nlohmann::json ZScoreParams::to_json() const
{
    return {{"means", means}, {"stds", stds}, {"constant_mask", constant_mask}};
}

ZScoreParams ZScoreParams::from_json(const nlohmann::json& j)
{
    ZScoreParams p;
    p.means = j.at("means").get<std::vector<double>>();
    p.stds = j.at("stds").get<std::vector<double>>();
    p.constant_mask = j.at("constant_mask").get<std::vector<std::uint8_t>>();
    if (p.means.size() != p.stds.size() || p.means.size() != p.constant_mask.size())
        throw DataError("z-score params: vector lengths disagree");
    return p;
}

ZScoreParams zscore_fit(const Matrix& features)
{
    if (features.rows() == 0)
        throw DataError("zscore_fit: empty matrix");
    const std::size_t m = features.rows(), d = features.cols();
    ZScoreParams p;
    p.means.assign(d, 0.0);
    p.stds.assign(d, 0.0);
    p.constant_mask.assign(d, 0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < d; ++j)
            p.means[j] += features(i, j);
    for (auto& mu : p.means)
        mu /= static_cast<double>(m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            const double dev = features(i, j) - p.means[j];
            p.stds[j] += dev * dev;
        }
    for (std::size_t j = 0; j < d; ++j) {
        p.stds[j] = std::sqrt(p.stds[j] / static_cast<double>(m));
        // Two-pass variance of a constant column is exactly zero.
        bool constant = true;
        for (std::size_t i = 1; i < m && constant; ++i)
            constant = features(i, j) == features(0, j);
        if (constant)
            p.stds[j] = 0.0;
        p.constant_mask[j] = p.stds[j] == 0.0 ? 1 : 0;
    }
    return p;
}

Matrix zscore_apply(const Matrix& features, const ZScoreParams& params)
{
    if (features.cols() != params.means.size())
        throw DataError("zscore_apply: matrix has " + std::to_string(features.cols()) + " columns, params have " +
                        std::to_string(params.means.size()));
    Matrix out(features.rows(), features.cols());
    for (std::size_t i = 0; i < features.rows(); ++i)
        for (std::size_t j = 0; j < features.cols(); ++j)
            out(i, j) = params.constant_mask[j] ? 0.0 : (features(i, j) - params.means[j]) / params.stds[j];
    return out;
}

nlohmann::json Provenance::to_json() const
{
    nlohmann::json j;
    j["window_size"] = window_size;
    j["stride"] = stride;
    j["method"] = std::string(to_string(method));
    j["d_model"] = d_model ? nlohmann::json(*d_model) : nlohmann::json(nullptr);
    return j;
}

Provenance Provenance::from_json(const nlohmann::json& j)
{
    Provenance p;
    p.window_size = j.at("window_size").get<std::size_t>();
    p.stride = j.at("stride").get<std::size_t>();
    p.method = parse_label_method(j.at("method").get<std::string>());
    if (j.contains("d_model") && !j.at("d_model").is_null())
        p.d_model = j.at("d_model").get<int>();
    return p;
}

void Dataset::validate() const
{
    const std::size_t m = spectrum_labels.size();
    if (features.rows() != m || binary_labels.size() != m || row_attack.size() != m || row_segment.size() != m)
        throw DataError("dataset: per-row vectors disagree in length");
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const
{
    Dataset out;
    out.features = features.select_rows(rows);
    for (std::size_t r : rows) {
        out.spectrum_labels.push_back(spectrum_labels[r]);
        out.binary_labels.push_back(binary_labels[r]);
        out.row_attack.push_back(row_attack[r]);
        out.row_segment.push_back(row_segment[r]);
    }
    out.attack_name = attack_name;
    out.provenance = provenance;
    return out;
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& ds, double test_fraction, std::uint64_t seed, bool stratify)
{
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw ConfigError("split_dataset: test fraction must be in (0, 1)");
    ds.validate();
    const std::size_t m = ds.size();
    if (m < 2)
        throw DataError("split_dataset: need at least 2 rows");

    auto test_total = static_cast<std::size_t>(std::llround(static_cast<double>(m) * test_fraction));
    test_total = std::clamp<std::size_t>(test_total, 1, m - 1);

    std::vector<std::vector<std::size_t>> groups(stratify ? 2 : 1);
    for (std::size_t i = 0; i < m; ++i)
        groups[stratify ? ds.binary_labels[i] : 0].push_back(i);

    // Largest-remainder allocation keeps every group within one row of its
    // exact share while the total stays at test_total.
    std::vector<std::size_t> take(groups.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t allocated = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const double exact = static_cast<double>(groups[g].size()) * static_cast<double>(test_total) /
                             static_cast<double>(m);
        take[g] = static_cast<std::size_t>(std::floor(exact));
        allocated += take[g];
        remainders.emplace_back(exact - std::floor(exact), g);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t k = 0; allocated < test_total; ++k) {
        const std::size_t g = remainders[k % remainders.size()].second;
        if (take[g] < groups[g].size()) {
            ++take[g];
            ++allocated;
        }
    }

    Rng rng(seed);
    std::vector<std::size_t> test_rows, train_rows;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        auto idx = groups[g];
        rng.shuffle(idx.begin(), idx.end());
        test_rows.insert(test_rows.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(take[g]));
        train_rows.insert(train_rows.end(), idx.begin() + static_cast<std::ptrdiff_t>(take[g]), idx.end());
    }
    std::sort(test_rows.begin(), test_rows.end());
    std::sort(train_rows.begin(), train_rows.end());
    return {ds.subset(train_rows), ds.subset(test_rows)};
}

Dataset downsample_majority(const Dataset& ds, double majority_per_minority, std::uint64_t seed)
{
    if (!(majority_per_minority > 0.0))
        throw ConfigError("downsample_majority: ratio must be positive");
    ds.validate();
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < ds.size(); ++i)
        (ds.binary_labels[i] ? pos : neg).push_back(i);
    auto& minority = pos.size() <= neg.size() ? pos : neg;
    auto& majority = pos.size() <= neg.size() ? neg : pos;
    const auto keep = static_cast<std::size_t>(std::ceil(static_cast<double>(minority.size()) * majority_per_minority));
    if (keep >= majority.size())
        return ds;

    Rng rng(seed);
    rng.shuffle(majority.begin(), majority.end());
    majority.resize(keep);
    std::vector<std::size_t> rows = minority;
    rows.insert(rows.end(), majority.begin(), majority.end());
    std::sort(rows.begin(), rows.end());
    return ds.subset(rows);
}

Dataset inject_noise(const Dataset& ds, const NoiseSpec& spec)
{
    if (!(spec.ratio >= 0.0 && spec.ratio <= 1.0))
        throw ConfigError("inject_noise: ratio must be in [0, 1]");
    if (!(spec.scale > 0.0))
        throw ConfigError("inject_noise: scale must be positive");
    Dataset out = ds;
    const std::size_t m = ds.size();
    const auto k = static_cast<std::size_t>(std::llround(spec.ratio * static_cast<double>(m)));
    if (k == 0)
        return out;

    Rng rng(spec.seed);
    std::vector<std::size_t> rows(m);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    // Partial Fisher-Yates: the first k slots are a uniform sample.
    for (std::size_t i = 0; i < k; ++i)
        std::swap(rows[i], rows[i + rng.below(m - i)]);
    rows.resize(k);
    std::sort(rows.begin(), rows.end());
    for (std::size_t r : rows)
        for (double& x : out.features.row(r))
            x += rng.normal(0.0, spec.scale);
    return out;
}

std::uint64_t noise_seed(std::uint64_t base_seed, double ratio)
{
    return derive_seed(base_seed, "noise", static_cast<std::uint64_t>(std::llround(ratio * 1e6)));
}

std::vector<NoiseSpec> noise_grid(double scale, std::uint64_t base_seed)
{
    std::vector<double> ratios;
    for (int i = 0; i <= 10; ++i)
        ratios.push_back(i / 10.0);
    return noise_grid(ratios, scale, base_seed);
}

std::vector<NoiseSpec> noise_grid(std::span<const double> ratios, double scale, std::uint64_t base_seed)
{
    std::vector<NoiseSpec> grid;
    for (double r : ratios) {
        if (!(r >= 0.0 && r <= 1.0))
            throw ConfigError("noise ratio " + textio::format_double(r) + " outside [0, 1]");
        grid.push_back({r, scale, noise_seed(base_seed, r)});
    }
    return grid;
}

std::int64_t AttackSegment::attack_seconds() const
{
    switch (pattern) {
    case AttackPattern::Burst: return length;
    case AttackPattern::Periodic: return (length + period - 1) / period;
    case AttackPattern::Ramp: return length / 2;
    }
    return 0;
}

bool AttackSegment::is_attack_second(std::int64_t second) const
{
    const std::int64_t r = second - start;
    if (r < 0 || r >= length)
        return false;
    switch (pattern) {
    case AttackPattern::Burst: return true;
    case AttackPattern::Periodic: return r % period == 0;
    case AttackPattern::Ramp:
        // Cumulative count floor(r^2 / 2L) tracks the integral of density r/L.
        return ((r + 1) * (r + 1)) / (2 * length) > (r * r) / (2 * length);
    }
    return false;
}

namespace {

std::string_view pattern_name(AttackPattern p)
{
    switch (p) {
    case AttackPattern::Burst: return "burst";
    case AttackPattern::Periodic: return "periodic";
    case AttackPattern::Ramp: return "ramp";
    }
    return "?";
}

AttackPattern parse_pattern(const std::string& s)
{
    if (s == "burst") return AttackPattern::Burst;
    if (s == "periodic") return AttackPattern::Periodic;
    if (s == "ramp") return AttackPattern::Ramp;
    throw ConfigError("scenario: unknown attack pattern '" + s + "'");
}

}  // namespace

void SyntheticScenario::validate() const
{
    if (duration <= 0)
        throw ConfigError("scenario: duration must be positive");
    if (feature_count == 0)
        throw ConfigError("scenario: feature_count must be positive");
    if (!normal_means.empty() && normal_means.size() != feature_count)
        throw ConfigError("scenario: normal_means must have feature_count entries");
    if (!normal_stds.empty() && normal_stds.size() != feature_count)
        throw ConfigError("scenario: normal_stds must have feature_count entries");
    if (!(missing_rate >= 0.0 && missing_rate < 1.0))
        throw ConfigError("scenario: missing_rate must be in [0, 1)");
    for (std::size_t a = 0; a < attacks.size(); ++a) {
        const auto& seg = attacks[a];
        if (seg.name.empty())
            throw ConfigError("scenario: attack segment " + std::to_string(a) + " has no name");
        if (seg.length <= 0 || seg.start < 0 || seg.start + seg.length > duration)
            throw ConfigError("scenario: attack segment '" + seg.name + "' lies outside the timeline");
        if (seg.pattern == AttackPattern::Periodic && seg.period < 1)
            throw ConfigError("scenario: periodic segment '" + seg.name + "' needs period >= 1");
        if (seg.offset.size() != 1 && seg.offset.size() != feature_count)
            throw ConfigError("scenario: offset of '" + seg.name + "' must have 1 or feature_count entries");
        for (std::size_t b = 0; b < a; ++b) {
            const auto& other = attacks[b];
            if (seg.start < other.start + other.length && other.start < seg.start + seg.length)
                throw ConfigError("scenario: attack segments '" + other.name + "' and '" + seg.name + "' overlap");
        }
    }
}

SyntheticScenario SyntheticScenario::from_json(const nlohmann::json& j)
{
    SyntheticScenario s;
    try {
        s.duration = j.at("duration").get<std::int64_t>();
        s.feature_count = j.at("feature_count").get<std::size_t>();
        s.normal_means = j.value("normal_means", std::vector<double>{});
        s.normal_stds = j.value("normal_stds", std::vector<double>{});
        s.missing_rate = j.value("missing_rate", 0.0);
        for (const auto& a : j.value("attacks", nlohmann::json::array())) {
            AttackSegment seg;
            seg.name = a.at("name").get<std::string>();
            seg.pattern = parse_pattern(a.at("pattern").get<std::string>());
            seg.start = a.at("start").get<std::int64_t>();
            seg.length = a.at("length").get<std::int64_t>();
            seg.period = a.value("period", std::int64_t{1});
            if (a.at("offset").is_array())
                seg.offset = a.at("offset").get<std::vector<double>>();
            else
                seg.offset = {a.at("offset").get<double>()};
            s.attacks.push_back(std::move(seg));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    }
    s.validate();
    return s;
}

nlohmann::json SyntheticScenario::to_json() const
{
    nlohmann::json j;
    j["duration"] = duration;
    j["feature_count"] = feature_count;
    j["normal_means"] = normal_means;
    j["normal_stds"] = normal_stds;
    j["missing_rate"] = missing_rate;
    j["attacks"] = nlohmann::json::array();
    for (const auto& a : attacks) {
        j["attacks"].push_back({{"name", a.name},
                                {"pattern", std::string(pattern_name(a.pattern))},
                                {"start", a.start},
                                {"length", a.length},
                                {"period", a.period},
                                {"offset", a.offset}});
    }
    return j;
}

PacketTimeline generate_synthetic(const SyntheticScenario& scenario, std::uint64_t seed)
{
    scenario.validate();
    const std::size_t f = scenario.feature_count;
    PacketTimeline tl;
    for (std::size_t j = 0; j < f; ++j)
        tl.feature_names.push_back("f" + std::to_string(j));
    std::vector<int> segment_attack;
    for (const auto& seg : scenario.attacks) {
        auto it = std::find(tl.attack_names.begin(), tl.attack_names.end(), seg.name);
        if (it == tl.attack_names.end()) {
            segment_attack.push_back(static_cast<int>(tl.attack_names.size()));
            tl.attack_names.push_back(seg.name);
        } else {
            segment_attack.push_back(static_cast<int>(it - tl.attack_names.begin()));
        }
    }

    Rng features_rng(derive_seed(seed, "synthetic-features"));
    Rng gaps_rng(derive_seed(seed, "synthetic-gaps"));
    for (std::int64_t s = 0; s < scenario.duration; ++s) {
        PacketRecord rec;
        rec.second = s;
        rec.features.resize(f);
        for (std::size_t j = 0; j < f; ++j) {
            const double mu = scenario.normal_means.empty() ? 0.0 : scenario.normal_means[j];
            const double sd = scenario.normal_stds.empty() ? 1.0 : scenario.normal_stds[j];
            rec.features[j] = features_rng.normal(mu, sd);
        }
        for (std::size_t a = 0; a < scenario.attacks.size(); ++a) {
            const auto& seg = scenario.attacks[a];
            if (seg.is_attack_second(s)) {
                rec.label = 1;
                rec.attack = segment_attack[a];
                for (std::size_t j = 0; j < f; ++j)
                    rec.features[j] += seg.offset.size() == 1 ? seg.offset[0] : seg.offset[j];
                break;
            }
        }
        const bool drop = gaps_rng.uniform() < scenario.missing_rate;
        if (drop && rec.label == 0 && s > 0 && s + 1 < scenario.duration)
            continue;
        tl.records.push_back(std::move(rec));
    }
    return tl;
}

std::string format_dataset_csv(const Dataset& ds)
{
    ds.validate();
    std::string out;
    for (std::size_t j = 0; j < ds.features.cols(); ++j)
        out += "f" + std::to_string(j) + ",";
    out += "spectrum_label,binary_label,attack,segment\n";
    for (std::size_t i = 0; i < ds.size(); ++i) {
        for (double x : ds.features.row(i)) {
            out += textio::format_double(x);
            out += ',';
        }
        out += textio::format_double(ds.spectrum_labels[i]);
        out += ds.binary_labels[i] ? ",1," : ",0,";
        out += ds.row_attack[i];
        out += ',';
        out += std::to_string(ds.row_segment[i]);
        out += '\n';
    }
    return out;
}

void write_dataset_csv(const Dataset& ds, const std::filesystem::path& path)
{
    textio::write_file(path, format_dataset_csv(ds));
}

Dataset read_dataset_csv(const std::filesystem::path& path, const Provenance& provenance)
{
    if (!std::filesystem::exists(path))
        throw DataError("dataset: no such file " + path.string());
    const std::string text = textio::read_file(path);
    Dataset ds;
    ds.provenance = provenance;
    std::size_t line_no = 0, width = 0;
    std::vector<double> values;
    for (std::size_t pos = 0; pos < text.size();) {
        auto nl = text.find('\n', pos);
        if (nl == std::string::npos)
            nl = text.size();
        const std::string_view line(text.data() + pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (line.empty())
            continue;
        const auto fields = textio::split_csv_line(line);
        if (line_no == 1) {
            if (fields.size() < 4 || fields[fields.size() - 4] != "spectrum_label")
                throw DataError("dataset " + path.string() + ": unexpected header");
            width = fields.size() - 4;
            continue;
        }
        if (fields.size() != width + 4)
            throw DataError("dataset " + path.string() + ": line " + std::to_string(line_no) + " has " +
                            std::to_string(fields.size()) + " fields");
        values.clear();
        for (std::size_t j = 0; j < width; ++j) {
            const auto v = textio::parse_double(fields[j]);
            if (!v)
                throw DataError("dataset " + path.string() + ": line " + std::to_string(line_no) +
                                ": non-numeric feature");
            values.push_back(*v);
        }
        const auto spectrum = textio::parse_double(fields[width]);
        const auto binary = textio::parse_int(fields[width + 1]);
        const auto segment = textio::parse_int(fields[width + 3]);
        if (!spectrum || !binary || (*binary != 0 && *binary != 1) || !segment)
            throw DataError("dataset " + path.string() + ": line " + std::to_string(line_no) + ": bad label fields");
        if (ds.features.rows() == 0)
            ds.features = Matrix(0, width);
        ds.features.append_row(values);
        ds.spectrum_labels.push_back(*spectrum);
        ds.binary_labels.push_back(static_cast<std::uint8_t>(*binary));
        ds.row_attack.push_back(fields[width + 2]);
        ds.row_segment.push_back(static_cast<int>(*segment));
    }
    if (line_no == 0)
        throw DataError("dataset " + path.string() + ": empty file");
    if (ds.features.rows() == 0)
        ds.features = Matrix(0, width);
    return ds;
}

}  // namespace tspec
