#include "tspec/ingest.hpp"

#include "tspec/error.hpp"
#include "tspec/rng.hpp"
#include "tspec/textio.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>

namespace tspec {

void FlowSchema::validate() const
{
    if (feature_columns.empty())
        throw ConfigError("schema: feature_columns is empty");
    if (timestamp_column.empty() || label_column.empty())
        throw ConfigError("schema: timestamp_column and label_column are required");
    std::set<std::string> seen;
    auto add = [&](const std::string& name, const char* role) {
        if (!seen.insert(name).second)
            throw ConfigError("schema: column '" + name + "' used more than once (" + role + ")");
    };
    add(timestamp_column, "timestamp");
    add(label_column, "label");
    if (attack_name_column)
        add(*attack_name_column, "attack name");
    for (const auto& f : feature_columns)
        add(f, "feature");
}

FlowSchema FlowSchema::from_json(const nlohmann::json& j)
{
    FlowSchema s;
    try {
        s.timestamp_column = j.at("timestamp_column").get<std::string>();
        s.label_column = j.at("label_column").get<std::string>();
        if (j.contains("attack_name_column") && !j.at("attack_name_column").is_null())
            s.attack_name_column = j.at("attack_name_column").get<std::string>();
        s.feature_columns = j.at("feature_columns").get<std::vector<std::string>>();
        const std::string fmt = j.value("timestamp_format", "epoch");
        if (fmt == "epoch")
            s.timestamp_format = TimestampFormat::EpochSeconds;
        else if (fmt == "clock")
            s.timestamp_format = TimestampFormat::ClockTime;
        else
            throw ConfigError("schema: timestamp_format must be 'epoch' or 'clock', got '" + fmt + "'");
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("schema: ") + e.what());
    }
    s.validate();
    return s;
}

nlohmann::json FlowSchema::to_json() const
{
    nlohmann::json j;
    j["timestamp_column"] = timestamp_column;
    j["label_column"] = label_column;
    j["attack_name_column"] = attack_name_column ? nlohmann::json(*attack_name_column) : nlohmann::json(nullptr);
    j["feature_columns"] = feature_columns;
    j["timestamp_format"] = timestamp_format == TimestampFormat::EpochSeconds ? "epoch" : "clock";
    return j;
}

FlowSchema load_schema(const std::filesystem::path& path)
{
    const std::string text = textio::read_file(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("schema " + path.string() + ": " + e.what());
    }
    return FlowSchema::from_json(j);
}

std::size_t PacketTimeline::missing_seconds() const
{
    if (records.empty())
        return 0;
    std::size_t missing = 0;
    for (std::size_t i = 1; i < records.size(); ++i) {
        const auto gap = records[i].second - records[i - 1].second;
        if (gap > 1)
            missing += static_cast<std::size_t>(gap - 1);
    }
    return missing;
}

double PacketTimeline::attack_fraction() const
{
    if (records.empty())
        return 0.0;
    std::size_t n = 0;
    for (const auto& r : records)
        n += r.label;
    return static_cast<double>(n) / static_cast<double>(records.size());
}

namespace {

std::optional<std::int64_t> parse_clock(std::string_view s)
{
    // H:MM:SS or HH:MM:SS
    auto first = s.find(':');
    auto second = s.find(':', first == std::string_view::npos ? first : first + 1);
    if (first == std::string_view::npos || second == std::string_view::npos)
        return std::nullopt;
    auto h = textio::parse_int(s.substr(0, first));
    auto m = textio::parse_int(s.substr(first + 1, second - first - 1));
    auto sec = textio::parse_int(s.substr(second + 1));
    if (!h || !m || !sec || *h < 0 || *h > 23 || *m < 0 || *m > 59 || *sec < 0 || *sec > 59)
        return std::nullopt;
    return *h * 3600 + *m * 60 + *sec;
}

std::optional<std::int64_t> parse_epoch(std::string_view s)
{
    if (auto i = textio::parse_int(s))
        return *i;
    if (auto d = textio::parse_double(s); d && *d == std::floor(*d))
        return static_cast<std::int64_t>(*d);
    return std::nullopt;
}

std::string row_context(std::size_t row) { return "row " + std::to_string(row); }

}  // namespace

PacketTimeline parse_flow_text(std::string_view text, const FlowSchema& schema)
{
    schema.validate();

    std::vector<std::string_view> lines;
    for (std::size_t pos = 0; pos < text.size();) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos)
            nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        lines.push_back(line);
        pos = nl + 1;
    }
    if (lines.empty() || lines.front().empty())
        throw DataError("flow csv: missing header row");

    const auto header = textio::split_csv_line(lines.front());
    std::unordered_map<std::string, std::size_t> column_of;
    for (std::size_t i = 0; i < header.size(); ++i)
        column_of.emplace(header[i], i);
    auto require = [&](const std::string& name) {
        auto it = column_of.find(name);
        if (it == column_of.end())
            throw DataError("flow csv: missing column '" + name + "'");
        return it->second;
    };
    const std::size_t ts_col = require(schema.timestamp_column);
    const std::size_t label_col = require(schema.label_column);
    std::optional<std::size_t> attack_col;
    if (schema.attack_name_column)
        attack_col = require(*schema.attack_name_column);
    std::vector<std::size_t> feature_cols;
    for (const auto& f : schema.feature_columns)
        feature_cols.push_back(require(f));

    PacketTimeline tl;
    tl.feature_names = schema.feature_columns;
    std::map<std::string, int> attack_index;
    std::vector<std::int64_t> absolute;

    std::int64_t day_offset = 0;
    std::optional<std::int64_t> prev_clock;
    std::size_t row = 0;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (lines[li].empty())
            continue;
        ++row;
        const auto fields = textio::split_csv_line(lines[li]);
        if (fields.size() != header.size())
            throw DataError("flow csv: " + row_context(row) + " has " + std::to_string(fields.size()) +
                            " fields, header has " + std::to_string(header.size()));

        std::optional<std::int64_t> t;
        if (schema.timestamp_format == TimestampFormat::ClockTime) {
            t = parse_clock(fields[ts_col]);
            if (t) {
                // A clock that jumps back by more than half a day wrapped past midnight.
                if (prev_clock && *t + day_offset < *prev_clock - 43200)
                    day_offset += 86400;
                *t += day_offset;
                prev_clock = *t;
            }
        } else {
            t = parse_epoch(fields[ts_col]);
        }
        if (!t)
            throw DataError("flow csv: " + row_context(row) + ": unparsable timestamp '" + fields[ts_col] + "'");

        PacketRecord rec;
        const auto label = textio::parse_double(fields[label_col]);
        if (!label || (*label != 0.0 && *label != 1.0))
            throw DataError("flow csv: " + row_context(row) + ": label must be 0 or 1, got '" + fields[label_col] +
                            "'");
        rec.label = static_cast<std::uint8_t>(*label);
        rec.features.reserve(feature_cols.size());
        for (std::size_t k = 0; k < feature_cols.size(); ++k) {
            const auto v = textio::parse_double(fields[feature_cols[k]]);
            if (!v)
                throw DataError("flow csv: " + row_context(row) + ": feature '" + schema.feature_columns[k] +
                                "' is not numeric: '" + fields[feature_cols[k]] + "'");
            rec.features.push_back(*v);
        }
        if (attack_col && rec.label == 1 && !fields[*attack_col].empty()) {
            const auto [it, inserted] =
                attack_index.emplace(fields[*attack_col], static_cast<int>(attack_index.size()));
            if (inserted)
                tl.attack_names.push_back(fields[*attack_col]);
            rec.attack = it->second;
        }
        absolute.push_back(*t);
        tl.records.push_back(std::move(rec));
    }

    if (!absolute.empty()) {
        tl.origin_second = *std::min_element(absolute.begin(), absolute.end());
        for (std::size_t i = 0; i < tl.records.size(); ++i)
            tl.records[i].second = absolute[i] - tl.origin_second;
        std::stable_sort(tl.records.begin(), tl.records.end(),
                         [](const PacketRecord& a, const PacketRecord& b) { return a.second < b.second; });
    }
    return tl;
}

PacketTimeline parse_flow_csv(const std::filesystem::path& path, const FlowSchema& schema)
{
    if (!std::filesystem::exists(path))
        throw DataError("flow csv: no such file " + path.string());
    return parse_flow_text(textio::read_file(path), schema);
}

PacketTimeline fill_missing_points(const PacketTimeline& timeline, std::uint64_t seed)
{
    if (timeline.missing_seconds() == 0)
        return timeline;

    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < timeline.records.size(); ++i)
        if (timeline.records[i].label == 0)
            pool.push_back(i);
    if (pool.empty())
        throw DataError("fill_missing_points: timeline has gaps but no normal (label 0) records to sample from");

    Rng rng(seed);
    PacketTimeline out;
    out.origin_second = timeline.origin_second;
    out.feature_names = timeline.feature_names;
    out.attack_names = timeline.attack_names;
    out.records.reserve(timeline.records.size() + timeline.missing_seconds());
    for (std::size_t i = 0; i < timeline.records.size(); ++i) {
        if (i > 0) {
            for (auto s = timeline.records[i - 1].second + 1; s < timeline.records[i].second; ++s) {
                const auto& donor = timeline.records[pool[rng.below(pool.size())]];
                PacketRecord fill;
                fill.second = s;
                fill.features = donor.features;
                fill.label = 0;
                fill.synthetic_fill = true;
                out.records.push_back(std::move(fill));
            }
        }
        out.records.push_back(timeline.records[i]);
    }
    return out;
}

PacketTimeline select_features(const PacketTimeline& timeline, std::span<const std::string> feature_list)
{
    if (feature_list.empty())
        throw ConfigError("select_features: feature list is empty");
    std::unordered_map<std::string, std::size_t> index_of;
    for (std::size_t i = 0; i < timeline.feature_names.size(); ++i)
        index_of.emplace(timeline.feature_names[i], i);

    std::vector<std::size_t> picks;
    std::set<std::string> seen;
    for (const auto& name : feature_list) {
        auto it = index_of.find(name);
        if (it == index_of.end())
            throw ConfigError("select_features: unknown feature '" + name + "'");
        if (!seen.insert(name).second)
            throw ConfigError("select_features: feature '" + name + "' listed twice");
        picks.push_back(it->second);
    }

    PacketTimeline out;
    out.origin_second = timeline.origin_second;
    out.feature_names.assign(feature_list.begin(), feature_list.end());
    out.attack_names = timeline.attack_names;
    out.records.reserve(timeline.records.size());
    for (const auto& r : timeline.records) {
        PacketRecord p = r;
        p.features.clear();
        for (std::size_t k : picks)
            p.features.push_back(r.features[k]);
        out.records.push_back(std::move(p));
    }
    return out;
}

std::vector<std::string> non_constant_features(const PacketTimeline& timeline)
{
    std::vector<std::string> keep;
    for (std::size_t j = 0; j < timeline.feature_count(); ++j) {
        bool varies = false;
        for (std::size_t i = 1; i < timeline.records.size() && !varies; ++i)
            varies = timeline.records[i].features[j] != timeline.records[0].features[j];
        if (varies)
            keep.push_back(timeline.feature_names[j]);
    }
    return keep;
}

std::string format_flow_csv(const PacketTimeline& timeline)
{
    std::string out = "second";
    for (const auto& f : timeline.feature_names)
        out += "," + f;
    out += ",label,attack\n";
    for (const auto& r : timeline.records) {
        out += std::to_string(r.second + timeline.origin_second);
        for (double v : r.features) {
            out += ',';
            out += textio::format_double(v);
        }
        out += r.label ? ",1," : ",0,";
        if (r.attack >= 0)
            out += timeline.attack_names[static_cast<std::size_t>(r.attack)];
        out += '\n';
    }
    return out;
}

FlowSchema flow_schema_for(const PacketTimeline& timeline)
{
    FlowSchema s;
    s.timestamp_column = "second";
    s.label_column = "label";
    s.attack_name_column = "attack";
    s.feature_columns = timeline.feature_names;
    s.timestamp_format = TimestampFormat::EpochSeconds;
    return s;
}

}  // namespace tspec
