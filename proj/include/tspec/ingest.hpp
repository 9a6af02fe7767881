#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace tspec {

enum class TimestampFormat {
    EpochSeconds,  // integer (or integral real) seconds
    ClockTime,     // HH:MM:SS, anchored at the first record
};

// Maps the columns of a flow-record CSV onto pipeline roles.
struct FlowSchema {
    std::string timestamp_column;
    std::string label_column;
    std::optional<std::string> attack_name_column;
    std::vector<std::string> feature_columns;
    TimestampFormat timestamp_format = TimestampFormat::EpochSeconds;

    // Throws ConfigError when the column roles overlap or are empty.
    void validate() const;

    static FlowSchema from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

FlowSchema load_schema(const std::filesystem::path& path);

struct PacketRecord {
    std::int64_t second = 0;  // relative to the timeline origin
    std::vector<double> features;
    std::uint8_t label = 0;
    bool synthetic_fill = false;
    int attack = -1;  // index into PacketTimeline::attack_names, -1 for none

    friend bool operator==(const PacketRecord&, const PacketRecord&) = default;
};

struct PacketTimeline {
    std::vector<PacketRecord> records;
    std::int64_t origin_second = 0;
    std::vector<std::string> feature_names;
    std::vector<std::string> attack_names;

    std::size_t size() const { return records.size(); }
    std::size_t feature_count() const { return feature_names.size(); }

    // Number of integer seconds in [first, last] that carry no record.
    std::size_t missing_seconds() const;
    // Fraction of records labelled 1.
    double attack_fraction() const;

    friend bool operator==(const PacketTimeline&, const PacketTimeline&) = default;
};

// Parses a flow-record CSV (header row required). Records come back sorted
// by second; rows sharing a second keep their file order.
PacketTimeline parse_flow_csv(const std::filesystem::path& path, const FlowSchema& schema);
PacketTimeline parse_flow_text(std::string_view text, const FlowSchema& schema);

// Inserts one record for every empty second between the first and last
// record. Inserted features are copied from label-0 records drawn uniformly
// with replacement.
PacketTimeline fill_missing_points(const PacketTimeline& timeline, std::uint64_t seed);

// Projects every record onto `feature_list`, in that order.
PacketTimeline select_features(const PacketTimeline& timeline, std::span<const std::string> feature_list);

// Names of features that take more than one value across the timeline.
// Used as the feature list when no per-attack selection is configured.
std::vector<std::string> non_constant_features(const PacketTimeline& timeline);

// Writes `second,<features...>,label,attack`, with the matching schema
// available through flow_schema_for().
std::string format_flow_csv(const PacketTimeline& timeline);
FlowSchema flow_schema_for(const PacketTimeline& timeline);

}  // namespace tspec
