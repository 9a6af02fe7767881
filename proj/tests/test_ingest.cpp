#include "tspec/error.hpp"
#include "tspec/ingest.hpp"

#include <doctest.h>

#include <set>
#include <string>

using namespace tspec;

namespace {

FlowSchema schema2()
{
    FlowSchema s;
    s.timestamp_column = "ts";
    s.label_column = "label";
    s.attack_name_column = "type";
    s.feature_columns = {"a", "b"};
    return s;
}

// Seconds 0..5, 8, 12, 13 with the attack rows near the end.
std::string gap_csv()
{
    std::string text = "ts,a,b,label,type\n";
    for (int s : {0, 1, 2, 3, 4, 5, 8, 12, 13}) {
        const bool attack = s >= 12;
        text += std::to_string(1000 + s) + "," + std::to_string(s) + ",1," + (attack ? "1,scan" : "0,normal") + "\n";
    }
    return text;
}

}  // namespace

TEST_CASE("well-formed rows parse into records")
{
    const auto tl = parse_flow_text("ts,a,b,label,type\n5,1,2,0,normal\n6,3,4,1,ddos\n7,5,6,0,normal\n", schema2());
    REQUIRE(tl.size() == 3);
    CHECK(tl.feature_count() == 2);
    CHECK(tl.origin_second == 5);
    CHECK(tl.records[1].second == 1);
    CHECK(tl.records[1].label == 1);
    CHECK(tl.attack_names == std::vector<std::string>{"ddos"});
    CHECK(tl.records[1].attack == 0);
    CHECK(tl.records[0].attack == -1);
}

TEST_CASE("bad label is rejected with the row number")
{
    try {
        parse_flow_text("ts,a,b,label,type\n1,1,2,0,x\n2,1,2,2,x\n", schema2());
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
}

TEST_CASE("missing column and non-numeric feature are data errors")
{
    CHECK_THROWS_AS(parse_flow_text("ts,a,label,type\n1,1,0,x\n", schema2()), DataError);
    CHECK_THROWS_AS(parse_flow_text("ts,a,b,label,type\n1,1,zz,0,x\n", schema2()), DataError);
}

TEST_CASE("clock timestamps wrap past midnight")
{
    FlowSchema s = schema2();
    s.timestamp_format = TimestampFormat::ClockTime;
    const auto tl = parse_flow_text("ts,a,b,label,type\n23:59:59,1,1,0,n\n00:00:01,1,1,0,n\n", s);
    REQUIRE(tl.size() == 2);
    CHECK(tl.records[1].second - tl.records[0].second == 2);
}

TEST_CASE("gap-shaped timeline: 9 records over 14 seconds, filled to 14")
{
    const auto tl = parse_flow_text(gap_csv(), schema2());
    CHECK(tl.size() == 9);
    CHECK(tl.records.back().second - tl.records.front().second + 1 == 14);
    CHECK(tl.missing_seconds() == 5);

    const auto filled = fill_missing_points(tl, 11);
    REQUIRE(filled.size() == 14);
    std::size_t inserted = 0;
    for (std::size_t i = 0; i < filled.size(); ++i) {
        CHECK(filled.records[i].second == static_cast<std::int64_t>(i));
        if (filled.records[i].synthetic_fill) {
            ++inserted;
            CHECK(filled.records[i].label == 0);
            // Copied from some normal record (a = its second, b = 1).
            CHECK(filled.records[i].features[1] == 1.0);
            CHECK(filled.records[i].features[0] <= 8.0);
        }
    }
    CHECK(inserted == 5);
    CHECK(filled.missing_seconds() == 0);
    CHECK(fill_missing_points(tl, 11) == filled);
}

TEST_CASE("filling a gap-free timeline is the identity")
{
    const auto tl = parse_flow_text("ts,a,b,label,type\n1,1,2,0,n\n2,1,2,1,x\n", schema2());
    CHECK(fill_missing_points(tl, 5) == tl);
}

TEST_CASE("filling without any normal record fails")
{
    const auto tl = parse_flow_text("ts,a,b,label,type\n1,1,2,1,x\n4,1,2,1,x\n", schema2());
    CHECK_THROWS_AS(fill_missing_points(tl, 5), DataError);
}

TEST_CASE("feature selection projects and validates")
{
    const auto tl = parse_flow_text(gap_csv(), schema2());
    const std::vector<std::string> same = tl.feature_names;
    CHECK(select_features(tl, same) == tl);

    const std::vector<std::string> just_b{"b"};
    const auto sel = select_features(tl, just_b);
    CHECK(sel.feature_count() == 1);
    CHECK(sel.records[3].features == std::vector<double>{1.0});

    const std::vector<std::string> unknown{"zzz"};
    CHECK_THROWS_AS(select_features(tl, unknown), ConfigError);
    const std::vector<std::string> dup{"a", "a"};
    CHECK_THROWS_AS(select_features(tl, dup), ConfigError);

    CHECK(non_constant_features(tl) == std::vector<std::string>{"a"});
}

TEST_CASE("flow csv written by the library parses back")
{
    const auto tl = parse_flow_text(gap_csv(), schema2());
    const auto back = parse_flow_text(format_flow_csv(tl), flow_schema_for(tl));
    CHECK(back.records == tl.records);
    CHECK(back.attack_names == tl.attack_names);
}

TEST_CASE("schema json round-trip and validation")
{
    const auto s = schema2();
    const auto back = FlowSchema::from_json(s.to_json());
    CHECK(back.feature_columns == s.feature_columns);
    CHECK(back.attack_name_column == s.attack_name_column);
    FlowSchema bad = s;
    bad.feature_columns.push_back("label");
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}
