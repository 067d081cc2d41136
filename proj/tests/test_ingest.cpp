#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "flowmotif/ingest.hpp"

using namespace flowmotif;

namespace {

const std::string kHeader = "match_id,team_id,passer,receiver,timestamp_s\n";

ParseResult parse_csv_text(const std::string& text) {
    std::istringstream in(text);
    return parse_pass_events(in, InputFormat::csv);
}

} // namespace

TEST(Ingest, CsvLineMapsFields) {
    auto r = parse_csv_text(kHeader + "M1,T1,p2,p4,12.0\n");
    ASSERT_EQ(r.events.size(), 1u);
    EXPECT_TRUE(r.diagnostics.empty());
    EXPECT_EQ(r.events[0], (PassEvent{"M1", "T1", "p2", "p4", 12.0}));
}

TEST(Ingest, EmptyStreamYieldsNothing) {
    for (auto format : {InputFormat::csv, InputFormat::jsonl}) {
        std::istringstream in("");
        auto r = parse_pass_events(in, format);
        EXPECT_TRUE(r.events.empty());
        EXPECT_TRUE(r.diagnostics.empty());
    }
}

TEST(Ingest, SelfPassRejectedWithLineNumber) {
    auto r = parse_csv_text(kHeader + "M1,T1,p1,p3,1\nM1,T1,p2,p2,12.0\n");
    ASSERT_EQ(r.events.size(), 1u);
    ASSERT_EQ(r.diagnostics.size(), 1u);
    EXPECT_EQ(r.diagnostics[0].line, 3u);
    EXPECT_EQ(r.diagnostics[0].reason, "self-pass");
    EXPECT_EQ(r.diagnostics[0].to_string(), "line=3 reason=self-pass");
}

TEST(Ingest, MalformedRecordsBecomeDiagnostics) {
    auto r = parse_csv_text(kHeader + "M1,T1,a,b,abc\n"
                                      "M1,T1,a,b\n"
                                      "M1,T1,a,b,-1\n"
                                      "M1,T1,,b,2\n"
                                      "M1,T1,a,b,inf\n"
                                      "M1,T1,a,b,3\n");
    EXPECT_EQ(r.events.size(), 1u);
    ASSERT_EQ(r.diagnostics.size(), 5u);
    EXPECT_EQ(r.diagnostics[0].line, 2u);
    EXPECT_EQ(r.diagnostics[2].reason, "negative timestamp");
    EXPECT_EQ(r.diagnostics[3].reason, "empty passer");
}

TEST(Ingest, HeaderMissingColumnIsFormatError) {
    try {
        parse_csv_text("match_id,team_id,passer,receiver\nM1,T1,a,b\n");
        FAIL() << "expected FormatError";
    } catch (const FormatError& e) {
        EXPECT_NE(std::string(e.what()).find("timestamp_s"), std::string::npos);
    }
}

TEST(Ingest, ColumnOrderAndCrlfAreTolerated) {
    auto r = parse_csv_text("timestamp_s,receiver,passer,team_id,match_id\r\n1.5,b,a,T,M\r\n");
    ASSERT_EQ(r.events.size(), 1u);
    EXPECT_EQ(r.events[0], (PassEvent{"M", "T", "a", "b", 1.5}));
}

TEST(Ingest, UnreadableFileIsIoError) {
    EXPECT_THROW(parse_pass_file("/nonexistent/passes.csv", InputFormat::csv), IoError);
}

TEST(Ingest, JsonLinesParse) {
    std::istringstream in(
        R"({"match_id":"M1","team_id":"T1","passer":"p2","receiver":"p4","timestamp_s":12.5})"
        "\n\n"
        R"({"match_id":"M1","team_id":"T1","passer":7,"receiver":8,"timestamp_s":13})"
        "\n"
        R"({"match_id":"M1","team_id":"T1","passer":"x","receiver":"x","timestamp_s":14})"
        "\n"
        "not json\n"
        R"({"match_id":"M1","team_id":"T1","passer":"x","timestamp_s":14})"
        "\n");
    auto r = parse_pass_events(in, InputFormat::jsonl);
    ASSERT_EQ(r.events.size(), 2u);
    EXPECT_EQ(r.events[1].passer, "7");
    ASSERT_EQ(r.diagnostics.size(), 3u);
    EXPECT_EQ(r.diagnostics[0].line, 4u);
    EXPECT_EQ(r.diagnostics[0].reason, "self-pass");
    EXPECT_EQ(r.diagnostics[1].line, 5u);
    EXPECT_EQ(r.diagnostics[2].reason, "missing field 'receiver'");
}

// parse(serialize(events)) == events for random valid records in both formats,
// including identifiers that need CSV quoting and awkward timestamps.
TEST(Ingest, RoundTripProperty) {
    std::mt19937_64 rng(11);
    const std::vector<std::string> names = {"p1", "Lionel Messi", "a,b", "quote\"d", "Xavi", "7"};
    std::uniform_int_distribution<std::size_t> pick(0, names.size() - 1);
    std::uniform_real_distribution<double> time(0.0, 6000.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<PassEvent> events;
        for (int i = 0; i < 40; ++i) {
            auto a = pick(rng), b = pick(rng);
            if (a == b)
                b = (b + 1) % names.size();
            events.push_back({names[pick(rng)], names[pick(rng)], names[a], names[b], time(rng)});
        }
        events.push_back({"M", "T", "x", "y", 0.1 + 0.2});
        for (auto format : {InputFormat::csv, InputFormat::jsonl}) {
            std::stringstream buf;
            write_pass_events(buf, events, format);
            auto back = parse_pass_events(buf, format);
            EXPECT_TRUE(back.diagnostics.empty());
            EXPECT_EQ(back.events, events);
        }
    }
}

TEST(GroupByMatch, PartitionsByKey) {
    std::vector<PassEvent> events = {
        {"M1", "T1", "a", "b", 1}, {"M1", "T2", "x", "y", 1}, {"M1", "T1", "b", "c", 2},
        {"M1", "T2", "y", "x", 2}, {"M1", "T1", "c", "a", 3},
    };
    auto logs = group_by_match(events);
    ASSERT_EQ(logs.size(), 2u);
    EXPECT_EQ(logs[0].team_id, "T1");
    EXPECT_EQ(logs[0].events.size(), 3u);
    EXPECT_EQ(logs[1].events.size(), 2u);
}

TEST(GroupByMatch, SortsStablyAndKeepsDuplicates) {
    std::vector<PassEvent> events = {
        {"M", "T", "c", "d", 5}, {"M", "T", "a", "b", 1}, {"M", "T", "e", "f", 1},
        {"M", "T", "a", "b", 1},
    };
    auto logs = group_by_match(events);
    ASSERT_EQ(logs.size(), 1u);
    const auto& ev = logs[0].events;
    ASSERT_EQ(ev.size(), 4u);
    EXPECT_EQ(ev[0].passer, "a");
    EXPECT_EQ(ev[1].passer, "e");
    EXPECT_EQ(ev[2].passer, "a");
    EXPECT_EQ(ev[3].passer, "c");
}

TEST(GroupByMatch, SizesSumToAcceptedRecords) {
    std::string text = kHeader;
    for (int i = 0; i < 30; ++i)
        text += "M" + std::to_string(i % 4) + ",T" + std::to_string(i % 3) + ",a,b," +
                std::to_string(i) + "\n";
    text += "M1,T1,a,a,3\nM1,T1,a,b,x\n";
    auto r = parse_csv_text(text);
    std::size_t total = 0;
    for (const auto& log : group_by_match(r.events))
        total += log.events.size();
    EXPECT_EQ(total, 30u);
    EXPECT_EQ(r.diagnostics.size(), 2u);
}
