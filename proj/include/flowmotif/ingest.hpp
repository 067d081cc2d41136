#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "csv.hpp"
#include "errors.hpp"

namespace flowmotif {

/// One directed pass: `passer` played the ball to `receiver` at `timestamp`
/// seconds after kick-off.
struct PassEvent {
    std::string match_id;
    std::string team_id;
    std::string passer;
    std::string receiver;
    double timestamp = 0.0;

    friend bool operator==(const PassEvent&, const PassEvent&) = default;
};

/// All passes of one team in one match, sorted by time (stable for ties).
struct MatchEventLog {
    std::string match_id;
    std::string team_id;
    std::vector<PassEvent> events;
};

enum class InputFormat { csv, jsonl };

inline InputFormat parse_input_format(std::string_view name) {
    if (name == "csv")
        return InputFormat::csv;
    if (name == "jsonl")
        return InputFormat::jsonl;
    throw DomainError("unsupported input format '" + std::string(name) + "'");
}

/// Picks the format from a file extension: `.jsonl` / `.ndjson` are JSON
/// lines, everything else is CSV.
inline InputFormat format_for_path(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    return (ext == ".jsonl" || ext == ".ndjson") ? InputFormat::jsonl : InputFormat::csv;
}

struct Diagnostic {
    std::size_t line = 0;
    std::string reason;

    std::string to_string() const {
        return "line=" + std::to_string(line) + " reason=" + reason;
    }
};

struct ParseResult {
    std::vector<PassEvent> events;
    std::vector<Diagnostic> diagnostics;
};

inline constexpr std::string_view kPassColumns[] = {"match_id", "team_id", "passer", "receiver",
                                                    "timestamp_s"};

namespace detail {

// Shared validation for both formats; returns an empty string when valid.
inline std::string validate(const PassEvent& e) {
    if (e.match_id.empty())
        return "empty match_id";
    if (e.team_id.empty())
        return "empty team_id";
    if (e.passer.empty())
        return "empty passer";
    if (e.receiver.empty())
        return "empty receiver";
    if (!std::isfinite(e.timestamp))
        return "non-finite timestamp";
    if (e.timestamp < 0.0)
        return "negative timestamp";
    if (e.passer == e.receiver)
        return "self-pass";
    return {};
}

inline bool getline_checked(std::istream& in, std::string& line) {
    if (std::getline(in, line))
        return true;
    if (in.bad())
        throw IoError("read failure on input stream");
    return false;
}

inline void strip_bom(std::string& line) {
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
        static_cast<unsigned char>(line[1]) == 0xBB && static_cast<unsigned char>(line[2]) == 0xBF)
        line.erase(0, 3);
}

inline ParseResult parse_csv(std::istream& in) {
    ParseResult result;
    std::string raw;
    std::size_t line_no = 0;
    std::vector<std::size_t> column_of(std::size(kPassColumns));
    std::size_t width = 0;
    bool have_header = false;

    while (getline_checked(in, raw)) {
        ++line_no;
        if (line_no == 1)
            strip_bom(raw);
        const auto line = csv::chomp(raw);
        if (csv::is_blank(line))
            continue;
        auto fields = csv::split_line(line);
        if (!have_header) {
            if (!fields)
                throw FormatError("malformed csv header at line " + std::to_string(line_no));
            width = fields->size();
            for (std::size_t c = 0; c < std::size(kPassColumns); ++c) {
                auto it = std::find(fields->begin(), fields->end(), kPassColumns[c]);
                if (it == fields->end())
                    throw FormatError("csv header is missing column '" +
                                      std::string(kPassColumns[c]) + "'");
                column_of[c] = static_cast<std::size_t>(it - fields->begin());
            }
            have_header = true;
            continue;
        }
        if (!fields) {
            result.diagnostics.push_back({line_no, "unterminated quote"});
            continue;
        }
        if (fields->size() != width) {
            result.diagnostics.push_back({line_no, "expected " + std::to_string(width) +
                                                       " fields, got " +
                                                       std::to_string(fields->size())});
            continue;
        }
        auto& f = *fields;
        const auto ts = csv::parse_real(f[column_of[4]]);
        if (!ts) {
            result.diagnostics.push_back({line_no, "invalid timestamp '" + f[column_of[4]] + "'"});
            continue;
        }
        PassEvent e{f[column_of[0]], f[column_of[1]], f[column_of[2]], f[column_of[3]], *ts};
        if (auto why = validate(e); !why.empty()) {
            result.diagnostics.push_back({line_no, std::move(why)});
            continue;
        }
        result.events.push_back(std::move(e));
    }
    return result;
}

inline bool json_text(const nlohmann::json& obj, const char* key, std::string& out,
                      std::string& why) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        why = std::string("missing field '") + key + "'";
        return false;
    }
    if (it->is_string()) {
        out = it->get<std::string>();
        return true;
    }
    if (it->is_number_integer()) {
        out = it->dump();
        return true;
    }
    why = std::string("field '") + key + "' must be a string";
    return false;
}

inline ParseResult parse_jsonl(std::istream& in) {
    ParseResult result;
    std::string raw;
    std::size_t line_no = 0;
    while (getline_checked(in, raw)) {
        ++line_no;
        if (line_no == 1)
            strip_bom(raw);
        const auto line = csv::chomp(raw);
        if (csv::is_blank(line))
            continue;
        auto obj = nlohmann::json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object()) {
            result.diagnostics.push_back({line_no, "invalid json object"});
            continue;
        }
        PassEvent e;
        std::string why;
        if (!json_text(obj, "match_id", e.match_id, why) ||
            !json_text(obj, "team_id", e.team_id, why) ||
            !json_text(obj, "passer", e.passer, why) ||
            !json_text(obj, "receiver", e.receiver, why)) {
            result.diagnostics.push_back({line_no, why});
            continue;
        }
        auto ts = obj.find("timestamp_s");
        if (ts == obj.end() || !ts->is_number()) {
            result.diagnostics.push_back({line_no, "missing or non-numeric field 'timestamp_s'"});
            continue;
        }
        e.timestamp = ts->get<double>();
        if (why = validate(e); !why.empty()) {
            result.diagnostics.push_back({line_no, std::move(why)});
            continue;
        }
        result.events.push_back(std::move(e));
    }
    return result;
}

} // namespace detail

/// Reads pass events in input order. Malformed records do not abort the
/// parse; they are reported in `diagnostics` with their 1-based line number.
/// A CSV header lacking one of the required columns throws FormatError.
inline ParseResult parse_pass_events(std::istream& in, InputFormat format) {
    if (!in)
        throw IoError("input stream is not readable");
    return format == InputFormat::csv ? detail::parse_csv(in) : detail::parse_jsonl(in);
}

inline ParseResult parse_pass_file(const std::filesystem::path& path, InputFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path.string() + "'");
    return parse_pass_events(in, format);
}

inline void write_pass_events(std::ostream& out, const std::vector<PassEvent>& events,
                              InputFormat format) {
    if (format == InputFormat::csv) {
        out << "match_id,team_id,passer,receiver,timestamp_s\n";
        for (const auto& e : events)
            out << csv::escape(e.match_id) << ',' << csv::escape(e.team_id) << ','
                << csv::escape(e.passer) << ',' << csv::escape(e.receiver) << ','
                << csv::format_real(e.timestamp) << '\n';
        return;
    }
    for (const auto& e : events) {
        nlohmann::ordered_json obj;
        obj["match_id"] = e.match_id;
        obj["team_id"] = e.team_id;
        obj["passer"] = e.passer;
        obj["receiver"] = e.receiver;
        obj["timestamp_s"] = e.timestamp;
        out << obj.dump() << '\n';
    }
}

/// Partitions events by (match_id, team_id). Logs appear in order of first
/// occurrence of their key; events inside a log are stably sorted by time.
inline std::vector<MatchEventLog> group_by_match(const std::vector<PassEvent>& events) {
    std::vector<MatchEventLog> logs;
    std::map<std::pair<std::string, std::string>, std::size_t> index;
    for (const auto& e : events) {
        auto [it, inserted] = index.try_emplace({e.match_id, e.team_id}, logs.size());
        if (inserted)
            logs.push_back({e.match_id, e.team_id, {}});
        logs[it->second].events.push_back(e);
    }
    for (auto& log : logs)
        std::stable_sort(log.events.begin(), log.events.end(),
                         [](const PassEvent& a, const PassEvent& b) {
                             return a.timestamp < b.timestamp;
                         });
    return logs;
}

} // namespace flowmotif
