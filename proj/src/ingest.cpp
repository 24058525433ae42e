#include "procaware/ingest.hpp"

#include <algorithm>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>

#include "procaware/error.hpp"
#include "procaware/text.hpp"

namespace procaware {

using nlohmann::json;

namespace {

constexpr std::string_view kCsvHeader = "sensor_id,timestamp,value";

struct RawRow {
    std::size_t line;
    SensorId sensor;
    Timestamp timestamp;
    double value;
};

class RowSink {
public:
    explicit RowSink(ParseMode mode) : mode_(mode) {}

    void fail(std::string kind, std::size_t line, std::string reason) {
        if (mode_ == ParseMode::strict) throw ParseError(std::move(kind), line, reason);
        skipped_.push_back({line, std::move(kind), std::move(reason)});
    }

    void accept(RawRow row) { rows_.push_back(std::move(row)); }

    std::vector<RawRow>& rows() { return rows_; }
    std::vector<SkippedRow>& skipped() { return skipped_; }
    [[nodiscard]] ParseMode mode() const { return mode_; }

private:
    ParseMode mode_;
    std::vector<RawRow> rows_;
    std::vector<SkippedRow> skipped_;
};

/// Splits into lines, dropping a trailing '\r' and a leading BOM.
template <typename Fn>
void for_each_line(std::string_view content, Fn&& fn) {
    if (content.starts_with("\xEF\xBB\xBF")) content.remove_prefix(3);
    std::size_t line_no = 0;
    while (!content.empty()) {
        auto nl = content.find('\n');
        auto line = content.substr(0, nl);
        content = nl == std::string_view::npos ? std::string_view{} : content.substr(nl + 1);
        if (line.ends_with('\r')) line.remove_suffix(1);
        fn(++line_no, line);
    }
}

void parse_csv(std::string_view content, RowSink& sink) {
    bool header_seen = false;
    for_each_line(content, [&](std::size_t line_no, std::string_view line) {
        if (line.empty()) return;
        if (!header_seen) {
            if (line != kCsvHeader) {
                throw ParseError("MalformedRow", line_no, "header must be exactly `sensor_id,timestamp,value`");
            }
            header_seen = true;
            return;
        }
        auto c1 = line.find(',');
        auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
        if (c2 == std::string_view::npos || line.find(',', c2 + 1) != std::string_view::npos) {
            sink.fail("MalformedRow", line_no, "expected 3 comma-separated fields");
            return;
        }
        auto sensor = line.substr(0, c1);
        auto ts_field = line.substr(c1 + 1, c2 - c1 - 1);
        auto value_field = line.substr(c2 + 1);
        if (sensor.empty()) {
            sink.fail("MalformedRow", line_no, "empty sensor_id");
            return;
        }
        auto ts = text::parse_int(ts_field);
        if (!ts) {
            sink.fail("MalformedRow", line_no, "timestamp `" + std::string(ts_field) + "` is not an integer");
            return;
        }
        if (*ts < 0) {
            sink.fail("MalformedRow", line_no, "negative timestamp");
            return;
        }
        auto value = text::parse_number(value_field);
        if (!value) {
            sink.fail("NonNumericValue", line_no, "value `" + std::string(value_field) + "` is not a number");
            return;
        }
        sink.accept({line_no, SensorId(std::string(sensor)), *ts, *value});
    });
}

void parse_jsonl(std::string_view content, RowSink& sink) {
    for_each_line(content, [&](std::size_t line_no, std::string_view line) {
        if (line.find_first_not_of(" \t") == std::string_view::npos) return;
        json obj = json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object()) {
            sink.fail("MalformedRow", line_no, "not a JSON object");
            return;
        }
        auto sensor = obj.find("sensor_id");
        auto ts = obj.find("timestamp");
        auto value = obj.find("value");
        if (sensor == obj.end() || !sensor->is_string() || sensor->get<std::string>().empty()) {
            sink.fail("MalformedRow", line_no, "missing or non-string sensor_id");
            return;
        }
        if (ts == obj.end() || !ts->is_number_integer()) {
            sink.fail("MalformedRow", line_no, "missing or non-integer timestamp");
            return;
        }
        if (ts->get<std::int64_t>() < 0) {
            sink.fail("MalformedRow", line_no, "negative timestamp");
            return;
        }
        if (value == obj.end() || !value->is_number()) {
            sink.fail("NonNumericValue", line_no, "missing or non-numeric value");
            return;
        }
        sink.accept({line_no, SensorId(sensor->get<std::string>()), ts->get<std::int64_t>(), value->get<double>()});
    });
}

ParsedStreams assemble(RowSink& sink, ParseOptions const& options) {
    std::map<SensorId, std::vector<RawRow>> by_sensor;
    for (auto& row : sink.rows()) by_sensor[row.sensor].push_back(std::move(row));

    ParsedStreams out;
    for (auto& [sensor, rows] : by_sensor) {
        std::stable_sort(rows.begin(), rows.end(),
                         [](RawRow const& a, RawRow const& b) { return a.timestamp < b.timestamp; });
        SensorStream stream{sensor, {}};
        stream.readings.reserve(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i > 0 && rows[i].timestamp == rows[i - 1].timestamp) {
                if (sink.mode() == ParseMode::strict) {
                    throw Error("DuplicateTimestamp", "sensor " + sensor.str() + " has two readings at t=" +
                                                          std::to_string(rows[i].timestamp) + " (lines " +
                                                          std::to_string(rows[i - 1].line) + ", " +
                                                          std::to_string(rows[i].line) + ")");
                }
                sink.skipped().push_back({rows[i].line, "DuplicateTimestamp",
                                          "sensor " + sensor.str() + " t=" + std::to_string(rows[i].timestamp)});
                continue;
            }
            stream.readings.push_back({rows[i].timestamp, rows[i].value});
        }
        out.reading_count += stream.readings.size();
        out.streams.push_back(std::move(stream));
    }
    if (options.manifest) {
        out.manifest = *options.manifest;
    } else {
        out.manifest.dataset_id = "inferred";
        for (auto const& s : out.streams) out.manifest.sensors.push_back({s.sensor, "", ""});
    }
    std::sort(sink.skipped().begin(), sink.skipped().end(),
              [](SkippedRow const& a, SkippedRow const& b) { return a.line < b.line; });
    out.skipped = std::move(sink.skipped());
    return out;
}

}  // namespace

StreamFormat parse_stream_format(std::string_view text) {
    if (text == "csv") return StreamFormat::csv;
    if (text == "jsonl") return StreamFormat::jsonl;
    throw Error("SchemaError", "stream format must be csv or jsonl, got \"" + std::string(text) + "\"");
}

StreamFormat stream_format_for(std::filesystem::path const& path) {
    auto ext = path.extension().string();
    if (ext == ".jsonl" || ext == ".ndjson") return StreamFormat::jsonl;
    return StreamFormat::csv;
}

ParsedStreams parse_streams(std::string_view content, StreamFormat format, ParseOptions const& options) {
    RowSink sink(options.mode);
    if (format == StreamFormat::csv) {
        parse_csv(content, sink);
    } else {
        parse_jsonl(content, sink);
    }
    return assemble(sink, options);
}

ParsedStreams load_streams(std::vector<std::filesystem::path> const& files, ParseOptions const& options) {
    RowSink sink(options.mode);
    for (auto const& file : files) {
        auto content = text::read_file(file);
        try {
            if (options.format.value_or(stream_format_for(file)) == StreamFormat::csv) {
                parse_csv(content, sink);
            } else {
                parse_jsonl(content, sink);
            }
        } catch (ParseError const& e) {
            throw ParseError(e.kind(), e.line(), e.reason() + " (" + file.filename().string() + ")");
        }
    }
    return assemble(sink, options);
}

DatasetManifest parse_manifest(std::string_view json_text) {
    json doc = json::parse(json_text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw Error("SchemaError", "manifest is not a JSON object");

    DatasetManifest m;
    if (auto it = doc.find("dataset_id"); it != doc.end()) {
        if (!it->is_string()) throw Error("SchemaError", "dataset_id");
        m.dataset_id = it->get<std::string>();
    }
    auto unit = doc.find("timestamp_unit");
    if (unit == doc.end() || !unit->is_string()) throw Error("SchemaError", "timestamp_unit");
    m.timestamp_unit = parse_timestamp_unit(unit->get<std::string>());

    auto sensors = doc.find("sensors");
    if (sensors == doc.end() || !sensors->is_array()) throw Error("SchemaError", "sensors");
    for (auto const& s : *sensors) {
        if (!s.is_object() || !s.contains("id") || !s["id"].is_string() || s["id"].get<std::string>().empty()) {
            throw Error("SchemaError", "sensors[].id");
        }
        SensorInfo info{SensorId(s["id"].get<std::string>()), s.value("name", ""), s.value("description", "")};
        if (m.contains(info.id)) throw Error("SchemaError", "sensors[].id duplicated: " + info.id.str());
        m.sensors.push_back(std::move(info));
    }
    return m;
}

DatasetManifest load_manifest(std::filesystem::path const& path) {
    return parse_manifest(text::read_file(path));
}

std::string emit_csv(std::vector<SensorStream> const& streams) {
    std::vector<SensorReading> rows;
    for (auto const& s : streams) {
        for (auto const& r : s.readings) rows.push_back({s.sensor, r.timestamp, r.value});
    }
    std::stable_sort(rows.begin(), rows.end(), [](SensorReading const& a, SensorReading const& b) {
        return a.timestamp != b.timestamp ? a.timestamp < b.timestamp : a.sensor < b.sensor;
    });
    std::string out(kCsvHeader);
    out += '\n';
    for (auto const& r : rows) {
        out += r.sensor.str();
        out += ',';
        out += std::to_string(r.timestamp);
        out += ',';
        out += text::format_number(r.value);
        out += '\n';
    }
    return out;
}

std::string emit_jsonl(std::vector<SensorStream> const& streams) {
    std::string out;
    for (auto const& s : streams) {
        for (auto const& r : s.readings) {
            // Hand-formatted so the value keeps the shortest round-trip spelling.
            out += "{\"sensor_id\":" + json(s.sensor.str()).dump() + ",\"timestamp\":" + std::to_string(r.timestamp) +
                   ",\"value\":" + text::format_number(r.value) + "}\n";
        }
    }
    return out;
}

std::string emit_manifest(DatasetManifest const& manifest) {
    json doc;
    doc["dataset_id"] = manifest.dataset_id;
    doc["timestamp_unit"] = std::string(to_string(manifest.timestamp_unit));
    doc["sensors"] = json::array();
    for (auto const& s : manifest.sensors) {
        json entry{{"id", s.id.str()}};
        if (!s.name.empty()) entry["name"] = s.name;
        if (!s.description.empty()) entry["description"] = s.description;
        doc["sensors"].push_back(std::move(entry));
    }
    return doc.dump(2) + "\n";
}

}  // namespace procaware
