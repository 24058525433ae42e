#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "procaware/model.hpp"

namespace procaware {

enum class StreamFormat { csv, jsonl };

StreamFormat parse_stream_format(std::string_view text);
/// ".csv" -> csv, ".jsonl"/".ndjson" -> jsonl.
StreamFormat stream_format_for(std::filesystem::path const& path);

enum class ParseMode { strict, lenient };

struct SkippedRow {
    std::size_t line = 0;
    std::string kind;
    std::string reason;
};

struct ParseOptions {
    ParseMode mode = ParseMode::strict;
    /// When absent the roster is inferred from the sensor ids seen.
    std::optional<DatasetManifest> manifest;
    /// Forces the format of every file given to load_streams; by default it
    /// follows the file extension.
    std::optional<StreamFormat> format;
};

struct ParsedStreams {
    DatasetManifest manifest;
    /// One stream per sensor, ordered by sensor id, readings by timestamp.
    std::vector<SensorStream> streams;
    /// Lenient mode only: rows that were dropped, with the reason.
    std::vector<SkippedRow> skipped;
    std::size_t reading_count = 0;
};

/// Strict mode throws ParseError (MalformedRow, NonNumericValue) or
/// Error(DuplicateTimestamp) on the first bad row; lenient mode skips and
/// records it.
ParsedStreams parse_streams(std::string_view content, StreamFormat format, ParseOptions const& options = {});
ParsedStreams load_streams(std::vector<std::filesystem::path> const& files, ParseOptions const& options = {});

DatasetManifest parse_manifest(std::string_view json_text);
DatasetManifest load_manifest(std::filesystem::path const& path);

std::string emit_csv(std::vector<SensorStream> const& streams);
std::string emit_jsonl(std::vector<SensorStream> const& streams);
std::string emit_manifest(DatasetManifest const& manifest);

}  // namespace procaware
