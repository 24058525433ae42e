#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "procaware/model.hpp"

namespace procaware {

/// Epoch milliseconds as an XES date, e.g. "1970-01-01T00:00:00.002Z".
std::string format_xes_date(Timestamp ms);
Timestamp parse_xes_date(std::string_view text);

/// One trace per case (first-appearance order). Events use the standard
/// concept, lifecycle and time keys; the sensor readings of each row sit in
/// an `iot:readings` list. Tick timestamps are written as milliseconds.
std::string export_xes(std::vector<EnrichedLogRow> const& log);

/// Inverse of export_xes. Throws Error("XesParseError").
std::vector<EnrichedLogRow> parse_xes(std::string_view xml);

}  // namespace procaware
