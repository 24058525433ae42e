#include "procaware/xes.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <chrono>
#include <cstdio>
#include <map>
#include <sstream>

#include "procaware/error.hpp"
#include "procaware/text.hpp"

namespace procaware {

namespace pt = boost::property_tree;

std::string format_xes_date(Timestamp ms) {
    using namespace std::chrono;
    sys_time<milliseconds> tp{milliseconds{ms}};
    auto day = floor<days>(tp);
    year_month_day ymd{day};
    hh_mm_ss hms{tp - day};
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()), static_cast<int>(hms.subseconds().count()));
    return buf;
}

Timestamp parse_xes_date(std::string_view text) {
    using namespace std::chrono;
    int y = 0;
    unsigned mo = 0;
    unsigned d = 0;
    int h = 0;
    int mi = 0;
    int s = 0;
    int frac = 0;
    int consumed = 0;
    std::string buf(text);
    if (std::sscanf(buf.c_str(), "%4d-%2u-%2uT%2d:%2d:%2d.%3d%n", &y, &mo, &d, &h, &mi, &s, &frac, &consumed) != 7 ||
        buf.substr(static_cast<std::size_t>(consumed)) != "Z") {
        throw Error("XesParseError", "bad date \"" + buf + "\"");
    }
    year_month_day ymd{year{y}, month{mo}, day{d}};
    if (!ymd.ok()) throw Error("XesParseError", "bad date \"" + buf + "\"");
    auto tp = sys_days{ymd} + hours{h} + minutes{mi} + seconds{s} + milliseconds{frac};
    return duration_cast<milliseconds>(tp.time_since_epoch()).count();
}

namespace {

std::string escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

void attr(std::string& out, int indent, std::string_view type, std::string_view key, std::string_view value) {
    out.append(static_cast<std::size_t>(indent), ' ');
    out += "<";
    out += type;
    out += " key=\"" + escape(key) + "\" value=\"" + escape(value) + "\"/>\n";
}

constexpr std::string_view kHeader =
    "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    "<log xes.version=\"1.0\" xes.features=\"nested-attributes\" xmlns=\"http://www.xes-standard.org/\">\n"
    "  <extension name=\"Concept\" prefix=\"concept\" uri=\"http://www.xes-standard.org/concept.xesext\"/>\n"
    "  <extension name=\"Lifecycle\" prefix=\"lifecycle\" uri=\"http://www.xes-standard.org/lifecycle.xesext\"/>\n"
    "  <extension name=\"Time\" prefix=\"time\" uri=\"http://www.xes-standard.org/time.xesext\"/>\n"
    "  <extension name=\"IoT\" prefix=\"iot\" uri=\"urn:procaware:iot\"/>\n"
    "  <global scope=\"trace\">\n"
    "    <string key=\"concept:name\" value=\"\"/>\n"
    "  </global>\n"
    "  <global scope=\"event\">\n"
    "    <string key=\"concept:name\" value=\"\"/>\n"
    "    <string key=\"lifecycle:transition\" value=\"\"/>\n"
    "    <date key=\"time:timestamp\" value=\"1970-01-01T00:00:00.000Z\"/>\n"
    "  </global>\n";

}  // namespace

std::string export_xes(std::vector<EnrichedLogRow> const& log) {
    std::vector<std::string> order;
    std::map<std::string, std::vector<EnrichedLogRow const*>> by_case;
    for (auto const& row : log) {
        auto [it, inserted] = by_case.try_emplace(row.case_id());
        if (inserted) order.push_back(row.case_id());
        it->second.push_back(&row);
    }

    std::string out(kHeader);
    for (auto const& id : order) {
        out += "  <trace>\n";
        attr(out, 4, "string", "concept:name", id);
        for (auto const* row : by_case[id]) {
            out += "    <event>\n";
            attr(out, 6, "string", "concept:name", row->label());
            attr(out, 6, "string", "lifecycle:transition", to_string(row->lifecycle()));
            attr(out, 6, "date", "time:timestamp", format_xes_date(row->event_timestamp()));
            attr(out, 6, "string", "iot:event_id", row->event_id());
            out += "      <list key=\"iot:readings\">\n        <values>\n";
            for (std::size_t i = 0; i < row->sensor_ids().size(); ++i) {
                out += "          <container key=\"iot:reading\">\n";
                attr(out, 12, "string", "iot:sensor_id", row->sensor_ids()[i].str());
                attr(out, 12, "float", "iot:value", text::format_number(row->sensor_values()[i]));
                attr(out, 12, "int", "iot:timestamp", std::to_string(row->sensor_timestamps()[i]));
                attr(out, 12, "string", "iot:privacy", to_string(row->sensor_privacy()[i]));
                out += "          </container>\n";
            }
            out += "        </values>\n      </list>\n";
            out += "    </event>\n";
        }
        out += "  </trace>\n";
    }
    out += "</log>\n";
    return out;
}

namespace {

std::string key_of(pt::ptree const& node) {
    return node.get<std::string>("<xmlattr>.key", "");
}

std::string value_of(pt::ptree const& node) {
    return node.get<std::string>("<xmlattr>.value", "");
}

[[noreturn]] void fail(std::string const& what) {
    throw Error("XesParseError", what);
}

EnrichedLogRow parse_event(pt::ptree const& event, std::string const& case_id) {
    std::optional<std::string> label;
    std::optional<std::string> lifecycle;
    std::optional<Timestamp> ts;
    std::optional<std::string> event_id;
    std::vector<SensorId> ids;
    std::vector<double> values;
    std::vector<Timestamp> stamps;
    std::vector<PrivacyLevel> privacy;

    for (auto const& [tag, child] : event) {
        if (tag == "<xmlattr>") continue;
        auto key = key_of(child);
        if (key == "concept:name") {
            label = value_of(child);
        } else if (key == "lifecycle:transition") {
            lifecycle = value_of(child);
        } else if (key == "time:timestamp") {
            ts = parse_xes_date(value_of(child));
        } else if (key == "iot:event_id") {
            event_id = value_of(child);
        } else if (key == "iot:readings") {
            for (auto const& [vtag, container] : child.get_child("values", pt::ptree{})) {
                if (vtag != "container") continue;
                std::optional<std::string> sid;
                std::optional<double> value;
                std::optional<std::int64_t> stamp;
                PrivacyLevel level = PrivacyLevel::public_;
                for (auto const& [atag, a] : container) {
                    if (atag == "<xmlattr>") continue;
                    auto k = key_of(a);
                    auto v = value_of(a);
                    if (k == "iot:sensor_id") {
                        sid = v;
                    } else if (k == "iot:value") {
                        value = text::parse_number(v);
                        if (!value) fail("bad iot:value \"" + v + "\"");
                    } else if (k == "iot:timestamp") {
                        stamp = text::parse_int(v);
                        if (!stamp) fail("bad iot:timestamp \"" + v + "\"");
                    } else if (k == "iot:privacy") {
                        level = parse_privacy_level(v);
                    }
                }
                if (!sid || !value || !stamp) fail("incomplete iot:reading");
                ids.emplace_back(*sid);
                values.push_back(*value);
                stamps.push_back(*stamp);
                privacy.push_back(level);
            }
        }
    }
    if (!label || !lifecycle || !ts || !event_id) fail("event in case " + case_id + " lacks a mandatory attribute");
    try {
        return EnrichedLogRow(std::move(ids), std::move(values), std::move(stamps), std::move(privacy), case_id,
                              *event_id, *ts, parse_lifecycle(*lifecycle), *label);
    } catch (Error const& e) {
        fail(e.what());
    }
}

}  // namespace

std::vector<EnrichedLogRow> parse_xes(std::string_view xml) {
    pt::ptree tree;
    try {
        std::istringstream in{std::string(xml)};
        pt::read_xml(in, tree);
    } catch (pt::xml_parser_error const& e) {
        fail(e.what());
    }
    auto log = tree.get_child_optional("log");
    if (!log) fail("missing <log> root");

    std::vector<EnrichedLogRow> rows;
    for (auto const& [tag, trace] : *log) {
        if (tag != "trace") continue;
        std::optional<std::string> case_id;
        for (auto const& [ttag, child] : trace) {
            if (ttag == "string" && key_of(child) == "concept:name") case_id = value_of(child);
        }
        if (!case_id) fail("trace without concept:name");
        for (auto const& [ttag, child] : trace) {
            if (ttag == "event") rows.push_back(parse_event(child, *case_id));
        }
    }
    return rows;
}

}  // namespace procaware
