#include "procaware/annotate.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <set>

#include "procaware/error.hpp"
#include "procaware/text.hpp"

namespace procaware {

using nlohmann::json;

std::string_view to_string(SourceType t) {
    switch (t) {
        case SourceType::binary: return "binary";
        case SourceType::discrete: return "discrete";
        case SourceType::continuous: return "continuous";
    }
    return "";
}

std::string_view to_string(TargetType t) {
    return t == TargetType::binary ? "binary" : "discrete";
}

SourceType parse_source_type(std::string_view text) {
    if (text == "binary") return SourceType::binary;
    if (text == "discrete") return SourceType::discrete;
    if (text == "continuous") return SourceType::continuous;
    throw Error("SchemaError", "source_type \"" + std::string(text) + "\"");
}

TargetType parse_target_type(std::string_view text) {
    if (text == "binary") return TargetType::binary;
    if (text == "discrete") return TargetType::discrete;
    throw Error("SchemaError", "target_type \"" + std::string(text) + "\"");
}

namespace {

struct Interval {
    double lo;
    bool lo_open;
    double hi;
    bool hi_open;
};

Interval interval_of(RuleMatch const& m) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return std::visit(
        [](auto const& x) -> Interval {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, ExactMatch>) {
                return {x.value, false, x.value, false};
            } else if constexpr (std::is_same_v<T, RangeMatch>) {
                return {x.lo, false, x.hi, false};
            } else {
                return {x.bound, true, inf, true};
            }
        },
        m);
}

bool intersects(Interval const& a, Interval const& b) {
    // Largest lower bound vs smallest upper bound.
    double lo = std::max(a.lo, b.lo);
    double hi = std::min(a.hi, b.hi);
    if (lo < hi) return true;
    if (lo > hi) return false;
    bool lo_open = (a.lo == lo && a.lo_open) || (b.lo == lo && b.lo_open);
    bool hi_open = (a.hi == hi && a.hi_open) || (b.hi == hi && b.hi_open);
    return !lo_open && !hi_open;
}

std::string describe(RuleMatch const& m) {
    return std::visit(
        [](auto const& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, ExactMatch>) {
                return text::format_number(x.value);
            } else if constexpr (std::is_same_v<T, RangeMatch>) {
                return text::format_number(x.lo) + ".." + text::format_number(x.hi);
            } else {
                return "> " + text::format_number(x.bound);
            }
        },
        m);
}

}  // namespace

bool ValueMappingRule::matches(double value) const {
    return std::visit(
        [value](auto const& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, ExactMatch>) {
                return value == x.value;
            } else if constexpr (std::is_same_v<T, RangeMatch>) {
                return value >= x.lo && value <= x.hi;
            } else {
                return value > x.bound;
            }
        },
        match);
}

SensorAnnotation::SensorAnnotation(SensorId sensor, std::string component, std::string sensor_kind,
                                   SourceType source_type, TargetType target_type,
                                   std::vector<ValueMappingRule> rules, std::optional<std::string> unit,
                                   PrivacyLevel privacy)
    : sensor_(std::move(sensor)),
      component_(std::move(component)),
      sensor_kind_(std::move(sensor_kind)),
      source_type_(source_type),
      target_type_(target_type),
      rules_(std::move(rules)),
      unit_(std::move(unit)),
      privacy_(privacy) {
    auto fail = [&](std::string const& why) { throw Error("InvalidAnnotation", sensor_.str() + ": " + why); };

    if (source_type_ == SourceType::binary && rules_.size() != 2) fail("binary source needs exactly 2 rules");
    std::map<int, std::string> label_of_code;
    std::map<std::string, int> code_of_label;
    for (std::size_t i = 0; i < rules_.size(); ++i) {
        auto const& rule = rules_[i];
        if (auto const* r = std::get_if<RangeMatch>(&rule.match); r && r->lo > r->hi) {
            fail("range " + describe(rule.match) + " has lo > hi");
        }
        if (rule.target.code < 0) fail("negative target code");
        if (rule.target.label.empty()) fail("empty semantics label");
        if (target_type_ == TargetType::binary && rule.target.code > 1) fail("binary target uses code > 1");
        auto [lit, lnew] = label_of_code.emplace(rule.target.code, rule.target.label);
        if (!lnew && lit->second != rule.target.label) {
            fail("code " + std::to_string(rule.target.code) + " has labels \"" + lit->second + "\" and \"" +
                 rule.target.label + "\"");
        }
        auto [cit, cnew] = code_of_label.emplace(rule.target.label, rule.target.code);
        if (!cnew && cit->second != rule.target.code) fail("label \"" + rule.target.label + "\" has two codes");
        for (std::size_t j = 0; j < i; ++j) {
            if (intersects(interval_of(rules_[j].match), interval_of(rule.match))) {
                fail("rules " + describe(rules_[j].match) + " and " + describe(rule.match) + " overlap");
            }
        }
    }
}

std::vector<DiscreteSymbol> SensorAnnotation::symbols() const {
    std::map<int, std::string> by_code;
    for (auto const& r : rules_) by_code.emplace(r.target.code, r.target.label);
    std::vector<DiscreteSymbol> out;
    for (auto& [code, label] : by_code) out.push_back({code, label});
    return out;
}

std::optional<DiscreteSymbol> SensorAnnotation::map(double value) const {
    for (auto const& r : rules_) {
        if (r.matches(value)) return r.target;
    }
    return std::nullopt;
}

AnnotationSet parse_annotations(std::string_view json_text) {
    json doc = json::parse(json_text, nullptr, false);
    if (doc.is_discarded() || !doc.is_array()) throw Error("SchemaError", "annotation file must be a JSON array");

    auto required_string = [](json const& obj, char const* key) {
        auto it = obj.find(key);
        if (it == obj.end() || !it->is_string()) throw Error("SchemaError", key);
        return it->get<std::string>();
    };

    AnnotationSet out;
    for (auto const& entry : doc) {
        if (!entry.is_object()) throw Error("SchemaError", "annotation entry must be an object");
        std::vector<ValueMappingRule> rules;
        if (auto it = entry.find("rules"); it != entry.end()) {
            if (!it->is_array()) throw Error("SchemaError", "rules");
            for (auto const& r : *it) {
                auto m = r.find("match");
                if (m == r.end() || !m->is_object()) throw Error("SchemaError", "rules[].match");
                RuleMatch match;
                if (m->contains("eq")) {
                    match = ExactMatch{m->at("eq").get<double>()};
                } else if (m->contains("range")) {
                    auto const& rg = m->at("range");
                    if (!rg.is_array() || rg.size() != 2) throw Error("SchemaError", "rules[].match.range");
                    match = RangeMatch{rg[0].get<double>(), rg[1].get<double>()};
                } else if (m->contains("gt")) {
                    match = GreaterMatch{m->at("gt").get<double>()};
                } else {
                    throw Error("SchemaError", "rules[].match needs eq, range or gt");
                }
                if (!r.contains("code") || !r["code"].is_number_integer()) throw Error("SchemaError", "rules[].code");
                rules.push_back({match, {r["code"].get<int>(), required_string(r, "label")}});
            }
        }
        std::optional<std::string> unit;
        if (entry.contains("unit") && entry["unit"].is_string()) unit = entry["unit"].get<std::string>();
        PrivacyLevel privacy = PrivacyLevel::public_;
        if (entry.contains("privacy")) privacy = parse_privacy_level(entry["privacy"].get<std::string>());

        SensorAnnotation ann(SensorId(required_string(entry, "sensor_id")), entry.value("component", ""),
                             entry.value("sensor", ""), parse_source_type(required_string(entry, "source_type")),
                             parse_target_type(required_string(entry, "target_type")), std::move(rules),
                             std::move(unit), privacy);
        auto id = ann.sensor();
        if (!out.emplace(id, std::move(ann)).second) {
            throw Error("SchemaError", "duplicate annotation for " + id.str());
        }
    }
    return out;
}

AnnotationSet load_annotations(std::filesystem::path const& path) {
    return parse_annotations(text::read_file(path));
}

std::string emit_annotations(AnnotationSet const& annotations) {
    json doc = json::array();
    for (auto const& [id, ann] : annotations) {
        json entry{{"sensor_id", id.str()},
                   {"component", ann.component()},
                   {"sensor", ann.sensor_kind()},
                   {"source_type", std::string(to_string(ann.source_type()))},
                   {"target_type", std::string(to_string(ann.target_type()))},
                   {"privacy", std::string(to_string(ann.privacy()))}};
        if (ann.unit()) entry["unit"] = *ann.unit();
        entry["rules"] = json::array();
        for (auto const& r : ann.rules()) {
            json match = std::visit(
                [](auto const& x) -> json {
                    using T = std::decay_t<decltype(x)>;
                    if constexpr (std::is_same_v<T, ExactMatch>) {
                        return {{"eq", x.value}};
                    } else if constexpr (std::is_same_v<T, RangeMatch>) {
                        return {{"range", {x.lo, x.hi}}};
                    } else {
                        return {{"gt", x.bound}};
                    }
                },
                r.match);
            entry["rules"].push_back({{"match", match}, {"code", r.target.code}, {"label", r.target.label}});
        }
        doc.push_back(std::move(entry));
    }
    return doc.dump(2) + "\n";
}

std::string DiscreteStream::label_of(int code) const {
    if (code == kUnmappedCode) return "unmapped";
    for (auto const& s : alphabet) {
        if (s.code == code) return s.label;
    }
    return std::to_string(code);
}

DiscreteStream apply_annotation(SensorStream const& stream, SensorAnnotation const& annotation, MappingMode mode,
                                std::vector<UnmappedValue>* unmapped) {
    if (stream.sensor != annotation.sensor()) {
        throw Error("AnnotationMismatch",
                    "annotation for " + annotation.sensor().str() + " applied to stream " + stream.sensor.str());
    }
    DiscreteStream out{stream.sensor, {}, annotation.symbols(), Provenance::rule_mapped};
    out.points.reserve(stream.readings.size());
    bool any_unmapped = false;
    for (auto const& r : stream.readings) {
        auto sym = annotation.map(r.value);
        if (!sym) {
            if (mode == MappingMode::strict) {
                throw Error("UnmappedValue", "sensor " + stream.sensor.str() + " t=" + std::to_string(r.timestamp) +
                                                 " value " + text::format_number(r.value));
            }
            any_unmapped = true;
            if (unmapped) unmapped->push_back({stream.sensor, r.timestamp, r.value});
            out.points.push_back({r.timestamp, kUnmappedCode});
            continue;
        }
        out.points.push_back({r.timestamp, sym->code});
    }
    if (any_unmapped) out.alphabet.insert(out.alphabet.begin(), DiscreteSymbol{kUnmappedCode, "unmapped"});
    return out;
}

std::vector<double> sax_breakpoints(int alphabet_size) {
    if (alphabet_size < 2) throw Error("InvalidSaxConfig", "alphabet_size must be >= 2");
    boost::math::normal_distribution<double> standard;
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(alphabet_size - 1));
    for (int i = 1; i < alphabet_size; ++i) {
        out.push_back(boost::math::quantile(standard, static_cast<double>(i) / alphabet_size));
    }
    return out;
}

std::string sax_label(int code) {
    if (code >= 0 && code < 26) return std::string("sax") + static_cast<char>('A' + code);
    return "sax" + std::to_string(code);
}

SaxResult auto_discretize(SensorStream const& stream, SaxConfig const& config) {
    if (config.paa_window < 1) throw Error("InvalidSaxConfig", "paa_window must be >= 1");
    auto const breakpoints = sax_breakpoints(config.alphabet_size);
    auto const& rs = stream.readings;
    if (rs.size() < static_cast<std::size_t>(config.paa_window)) {
        throw Error("InsufficientData", "sensor " + stream.sensor.str() + " has " + std::to_string(rs.size()) +
                                            " readings, paa_window is " + std::to_string(config.paa_window));
    }

    double const n = static_cast<double>(rs.size());
    double mean = 0.0;
    for (auto const& r : rs) mean += r.value;
    mean /= n;
    double var = 0.0;
    for (auto const& r : rs) var += (r.value - mean) * (r.value - mean);
    double const sd = std::sqrt(var / n);
    bool const degenerate = !(sd > 0.0);

    SaxResult result;
    result.degenerate = degenerate;
    auto& out = result.stream;
    out.sensor = stream.sensor;
    out.provenance = Provenance::sax_auto;
    for (int c = 0; c < config.alphabet_size; ++c) out.alphabet.push_back({c, sax_label(c)});

    auto const window = static_cast<std::size_t>(config.paa_window);
    for (std::size_t start = 0; start < rs.size(); start += window) {
        std::size_t const end = std::min(rs.size(), start + window);
        double sum = 0.0;
        for (std::size_t i = start; i < end; ++i) sum += rs[i].value;
        double const z = degenerate ? 0.0 : (sum / static_cast<double>(end - start) - mean) / sd;
        auto code = static_cast<int>(std::upper_bound(breakpoints.begin(), breakpoints.end(), z) - breakpoints.begin());
        out.points.push_back({rs[start].timestamp, code});
    }
    return result;
}

CoverageReport check_annotation_coverage(SensorAnnotation const& annotation, SensorStream const& stream) {
    CoverageReport report;
    report.total = stream.readings.size();
    std::set<double> listed;
    for (auto const& r : stream.readings) {
        if (annotation.map(r.value)) {
            ++report.matched;
        } else if (report.uncovered_examples.size() < 10 && listed.insert(r.value).second) {
            report.uncovered_examples.push_back(r.value);
        }
    }
    if (report.total == 0) {
        report.coverage = annotation.is_auto() ? 0.0 : 1.0;
    } else {
        report.coverage = static_cast<double>(report.matched) / static_cast<double>(report.total);
    }
    return report;
}

}  // namespace procaware
