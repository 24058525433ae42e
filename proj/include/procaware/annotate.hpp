#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "procaware/model.hpp"

namespace procaware {

enum class SourceType { binary, discrete, continuous };
enum class TargetType { binary, discrete };

std::string_view to_string(SourceType t);
std::string_view to_string(TargetType t);
SourceType parse_source_type(std::string_view text);
TargetType parse_target_type(std::string_view text);

/// Source side of a mapping rule. Ranges are closed on both ends, `Greater`
/// is strict.
struct ExactMatch {
    double value;
};
struct RangeMatch {
    double lo;
    double hi;
};
struct GreaterMatch {
    double bound;
};
using RuleMatch = std::variant<ExactMatch, RangeMatch, GreaterMatch>;

struct ValueMappingRule {
    RuleMatch match;
    DiscreteSymbol target;

    [[nodiscard]] bool matches(double value) const;
};

/// Mapping rules of one sensor, checked on construction: no overlapping
/// rules, a binary source has exactly two rules, a binary target only uses
/// codes 0/1, and every code has one label (and vice versa).
///
/// An annotation with no rules marks a stream that stays continuous and is
/// discretized automatically (SAX).
class SensorAnnotation {
public:
    SensorAnnotation(SensorId sensor, std::string component, std::string sensor_kind, SourceType source_type,
                     TargetType target_type, std::vector<ValueMappingRule> rules,
                     std::optional<std::string> unit = std::nullopt, PrivacyLevel privacy = PrivacyLevel::public_);

    [[nodiscard]] SensorId const& sensor() const noexcept { return sensor_; }
    [[nodiscard]] std::string const& component() const noexcept { return component_; }
    [[nodiscard]] std::string const& sensor_kind() const noexcept { return sensor_kind_; }
    [[nodiscard]] SourceType source_type() const noexcept { return source_type_; }
    [[nodiscard]] TargetType target_type() const noexcept { return target_type_; }
    [[nodiscard]] std::vector<ValueMappingRule> const& rules() const noexcept { return rules_; }
    [[nodiscard]] std::optional<std::string> const& unit() const noexcept { return unit_; }
    [[nodiscard]] PrivacyLevel privacy() const noexcept { return privacy_; }

    [[nodiscard]] bool is_auto() const noexcept { return rules_.empty(); }
    /// Distinct target codes used by the rules.
    [[nodiscard]] std::vector<DiscreteSymbol> symbols() const;
    /// First matching rule's target.
    [[nodiscard]] std::optional<DiscreteSymbol> map(double value) const;

private:
    SensorId sensor_;
    std::string component_;
    std::string sensor_kind_;
    SourceType source_type_;
    TargetType target_type_;
    std::vector<ValueMappingRule> rules_;
    std::optional<std::string> unit_;
    PrivacyLevel privacy_;
};

using AnnotationSet = std::map<SensorId, SensorAnnotation>;

AnnotationSet parse_annotations(std::string_view json_text);
AnnotationSet load_annotations(std::filesystem::path const& path);
std::string emit_annotations(AnnotationSet const& annotations);

enum class Provenance { rule_mapped, sax_auto };

struct DiscretePoint {
    Timestamp timestamp = 0;
    int code = 0;

    friend bool operator==(DiscretePoint const&, DiscretePoint const&) = default;
};

/// Symbols are stored once per stream; points carry only the code.
struct DiscreteStream {
    SensorId sensor;
    std::vector<DiscretePoint> points;
    std::vector<DiscreteSymbol> alphabet;
    Provenance provenance = Provenance::rule_mapped;

    [[nodiscard]] std::string label_of(int code) const;

    friend bool operator==(DiscreteStream const&, DiscreteStream const&) = default;
};

/// Code used for readings that matched no rule in lenient mode.
inline constexpr int kUnmappedCode = -1;

struct UnmappedValue {
    SensorId sensor;
    Timestamp timestamp;
    double value;
};

enum class MappingMode { strict, lenient };

/// Maps every reading through its first matching rule. Strict mode throws
/// Error("UnmappedValue"); lenient mode emits kUnmappedCode and appends the
/// reading to `unmapped` when given.
DiscreteStream apply_annotation(SensorStream const& stream, SensorAnnotation const& annotation,
                                MappingMode mode = MappingMode::strict, std::vector<UnmappedValue>* unmapped = nullptr);

struct SaxConfig {
    int alphabet_size = 3;
    int paa_window = 1;
};

struct SaxResult {
    DiscreteStream stream;
    /// Zero variance: every segment got the middle symbol.
    bool degenerate = false;
};

/// Equiprobable standard-normal breakpoints for `alphabet_size` symbols.
std::vector<double> sax_breakpoints(int alphabet_size);
/// "saxA", "saxB", ...
std::string sax_label(int code);

/// z-normalize, average each run of `paa_window` readings (a shorter tail
/// segment is averaged over what it has), map each average to a symbol.
/// The segment is stamped with its first reading's timestamp.
SaxResult auto_discretize(SensorStream const& stream, SaxConfig const& config);

struct CoverageReport {
    double coverage = 0.0;
    std::size_t matched = 0;
    std::size_t total = 0;
    /// Up to 10 distinct values no rule matched, in order of appearance.
    std::vector<double> uncovered_examples;
};

CoverageReport check_annotation_coverage(SensorAnnotation const& annotation, SensorStream const& stream);

}  // namespace procaware
