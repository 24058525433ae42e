#include "procaware/text.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "procaware/error.hpp"

namespace procaware::text {

std::string format_number(double value) {
    if (value == 0.0) return "0";  // folds -0
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) throw Error("FormatError", "cannot format number");
    return std::string(buf.data(), end);
}

std::optional<std::int64_t> parse_int(std::string_view field) {
    if (field.empty()) return std::nullopt;
    std::int64_t out = 0;
    auto const* first = field.data();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, field.data() + field.size(), out);
    if (ec != std::errc{} || ptr != field.data() + field.size()) return std::nullopt;
    return out;
}

std::optional<double> parse_number(std::string_view field) {
    if (field.empty()) return std::nullopt;
    double out = 0.0;
    auto const* first = field.data();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, field.data() + field.size(), out, std::chars_format::general);
    if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(out)) return std::nullopt;
    return out;
}

std::string read_file(std::filesystem::path const& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("IOError", "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(std::filesystem::path const& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("IOError", "cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("IOError", "write failed for " + path.string());
}

}  // namespace procaware::text
