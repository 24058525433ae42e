#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace procaware {

/// Exact fraction over 64-bit integers, always normalized (gcd-reduced,
/// positive denominator). Arithmetic is carried out in 128 bits and throws
/// std::overflow_error if the reduced result does not fit.
class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t num, std::int64_t den = 1);

    [[nodiscard]] std::int64_t num() const noexcept { return num_; }
    [[nodiscard]] std::int64_t den() const noexcept { return den_; }
    [[nodiscard]] double to_double() const noexcept;
    [[nodiscard]] bool is_zero() const noexcept { return num_ == 0; }

    /// "7", "5/2", "-1/3"
    [[nodiscard]] std::string to_string() const;

    Rational& operator+=(Rational const& rhs);
    Rational& operator*=(Rational const& rhs);
    Rational& operator/=(Rational const& rhs);

    friend Rational operator+(Rational lhs, Rational const& rhs) { return lhs += rhs; }
    friend Rational operator*(Rational lhs, Rational const& rhs) { return lhs *= rhs; }
    friend Rational operator/(Rational lhs, Rational const& rhs) { return lhs /= rhs; }

    friend bool operator==(Rational const&, Rational const&) = default;
    friend std::strong_ordering operator<=>(Rational const& a, Rational const& b);

private:
    static Rational from_wide(__int128 num, __int128 den);

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

}  // namespace procaware
