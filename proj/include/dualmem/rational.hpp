#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dualmem {

/// Exact rational number. All memory-size ratios and hyperparameter bounds
/// are computed in this type; floating point is a display convenience only.
using Rational = boost::rational<std::int64_t>;

inline double to_double(const Rational& r) {
    return boost::rational_cast<double>(r);
}

/// floor(r * n) for r >= 0, n >= 0. Used for the staged-entry count.
inline std::int64_t floor_scale(const Rational& r, std::int64_t n) {
    return (r.numerator() * n) / r.denominator();
}

/// Parses "3", "-3", or "p/q". Throws std::invalid_argument on anything else
/// (including a zero denominator).
inline Rational parse_rational(std::string_view text) {
    const auto bad = [&] {
        return std::invalid_argument("not a rational: '" + std::string(text) + "'");
    };
    const auto parse_int = [&](std::string_view part) {
        if (part.empty()) throw bad();
        if (part[0] != '-' && (part[0] < '0' || part[0] > '9')) throw bad();
        std::size_t pos = 0;
        std::int64_t value = 0;
        try {
            value = std::stoll(std::string(part), &pos);
        } catch (const std::exception&) {
            throw bad();
        }
        if (pos != part.size()) throw bad();
        return value;
    };
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) {
        return Rational(parse_int(text));
    }
    const std::int64_t num = parse_int(text.substr(0, slash));
    const std::int64_t den = parse_int(text.substr(slash + 1));
    if (den == 0) throw bad();
    return Rational(num, den);
}

/// "p/q", or just "p" when the denominator is 1.
inline std::string format_rational(const Rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

}  // namespace dualmem
