#pragma once

// Scalar field abstraction. Every algorithm in the library is a template over
// a scalar type T; two instantiations are supported:
//   Rational  exact arbitrary-precision fractions (GMP backed)
//   double    IEEE binary64, with tolerance-based zero detection

#include "tanks/error.hpp"

#include <boost/multiprecision/gmp.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <system_error>

namespace tanks {

using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;

template <class T>
struct scalar_traits;

template <>
struct scalar_traits<Rational> {
    static constexpr bool exact = true;
    static constexpr std::string_view name = "rational";
};

template <>
struct scalar_traits<double> {
    static constexpr bool exact = false;
    static constexpr std::string_view name = "float";
    /// Relative threshold below which a money amount counts as zero.
    static constexpr double zero_rel = 1e-12;
};

template <class T>
concept ScalarField = requires { scalar_traits<T>::exact; };

template <class T>
inline constexpr bool is_exact_v = scalar_traits<T>::exact;

namespace detail {

inline Integer pow10(unsigned e) {
    Integer r = 1;
    for (unsigned k = 0; k < e; ++k) r *= 10;
    return r;
}

inline bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

// Decimal digits to an integer. Leading zeros are dropped first: GMP would
// otherwise read "0125" as octal.
inline Integer digits_value(std::string_view digits) {
    while (digits.size() > 1 && digits.front() == '0') digits.remove_prefix(1);
    return Integer{std::string(digits)};
}

inline std::string_view trim_blanks(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

inline Integer parse_integer(std::string_view s) {
    bool neg = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        neg = s.front() == '-';
        s.remove_prefix(1);
    }
    if (!all_digits(s)) throw Error(ErrorKind::SyntaxError, "malformed integer '" + std::string(s) + "'");
    Integer v = digits_value(s);
    return neg ? Integer(-v) : v;
}

// Exact value of a decimal literal such as "-12.5e-3".
inline Rational parse_decimal(std::string_view s) {
    const std::string orig(s);
    bool neg = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        neg = s.front() == '-';
        s.remove_prefix(1);
    }
    long exponent = 0;
    if (auto epos = s.find_first_of("eE"); epos != std::string_view::npos) {
        auto es = s.substr(epos + 1);
        auto res = std::from_chars(es.data() + (es.size() && es.front() == '+' ? 1 : 0), es.data() + es.size(), exponent);
        if (res.ec != std::errc{} || res.ptr != es.data() + es.size() || es.empty())
            throw Error(ErrorKind::SyntaxError, "malformed number '" + orig + "'");
        s = s.substr(0, epos);
    }
    std::string digits;
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
        auto ip = s.substr(0, dot);
        auto fp = s.substr(dot + 1);
        if ((ip.empty() && fp.empty()) || (!ip.empty() && !all_digits(ip)) || (!fp.empty() && !all_digits(fp)))
            throw Error(ErrorKind::SyntaxError, "malformed number '" + orig + "'");
        digits = std::string(ip) + std::string(fp);
        exponent -= static_cast<long>(fp.size());
    } else {
        if (!all_digits(s)) throw Error(ErrorKind::SyntaxError, "malformed number '" + orig + "'");
        digits = std::string(s);
    }
    if (exponent > 4096 || exponent < -4096) throw Error(ErrorKind::SyntaxError, "exponent out of range in '" + orig + "'");
    Rational v{digits_value(digits)};
    if (exponent >= 0)
        v *= Rational(pow10(static_cast<unsigned>(exponent)));
    else
        v /= Rational(pow10(static_cast<unsigned>(-exponent)));
    return neg ? Rational(-v) : v;
}

}  // namespace detail

/// Parses "p/q", "p" or a decimal literal.
template <class T>
T parse_scalar(std::string_view text);

template <>
inline Rational parse_scalar<Rational>(std::string_view text) {
    text = detail::trim_blanks(text);
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        Integer p = detail::parse_integer(text.substr(0, slash));
        Integer q = detail::parse_integer(text.substr(slash + 1));
        if (q <= 0) throw Error(ErrorKind::SyntaxError, "rational '" + std::string(text) + "' needs a positive denominator");
        return Rational(p, q);
    }
    return detail::parse_decimal(text);
}

template <>
inline double parse_scalar<double>(std::string_view text) {
    text = detail::trim_blanks(text);
    if (text.find('/') != std::string_view::npos) return parse_scalar<Rational>(text).convert_to<double>();
    double v = 0.0;
    auto first = text.data() + (text.size() && text.front() == '+' ? 1 : 0);
    auto res = std::from_chars(first, text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || text.empty() || !std::isfinite(v))
        throw Error(ErrorKind::SyntaxError, "malformed number '" + std::string(text) + "'");
    return v;
}

/// Shortest round-trip decimal text of a double.
inline std::string shortest_repr(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

inline std::string to_string(const Rational& x) { return x.str(); }
inline std::string to_string(double x) { return shortest_repr(x); }

template <class T>
T from_double(double x);

template <>
inline double from_double<double>(double x) { return x; }

// 0.1 maps to 1/10, not to the binary expansion of the nearest double.
template <>
inline Rational from_double<Rational>(double x) {
    if (!std::isfinite(x)) throw Error(ErrorKind::SyntaxError, "non-finite number");
    return detail::parse_decimal(shortest_repr(x));
}

inline double to_double(const Rational& x) { return x.convert_to<double>(); }
inline double to_double(double x) { return x; }

template <class T>
T convert(const Rational& x) {
    if constexpr (std::is_same_v<T, Rational>)
        return x;
    else
        return to_double(x);
}

template <class T>
T abs_value(const T& x) {
    return x < T(0) ? T(-x) : x;
}

inline bool is_finite(const Rational&) { return true; }
inline bool is_finite(double x) { return std::isfinite(x); }

}  // namespace tanks
