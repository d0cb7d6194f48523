#pragma once

// Exact scalar arithmetic over Q(i).
//
// All core computations in this library are rational: inputs are Gaussian
// rational matrices and every construction (bigradings, splittings, series
// recursions) stays inside Q(i).  Floating point appears only in the thin
// residual-evaluation layer (see orbit.hpp).

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace lmhs {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline Rational rat(long long num, long long den = 1) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    return Rational(num, den);
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// A Gaussian rational re + im*i.  Arithmetic is exact; conjugation is an
/// involution.
struct GQ {
    Rational re;
    Rational im;

    GQ() : re(0), im(0) {}
    GQ(long long n) : re(n), im(0) {}
    GQ(const Rational& r) : re(r), im(0) {}
    GQ(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

    static GQ i() { return GQ(Rational(0), Rational(1)); }

    bool is_zero() const { return re == 0 && im == 0; }
    bool is_real() const { return im == 0; }

    GQ conj() const { return GQ(re, -im); }

    GQ operator-() const { return GQ(-re, -im); }

    GQ& operator+=(const GQ& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    GQ& operator-=(const GQ& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    GQ& operator*=(const GQ& o) {
        Rational r = re * o.re - im * o.im;
        Rational i = re * o.im + im * o.re;
        re = std::move(r);
        im = std::move(i);
        return *this;
    }

    friend GQ operator+(GQ a, const GQ& b) { return a += b; }
    friend GQ operator-(GQ a, const GQ& b) { return a -= b; }
    friend GQ operator*(GQ a, const GQ& b) { return a *= b; }

    friend GQ operator/(const GQ& a, const GQ& b) {
        Rational n = b.re * b.re + b.im * b.im;
        if (n == 0) throw std::domain_error("division by zero Gaussian rational");
        return GQ((a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n);
    }
    GQ& operator/=(const GQ& b) { return *this = *this / b; }

    friend bool operator==(const GQ& a, const GQ& b) { return a.re == b.re && a.im == b.im; }
    friend bool operator!=(const GQ& a, const GQ& b) { return !(a == b); }

    /// |z|^2, a nonnegative rational.
    Rational norm2() const { return re * re + im * im; }
};

/// i^k for any integer k (the exact unit, not a float).
inline GQ i_power(long long k) {
    long long m = ((k % 4) + 4) % 4;
    switch (m) {
        case 0: return GQ(1);
        case 1: return GQ::i();
        case 2: return GQ(-1);
        default: return -GQ::i();
    }
}

inline std::string to_string(const Rational& r) {
    std::ostringstream os;
    os << r;
    return os.str();
}

/// Prints in the problem-file literal syntax: "a/b", "c/d*i", "a/b+c/d*i",
/// "a/b-c/d*i".
inline std::string to_string(const GQ& z) {
    if (z.im == 0) return to_string(z.re);
    std::string imabs = to_string(z.im < 0 ? Rational(-z.im) : z.im);
    std::string itail = (imabs == "1") ? "i" : imabs + "*i";
    if (z.re == 0) return (z.im < 0 ? "-" : "") + itail;
    return to_string(z.re) + (z.im < 0 ? "-" : "+") + itail;
}

inline std::ostream& operator<<(std::ostream& os, const GQ& z) { return os << to_string(z); }

namespace detail {

// Parses an optionally signed rational "12", "-3/4" starting at pos.
// Throws std::invalid_argument with a column-anchored message on bad syntax.
inline Rational parse_rational_at(const std::string& s, size_t& pos) {
    size_t start = pos;
    auto fail = [&](const std::string& why) {
        throw std::invalid_argument("bad rational at column " + std::to_string(start + 1) + ": " + why);
    };
    bool neg = false;
    if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
        neg = (s[pos] == '-');
        ++pos;
    }
    size_t d0 = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == d0) fail("expected digits");
    BigInt num(s.substr(d0, pos - d0));
    BigInt den = 1;
    if (pos < s.size() && s[pos] == '/') {
        ++pos;
        size_t d1 = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == d1) fail("expected digits after '/'");
        den = BigInt(s.substr(d1, pos - d1));
        if (den == 0) fail("zero denominator");
    }
    Rational r(num, den);
    return neg ? Rational(-r) : r;
}

}  // namespace detail

/// Parses a Gaussian rational literal: "1", "-2/3", "i", "-i", "3*i",
/// "1/2+3/4*i", "2-i".  Whole-string parse; throws on trailing garbage.
inline GQ parse_gq(const std::string& raw) {
    std::string s;
    for (char c : raw)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw std::invalid_argument("empty Gaussian rational literal");

    GQ out;
    size_t pos = 0;
    bool first = true;
    while (pos < s.size()) {
        size_t term_start = pos;
        int sign = 1;
        if (s[pos] == '+' || s[pos] == '-') {
            sign = (s[pos] == '-') ? -1 : 1;
            ++pos;
        } else if (!first) {
            throw std::invalid_argument("expected '+' or '-' at column " + std::to_string(pos + 1));
        }
        if (pos >= s.size()) throw std::invalid_argument("dangling sign at column " + std::to_string(term_start + 1));

        if (s[pos] == 'i') {
            ++pos;
            out.im += sign;
        } else {
            Rational mag = detail::parse_rational_at(s, pos);
            bool imaginary = false;
            if (pos < s.size() && s[pos] == '*') {
                if (pos + 1 < s.size() && s[pos + 1] == 'i') {
                    pos += 2;
                    imaginary = true;
                } else {
                    throw std::invalid_argument("expected 'i' after '*' at column " + std::to_string(pos + 2));
                }
            } else if (pos < s.size() && s[pos] == 'i') {
                ++pos;
                imaginary = true;
            }
            if (imaginary)
                out.im += sign * mag;
            else
                out.re += sign * mag;
        }
        first = false;
    }
    return out;
}

}  // namespace lmhs
