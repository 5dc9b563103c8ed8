// Copyright 2025 The Lexverify Authors
// SPDX-License-Identifier: Apache-2.0

#include "lexverify/rational.hpp"

#include <cctype>
#include <cstdlib>

namespace lexverify {

namespace {

using Wide = __int128;

std::int64_t narrow(Wide v) {
    if (v > Wide(INT64_MAX) || v < Wide(INT64_MIN)) {
        throw Error("rational overflow");
    }
    return static_cast<std::int64_t>(v);
}

Wide wide_gcd(Wide a, Wide b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        Wide t = a % b;
        a = b;
        b = t;
    }
    return a;
}

Rational make_reduced(Wide n, Wide d) {
    if (d == 0) throw Error("rational with zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    Wide g = wide_gcd(n, d);
    if (g > 1) {
        n /= g;
        d /= g;
    }
    return Rational(narrow(n), narrow(d));
}

}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) {
    if (den_ == 0) throw Error("rational with zero denominator");
    normalize();
}

void Rational::normalize() {
    if (den_ < 0) {
        num_ = -num_;
        den_ = -den_;
    }
    std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
        num_ /= g;
        den_ /= g;
    }
    if (num_ == 0) den_ = 1;
}

std::optional<Rational> Rational::parse(const std::string& text) {
    std::size_t i = 0;
    bool neg = false;
    if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
        neg = text[i] == '-';
        ++i;
    }
    if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i]))) return std::nullopt;

    Wide intpart = 0;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        intpart = intpart * 10 + (text[i] - '0');
        if (intpart > Wide(INT64_MAX)) return std::nullopt;
        ++i;
    }

    Wide num = intpart;
    Wide den = 1;
    if (i < text.size() && text[i] == '.') {
        ++i;
        if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i]))) return std::nullopt;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
            num = num * 10 + (text[i] - '0');
            den *= 10;
            if (num > Wide(INT64_MAX) || den > Wide(INT64_MAX)) return std::nullopt;
            ++i;
        }
    } else if (i < text.size() && text[i] == '/') {
        ++i;
        if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i]))) return std::nullopt;
        Wide d = 0;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
            d = d * 10 + (text[i] - '0');
            if (d > Wide(INT64_MAX)) return std::nullopt;
            ++i;
        }
        if (d == 0) return std::nullopt;
        den = d;
    }
    if (i != text.size()) return std::nullopt;
    if (neg) num = -num;
    return make_reduced(num, den);
}

std::string Rational::str() const {
    // A denominator of the form 2^a * 5^b admits an exact decimal expansion.
    std::int64_t d = den_;
    int twos = 0;
    int fives = 0;
    while (d % 2 == 0) {
        d /= 2;
        ++twos;
    }
    while (d % 5 == 0) {
        d /= 5;
        ++fives;
    }
    if (d != 1) {
        return std::to_string(num_) + "/" + std::to_string(den_);
    }
    int k = twos > fives ? twos : fives;
    Wide scale = 1;
    for (int i = twos; i < k; ++i) scale *= 2;
    for (int i = fives; i < k; ++i) scale *= 5;
    Wide scaled = Wide(num_) * scale;
    bool neg = scaled < 0;
    if (neg) scaled = -scaled;
    std::string digits;
    if (scaled == 0) digits = "0";
    while (scaled > 0) {
        digits.insert(digits.begin(), static_cast<char>('0' + int(scaled % 10)));
        scaled /= 10;
    }
    while (static_cast<int>(digits.size()) <= k) digits.insert(digits.begin(), '0');
    std::string out;
    if (neg) out += '-';
    out += digits.substr(0, digits.size() - k);
    if (k > 0) {
        std::string frac = digits.substr(digits.size() - k);
        while (!frac.empty() && frac.back() == '0') frac.pop_back();
        if (!frac.empty()) {
            out += '.';
            out += frac;
        }
    }
    return out;
}

Rational Rational::operator+(const Rational& o) const {
    return make_reduced(Wide(num_) * o.den_ + Wide(o.num_) * den_, Wide(den_) * o.den_);
}

Rational Rational::operator-(const Rational& o) const {
    return make_reduced(Wide(num_) * o.den_ - Wide(o.num_) * den_, Wide(den_) * o.den_);
}

Rational Rational::operator*(const Rational& o) const {
    return make_reduced(Wide(num_) * o.num_, Wide(den_) * o.den_);
}

Rational Rational::operator/(const Rational& o) const {
    if (o.num_ == 0) throw Error("rational division by zero");
    return make_reduced(Wide(num_) * o.den_, Wide(den_) * o.num_);
}

bool Rational::operator<(const Rational& o) const {
    return Wide(num_) * o.den_ < Wide(o.num_) * den_;
}

}  // namespace lexverify
