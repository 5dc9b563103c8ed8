// Copyright 2025 The Lexverify Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <string>

#include "lexverify/errors.hpp"

namespace lexverify {

// Exact rational arithmetic. All solver-visible numeric values go through
// this type; no floating point is allowed anywhere near constraint
// evaluation. Values stay normalized: gcd(num, den) == 1 and den > 0.
class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT: implicit by design
    Rational(std::int64_t n, std::int64_t d);

    // Accepts "123", "-4.25", and "7/3". Decimal literals convert exactly
    // (digits over a power of ten), never through a double.
    static std::optional<Rational> parse(const std::string& text);

    std::int64_t numerator() const { return num_; }
    std::int64_t denominator() const { return den_; }
    bool is_integer() const { return den_ == 1; }
    std::int64_t integer_value() const { return num_; }

    // Canonical form: an exact decimal when the denominator divides a power
    // of ten ("2015.13", "-3.5", "60"), otherwise "num/den" ("1/3"). Both
    // shapes re-parse to the identical value.
    std::string str() const;

    Rational operator-() const { return Rational(-num_, den_); }
    Rational operator+(const Rational& o) const;
    Rational operator-(const Rational& o) const;
    Rational operator*(const Rational& o) const;
    Rational operator/(const Rational& o) const;

    bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const Rational& o) const { return !(*this == o); }
    bool operator<(const Rational& o) const;
    bool operator<=(const Rational& o) const { return *this < o || *this == o; }
    bool operator>(const Rational& o) const { return o < *this; }
    bool operator>=(const Rational& o) const { return o <= *this; }

private:
    void normalize();

    std::int64_t num_;
    std::int64_t den_;
};

}  // namespace lexverify
