#pragma once
#include "mwc/rational.hpp"

#include <compare>
#include <string>

namespace mwc {

// a*h + b, with h the base dimension left symbolic.
struct HAffine {
    long long a = 0;
    long long b = 0;

    static HAffine hp1(long long c = 1) { return {c, c}; } // c(h+1)

    Rat at(long long h) const { return Rat(a * h + b); }
    bool is_zero() const { return a == 0 && b == 0; }
    bool is_const() const { return a == 0; }
    // nonnegative for every h >= 0
    bool nonneg() const { return a >= 0 && b >= 0; }

    HAffine operator+(const HAffine& o) const { return {a + o.a, b + o.b}; }
    HAffine operator-(const HAffine& o) const { return {a - o.a, b - o.b}; }
    HAffine operator-() const { return {-a, -b}; }
    HAffine operator*(long long c) const { return {a * c, b * c}; }
    auto operator<=>(const HAffine&) const = default;
};

std::string fmt_haff(const HAffine& v);
HAffine parse_haff(const std::string& s);

} // namespace mwc
