#include "mwc/haffine.hpp"

#include <cctype>
#include <stdexcept>

namespace mwc {

std::string fmt_haff(const HAffine& v)
{
    if (v.a == 0)
        return std::to_string(v.b);
    if (v.a == v.b) {
        long long c = v.a;
        if (c == 1) return "(h+1)";
        if (c == -1) return "-(h+1)";
        return std::to_string(c) + "(h+1)";
    }
    std::string s;
    if (v.a == 1) s = "h";
    else if (v.a == -1) s = "-h";
    else s = std::to_string(v.a) + "h";
    if (v.b > 0) s += "+" + std::to_string(v.b);
    else if (v.b < 0) s += std::to_string(v.b);
    return s;
}

namespace {

std::string strip(const std::string& s)
{
    std::string r;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) r += c;
    return r;
}

// sum of terms like 2h, -h, 3, -(h+1)
HAffine parse_linear(const std::string& s)
{
    HAffine out;
    size_t i = 0;
    if (s.empty()) throw std::invalid_argument("empty h-expression");
    while (i < s.size()) {
        long long sign = 1;
        if (s[i] == '+') { ++i; }
        else if (s[i] == '-') { sign = -1; ++i; }
        size_t j = i;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        long long coef = 1;
        bool has_num = j > i;
        if (has_num) coef = std::stoll(s.substr(i, j - i));
        i = j;
        if (i < s.size() && s[i] == '(') {
            size_t close = s.find(')', i);
            if (close == std::string::npos) throw std::invalid_argument("unbalanced '(' in " + s);
            HAffine inner = parse_linear(s.substr(i + 1, close - i - 1));
            out = out + inner * (sign * coef);
            i = close + 1;
        } else if (i < s.size() && s[i] == 'h') {
            out.a += sign * coef;
            ++i;
        } else if (has_num) {
            out.b += sign * coef;
        } else {
            throw std::invalid_argument("bad h-expression '" + s + "'");
        }
    }
    return out;
}

} // namespace

HAffine parse_haff(const std::string& s) { return parse_linear(strip(s)); }

} // namespace mwc
