#include "mwc/rational.hpp"

#include <stdexcept>

namespace mwc {

Rat parse_rat(const std::string& s)
{
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos)
            return Rat(std::stoll(s));
        long long p = std::stoll(s.substr(0, slash));
        long long q = std::stoll(s.substr(slash + 1));
        if (q == 0)
            throw std::invalid_argument("zero denominator");
        return Rat(p, q);
    } catch (const std::logic_error&) {
        throw std::invalid_argument("bad rational literal '" + s + "'");
    }
}

std::string fmt_rat(const Rat& r)
{
    if (r.denominator() == 1)
        return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

bool is_integer(const Rat& r) { return r.denominator() == 1; }

double to_double(const Rat& r)
{
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

} // namespace mwc
