#pragma once
#include <boost/rational.hpp>
#include <string>

namespace mwc {

using Rat = boost::rational<long long>;

// "p/q", "p", "-p/q"
Rat parse_rat(const std::string& s);
std::string fmt_rat(const Rat& r);
bool is_integer(const Rat& r);
double to_double(const Rat& r);

} // namespace mwc
