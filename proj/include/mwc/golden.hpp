#pragma once
#include "mwc/script.hpp"

#include <string>
#include <vector>

namespace mwc {

struct GoldenError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GoldenCheck {
    std::string name;
    bool match = false;
    std::string diff; // first difference when !match
};

std::vector<std::string> golden_names();
std::string golden_default_dir(const Catalog& cat);
// computed table in the stored layout (comment lines excluded)
std::string golden_table(Catalog& cat, const std::string& name);
GoldenCheck golden_check(Catalog& cat, const std::string& name, const std::string& golden_dir);

} // namespace mwc
