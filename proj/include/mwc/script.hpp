#pragma once
#include "mwc/corners.hpp"

#include <json.hpp>

#include <map>
#include <memory>
#include <string>

namespace mwc {

struct ScriptError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string catalog_dir();
nlohmann::json read_json(const std::string& path);

Relation parse_relation(const nlohmann::json& j);
PSubDecl parse_psub(const nlohmann::json& j, bool corner = false);

// folds the blow-up list of a space script; partial keeps declared centers pending
Space run_script(const nlohmann::json& script, bool partial = false);

// Spaces and fibrations, loaded lazily from a catalog directory.
class Catalog {
public:
    explicit Catalog(std::string dir = catalog_dir());

    const Space& space(const std::string& name);
    BFibration fibration(const std::string& name);
    std::vector<std::string> space_names() const;
    std::vector<std::string> fibration_names() const;
    const std::string& dir() const { return dir_; }

private:
    std::string dir_;
    std::map<std::string, std::unique_ptr<Space>> spaces_;
};

} // namespace mwc
