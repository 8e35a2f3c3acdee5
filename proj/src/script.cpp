#include "mwc/script.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

namespace mwc {

using nlohmann::json;
namespace fs = std::filesystem;

std::string catalog_dir()
{
    if (const char* env = std::getenv("MWC_CATALOG")) return env;
    return MWC_CATALOG_DIR;
}

json read_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ScriptError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ScriptError(path + ": " + e.what());
    }
}

namespace {

HAffine haff_of(const json& j)
{
    if (j.is_number_integer()) return {0, j.get<long long>()};
    if (j.is_string()) return parse_haff(j.get<std::string>());
    throw ScriptError("expected an h-expression, got " + j.dump());
}

std::vector<std::string> strings(const json& j, const char* key)
{
    if (!j.contains(key)) return {};
    return j.at(key).get<std::vector<std::string>>();
}

std::string req(const json& j, const char* key)
{
    if (!j.contains(key)) throw ScriptError(std::string("missing field '") + key + "' in " + j.dump());
    return j.at(key).get<std::string>();
}

} // namespace

Relation parse_relation(const json& j)
{
    Relation r;
    if (j.is_string()) {
        r.kind = parse_rel(j.get<std::string>());
        return r;
    }
    r.kind = parse_rel(req(j, "kind"));
    if (j.contains("along")) r.along = j.at("along").get<std::string>();
    if (j.contains("blocks")) {
        const auto& b = j.at("blocks");
        if (!b.is_array() || b.size() > 4) throw ScriptError("normal_form needs at most four blocks");
        for (size_t i = 0; i < b.size(); ++i)
            r.blocks[i] = Block{haff_of(b[i].at(0)), b[i].at(1).get<int>()};
    }
    return r;
}

PSubDecl parse_psub(const json& j, bool corner)
{
    PSubDecl d;
    d.name = j.contains("name") ? j.at("name").get<std::string>() : req(j, "face");
    d.contains = strings(j, "contains");
    d.meets = strings(j, "meets");
    if (j.contains("profile"))
        for (auto& [k, v] : j.at("profile").items()) d.profile[k] = v.get<int>();
    d.corner = corner;
    if (!corner) d.w = haff_of(j.at("w"));
    if (j.contains("relations"))
        for (auto& [k, v] : j.at("relations").items()) d.rel[k] = parse_relation(v);
    return d;
}

Space run_script(const json& script, bool partial)
{
    try {
        std::vector<TrackedIdeal> ideals;
        for (const auto& i : script.at("ideals")) {
            std::string kind = i.value("kind", "boundary");
            if (kind != "boundary" && kind != "diagonal") throw ScriptError("bad ideal kind '" + kind + "'");
            ideals.push_back({req(i, "name"), kind == "boundary" ? IdealKind::boundary : IdealKind::diagonal});
        }
        std::vector<Space::BaseFace> base;
        for (const auto& b : script.at("base"))
            base.push_back({req(b, "face"), req(b, "ideal"), b.value("factor", "")});
        Space s = Space::base(req(script, "name"), ideals, base);
        s.default_relation = script.value("default_relation", "");
        if (!script.contains("blowups")) return s;
        int idx = 0;
        for (const auto& st : script.at("blowups")) {
            ++idx;
            try {
                std::string op = st.value("op", "blowup");
                if (op == "corner") {
                    std::map<std::string, Relation> rel;
                    if (st.contains("relations"))
                        for (auto& [k, v] : st.at("relations").items()) rel[k] = parse_relation(v);
                    s.blow_corner(req(st, "face"), strings(st, "contains"), rel);
                } else if (op == "blowup") {
                    s.blow_inline(parse_psub(st), req(st, "face"));
                } else if (op == "declare") {
                    s.declare(parse_psub(st));
                } else if (op == "blow") {
                    s.blow(req(st, "name"), req(st, "face"));
                } else if (op == "rename") {
                    s.rename(req(st, "from"), req(st, "to"));
                } else {
                    throw ScriptError("unknown op '" + op + "'");
                }
            } catch (const std::exception& e) {
                throw ScriptError(s.name + " step " + std::to_string(idx) + ": " + e.what());
            }
        }
        if (!partial && !s.live.empty()) {
            std::string names;
            for (const auto& p : s.live) names += " " + p.name;
            throw ScriptError(s.name + ": declared centers never blown up:" + names);
        }
        return s;
    } catch (const json::exception& e) {
        throw ScriptError(std::string("malformed space script: ") + e.what());
    }
}

Catalog::Catalog(std::string dir) : dir_(std::move(dir)) {}

const Space& Catalog::space(const std::string& name)
{
    auto it = spaces_.find(name);
    if (it != spaces_.end()) return *it->second;
    auto path = fs::path(dir_) / "spaces" / (name + ".json");
    if (!fs::exists(path)) throw ScriptError("no space '" + name + "' in catalog");
    auto s = std::make_unique<Space>(run_script(read_json(path.string())));
    if (s->name != name) throw ScriptError(path.string() + ": name field is '" + s->name + "'");
    return *(spaces_[name] = std::move(s));
}

BFibration Catalog::fibration(const std::string& name)
{
    auto path = fs::path(dir_) / "fibrations" / (name + ".json");
    if (!fs::exists(path)) throw ScriptError("no fibration '" + name + "' in catalog");
    json j = read_json(path.string());
    BFibration f;
    f.name = req(j, "name");
    f.source = &space(req(j, "source"));
    f.target = &space(req(j, "target"));
    for (auto& [k, v] : j.at("pullback").items()) f.pullback[k] = v.get<std::string>();
    for (const auto& [t, src] : f.pullback) {
        f.target->ideal_index(t);
        f.source->ideal_index(src);
    }
    return f;
}

namespace {

std::vector<std::string> stems(const fs::path& d)
{
    std::vector<std::string> out;
    if (!fs::exists(d)) return out;
    for (const auto& e : fs::directory_iterator(d))
        if (e.path().extension() == ".json") out.push_back(e.path().stem().string());
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

std::vector<std::string> Catalog::space_names() const { return stems(fs::path(dir_) / "spaces"); }
std::vector<std::string> Catalog::fibration_names() const { return stems(fs::path(dir_) / "fibrations"); }

} // namespace mwc
