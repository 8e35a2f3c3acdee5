#include "mwc/golden.hpp"
#include "mwc/calculus.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace mwc {

namespace {

using Rows = std::map<std::string, std::string>;

std::string tsv(const std::string& col0, const std::string& col1, const Rows& rows)
{
    std::string out = col0 + "\t" + col1 + "\n";
    for (const auto& [k, v] : rows) out += k + "\t" + v + "\n";
    return out;
}

std::string images(Catalog& cat, const std::string& fib, const std::string& col)
{
    Rows rows;
    for (const auto& [f, img] : face_images(cat.fibration(fib))) rows[f] = img;
    return tsv("source", col, rows);
}

std::string lift(Catalog& cat, const std::string& space, const std::string& ideal)
{
    Rows rows;
    for (const auto& [f, e] : cat.space(space).lift_ideal(ideal)) rows[f] = std::to_string(e);
    return tsv("face", "exponent", rows);
}

std::string weights(Catalog& cat, const std::string& space, WeightConvention c)
{
    Rows rows;
    for (const auto& [f, w] : density_weight(cat.space(space), c))
        if (!w.is_zero()) rows[f] = fmt_haff(w);
    return tsv("face", "weight", rows);
}

// stated rule name -> catalog rule deriving it
const std::map<std::string, std::string> kRuleGoldens = {
    {"phi17b", "phi17_derived"}, {"phi18b", "phi18_derived"}, {"com12b", "com12_derived"}};

const std::map<std::string, std::function<std::string(Catalog&)>>& tables()
{
    static const std::map<std::string, std::function<std::string(Catalog&)>> t = {
        {"com1", [](Catalog& c) { return images(c, "kphi_L", "pi_L"); }},
        {"com2", [](Catalog& c) { return images(c, "kphi_C", "pi_C"); }},
        {"com3", [](Catalog& c) { return images(c, "kphi_R", "pi_R"); }},
        {"com4", [](Catalog& c) { return weights(c, "m3_kphi", WeightConvention::b); }},
        {"com5", [](Catalog& c) { return lift(c, "m2_kphi", "xp"); }},
        {"com7", [](Catalog& c) { return lift(c, "m3_kphi", "xp"); }},
        {"com8", [](Catalog& c) { return lift(c, "m3_kphi", "xpp"); }},
        {"com10", [](Catalog& c) { return weights(c, "m3_kphi", WeightConvention::composition); }},
    };
    return t;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw GoldenError("cannot read golden file " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string strip_comments(const std::string& text)
{
    std::istringstream in(text);
    std::string line, out;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#') out += line + "\n";
    return out;
}

std::string first_diff(const std::string& want, const std::string& got)
{
    std::istringstream a(want), b(got);
    std::string la, lb;
    for (int n = 1;; ++n) {
        bool ha = static_cast<bool>(std::getline(a, la)), hb = static_cast<bool>(std::getline(b, lb));
        if (!ha && !hb) return {};
        if (!ha) la = "<end>";
        if (!hb) lb = "<end>";
        if (la != lb) return "row " + std::to_string(n) + ": golden '" + la + "' computed '" + lb + "'";
    }
}

} // namespace

std::vector<std::string> golden_names()
{
    std::vector<std::string> out;
    for (const auto& [n, f] : tables()) out.push_back(n);
    for (const auto& [n, d] : kRuleGoldens) out.push_back(n);
    return out;
}

std::string golden_default_dir(const Catalog& cat) { return cat.dir() + "/golden"; }

std::string golden_table(Catalog& cat, const std::string& name)
{
    if (auto it = tables().find(name); it != tables().end()) return it->second(cat);
    if (auto it = kRuleGoldens.find(name); it != kRuleGoldens.end()) return rule_table(load_rule(cat, it->second));
    throw GoldenError("unknown golden table '" + name + "'");
}

GoldenCheck golden_check(Catalog& cat, const std::string& name, const std::string& golden_dir)
{
    GoldenCheck g;
    g.name = name;
    std::string got = golden_table(cat, name);
    std::string stored = read_file(golden_dir + "/" + name + ".tsv");
    if (auto it = kRuleGoldens.find(name); it != kRuleGoldens.end()) {
        // clause sets compare up to reordering
        CalculusRule want;
        try {
            want = parse_rule_table(stored, name);
        } catch (const std::exception& e) {
            g.diff = std::string("unparsable golden: ") + e.what();
            return g;
        }
        g.match = same_clauses(load_rule(cat, it->second), want, &g.diff);
        return g;
    }
    g.diff = first_diff(strip_comments(stored), got);
    g.match = g.diff.empty();
    return g;
}

} // namespace mwc
