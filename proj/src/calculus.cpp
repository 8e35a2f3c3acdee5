#include "mwc/calculus.hpp"
#include "mwc/script.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace mwc {

std::string Condition::str() const
{
    std::string s;
    if (!left.empty()) s += "E_" + left;
    if (!right.empty()) s += std::string(s.empty() ? "" : " + ") + "F_" + right;
    if (!shift.is_zero()) s += " + " + fmt_haff(shift);
    return s + (strict ? " > 0" : " >= 0");
}

std::map<std::string, HAffine> target_renorm(const Space& dbl)
{
    std::map<std::string, HAffine> out;
    bool has_xp = std::any_of(dbl.ideals.begin(), dbl.ideals.end(),
                              [](const TrackedIdeal& i) { return i.name == "xp"; });
    for (size_t f = 0; f < dbl.bhs.size(); ++f) {
        int v = has_xp ? dbl.val[f][dbl.ideal_index("xp")] : 0;
        out[dbl.bhs[f]] = HAffine::hp1(v) - dbl.wacc[f];
    }
    return out;
}

CalculusRule derive_rule(const std::string& name, const Space& src, const Space& tgt,
                         const FaceMap& left, const FaceMap& right, const FaceMap& target,
                         const std::map<std::string, HAffine>& weight,
                         const std::map<std::string, HAffine>& renorm)
{
    CalculusRule r;
    r.name = name;
    r.provenance = "derived";
    r.target_space = tgt.name;
    r.target_faces = tgt.bhs;
    r.renorm = renorm;
    for (const auto& g : tgt.bhs) r.clauses[g];
    auto side = [](const FaceMap& m, const std::string& h) {
        auto it = m.find(h);
        if (it == m.end()) throw CalculusError("no image for face '" + h + "'");
        return it->second == kWhole ? std::string() : it->second;
    };
    for (const auto& h : src.bhs) {
        Clause c{side(left, h), side(right, h), weight.at(h)};
        std::string t = side(target, h);
        if (t.empty()) {
            r.integrability.push_back({c.left, c.right, c.shift, true});
            continue;
        }
        c.shift = c.shift + renorm.at(t);
        r.clauses[t].push_back(c);
    }
    for (auto& [g, cl] : r.clauses) std::sort(cl.begin(), cl.end());
    return r;
}

CalculusRule derive_composition_rule(const Space& triple, const BFibration& L, const BFibration& C,
                                     const BFibration& R, const std::string& name)
{
    if (L.source != &triple || C.source != &triple || R.source != &triple)
        throw CalculusError("fibrations do not start at " + triple.name);
    if (L.target != C.target || C.target != R.target)
        throw CalculusError("fibrations have different targets");
    CalculusRule r = derive_rule(name, triple, *C.target, face_images(L), face_images(R), face_images(C),
                                 density_weight(triple, WeightConvention::composition),
                                 target_renorm(*C.target));
    r.left_space = r.right_space = C.target->name;
    return r;
}

CalculusRule derive_mapping_rule(const Space& dbl, const BFibration& L, const BFibration& R,
                                 const std::string& name)
{
    FaceMap self;
    for (const auto& b : dbl.bhs) self[b] = b;
    CalculusRule r = derive_rule(name, dbl, *L.target, self, face_images(R), face_images(L),
                                 density_weight(dbl, WeightConvention::composition),
                                 target_renorm(*L.target));
    r.left_space = dbl.name;
    r.right_space = R.target->name;
    return r;
}

void attach_double_space(CalculusRule& r, const Space& dbl, HAffine unit,
                         const std::vector<std::pair<std::string, std::string>>& swaps)
{
    int il = dbl.ideal_index(r.left_ideal), ir = dbl.ideal_index(r.right_ideal);
    for (size_t f = 0; f < dbl.bhs.size(); ++f) {
        std::vector<int> v = dbl.val[f];
        for (const auto& [a, b] : swaps) std::swap(v[dbl.ideal_index(a)], v[dbl.ideal_index(b)]);
        std::string hit;
        for (size_t g = 0; g < dbl.bhs.size(); ++g)
            if (dbl.val[g] == v) hit = dbl.bhs[g];
        if (hit.empty()) throw CalculusError("no adjoint face for '" + dbl.bhs[f] + "'");
        const std::string& G = dbl.bhs[f];
        int d = dbl.val[f][ir] - dbl.val[f][il];
        r.adjoint_map[G] = hit;
        r.adjoint_shift[G] = unit * d;
        r.conj_shift[G] = d;
        r.v_left[G] = dbl.val[f][il];
        r.v_right[G] = dbl.val[f][ir];
    }
}

namespace {

std::string side_str(const std::string& s) { return s.empty() ? "-" : s; }
std::string side_parse(const std::string& s) { return s == "-" ? "" : s; }

std::vector<std::string> split_tabs(const std::string& line)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == '\t') { out.push_back(cur); cur.clear(); }
        else if (c != '\r') cur += c;
    }
    out.push_back(cur);
    return out;
}

} // namespace

std::string rule_table(const CalculusRule& r)
{
    std::ostringstream os;
    os << "target\tleft\tright\tshift\n";
    for (const auto& g : r.target_faces) {
        auto cl = r.clauses.at(g);
        std::sort(cl.begin(), cl.end());
        for (const auto& c : cl)
            os << g << "\t" << side_str(c.left) << "\t" << side_str(c.right) << "\t" << fmt_haff(c.shift) << "\n";
    }
    for (const auto& c : r.integrability)
        os << "@integrability\t" << side_str(c.left) << "\t" << side_str(c.right) << "\t" << fmt_haff(c.shift) << "\n";
    for (const auto& c : r.preconditions)
        os << "@precondition\t" << side_str(c.left) << "\t" << side_str(c.right) << "\t" << fmt_haff(c.shift) << "\n";
    return os.str();
}

CalculusRule parse_rule_table(const std::string& text, const std::string& name)
{
    CalculusRule r;
    r.name = name;
    r.provenance = "stated";
    std::istringstream in(text);
    std::string line;
    int no = 0;
    while (std::getline(in, line)) {
        ++no;
        if (line.empty() || line[0] == '#') continue;
        auto f = split_tabs(line);
        if (f.size() != 4) throw CalculusError(name + ":" + std::to_string(no) + ": expected 4 columns");
        if (f[0] == "target") continue;
        HAffine sh;
        try {
            sh = parse_haff(f[3]);
        } catch (const std::exception& e) {
            throw CalculusError(name + ":" + std::to_string(no) + ": " + e.what());
        }
        if (f[0] == "@integrability") {
            r.integrability.push_back({side_parse(f[1]), side_parse(f[2]), sh, true});
        } else if (f[0] == "@precondition") {
            r.preconditions.push_back({side_parse(f[1]), side_parse(f[2]), sh, false});
        } else if (f[0] == "@face") {
            // a target face with no clauses
            if (!r.clauses.count(f[1])) { r.target_faces.push_back(f[1]); r.clauses[f[1]]; }
        } else {
            if (!r.clauses.count(f[0])) r.target_faces.push_back(f[0]);
            r.clauses[f[0]].push_back({side_parse(f[1]), side_parse(f[2]), sh});
        }
    }
    return r;
}

bool same_clauses(const CalculusRule& a, const CalculusRule& b, std::string* diff)
{
    auto note = [&](const std::string& s) {
        if (diff) *diff = s;
        return false;
    };
    std::set<std::string> faces;
    for (const auto& [g, c] : a.clauses) faces.insert(g);
    for (const auto& [g, c] : b.clauses) faces.insert(g);
    for (const auto& g : faces) {
        auto ca = a.clauses.count(g) ? a.clauses.at(g) : std::vector<Clause>{};
        auto cb = b.clauses.count(g) ? b.clauses.at(g) : std::vector<Clause>{};
        std::sort(ca.begin(), ca.end());
        std::sort(cb.begin(), cb.end());
        if (ca == cb) continue;
        for (const auto& c : ca)
            if (std::find(cb.begin(), cb.end(), c) == cb.end())
                return note("face " + g + ": clause (" + side_str(c.left) + ", " + side_str(c.right) + ", " +
                            fmt_haff(c.shift) + ") of " + a.name + " missing from " + b.name);
        for (const auto& c : cb)
            if (std::find(ca.begin(), ca.end(), c) == ca.end())
                return note("face " + g + ": clause (" + side_str(c.left) + ", " + side_str(c.right) + ", " +
                            fmt_haff(c.shift) + ") of " + b.name + " missing from " + a.name);
        return note("face " + g + ": clause multiplicities differ");
    }
    auto key = [](std::vector<Condition> v) {
        std::vector<Clause> k;
        for (const auto& c : v) k.push_back({c.left, c.right, c.shift});
        std::sort(k.begin(), k.end());
        return k;
    };
    if (key(a.integrability) != key(b.integrability)) return note("integrability conditions differ");
    return true;
}

namespace {

Condition parse_condition(const nlohmann::json& j)
{
    Condition c;
    c.left = j.value("left", "");
    c.right = j.value("right", "");
    if (j.contains("shift")) {
        const auto& s = j.at("shift");
        c.shift = s.is_string() ? parse_haff(s.get<std::string>()) : HAffine{0, s.get<long long>()};
    }
    c.strict = j.value("strict", true);
    return c;
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw CalculusError("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace

CalculusRule load_rule(Catalog& cat, const std::string& name)
{
    namespace fs = std::filesystem;
    auto path = fs::path(cat.dir()) / "rules" / (name + ".json");
    if (!fs::exists(path)) throw CalculusError("no rule '" + name + "' in catalog");
    auto j = read_json(path.string());
    CalculusRule r;
    if (j.contains("derive")) {
        const auto& d = j.at("derive");
        if (d.contains("triple")) {
            r = derive_composition_rule(cat.space(d.at("triple")), cat.fibration(d.at("L")),
                                        cat.fibration(d.at("C")), cat.fibration(d.at("R")), name);
        } else {
            r = derive_mapping_rule(cat.space(d.at("double")), cat.fibration(d.at("L")),
                                    cat.fibration(d.at("R")), name);
        }
    } else {
        r = parse_rule_table(slurp((fs::path(cat.dir()) / j.at("table").get<std::string>()).string()), name);
        r.provenance = j.value("provenance", "stated");
        const Space& tgt = cat.space(j.at("target_space"));
        r.target_space = tgt.name;
        r.left_space = j.value("left_space", tgt.name);
        r.right_space = j.value("right_space", tgt.name);
        for (const auto& g : tgt.bhs)
            if (!r.clauses.count(g)) {
                r.clauses[g];
                r.target_faces.push_back(g);
            }
        std::vector<std::string> ordered;
        for (const auto& g : tgt.bhs) ordered.push_back(g);
        for (const auto& g : r.target_faces)
            if (!tgt.has_face(g)) throw CalculusError(name + ": unknown target face '" + g + "'");
        r.target_faces = ordered;
        r.renorm = target_renorm(tgt);
    }
    if (j.contains("provenance")) r.provenance = j.at("provenance");
    if (j.contains("left_ideal")) r.left_ideal = j.at("left_ideal");
    if (j.contains("right_ideal")) r.right_ideal = j.at("right_ideal");
    for (const auto& g : j.value("diagonal_faces", std::vector<std::string>{})) r.diagonal_faces.insert(g);
    r.empty_faces = j.value("empty_faces", std::vector<std::string>{});
    if (j.contains("preconditions"))
        for (const auto& c : j.at("preconditions")) r.preconditions.push_back(parse_condition(c));
    if (j.contains("normal_conditions"))
        for (auto& [face, list] : j.at("normal_conditions").items())
            for (const auto& c : list) r.normal_conditions[face].push_back(parse_condition(c));
    const Space& dbl = cat.space(j.value("double_space", r.target_space));
    std::vector<std::pair<std::string, std::string>> swaps;
    for (const auto& s : j.value("swaps", nlohmann::json::array()))
        swaps.emplace_back(s.at(0).get<std::string>(), s.at(1).get<std::string>());
    if (swaps.empty()) swaps.emplace_back(r.left_ideal, r.right_ideal);
    HAffine unit = parse_haff(j.value("adjoint_unit", "h+1"));
    if (r.target_space == dbl.name && r.left_space == r.target_space) attach_double_space(r, dbl, unit, swaps);
    return r;
}

std::optional<ConditionFailure> eval_condition(const Condition& c, const IndexFamily& e,
                                               const IndexFamily& f, long long h)
{
    Rat sh = c.shift.at(h);
    const IndexSet* a = c.left.empty() ? nullptr : &e.at(c.left);
    const IndexSet* b = c.right.empty() ? nullptr : &f.at(c.right);
    IndexSet s;
    if (a && b) s = sum(*a, *b);
    else if (a) s = *a;
    else if (b) s = *b;
    else return std::nullopt;
    bool ok = c.strict ? gt(s, -sh) : satisfies_bound(s, -sh);
    if (ok) return std::nullopt;
    return ConditionFailure{c, "inf = " + fmt_rat(*s.inf_re() + sh) + " after shift"};
}

IndexFamily compose_families(const CalculusRule& r, const IndexFamily& e, const IndexFamily& f, long long h)
{
    if (!r.left_space.empty() && e.space != r.left_space)
        throw CalculusError(r.name + ": left family lives on " + e.space + ", expected " + r.left_space);
    if (!r.right_space.empty() && f.space != r.right_space)
        throw CalculusError(r.name + ": right family lives on " + f.space + ", expected " + r.right_space);
    for (const auto& g : r.empty_faces)
        if ((e.sets.count(g) && !e.at(g).empty()) || (f.sets.count(g) && !f.at(g).empty()))
            throw IntegrabilityViolation(r.name + ": operands must be empty at " + g);
    for (const auto& c : r.preconditions)
        if (auto bad = eval_condition(c, e, f, h))
            throw IntegrabilityViolation(r.name + ": precondition " + c.str() + " fails (" + bad->margin + ")");
    for (const auto& c : r.integrability)
        if (auto bad = eval_condition(c, e, f, h))
            throw IntegrabilityViolation(r.name + ": integrability " + c.str() + " fails (" + bad->margin + ")");
    IndexFamily out;
    out.space = r.target_space;
    for (const auto& g : r.target_faces) {
        IndexSet acc;
        for (const auto& c : r.clauses.at(g)) {
            IndexSet term;
            if (!c.left.empty() && !c.right.empty()) term = sum(e.at(c.left), f.at(c.right));
            else if (!c.left.empty()) term = e.at(c.left);
            else if (!c.right.empty()) term = f.at(c.right);
            else term = IndexSet::smooth();
            acc = extended_union(acc, shift(term, c.shift.at(h)));
        }
        out.sets[g] = acc;
    }
    return out;
}

IndexSet mapping_family(const CalculusRule& r, const IndexFamily& e, const IndexSet& f, long long h)
{
    IndexFamily ff;
    ff.space = r.right_space;
    for (const auto& [g, cl] : r.clauses)
        for (const auto& c : cl)
            if (!c.right.empty()) ff.sets[c.right] = f;
    for (const auto& c : r.integrability)
        if (!c.right.empty()) ff.sets[c.right] = f;
    IndexFamily out = compose_families(r, e, ff, h);
    if (out.sets.size() != 1) throw CalculusError(r.name + ": mapping rule must have one target face");
    return out.sets.begin()->second;
}

IndexFamily adjoint_family(const CalculusRule& r, const IndexFamily& e, long long h)
{
    if (r.adjoint_map.empty()) throw CalculusError(r.name + ": no adjoint data");
    IndexFamily out;
    out.space = e.space;
    for (const auto& [g, set] : e.sets)
        out.sets[g] = shift(e.at(r.adjoint_map.at(g)), r.adjoint_shift.at(g).at(h));
    return out;
}

IndexFamily conjugate_family(const CalculusRule& r, const IndexFamily& e, const Rat& a)
{
    IndexFamily out = e;
    for (auto& [g, set] : out.sets) set = shift(set, a * r.conj_shift.at(g));
    return out;
}

IndexFamily mul_left(const CalculusRule& r, const IndexFamily& e, const Rat& a)
{
    IndexFamily out = e;
    for (auto& [g, set] : out.sets) set = shift(set, a * r.v_left.at(g));
    return out;
}

IndexFamily mul_right(const CalculusRule& r, const IndexFamily& e, const Rat& a)
{
    IndexFamily out = e;
    for (auto& [g, set] : out.sets) set = shift(set, a * r.v_right.at(g));
    return out;
}

std::vector<ConditionFailure> normal_restriction_check(const CalculusRule& r, const IndexFamily& e,
                                                       const IndexFamily& f, const std::string& face,
                                                       long long h)
{
    auto it = r.normal_conditions.find(face);
    if (it == r.normal_conditions.end())
        throw CalculusError(r.name + ": no restriction conditions at '" + face + "'");
    std::vector<ConditionFailure> bad;
    for (const auto& c : it->second)
        if (auto x = eval_condition(c, e, f, h)) bad.push_back(*x);
    return bad;
}

IndexFamily small_calculus(const CalculusRule& r)
{
    IndexFamily out;
    out.space = r.target_space;
    for (const auto& g : r.target_faces)
        out.sets[g] = r.diagonal_faces.count(g) ? IndexSet::smooth() : IndexSet{};
    return out;
}

} // namespace mwc
