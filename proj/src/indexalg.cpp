#include "mwc/indexalg.hpp"
#include "mwc/corners.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace mwc {

bool dominated(const Gen& a, const Gen& b)
{
    Rat d = a.z - b.z;
    return is_integer(d) && d >= 0 && a.k <= b.k;
}

IndexSet IndexSet::normalize(std::vector<Gen> raw)
{
    if (raw.empty()) return {};
    // larger k first at equal z, so the dominating copy is seen first
    std::sort(raw.begin(), raw.end(), [](const Gen& x, const Gen& y) {
        return x.z < y.z || (x.z == y.z && x.k > y.k);
    });
    IndexSet out;
    for (const auto& c : raw) {
        bool dom = false;
        for (const auto& kept : out.g_)
            if (dominated(c, kept)) { dom = true; break; }
        if (dom) continue;
        // a smaller-z generator never gets dominated by a larger-z one, but a later
        // generator with larger k can dominate nothing earlier: d >= 0 needs z_c >= z_kept
        out.g_.push_back(c);
    }
    std::sort(out.g_.begin(), out.g_.end(), [](const Gen& x, const Gen& y) {
        return x.z < y.z || (x.z == y.z && x.k < y.k);
    });
    return out;
}

std::optional<Rat> IndexSet::inf_re() const
{
    if (g_.empty()) return std::nullopt;
    return g_.front().z;
}

bool IndexSet::contains(const Gen& x) const
{
    for (const auto& g : g_)
        if (dominated(x, g)) return true;
    return false;
}

std::string IndexSet::str() const
{
    std::string s = "{";
    for (size_t i = 0; i < g_.size(); ++i) {
        if (i) s += ",";
        s += "(" + fmt_rat(g_[i].z) + "," + std::to_string(g_[i].k) + ")";
    }
    return s + "}";
}

IndexSet sum(const IndexSet& e, const IndexSet& f)
{
    std::vector<Gen> raw;
    for (const auto& a : e.gens())
        for (const auto& b : f.gens())
            raw.push_back({a.z + b.z, a.k + b.k});
    return IndexSet::normalize(std::move(raw));
}

IndexSet shift(const IndexSet& e, const Rat& a)
{
    std::vector<Gen> raw;
    for (const auto& g : e.gens()) raw.push_back({g.z + a, g.k});
    return IndexSet::normalize(std::move(raw));
}

IndexSet unite(const IndexSet& e, const IndexSet& f)
{
    std::vector<Gen> raw = e.gens();
    raw.insert(raw.end(), f.gens().begin(), f.gens().end());
    return IndexSet::normalize(std::move(raw));
}

IndexSet extended_union(const IndexSet& e, const IndexSet& f)
{
    std::vector<Gen> raw = e.gens();
    raw.insert(raw.end(), f.gens().begin(), f.gens().end());
    for (const auto& a : e.gens())
        for (const auto& b : f.gens())
            if (is_integer(a.z - b.z))
                raw.push_back({std::max(a.z, b.z), a.k + b.k + 1});
    return IndexSet::normalize(std::move(raw));
}

IndexSet intersect(const IndexSet& e, const IndexSet& f)
{
    std::vector<Gen> raw;
    for (const auto& a : e.gens())
        for (const auto& b : f.gens())
            if (is_integer(a.z - b.z))
                raw.push_back({std::max(a.z, b.z), std::min(a.k, b.k)});
    return IndexSet::normalize(std::move(raw));
}

IndexSet truncate(const IndexSet& e, const Rat& cutoff)
{
    std::vector<Gen> raw;
    for (const auto& g : e.gens())
        if (g.z <= cutoff) raw.push_back(g);
    return IndexSet::normalize(std::move(raw));
}

bool satisfies_bound(const IndexSet& e, const Rat& a)
{
    for (const auto& g : e.gens())
        if (g.z < a || (g.z == a && g.k > 0)) return false;
    return true;
}

bool gt(const IndexSet& e, const Rat& a)
{
    for (const auto& g : e.gens())
        if (g.z <= a) return false;
    return true;
}

bool ge_log(const IndexSet& e, const Rat& a, int k)
{
    for (const auto& g : e.gens())
        if (g.z < a || (g.z == a && g.k > k)) return false;
    return true;
}

bool refines(const IndexSet& e, const IndexSet& f)
{
    for (const auto& g : e.gens())
        if (!f.contains(g)) return false;
    return true;
}

namespace {

std::string strip_ws(const std::string& s)
{
    std::string r;
    for (char c : s)
        if (c != ' ' && c != '\t') r += c;
    return r;
}

} // namespace

IndexSet parse_index_set(const std::string& in)
{
    std::string s = strip_ws(in);
    if (s.rfind("N0", 0) == 0) {
        Rat a(0);
        if (s.size() > 2) {
            if (s[2] != '+' && s[2] != '-') throw std::invalid_argument("bad index set '" + in + "'");
            a = parse_rat(s.substr(s[2] == '+' ? 3 : 2));
        }
        return IndexSet::single(a);
    }
    if (s.size() < 2 || s.front() != '{' || s.back() != '}')
        throw std::invalid_argument("bad index set '" + in + "'");
    std::vector<Gen> raw;
    size_t i = 1;
    while (i < s.size() - 1) {
        if (s[i] == ',') { ++i; continue; }
        if (s[i] != '(') throw std::invalid_argument("bad index set '" + in + "'");
        size_t close = s.find(')', i);
        size_t comma = s.find(',', i);
        if (close == std::string::npos || comma == std::string::npos || comma > close)
            throw std::invalid_argument("bad index set '" + in + "'");
        raw.push_back({parse_rat(s.substr(i + 1, comma - i - 1)),
                       std::stoi(s.substr(comma + 1, close - comma - 1))});
        i = close + 1;
    }
    return IndexSet::normalize(std::move(raw));
}

const IndexSet& IndexFamily::at(const std::string& face) const
{
    auto it = sets.find(face);
    if (it == sets.end()) throw std::out_of_range("no face '" + face + "' in family on " + space);
    return it->second;
}

IndexSet& IndexFamily::at(const std::string& face)
{
    auto it = sets.find(face);
    if (it == sets.end()) throw std::out_of_range("no face '" + face + "' in family on " + space);
    return it->second;
}

std::string IndexFamily::str() const
{
    std::ostringstream os;
    bool first = true;
    for (const auto& [f, e] : sets) {
        if (!first) os << " ";
        first = false;
        os << f << "=" << e.str();
    }
    return os.str();
}

IndexFamily empty_family(const Space& s)
{
    IndexFamily f;
    f.space = s.name;
    for (const auto& b : s.bhs) f.sets[b] = IndexSet{};
    return f;
}

} // namespace mwc
