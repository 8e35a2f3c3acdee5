#include "mwc/spectral.hpp"
#include "mwc/script.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mwc {

using nlohmann::json;

namespace {

int sgn(const Rat& x) { return x > Rat(0) ? 1 : (x < Rat(0) ? -1 : 0); }

// sign of c + k*sqrt(m), m >= 0
int sign_one(const Rat& c, const Rat& k, const Rat& m)
{
    if (k == Rat(0) || m == Rat(0)) return sgn(c);
    int sk = sgn(k), sc = sgn(c);
    if (sc == 0 || sc == sk) return sk;
    Rat lhs = c * c, rhs = k * k * m;
    if (lhs > rhs) return sc;
    if (lhs == rhs) return 0;
    return sk;
}

// sign of p + a*sqrt(r) + b*sqrt(u) with a, b in {-1, 0, 1}
int sign_two(const Rat& p, int a, const Rat& r, int b, const Rat& u)
{
    if (r == Rat(0)) a = 0;
    if (u == Rat(0)) b = 0;
    int sa;
    if (a == 0) sa = b;
    else if (b == 0 || a == b) sa = a;
    else sa = a * sgn(r - u);
    int sp = sgn(p);
    if (sp == 0) return sa;
    if (sa == 0 || sa == sp) return sp;
    // |p| against |a sqrt r + b sqrt u|: p^2 - r - u - 2ab sqrt(ru)
    int s = sign_one(p * p - Rat(a * a) * r - Rat(b * b) * u, Rat(-2 * a * b), r * u);
    if (s > 0) return sp;
    if (s == 0) return 0;
    return sa;
}

std::optional<long long> isqrt_exact(long long n)
{
    if (n < 0) return std::nullopt;
    auto s = static_cast<long long>(std::llround(std::sqrt(static_cast<long double>(n))));
    for (long long c = std::max(0LL, s - 2); c <= s + 2; ++c)
        if (c * c == n) return c;
    return std::nullopt;
}

Rat json_rat(const json& j)
{
    if (j.is_string()) return parse_rat(j.get<std::string>());
    if (j.is_number_integer()) return Rat(j.get<long long>());
    throw SpectralError("expected a rational string, got " + j.dump());
}

std::vector<Rat> sorted(std::vector<Rat> v)
{
    std::sort(v.begin(), v.end());
    return v;
}

const std::vector<Rat>& entries(const std::map<int, std::vector<Rat>>& m, int q)
{
    static const std::vector<Rat> none;
    auto it = m.find(q);
    return it == m.end() ? none : it->second;
}

} // namespace

long long SpectralData::b(int q) const
{
    auto it = betti.find(q);
    return it == betti.end() ? 0 : it->second;
}

// ---------------------------------------------------------------- data

std::string validation_error(const SpectralData& d)
{
    if (d.dirac_spec) {
        auto pos = sorted(*d.dirac_spec);
        std::vector<Rat> neg;
        for (const auto& m : *d.dirac_spec) neg.push_back(-m);
        if (pos != sorted(neg)) return "Dirac spectrum is not symmetric under mu -> -mu";
        return {};
    }
    if (d.h < 0) return "h must be nonnegative";
    for (const auto& [q, n] : d.betti) {
        if (q < 0 || q > d.h) return "betti degree " + std::to_string(q) + " outside [0," + std::to_string(d.h) + "]";
        if (n < 0) return "betti(" + std::to_string(q) + ") is negative";
    }
    for (const auto* m : {&d.spec_d_delta, &d.spec_delta_d}) {
        const char* what = m == &d.spec_d_delta ? "spec_d_delta" : "spec_delta_d";
        for (const auto& [q, v] : *m) {
            if (q < 0 || q > d.h) return std::string(what) + " degree " + std::to_string(q) + " outside [0," + std::to_string(d.h) + "]";
            for (const auto& z : v)
                if (z <= Rat(0))
                    return std::string(what) + "(" + std::to_string(q) + ") has non-positive eigenvalue " + fmt_rat(z);
        }
    }
    if (d.check_intertwining) {
        if (!entries(d.spec_d_delta, 0).empty()) return "spec_d_delta(0) must be empty";
        if (!entries(d.spec_delta_d, d.h).empty()) return "spec_delta_d(" + std::to_string(d.h) + ") must be empty";
        for (int q = 1; q <= d.h; ++q)
            if (sorted(entries(d.spec_d_delta, q)) != sorted(entries(d.spec_delta_d, q - 1)))
                return "spec_d_delta(" + std::to_string(q) + ") differs from spec_delta_d(" + std::to_string(q - 1) + ")";
    }
    return {};
}

void validate(const SpectralData& d)
{
    if (auto e = validation_error(d); !e.empty()) throw SpectralError(d.name + ": " + e);
}

SpectralData parse_spectral(const json& j)
{
    SpectralData d;
    d.name = j.value("name", "");
    if (j.contains("dirac_spec")) {
        std::vector<Rat> v;
        for (const auto& x : j.at("dirac_spec")) v.push_back(json_rat(x));
        d.dirac_spec = v;
        validate(d);
        return d;
    }
    if (!j.contains("h")) throw SpectralError(d.name + ": missing field 'h'");
    d.h = j.at("h").get<int>();
    const json betti = j.value("betti", json::object());
    for (auto& [k, v] : betti.items()) d.betti[std::stoi(k)] = v.get<long long>();
    auto spec = [&](const char* f, std::map<int, std::vector<Rat>>& out) {
        if (!j.contains(f)) return;
        for (auto& [k, v] : j.at(f).items())
            for (const auto& x : v) out[std::stoi(k)].push_back(json_rat(x));
    };
    spec("spec_d_delta", d.spec_d_delta);
    spec("spec_delta_d", d.spec_delta_d);
    d.check_intertwining = j.value("check_intertwining", false);
    validate(d);
    return d;
}

SpectralData load_spectral(const std::string& path) { return parse_spectral(read_json(path)); }

json to_json(const SpectralData& d)
{
    json j;
    j["name"] = d.name;
    if (d.dirac_spec) {
        for (const auto& m : *d.dirac_spec) j["dirac_spec"].push_back(fmt_rat(m));
        return j;
    }
    j["h"] = d.h;
    j["betti"] = json::object();
    for (const auto& [q, n] : d.betti) j["betti"][std::to_string(q)] = n;
    for (const auto& [f, m] : {std::pair{"spec_d_delta", &d.spec_d_delta}, std::pair{"spec_delta_d", &d.spec_delta_d}}) {
        j[f] = json::object();
        for (const auto& [q, v] : *m)
            for (const auto& z : v) j[f][std::to_string(q)].push_back(fmt_rat(z));
    }
    if (d.check_intertwining) j["check_intertwining"] = true;
    return j;
}

// ---------------------------------------------------------------- roots

IndicialRoot IndicialRoot::rational(const Rat& v)
{
    IndicialRoot r;
    r.offset_ = v;
    return r;
}

IndicialRoot IndicialRoot::surd(const Rat& offset, int sign, const Rat& radicand)
{
    if (radicand < Rat(0)) throw SpectralError("negative radicand " + fmt_rat(radicand));
    if (sign == 0 || radicand == Rat(0)) return rational(offset);
    auto n = isqrt_exact(radicand.numerator()), d = isqrt_exact(radicand.denominator());
    if (n && d) return rational(offset + Rat(sign) * Rat(*n, *d));
    IndicialRoot r;
    r.offset_ = offset;
    r.sign_ = sign > 0 ? 1 : -1;
    r.radicand_ = radicand;
    return r;
}

double IndicialRoot::approx() const { return to_double(offset_) + sign_ * std::sqrt(to_double(radicand_)); }

std::string IndicialRoot::str() const
{
    if (is_rational()) return fmt_rat(offset_);
    std::string s = offset_ == Rat(0) ? "" : fmt_rat(offset_);
    s += sign_ > 0 ? (s.empty() ? "" : "+") : "-";
    return s + "sqrt(" + fmt_rat(radicand_) + ")";
}

IndicialRoot IndicialRoot::reflect() const { return surd(Rat(-1) - offset_, -sign_, radicand_); }

int compare(const IndicialRoot& a, const IndicialRoot& b)
{
    return sign_two(a.offset() - b.offset(), a.sign(), a.radicand(), -b.sign(), b.radicand());
}

int compare(const IndicialRoot& a, const Rat& b) { return compare(a, IndicialRoot::rational(b)); }

namespace {

void push_family(std::vector<IndicialRoot>& out, const Rat& radicand)
{
    for (int l : {-1, 0})
        for (int s : {1, -1}) out.push_back(IndicialRoot::surd(Rat(l), s, radicand));
}

std::vector<IndicialRoot> dedup(std::vector<IndicialRoot> v)
{
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

} // namespace

std::vector<IndicialRoot> hodge_root_multiset(const SpectralData& d)
{
    std::vector<IndicialRoot> out;
    Rat lo = Rat(d.h - 1, 2), hi = Rat(d.h + 1, 2);
    for (int q = 0; q <= d.h; ++q) {
        for (long long i = 0; i < d.b(q); ++i) {
            out.push_back(IndicialRoot::rational(Rat(q) - hi));
            out.push_back(IndicialRoot::rational(lo - Rat(q)));
        }
        for (const auto& z : entries(d.spec_delta_d, q)) push_family(out, z + (Rat(q) - lo) * (Rat(q) - lo));
        for (const auto& z : entries(d.spec_d_delta, q)) push_family(out, z + (Rat(q) - hi) * (Rat(q) - hi));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<IndicialRoot> hodge_indicial_roots(const SpectralData& d) { return dedup(hodge_root_multiset(d)); }

std::vector<IndicialRoot> dirac_indicial_roots(const std::vector<Rat>& spec)
{
    SpectralData d;
    d.name = "dirac";
    d.dirac_spec = spec;
    validate(d);
    std::vector<IndicialRoot> out;
    for (const auto& m : spec) out.push_back(IndicialRoot::rational(m - Rat(1, 2)));
    return dedup(out);
}

std::vector<IndicialRoot> roots_in(const std::vector<IndicialRoot>& roots, const Rat& lo, const Rat& hi, bool closed)
{
    std::vector<IndicialRoot> out;
    for (const auto& r : roots) {
        int a = compare(r, lo), b = compare(r, hi);
        if (closed ? (a >= 0 && b <= 0) : (a > 0 && b < 0)) out.push_back(r);
    }
    return out;
}

bool critical_gap(const std::vector<IndicialRoot>& roots, const Rat& eps)
{
    return roots_in(roots, Rat(-1) - eps, eps, false).empty();
}

std::optional<Rat> gap_epsilon(const std::vector<IndicialRoot>& roots, int max_halvings)
{
    Rat eps(1);
    for (int k = 0; k <= max_halvings; ++k, eps /= Rat(2))
        if (critical_gap(roots, eps)) return eps;
    return std::nullopt;
}

std::vector<std::pair<IndicialRoot, int>> root_collisions(const SpectralData& d)
{
    std::vector<std::pair<IndicialRoot, int>> out;
    for (const auto& r : hodge_root_multiset(d)) {
        if (!out.empty() && out.back().first == r) ++out.back().second;
        else out.emplace_back(r, 1);
    }
    std::erase_if(out, [](const auto& p) { return p.second < 2; });
    return out;
}

bool symmetric_under_reflection(const std::vector<IndicialRoot>& roots)
{
    std::vector<IndicialRoot> a = dedup(roots), b;
    for (const auto& r : a) b.push_back(r.reflect());
    b = dedup(b);
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (!(a[i] == b[i])) return false;
    return true;
}

// ---------------------------------------------------------------- condition checkers

namespace {

std::string list_str(const std::vector<Rat>& v)
{
    std::string s = "{";
    for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt_rat(v[i]);
    return s + "}";
}

std::string roots_str(const std::vector<IndicialRoot>& v)
{
    std::string s = "{";
    for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i].str();
    return s + "}";
}

std::vector<ConditionResult> int12b_conditions(const SpectralData& d)
{
    std::vector<ConditionResult> out;
    ConditionResult coh{"cohomology_vanishes", true, ""};
    for (int q2 : {d.h - 1, d.h, d.h + 1}) {
        if (q2 < 0 || q2 % 2) continue; // half-integer degree: vacuous
        int q = q2 / 2;
        if (d.b(q) > 0) {
            coh.pass = false;
            coh.detail += (coh.detail.empty() ? "" : "; ") + std::string("H^") + std::to_string(q) + " has rank " +
                          std::to_string(d.b(q));
        }
    }
    out.push_back(coh);

    ConditionResult lap{"laplacian_gap", true, "vacuous (h odd)"};
    if (d.h % 2 == 0) {
        int q = d.h / 2;
        std::vector<Rat> spec = entries(d.spec_d_delta, q);
        for (const auto& z : entries(d.spec_delta_d, q)) spec.push_back(z);
        lap.detail = "Spec(Laplacian)_" + std::to_string(q) + " = " + list_str(sorted(spec)) + " > 3/4";
        for (const auto& z : spec)
            if (z <= Rat(3, 4)) lap.pass = false;
    }
    out.push_back(lap);

    ConditionResult dd{"d_delta_gap", true, "vacuous (h even)"};
    if (d.h % 2 == 1) {
        int q = (d.h + 1) / 2;
        dd.detail = "Spec(d delta)_" + std::to_string(q) + " = " + list_str(sorted(entries(d.spec_d_delta, q))) + " > 1";
        for (const auto& z : entries(d.spec_d_delta, q))
            if (z <= Rat(1)) dd.pass = false;
    }
    out.push_back(dd);
    return out;
}

} // namespace

Int12bVerdict check_int12b(const SpectralData& d)
{
    Int12bVerdict v;
    v.conditions = int12b_conditions(d);
    v.pass = std::all_of(v.conditions.begin(), v.conditions.end(), [](const auto& c) { return c.pass; });
    if (v.pass) v.no_root_in_closed_gap = roots_in(hodge_indicial_roots(d), Rat(-1), Rat(0), true).empty();
    return v;
}

std::string Int12bVerdict::str() const
{
    std::ostringstream o;
    for (const auto& c : conditions)
        o << "condition\t" << c.label << "\t" << (c.pass ? "pass" : "fail") << "\t" << c.detail << "\n";
    o << "verdict\t" << (pass ? "pass" : "fail") << "\n";
    if (no_root_in_closed_gap) o << "roots_in_[-1,0]\t" << (*no_root_in_closed_gap ? "none" : "present") << "\n";
    return o.str();
}

GsReport check_gs_comparison(const SpectralData& d)
{
    GsReport g;
    auto inside = roots_in(hodge_indicial_roots(d), Rat(-1), Rat(0), false);
    g.open_gap = inside.empty();
    g.detail.push_back({"no_root_in_open_gap", g.open_gap, "roots in (-1,0): " + roots_str(inside)});
    g.equality_excluded = true;
    std::string det;
    Rat mid = Rat(d.h + 1, 2);
    for (int q = 0; q <= d.h; ++q) {
        Rat off = mid - Rat(q);
        if (off > Rat(1, 2) || off < Rat(-1, 2)) continue;
        Rat bad = Rat(1) - off * off;
        const auto& sp = entries(d.spec_d_delta, q);
        bool hit = std::find(sp.begin(), sp.end(), bad) != sp.end();
        det += (det.empty() ? "" : "; ") + std::string("q=") + std::to_string(q) + ": " + fmt_rat(bad) +
               (hit ? " in " : " not in ") + "Spec(d delta)";
        if (hit) g.equality_excluded = false;
    }
    g.detail.push_back({"equality_case_excluded", g.equality_excluded, det});
    auto v = check_int12b(d);
    g.int12b = v.pass;
    for (const auto& c : v.conditions) g.detail.push_back(c);
    g.implies_int12b = !(g.open_gap && g.equality_excluded) || g.int12b;
    return g;
}

std::string GsReport::str() const
{
    std::ostringstream o;
    for (const auto& c : detail)
        o << "condition\t" << c.label << "\t" << (c.pass ? "pass" : "fail") << "\t" << c.detail << "\n";
    o << "gs_conditions\t" << (open_gap && equality_excluded ? "pass" : "fail") << "\n";
    o << "int12b_conditions\t" << (int12b ? "pass" : "fail") << "\n";
    o << "implies_int12b\t" << (implies_int12b ? "true" : "false") << "\n";
    return o.str();
}

SpectralData scale_spectra(const SpectralData& d, const Rat& t)
{
    if (t <= Rat(0)) throw SpectralError("scale must be positive");
    SpectralData s = d;
    for (auto* m : {&s.spec_d_delta, &s.spec_delta_d})
        for (auto& [q, v] : *m)
            for (auto& z : v) z *= t;
    if (s.dirac_spec)
        for (auto& z : *s.dirac_spec) z *= t;
    return s;
}

ScaleSearch scale_search(const SpectralData& d, int max_doublings)
{
    ScaleSearch r;
    auto base = check_int12b(d);
    if (!base.conditions.front().pass) {
        r.reason = "scaling cannot remove cohomology: " + base.conditions.front().detail;
        return r;
    }
    Rat t(1);
    for (int i = 0; i <= max_doublings; ++i, t *= Rat(2))
        if (check_int12b(scale_spectra(d, t)).pass) {
            r.possible = true;
            r.t = t;
            return r;
        }
    r.reason = "no power of two up to 2^" + std::to_string(max_doublings) + " suffices";
    return r;
}

} // namespace mwc
