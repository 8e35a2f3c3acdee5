#include "mwc/parametrix.hpp"
#include "mwc/script.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <sstream>

namespace mwc {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------- expressions

namespace {

class ExprParser {
public:
    ExprParser(const std::string& s, const Params& p) : s_(s), p_(p) {}

    Rat run()
    {
        Rat v = expr();
        skip();
        if (i_ != s_.size()) fail("trailing input");
        return v;
    }

private:
    const std::string& s_;
    const Params& p_;
    size_t i_ = 0;

    [[noreturn]] void fail(const std::string& why) const
    {
        throw ParametrixError("bad expression '" + s_ + "': " + why);
    }
    void skip()
    {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool eat(char c)
    {
        skip();
        if (i_ < s_.size() && s_[i_] == c) { ++i_; return true; }
        return false;
    }
    Rat expr()
    {
        Rat v = term();
        for (;;) {
            if (eat('+')) v += term();
            else if (eat('-')) v -= term();
            else return v;
        }
    }
    Rat term()
    {
        Rat v = factor();
        for (;;) {
            if (eat('*')) v *= factor();
            else if (eat('/')) {
                Rat d = factor();
                if (d == Rat(0)) fail("division by zero");
                v /= d;
            } else return v;
        }
    }
    Rat factor()
    {
        if (eat('-')) return -factor();
        if (eat('+')) return factor();
        if (eat('(')) {
            Rat v = expr();
            if (!eat(')')) fail("missing ')'");
            return v;
        }
        skip();
        if (i_ >= s_.size()) fail("unexpected end");
        if (std::isdigit(static_cast<unsigned char>(s_[i_]))) {
            long long n = 0;
            while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_])))
                n = n * 10 + (s_[i_++] - '0');
            return Rat(n);
        }
        if (std::isalpha(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_') {
            std::string id;
            while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_'))
                id += s_[i_++];
            if (id == "min" || id == "max") {
                if (!eat('(')) fail("expected '(' after " + id);
                Rat a = expr();
                if (!eat(',')) fail("expected ','");
                Rat b = expr();
                if (!eat(')')) fail("missing ')'");
                return id == "min" ? std::min(a, b) : std::max(a, b);
            }
            auto it = p_.find(id);
            if (it == p_.end()) fail("unknown parameter '" + id + "'");
            return it->second;
        }
        fail(std::string("unexpected '") + s_[i_] + "'");
    }
};

std::string strip(const std::string& s)
{
    std::string r;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) r += c;
    return r;
}

} // namespace

Rat eval_expr(const std::string& expr, const Params& p) { return ExprParser(expr, p).run(); }

IndexSet eval_set(const std::string& in, const Params& p)
{
    std::string s = strip(in);
    if (s == "{}" || s == "empty") return {};
    if (s.rfind("N0", 0) == 0) {
        if (s.size() == 2) return IndexSet::smooth();
        return IndexSet::single(eval_expr(s.substr(2), p));
    }
    if (s.size() < 2 || s.front() != '{' || s.back() != '}') throw ParametrixError("bad index set '" + in + "'");
    std::vector<Gen> raw;
    size_t i = 1;
    while (i < s.size() - 1) {
        if (s[i] == ',') { ++i; continue; }
        if (s[i] != '(') throw ParametrixError("bad index set '" + in + "'");
        // the exponent may contain parentheses and commas (min/max), so match depth
        int depth = 0;
        size_t j = i + 1, comma = std::string::npos;
        for (; j < s.size(); ++j) {
            if (s[j] == '(') ++depth;
            else if (s[j] == ')') {
                if (depth == 0) break;
                --depth;
            } else if (s[j] == ',' && depth == 0) comma = j;
        }
        if (j >= s.size() || comma == std::string::npos) throw ParametrixError("bad index set '" + in + "'");
        raw.push_back({eval_expr(s.substr(i + 1, comma - i - 1), p), std::stoi(s.substr(comma + 1, j - comma - 1))});
        i = j + 1;
    }
    return IndexSet::normalize(std::move(raw));
}

// ---------------------------------------------------------------- symbols

std::string fmt_order(const std::optional<Rat>& o) { return o ? fmt_rat(*o) : "-inf"; }

bool residual_face(const std::string& face) { return face.rfind("lf", 0) == 0 || face.rfind("rf", 0) == 0; }

namespace {

bool supported_on_residual(const IndexFamily& f)
{
    for (const auto& [g, e] : f.sets)
        if (!e.empty() && !residual_face(g)) return false;
    return true;
}

std::optional<Rat> add_orders(const std::optional<Rat>& a, const std::optional<Rat>& b)
{
    if (!a || !b) return std::nullopt;
    return *a + *b;
}

std::optional<Rat> max_order(const std::optional<Rat>& a, const std::optional<Rat>& b)
{
    if (!a) return b;
    if (!b) return a;
    return std::max(*a, *b);
}

// very residual is structural: order -inf with support on lf/rf-type faces only
bool has_tag(const OpSymbol& s, const std::string& t)
{
    if (t == "very_residual") return !s.order && supported_on_residual(s.family);
    return s.flags.count(t) > 0;
}

} // namespace

OpSymbol compose_ops(const CalculusRule& r, const std::vector<const OpSymbol*>& ops, long long h)
{
    if (ops.empty()) throw ParametrixError("compose needs at least one operand");
    std::optional<Rat> order = Rat(0);
    for (const auto* o : ops) order = add_orders(order, o->order);

    bool opaque = false;
    for (const auto* o : ops) opaque = opaque || o->flags.count("bounded");
    OpSymbol out;
    out.order = order;
    if (opaque) {
        // semi-ideal: very residual on both ends absorbs a bounded middle
        const OpSymbol& a = *ops.front();
        const OpSymbol& b = *ops.back();
        if (ops.size() < 3 || !has_tag(a, "very_residual") || !has_tag(b, "very_residual"))
            throw ParametrixError("a bounded operator must be sandwiched between very residual operators");
        out.family.space = r.target_space;
        for (const auto& g : r.target_faces) {
            IndexSet e;
            if (g.rfind("lf", 0) == 0) e = a.family.at(g);
            else if (g.rfind("rf", 0) == 0) e = b.family.at(g);
            out.family.sets[g] = e;
        }
        out.order = std::nullopt;
        out.flags.insert("very_residual");
        return out;
    }

    IndexFamily acc = ops.front()->family;
    for (size_t i = 1; i < ops.size(); ++i) acc = compose_families(r, acc, ops[i]->family, h);
    out.family = acc;

    bool smooth = true, vr = false;
    for (const auto* o : ops) {
        smooth = smooth && o->flags.count("smooth_small_calculus");
        vr = vr || o->flags.count("very_residual");
    }
    if (smooth) out.flags.insert("smooth_small_calculus");
    if (vr && !out.order && supported_on_residual(out.family)) out.flags.insert("very_residual");
    return out;
}

OpSymbol add_ops(const std::vector<const OpSymbol*>& ops)
{
    if (ops.empty()) throw ParametrixError("add needs at least one operand");
    OpSymbol out;
    out.order = ops.front()->order;
    out.family = ops.front()->family;
    out.flags = ops.front()->flags;
    for (size_t i = 1; i < ops.size(); ++i) {
        const OpSymbol& b = *ops[i];
        if (b.family.space != out.family.space)
            throw ParametrixError("cannot add families on " + out.family.space + " and " + b.family.space);
        out.order = max_order(out.order, b.order);
        for (auto& [g, e] : out.family.sets) e = unite(e, b.family.at(g));
        std::set<std::string> keep;
        for (const auto& f : out.flags)
            if (b.flags.count(f)) keep.insert(f);
        out.flags = keep;
    }
    if (out.flags.count("very_residual") && !supported_on_residual(out.family)) out.flags.erase("very_residual");

    // a Pi_h-sandwiched leading term survives if every other summand sits strictly above it
    std::set<std::string> faces;
    for (const auto* o : ops)
        for (const auto& [g, z] : o->pih) faces.insert(g);
    for (const auto& g : faces) {
        std::optional<Rat> z;
        for (const auto* o : ops)
            if (auto it = o->pih.find(g); it != o->pih.end()) {
                if (z && *z != it->second) { z.reset(); break; }
                z = it->second;
            }
        if (!z) continue;
        bool ok = true;
        for (const auto* o : ops)
            if (!o->pih.count(g) && !gt(o->family.at(g), *z)) ok = false;
        if (ok) out.pih[g] = *z;
    }
    return out;
}

// ---------------------------------------------------------------- Neumann closure

namespace {

// Kleene iteration A <- trunc(R ∪ A∘R); faces without a window get one when they first appear
IndexFamily closure_impl(const CalculusRule& r, const IndexFamily& fam, std::map<std::string, Rat> windows,
                         std::optional<Rat> cutoff, long long h)
{
    std::map<std::string, Rat> lead;
    auto trunc = [&](IndexFamily f) {
        for (auto& [g, e] : f.sets) {
            if (e.empty()) continue;
            if (!windows.count(g)) {
                if (!cutoff) throw NoProgress("no truncation window for face " + g);
                windows[g] = *e.inf_re() + *cutoff;
            }
            if (!lead.count(g)) lead[g] = *e.inf_re();
            std::vector<Gen> keep;
            for (const auto& x : e.gens())
                if (x.z < windows.at(g)) keep.push_back(x);
            e = IndexSet::normalize(std::move(keep));
        }
        return f;
    };
    IndexFamily acc = trunc(fam);
    for (int iter = 0; iter < 256; ++iter) {
        IndexFamily next = compose_families(r, acc, fam, h);
        for (auto& [g, e] : next.sets) e = unite(e, fam.at(g));
        next = trunc(next);
        bool grew = false;
        for (const auto& [g, e] : next.sets) {
            const IndexSet& old = acc.at(g);
            if (refines(e, old)) continue;
            grew = true;
            for (const auto& x : e.gens())
                if (!old.contains(x) && !old.empty() && x.z < *old.inf_re())
                    throw NoProgress("Neumann series makes no progress at " + g + ": exponent " + fmt_rat(x.z) +
                                     " falls below " + fmt_rat(*old.inf_re()));
        }
        if (!grew) return acc;
        for (auto& [g, e] : acc.sets) e = unite(e, next.at(g));
    }
    std::string faces;
    IndexFamily probe = trunc(compose_families(r, acc, fam, h));
    for (const auto& [g, e] : probe.sets)
        if (!refines(e, acc.at(g))) faces += (faces.empty() ? "" : ",") + g;
    throw NoProgress("Neumann series does not stabilize at " + faces);
}

} // namespace

IndexFamily neumann_closure(const CalculusRule& r, const IndexFamily& fam, const std::map<std::string, Rat>& windows,
                            long long h)
{
    return closure_impl(r, fam, windows, std::nullopt, h);
}

IndexFamily neumann_closure(const CalculusRule& r, const IndexFamily& fam, const Rat& cutoff, long long h)
{
    return closure_impl(r, fam, {}, cutoff, h);
}

// ---------------------------------------------------------------- replay

bool ReplayResult::all_pass() const
{
    if (!errors.empty()) return false;
    for (const auto& e : expects)
        if (!e.pass) return false;
    return true;
}

bool ReplayResult::failures_as_documented() const
{
    auto a = failed_asserts, b = documented_failures;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
}

nlohmann::json load_scenario(Catalog& cat, const std::string& name)
{
    auto path = fs::path(cat.dir()) / "scenarios" / (name + ".json");
    if (!fs::exists(path)) throw ParametrixError("no scenario '" + name + "' in catalog");
    return read_json(path.string());
}

std::vector<std::string> scenario_names(const Catalog& cat)
{
    std::vector<std::string> out;
    auto d = fs::path(cat.dir()) / "scenarios";
    if (!fs::exists(d)) return out;
    for (const auto& e : fs::directory_iterator(d))
        if (e.path().extension() == ".json") out.push_back(e.path().stem().string());
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<long long> scenario_h_values(const nlohmann::json& sc)
{
    if (sc.contains("h_values")) return sc.at("h_values").get<std::vector<long long>>();
    return {1};
}

namespace {

std::string as_str(const json& j)
{
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number_integer()) return std::to_string(j.get<long long>());
    throw ParametrixError("expected a string or integer, got " + j.dump());
}

class Replayer {
public:
    Replayer(Catalog& cat, const json& sc, const ReplayOptions& opt) : cat_(cat), sc_(sc), opt_(opt)
    {
        res_.scenario = sc.at("name").get<std::string>();
        const json params = sc.value("params", json::object());
        for (auto& [k, v] : params.items()) res_.params[k] = eval_expr(as_str(v), {});
        for (const auto& [k, v] : opt.overrides) res_.params[k] = v;
        if (!res_.params.count("h")) res_.params["h"] = Rat(1);
        if (!res_.params.count("cutoff")) res_.params["cutoff"] = Rat(1);
        validate_params();
        if (res_.params.count("eps") && res_.params.count("eps1"))
            res_.params["nu"] = std::min(res_.params["eps"], res_.params["eps1"] - 1);
        h_ = boost::rational_cast<long long>(res_.params["h"]);
        const json cites = sc.value("citations", json::object());
        for (auto& [k, v] : cites.items()) cites_[k] = v.get<std::string>();
        res_.documented_failures = sc.value("documented_failures", std::vector<std::string>{});
        rule_name_ = sc.value("rule", "");
    }

    ReplayResult run()
    {
        out_ << "SCENARIO " << res_.scenario;
        for (const auto& [k, v] : res_.params) out_ << " " << k << "=" << fmt_rat(v);
        out_ << (opt_.assertions_enabled ? "" : " assertions=off") << "\n";
        const auto& steps = sc_.at("steps");
        for (size_t i = 0; i < steps.size(); ++i) step(steps[i], i);
        size_t pass = 0;
        for (const auto& e : res_.expects) pass += e.pass;
        out_ << "SUMMARY " << res_.scenario << " expects=" << res_.expects.size() << " pass=" << pass
             << " fail=" << res_.expects.size() - pass << " errors=" << res_.errors.size() << " asserts=" << n_asserts_;
        if (!opt_.assertions_enabled) {
            out_ << " failed_asserts=";
            for (size_t i = 0; i < res_.failed_asserts.size(); ++i)
                out_ << (i ? "," : "") << res_.failed_asserts[i];
            out_ << " as_documented=" << (res_.failures_as_documented() ? "yes" : "no");
        }
        out_ << "\n";
        res_.symbols = syms_;
        res_.report = out_.str();
        return res_;
    }

private:
    Catalog& cat_;
    const json& sc_;
    ReplayOptions opt_;
    ReplayResult res_;
    long long h_ = 1;
    std::map<std::string, std::string> cites_;
    std::string rule_name_;
    std::map<std::string, CalculusRule> rules_;
    std::map<std::string, OpSymbol> syms_;
    std::set<std::string> poisoned_;
    std::ostringstream out_;
    int n_asserts_ = 0;

    void validate_params()
    {
        const auto& p = res_.params;
        auto has = [&](const char* k) { return p.count(k) > 0; };
        if (has("eps") && p.at("eps") <= Rat(0)) throw ParametrixError("parameter eps must be positive");
        if (has("eps") && has("eps1") && p.at("eps1") < p.at("eps"))
            throw ParametrixError("parameters must satisfy eps <= eps1");
        if (has("mu") && p.at("mu") <= Rat(0)) throw ParametrixError("parameter mu must be positive");
        if (p.at("cutoff") < Rat(1)) throw ParametrixError("parameter cutoff must be at least 1");
        if (p.at("h") < Rat(0) || !is_integer(p.at("h"))) throw ParametrixError("parameter h must be a nonnegative integer");
    }

    const CalculusRule& rule(const json& st)
    {
        std::string n = st.value("rule", rule_name_);
        if (n.empty()) throw ParametrixError("no rule given");
        auto it = rules_.find(n);
        if (it == rules_.end()) it = rules_.emplace(n, load_rule(cat_, n)).first;
        return it->second;
    }

    Rat ex(const json& j) const { return eval_expr(as_str(j), res_.params); }

    const OpSymbol& sym(const std::string& n) const
    {
        auto it = syms_.find(n);
        if (it == syms_.end()) throw ParametrixError("unknown symbol '" + n + "'");
        return it->second;
    }

    std::vector<std::string> inputs(const json& st) const
    {
        std::vector<std::string> v;
        for (const char* k : {"arg", "target"})
            if (st.contains(k)) v.push_back(st.at(k));
        if (st.contains("args"))
            for (const auto& a : st.at("args")) v.push_back(a);
        return v;
    }

    std::string cite(const json& st)
    {
        std::string c = st.value("cite", "");
        if (c.empty()) throw ParametrixError("missing citation");
        if (!cites_.count(c)) throw ParametrixError("citation '" + c + "' is not in the scenario allowlist");
        return c;
    }

    IndexFamily family_of(const json& spec, const CalculusRule& r)
    {
        IndexFamily f;
        f.space = r.target_space;
        for (const auto& g : r.target_faces) f.sets[g] = {};
        if (spec.is_string()) {
            if (spec.get<std::string>() != "small") throw ParametrixError("unknown family '" + spec.dump() + "'");
            return small_calculus(r);
        }
        for (auto& [g, s] : spec.items()) {
            if (g == "base") {
                if (s.get<std::string>() == "small") {
                    IndexFamily sm = small_calculus(r);
                    for (auto& [k, e] : sm.sets) f.sets[k] = e;
                }
                continue;
            }
            if (!f.sets.count(g)) throw ParametrixError("no face '" + g + "' on " + f.space);
        }
        for (auto& [g, s] : spec.items())
            if (g != "base") f.sets[g] = eval_set(s.get<std::string>(), res_.params);
        return f;
    }

    void check_invariants(const std::string& name, const OpSymbol& s, const CalculusRule& r) const
    {
        if (s.flags.count("smooth_small_calculus") && !(s.family == small_calculus(r)))
            throw ParametrixError(name + ": smooth_small_calculus needs N0 on diagonal faces and empty elsewhere");
        if (s.flags.count("very_residual") && (s.order || !supported_on_residual(s.family)))
            throw ParametrixError(name + ": very_residual needs order -inf and support on lf/rf-type faces");
    }

    void put(const std::string& name, OpSymbol s)
    {
        poisoned_.erase(name);
        syms_[name] = std::move(s);
    }

    void expect_line(const std::string& id, const std::string& face, bool pass, const std::string& detail)
    {
        res_.expects.push_back({res_.scenario, id, face, pass, detail});
        out_ << "EXPECT " << res_.scenario << " " << id << " " << face << " " << (pass ? "pass" : "fail") << "\n";
        if (!detail.empty()) out_ << "  " << detail << "\n";
    }

    void step(const json& st, size_t idx)
    {
        std::string op = st.at("op");
        std::string id = st.value("id", "s" + std::to_string(idx));
        for (const auto& in : inputs(st))
            if (poisoned_.count(in)) {
                out_ << "SKIP " << id << " (depends on failed step output " << in << ")\n";
                if (st.contains("name")) poisoned_.insert(st.at("name").get<std::string>());
                if (op == "expect") expect_line(id, st.value("face", "-"), false, "skipped");
                return;
            }
        try {
            run_step(op, id, st);
        } catch (const std::exception& e) {
            std::string msg = "step " + std::to_string(idx) + " (" + id + "): " + e.what();
            res_.errors.push_back(msg);
            out_ << "ERROR " << msg << "\n";
            if (st.contains("name")) poisoned_.insert(st.at("name").get<std::string>());
            if (op == "assert" || op == "selfadjoint") poisoned_.insert(st.at("target").get<std::string>());
            if (op == "expect") expect_line(id, st.value("face", "-"), false, e.what());
        }
    }

    std::vector<const OpSymbol*> args(const json& st) const
    {
        std::vector<const OpSymbol*> v;
        for (const auto& a : st.at("args")) v.push_back(&sym(a));
        return v;
    }

    void run_step(const std::string& op, const std::string& id, const json& st)
    {
        if (op == "let") {
            const CalculusRule& r = rule(st);
            OpSymbol s;
            std::string o = as_str(st.value("order", json("0")));
            if (o != "-inf") s.order = ex(o);
            s.family = family_of(st.at("family"), r);
            for (const auto& t : st.value("tags", std::vector<std::string>{})) s.flags.insert(t);
            const json pih = st.value("pih", json::object());
            for (auto& [g, z] : pih.items()) s.pih[g] = ex(z);
            std::string name = st.at("name");
            check_invariants(name, s, r);
            std::string c = st.contains("cite") ? " [" + cite(st) + "]" : "";
            out_ << "LET " << name << " order=" << fmt_order(s.order) << " " << s.family.str() << c << "\n";
            put(name, std::move(s));
        } else if (op == "add") {
            OpSymbol s = add_ops(args(st));
            out_ << "ADD " << st.at("name").get<std::string>() << " = " << st.at("args").dump() << " -> "
                 << s.family.str() << "\n";
            put(st.at("name"), std::move(s));
        } else if (op == "compose") {
            const CalculusRule& r = rule(st);
            OpSymbol s = compose_ops(r, args(st), h_);
            out_ << "COMPOSE " << st.at("name").get<std::string>() << " = " << st.at("args").dump() << " -> order="
                 << fmt_order(s.order) << " " << s.family.str() << "\n";
            put(st.at("name"), std::move(s));
        } else if (op == "adjoint") {
            const CalculusRule& r = rule(st);
            const OpSymbol& a = sym(st.at("arg"));
            OpSymbol s = a;
            s.family = adjoint_family(r, a.family, h_);
            s.pih.clear();
            for (const auto& [g, z] : a.pih)
                if (r.adjoint_map.at(g) == g) s.pih[g] = z + r.adjoint_shift.at(g).at(h_);
            out_ << "ADJOINT " << st.at("name").get<std::string>() << " -> " << s.family.str() << "\n";
            put(st.at("name"), std::move(s));
        } else if (op == "conjugate" || op == "mul_left" || op == "mul_right") {
            const CalculusRule& r = rule(st);
            const OpSymbol& a = sym(st.at("arg"));
            Rat by = ex(st.at("by"));
            OpSymbol s = a;
            const std::map<std::string, int>* shifts = nullptr;
            if (op == "conjugate") {
                s.family = conjugate_family(r, a.family, by);
                shifts = &r.conj_shift;
            } else if (op == "mul_left") {
                s.family = mul_left(r, a.family, by);
                shifts = &r.v_left;
            } else {
                s.family = mul_right(r, a.family, by);
                shifts = &r.v_right;
            }
            for (auto& [g, z] : s.pih) z += by * shifts->at(g);
            if (!(s.family == a.family)) s.flags.erase("smooth_small_calculus");
            out_ << "WEIGHT " << op << " " << st.at("name").get<std::string>() << " by " << fmt_rat(by) << " -> "
                 << s.family.str() << "\n";
            put(st.at("name"), std::move(s));
        } else if (op == "cutoff") {
            OpSymbol s = sym(st.at("arg"));
            for (const auto& g : st.at("faces")) {
                s.family.at(g.get<std::string>()) = {};
                s.pih.erase(g.get<std::string>());
            }
            s.flags.erase("smooth_small_calculus");
            out_ << "CUTOFF " << st.at("name").get<std::string>() << " -> " << s.family.str() << "\n";
            put(st.at("name"), std::move(s));
        } else if (op == "neumann") {
            const CalculusRule& r = rule(st);
            const OpSymbol& a = sym(st.at("arg"));
            OpSymbol s;
            s.order = a.order;
            s.family = neumann_closure(r, a.family, res_.params.at("cutoff"), h_);
            if (a.flags.count("very_residual")) s.flags.insert("very_residual");
            out_ << "NEUMANN " << st.at("name").get<std::string>() << " -> " << s.family.str() << "\n";
            put(st.at("name"), std::move(s));
        } else if (op == "selfadjoint") {
            const CalculusRule& r = rule(st);
            std::string c = cite(st);
            OpSymbol& s = syms_.at(st.at("target"));
            IndexFamily adj = adjoint_family(r, s.family, h_);
            for (auto& [g, e] : s.family.sets) e = intersect(e, adj.at(g));
            out_ << "SELFADJOINT " << st.at("target").get<std::string>() << " -> " << s.family.str() << " [" << c
                 << "]\n";
        } else if (op == "assert") {
            do_assert(id, st);
        } else if (op == "expect") {
            do_expect(id, st);
        } else if (op == "import") {
            do_import(st);
        } else {
            throw ParametrixError("unknown op '" + op + "'");
        }
    }

    void do_assert(const std::string& id, const json& st)
    {
        std::string c = cite(st);
        std::string tname = st.at("target");
        if (!syms_.count(tname)) throw ParametrixError("unknown symbol '" + tname + "'");
        OpSymbol& s = syms_.at(tname);
        ++n_asserts_;
        bool derivable = true;
        std::string what;
        if (st.contains("face")) {
            std::string g = st.at("face");
            IndexSet now = s.family.at(g);
            IndexSet want = eval_set(st.at("set"), res_.params);
            if (!refines(want, now))
                throw LoosenAttempt(tname + "|" + g + ": " + want.str() + " does not refine " + now.str());
            derivable = refines(now, want);
            what = tname + " " + g + " " + now.str() + " -> " + want.str();
            s.family.at(g) = want;
        }
        if (st.contains("order")) {
            std::string o = as_str(st.at("order"));
            std::optional<Rat> want;
            if (o != "-inf") want = ex(o);
            bool tighter = !want ? true : (s.order && *want <= *s.order);
            if (!tighter) throw LoosenAttempt(tname + ": order " + o + " exceeds " + fmt_order(s.order));
            derivable = derivable && (s.order == want);
            what += (what.empty() ? tname : "") + " order " + fmt_order(s.order) + " -> " + fmt_order(want);
            s.order = want;
        }
        if (st.contains("pih")) {
            std::string g = st.at("pih").at("face");
            Rat z = ex(st.at("pih").at("order"));
            auto it = s.pih.find(g);
            derivable = derivable && it != s.pih.end() && it->second == z;
            what += (what.empty() ? tname : "") + " Pi_h-sandwiched at " + g + " order " + fmt_rat(z);
            s.pih[g] = z;
        }
        if (st.contains("tag")) {
            std::string t = st.at("tag");
            derivable = derivable && has_tag(s, t);
            what += (what.empty() ? tname : "") + " tag " + t;
            s.flags.insert(t);
        }
        out_ << "ASSERT " << id << " " << what << " [" << c << "]";
        if (!opt_.assertions_enabled) {
            out_ << (derivable ? " check=pass" : " check=fail");
            if (!derivable) res_.failed_asserts.push_back(id);
        }
        out_ << "\n";
    }

    void do_expect(const std::string& id, const json& st)
    {
        const OpSymbol& s = sym(st.at("target"));
        std::string face = st.value("face", "-");
        bool ok = true;
        std::string detail;
        if (face != "-") {
            const IndexSet& e = s.family.at(face);
            detail = st.at("target").get<std::string>() + "|" + face + " = " + e.str();
            if (st.contains("ge")) ok = ok && satisfies_bound(e, ex(st.at("ge")));
            if (st.contains("gt")) ok = ok && gt(e, ex(st.at("gt")));
            if (st.contains("eq")) ok = ok && refines(e, eval_set(st.at("eq"), res_.params));
            if (st.contains("empty")) ok = ok && e.empty() == st.at("empty").get<bool>();
            if (st.contains("ge_log")) {
                const auto& g = st.at("ge_log");
                ok = ok && ge_log(e, ex(g.at(0)), g.at(1).get<int>());
            }
            if (st.contains("split")) {
                // e = base ∪ rest with inf rest > bound
                IndexSet base = eval_set(st.at("split").at("base"), res_.params);
                Rat bound = ex(st.at("split").at("rest_gt"));
                for (const auto& x : e.gens())
                    if (!base.contains(x) && x.z <= bound) ok = false;
            }
            if (st.contains("leading")) {
                const auto& l = st.at("leading");
                Gen lead{ex(l.at("z")), l.value("k", 0)};
                Rat rest = ex(l.at("rest_ge"));
                bool seen = false;
                for (const auto& x : e.gens()) {
                    if (x == lead) seen = true;
                    else if (x.z < rest) ok = false;
                }
                ok = ok && seen;
            }
        }
        if (st.contains("order")) {
            std::string o = as_str(st.at("order"));
            std::optional<Rat> want;
            if (o != "-inf") want = ex(o);
            ok = ok && s.order == want;
            detail += (detail.empty() ? "" : "; ") + std::string("order ") + fmt_order(s.order);
        }
        if (st.contains("tag")) {
            ok = ok && has_tag(s, st.at("tag").get<std::string>());
            detail += (detail.empty() ? "" : "; ") + std::string("tag ") + st.at("tag").get<std::string>();
        }
        if (st.contains("pih")) {
            auto it = s.pih.find(st.at("pih").at("face"));
            ok = ok && it != s.pih.end() && it->second == ex(st.at("pih").at("order"));
            detail += (detail.empty() ? "" : "; ") + std::string("Pi_h-sandwiched leading term");
        }
        expect_line(id, face, ok, ok ? "" : detail);
    }

    void do_import(const json& st)
    {
        std::string name = st.at("scenario");
        json sub = load_scenario(cat_, name);
        ReplayOptions o;
        o.overrides["h"] = res_.params.at("h");
        o.overrides["cutoff"] = res_.params.at("cutoff");
        const json params = st.value("params", json::object());
        for (auto& [k, v] : params.items()) o.overrides[k] = ex(v);
        for (const char* k : {"eps", "eps1", "mu", "delta"})
            if (res_.params.count(k) && !o.overrides.count(k) && sub.value("params", json::object()).contains(k))
                o.overrides[k] = res_.params.at(k);
        ReplayResult r = replay_json(cat_, sub, o);
        if (!r.all_pass()) throw ParametrixError("imported scenario " + name + " does not replay cleanly");
        out_ << "IMPORT " << name;
        for (auto& [from, to] : st.at("symbols").items()) {
            auto it = r.symbols.find(from);
            if (it == r.symbols.end()) throw ParametrixError(name + " has no symbol '" + from + "'");
            put(to.get<std::string>(), it->second);
            out_ << " " << from << "->" << to.get<std::string>();
        }
        out_ << "\n";
    }
};

} // namespace

ReplayResult replay_json(Catalog& cat, const nlohmann::json& sc, const ReplayOptions& opt)
{
    return Replayer(cat, sc, opt).run();
}

ReplayResult replay(Catalog& cat, const std::string& name, const ReplayOptions& opt)
{
    json sc = load_scenario(cat, name);
    return replay_json(cat, sc, opt);
}

} // namespace mwc
