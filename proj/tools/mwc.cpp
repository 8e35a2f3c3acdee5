#include "mwc/calculus.hpp"
#include "mwc/golden.hpp"
#include "mwc/parametrix.hpp"
#include "mwc/script.hpp"
#include "mwc/spectral.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

using namespace mwc;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0, kInvalid = 1, kMismatch = 2;

std::string fmt_double(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

int cmd_faces(Catalog& cat, const std::string& name)
{
    const Space& s = cat.space(name);
    std::cout << "face";
    for (const auto& i : s.ideals) std::cout << "\t" << i.name;
    std::cout << "\n";
    for (size_t f = 0; f < s.bhs.size(); ++f) {
        std::cout << s.bhs[f];
        for (int v : s.val[f]) std::cout << "\t" << v;
        std::cout << "\n";
    }
    return kOk;
}

int cmd_images(Catalog& cat, const std::string& name)
{
    std::cout << "source\timage\n";
    for (const auto& [f, img] : face_images(cat.fibration(name))) std::cout << f << "\t" << img << "\n";
    return kOk;
}

int cmd_weights(Catalog& cat, const std::string& name, const std::string& conv)
{
    WeightConvention c;
    if (conv == "b") c = WeightConvention::b;
    else if (conv == "composition") c = WeightConvention::composition;
    else throw CLI::ValidationError("--convention", "expected b or composition");
    std::cout << "face\tweight\n";
    for (const auto& [f, w] : density_weight(cat.space(name), c)) std::cout << f << "\t" << fmt_haff(w) << "\n";
    return kOk;
}

// catalog rule deriving from the given triple (or double) space
std::string derived_rule_for(const Catalog& cat, const std::string& space)
{
    for (const auto& e : fs::directory_iterator(cat.dir() + "/rules")) {
        auto j = read_json(e.path().string());
        if (!j.contains("derive")) continue;
        const auto& d = j.at("derive");
        if (d.value("triple", "") == space || d.value("double", "") == space) return j.at("name");
    }
    throw CalculusError("no derivation recipe for space '" + space + "'");
}

int cmd_derive(Catalog& cat, const std::string& space, std::optional<long long> h)
{
    CalculusRule r = load_rule(cat, derived_rule_for(cat, space));
    if (!h) {
        std::cout << rule_table(r);
        return kOk;
    }
    std::cout << "# h=" << *h << "\ntarget\tleft\tright\tshift\n";
    auto side = [](const std::string& s) { return s.empty() ? std::string("-") : s; };
    for (const auto& g : r.target_faces) {
        auto it = r.clauses.find(g);
        if (it == r.clauses.end()) continue;
        for (const auto& c : it->second)
            std::cout << g << "\t" << side(c.left) << "\t" << side(c.right) << "\t" << fmt_rat(c.shift.at(*h)) << "\n";
    }
    for (const auto& c : r.integrability)
        std::cout << "@integrability\t" << side(c.left) << "\t" << side(c.right) << "\t" << fmt_rat(c.shift.at(*h)) << "\n";
    return kOk;
}

// "lf={(0,0)};ff=N0" on the rule's left space
IndexFamily parse_family(Catalog& cat, const CalculusRule& r, const std::string& text, long long h)
{
    IndexFamily fam = empty_family(cat.space(r.left_space));
    Params p{{"h", Rat(h)}};
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ';')) {
        if (item.empty()) continue;
        auto eq = item.find('=');
        if (eq == std::string::npos) throw CalculusError("family entry '" + item + "' lacks '='");
        std::string face = item.substr(0, eq);
        if (!fam.sets.count(face)) throw CalculusError("unknown face '" + face + "' in family");
        fam.sets[face] = eval_set(item.substr(eq + 1), p);
    }
    return fam;
}

int cmd_compose(Catalog& cat, const std::string& rule, const std::string& e, const std::string& f, long long h)
{
    CalculusRule r = load_rule(cat, rule);
    IndexFamily out = compose_families(r, parse_family(cat, r, e, h), parse_family(cat, r, f, h), h);
    std::cout << "face\tindex_set\n";
    for (const auto& g : r.target_faces) std::cout << g << "\t" << out.at(g).str() << "\n";
    return kOk;
}

int cmd_replay(Catalog& cat, const std::string& name, const Params& overrides, bool no_asserts)
{
    ReplayOptions opt;
    opt.overrides = overrides;
    opt.assertions_enabled = !no_asserts;
    ReplayResult r = replay(cat, name, opt);
    std::cout << r.report;
    if (!r.errors.empty()) return kInvalid;
    if (!r.all_pass()) return kMismatch;
    if (no_asserts && !r.failures_as_documented()) return kMismatch;
    return kOk;
}

SpectralData load_data(const Catalog& cat, const std::string& arg)
{
    if (fs::exists(arg)) return load_spectral(arg);
    std::string p = cat.dir() + "/spectral/" + arg + ".json";
    if (fs::exists(p)) return load_spectral(p);
    throw SpectralError("no spectral data '" + arg + "'");
}

int cmd_roots(const Catalog& cat, const std::string& arg)
{
    SpectralData d = load_data(cat, arg);
    std::cout << "root\tapprox\tmultiplicity\n";
    if (d.dirac_spec) {
        for (const auto& r : dirac_indicial_roots(*d.dirac_spec)) {
            long long m = 0;
            for (const auto& mu : *d.dirac_spec)
                if (r == IndicialRoot::rational(mu - Rat(1, 2))) ++m;
            std::cout << r.str() << "\t" << fmt_double(r.approx()) << "\t" << m << "\n";
        }
        return kOk;
    }
    auto multi = hodge_root_multiset(d);
    for (const auto& r : hodge_indicial_roots(d)) {
        long long m = std::count(multi.begin(), multi.end(), r);
        std::cout << r.str() << "\t" << fmt_double(r.approx()) << "\t" << m << "\n";
    }
    std::cout << "symmetric\t" << (symmetric_under_reflection(multi) ? "yes" : "no") << "\n";
    return kOk;
}

int cmd_check(const Catalog& cat, const std::string& arg, const std::string& profile, const std::string& eps1)
{
    SpectralData d = load_data(cat, arg);
    if (d.dirac_spec) throw SpectralError("check profiles apply to Hodge data, not Dirac data");
    std::cout << "data\t" << d.name << "\nprofile\t" << profile << "\n";
    if (profile == "int12b") std::cout << check_int12b(d).str();
    else std::cout << check_gs_comparison(d).str();
    if (!eps1.empty()) std::cout << "eps1\t" << fmt_rat(parse_rat(eps1)) << "\tuser-asserted, not derived from the data\n";
    return kOk;
}

int cmd_bessel(double alpha, double kmax, double kmin)
{
    BesselProbe p = bessel_l2_probe(alpha, kmax, kmin);
    std::cout << "alpha\t" << fmt_double(p.alpha) << "\nkappa_max\t" << fmt_double(p.kappa_max) << "\nkappa_min\t"
              << fmt_double(p.kappa_min) << "\nfitted_exponent\t" << fmt_double(p.fitted_exponent) << "\nverdict\t"
              << p.verdict << "\n";
    return kOk;
}

int cmd_golden(Catalog& cat, const std::vector<std::string>& names, bool all, std::string dir)
{
    std::vector<std::string> todo = all ? golden_names() : names;
    if (todo.empty()) throw GoldenError("golden: give table names or --all");
    if (dir.empty()) dir = golden_default_dir(cat);
    bool ok = true;
    for (const auto& n : todo) {
        GoldenCheck g = golden_check(cat, n, dir);
        std::cout << "GOLDEN " << n << " " << (g.match ? "match" : "mismatch");
        if (!g.match) std::cout << " " << g.diff;
        std::cout << "\n";
        ok = ok && g.match;
    }
    return ok ? kOk : kMismatch;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"manifolds-with-corners calculus bookkeeping"};
    app.require_subcommand(1);
    // "-h" stays free for the --h options
    app.set_help_flag("--help", "print help and exit");
    std::string catalog = catalog_dir();
    app.add_option("--catalog", catalog, "catalog directory");

    std::string name, name2, name3, conv = "b", profile, eps1, golden_dir;
    std::optional<long long> h;
    long long compose_h = 1;
    std::map<std::string, std::string> ov;
    bool no_asserts = false, all = false;
    double alpha = 0, kmax = 20, kmin = 1e-3;
    std::vector<std::string> names;

    auto* faces = app.add_subcommand("faces", "face list and valuation table");
    faces->add_option("space", name)->required();
    auto* dot = app.add_subcommand("dot", "face lattice as graph text");
    dot->add_option("space", name)->required();
    auto* images = app.add_subcommand("images", "face-image table of a b-fibration");
    images->add_option("fibration", name)->required();
    auto* weights = app.add_subcommand("weights", "density multiweight");
    weights->add_option("space", name)->required();
    weights->add_option("--convention", conv, "b or composition");
    auto* derive = app.add_subcommand("derive", "derived rule table");
    derive->add_option("space", name)->required();
    derive->add_option("--h", h);
    auto* compose = app.add_subcommand("compose", "compose two index families under a rule");
    compose->add_option("rule", name)->required();
    compose->add_option("famE", name2)->required();
    compose->add_option("famF", name3)->required();
    compose->add_option("--h", compose_h);
    auto* rep = app.add_subcommand("replay", "replay a parametrix scenario");
    rep->add_option("scenario", name)->required();
    for (const char* k : {"eps", "eps1", "mu", "delta", "h", "cutoff"})
        rep->add_option(std::string("--") + k, ov[k]);
    rep->add_flag("--no-asserts", no_asserts);
    auto* roots = app.add_subcommand("roots", "indicial roots of spectral data");
    roots->add_option("data", name)->required();
    auto* check = app.add_subcommand("check", "condition checker");
    check->add_option("data", name)->required();
    check->add_option("--profile", profile)->required()->check(CLI::IsMember({"int12b", "gs"}));
    check->add_option("--eps1", eps1, "user-asserted eps1");
    auto* bessel = app.add_subcommand("bessel", "Bessel model solvability probe");
    bessel->add_option("--alpha", alpha)->required();
    bessel->add_option("--kappa-max", kmax);
    bessel->add_option("--kappa-min", kmin);
    auto* golden = app.add_subcommand("golden", "compare computed tables with stored goldens");
    golden->add_option("names", names);
    golden->add_flag("--all", all);
    golden->add_option("--golden-dir", golden_dir);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kInvalid;
    }

    try {
        Catalog cat(catalog);
        if (*faces) return cmd_faces(cat, name);
        if (*dot) {
            std::cout << emit_dot(cat.space(name));
            return kOk;
        }
        if (*images) return cmd_images(cat, name);
        if (*weights) return cmd_weights(cat, name, conv);
        if (*derive) return cmd_derive(cat, name, h);
        if (*compose) return cmd_compose(cat, name, name2, name3, compose_h);
        if (*rep) {
            Params p;
            for (const auto& [k, v] : ov)
                if (!v.empty()) p[k] = parse_rat(v);
            return cmd_replay(cat, name, p, no_asserts);
        }
        if (*roots) return cmd_roots(cat, name);
        if (*check) return cmd_check(cat, name, profile, eps1);
        if (*bessel) return cmd_bessel(alpha, kmax, kmin);
        if (*golden) return cmd_golden(cat, names, all, golden_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    }
    return kInvalid;
}
