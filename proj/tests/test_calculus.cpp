#include "mwc/calculus.hpp"
#include "mwc/script.hpp"

#include <doctest.h>

#include <random>

using namespace mwc;

namespace {

IndexSet S(const std::string& s) { return parse_index_set(s); }

std::string operand_space(const CalculusRule& r) { return r.left_space.empty() ? r.target_space : r.left_space; }

IndexFamily family(Catalog& cat, const CalculusRule& r, const std::map<std::string, std::string>& sets)
{
    IndexFamily f = empty_family(cat.space(operand_space(r)));
    for (const auto& [g, s] : sets) f.at(g) = S(s);
    return f;
}

IndexFamily random_family(std::mt19937& rng, Catalog& cat, const CalculusRule& r)
{
    std::uniform_int_distribution<int> z(-4, 6), k(0, 1), n(0, 2);
    IndexFamily f = empty_family(cat.space(operand_space(r)));
    for (auto& [g, set] : f.sets) {
        std::vector<Gen> raw;
        for (int i = n(rng); i > 0; --i) raw.push_back({Rat(z(rng), 2), k(rng)});
        set = IndexSet::normalize(raw);
    }
    return f;
}

} // namespace

TEST_CASE("derived rules equal the stated tables")
{
    Catalog cat;
    for (auto [derived, stated] : {std::pair{"phi18_derived", "phi18b"}, {"com12_derived", "com12b"},
                                    {"phi17_derived", "phi17b"}}) {
        std::string diff;
        CAPTURE(stated);
        CHECK_MESSAGE(same_clauses(load_rule(cat, derived), load_rule(cat, stated), &diff), diff);
    }
    CHECK(load_rule(cat, "phi18b").target_faces.size() == 4);
    CHECK(load_rule(cat, "com12b").target_faces.size() == 9);
    auto com = load_rule(cat, "com12_derived");
    REQUIRE(com.integrability.size() == 1);
    CHECK(com.integrability[0].left == "rf");
    CHECK(com.integrability[0].right == "lf");
    CHECK(com.integrability[0].shift == HAffine{-1, -1});
}

TEST_CASE("the lf clause as printed does not match the derivation")
{
    Catalog cat;
    std::string diff;
    CHECK_FALSE(same_clauses(load_rule(cat, "phi18_derived"), load_rule(cat, "phi18b_verbatim"), &diff));
    CHECK(diff.find("lf") != std::string::npos);
}

TEST_CASE("rule tables round-trip")
{
    Catalog cat;
    for (const char* n : {"com12b", "phi18b", "com14b", "bsc", "com12_derived"}) {
        auto r = load_rule(cat, n);
        auto back = parse_rule_table(rule_table(r), n);
        CHECK(same_clauses(r, back));
    }
    CHECK(load_rule(cat, "com14b").provenance.find("hand-coded") != std::string::npos);
}

TEST_CASE("small calculus is closed under composition")
{
    Catalog cat;
    for (const char* n : {"com12b", "phi18b"}) {
        auto r = load_rule(cat, n);
        auto s = small_calculus(r);
        CHECK(compose_families(r, s, s, 1) == s);
        CHECK(compose_families(r, compose_families(r, s, s, 2), s, 2) ==
              compose_families(r, s, compose_families(r, s, s, 2), 2));
        for (const auto& [g, conds] : r.normal_conditions) CHECK(normal_restriction_check(r, s, s, g, 1).empty());
    }
}

TEST_CASE("integrability violation at the equality case")
{
    Catalog cat;
    auto r = load_rule(cat, "com12b");
    auto e = family(cat, r, {{"rf", "{(0,0)}"}});
    auto f = family(cat, r, {{"lf", "{(2,0)}"}}); // h+1 at h=1
    CHECK_THROWS_AS(compose_families(r, e, f, 1), IntegrabilityViolation);
    f.at("lf") = S("{(5/2,0)}");
    CHECK_NOTHROW(compose_families(r, e, f, 1));
}

TEST_CASE("hand evaluation of the k,phi composition clauses")
{
    Catalog cat;
    auto r = load_rule(cat, "com12b");
    const long long h = 2;
    auto e = family(cat, r,
                    {{"zf", "{(0,0)}"}, {"rf0", "{(7/2,0)}"}, {"lf0", "{(1/2,0)}"}, {"phibf0", "{(3,0)}"},
                     {"ff0", "{(0,0)}"}, {"rf", "{(4,0)}"}, {"lf", "{(1/3,0)}"}, {"ff", "{(0,0)}"}});
    auto f = family(cat, r,
                    {{"zf", "{(-1,0)}"}, {"rf0", "{(3,1)}"}, {"lf0", "{(1/4,0)}"}, {"phibf0", "{(5/2,0)}"},
                     {"ff0", "{(1,0)}"}, {"rf", "{(7/2,0)}"}, {"lf", "{(1/2,0)}"}, {"ff", "{(0,0)}"}});
    auto k = compose_families(r, e, f, h);
    // zf: (E_zf + F_zf) ext-union (E_rf0 + F_lf0 - (h+1))
    CHECK(k.at("zf") == extended_union(sum(e.at("zf"), f.at("zf")), shift(sum(e.at("rf0"), f.at("lf0")), Rat(-3))));
    // rf0: (E_zf + F_rf0) ext-union (E_rf0 + F_phibf0 - (h+1)) ext-union (E_rf0 + F_ff0)
    CHECK(k.at("rf0") == extended_union(extended_union(sum(e.at("zf"), f.at("rf0")),
                                                       shift(sum(e.at("rf0"), f.at("phibf0")), Rat(-3))),
                                        sum(e.at("rf0"), f.at("ff0"))));
}

TEST_CASE("derived and stated rules agree on random families")
{
    Catalog cat;
    auto derived = load_rule(cat, "com12_derived"), stated = load_rule(cat, "com12b");
    std::mt19937 rng(11);
    int checked = 0;
    for (int i = 0; i < 2000 && checked < 200; ++i) {
        auto e = random_family(rng, cat, stated), f = random_family(rng, cat, stated);
        IndexFamily a, b;
        try {
            a = compose_families(stated, e, f, 1);
        } catch (const IntegrabilityViolation&) {
            CHECK_THROWS_AS(compose_families(derived, e, f, 1), IntegrabilityViolation);
            continue;
        }
        b = compose_families(derived, e, f, 1);
        CHECK(a == b);
        ++checked;
    }
    CHECK(checked == 200);
}

TEST_CASE("adjoint and conjugation")
{
    Catalog cat;
    auto r = load_rule(cat, "com12b");
    std::mt19937 rng(5);
    for (int i = 0; i < 50; ++i) {
        auto e = random_family(rng, cat, r);
        CHECK(adjoint_family(r, adjoint_family(r, e, 1), 1) == e);
        CHECK(conjugate_family(r, conjugate_family(r, e, Rat(1, 2)), Rat(-1, 2)) == e);
        CHECK(conjugate_family(r, e, Rat(0)) == e);
    }
    CHECK(r.conj_shift.at("ff") == 0);
    CHECK(r.conj_shift.at("phibf") == 0);
    CHECK(r.conj_shift.at("rf") == 1);

    // residual term at rf only: its adjoint sits at lf, h+1 lower
    auto p = load_rule(cat, "phi18b");
    auto rr = family(cat, p, {{"rf", "{(5/2,0)}"}});
    auto adj = adjoint_family(p, rr, 1);
    CHECK(adj.at("lf") == S("{(1/2,0)}"));
    CHECK(adj.at("rf").empty());
    auto conj = conjugate_family(p, rr, Rat(1));
    CHECK(conj.at("rf") == S("{(7/2,0)}"));
}

TEST_CASE("adjoint reverses composition")
{
    Catalog cat;
    auto r = load_rule(cat, "com12b");
    std::mt19937 rng(3);
    int checked = 0;
    for (int i = 0; i < 2000 && checked < 50; ++i) {
        auto e = random_family(rng, cat, r), f = random_family(rng, cat, r);
        IndexFamily ef;
        try {
            ef = compose_families(r, e, f, 1);
        } catch (const IntegrabilityViolation&) {
            continue;
        }
        CHECK(adjoint_family(r, ef, 1) == compose_families(r, adjoint_family(r, f, 1), adjoint_family(r, e, 1), 1));
        ++checked;
    }
    CHECK(checked == 50);
}

TEST_CASE("normal restriction conditions")
{
    Catalog cat;
    auto r = load_rule(cat, "com12b");
    auto bad = family(cat, r, {{"phibf0", "{(0,0)}"}, {"ff0", "N0"}});
    auto fails = normal_restriction_check(r, bad, bad, "ff0", 1);
    REQUIRE(fails.size() == 1);
    CHECK(fails[0].cond.left == "phibf0");
    CHECK_THROWS(normal_restriction_check(r, bad, bad, "lf", 1));
}

TEST_CASE("action on functions")
{
    Catalog cat;
    auto r = load_rule(cat, "phi17b");
    auto e = family(cat, r, {{"ff", "N0"}});
    CHECK(mapping_family(r, e, IndexSet::smooth(), 1) == IndexSet::smooth());
    auto l = family(cat, r, {{"lf", "{(1/2,0)}"}});
    CHECK(mapping_family(r, l, S("{(3,0)}"), 1) == S("{(1/2,0)}"));
}
