#include "mwc/indexalg.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace mwc;

namespace {

IndexSet S(const std::string& s) { return parse_index_set(s); }

} // namespace

TEST_CASE("normalize drops dominated generators")
{
    CHECK(S("{(0,0),(1,0),(0,0)}") == S("{(0,0)}"));
    CHECK(S("{}").empty());
    CHECK(S("{(1,2),(1,0),(2,3)}").gens().size() == 2);
    CHECK(S("{(1,2),(1,0),(2,3)}") == S("{(2,3),(1,2)}"));
    // closure check against enumeration
    auto bf = oracle::closure(S("{(1,2),(2,3)}"), Rat(4));
    CHECK(oracle::compare(S("{(1,2),(1,0),(2,3)}"), bf, Rat(4), 4).empty());
}

TEST_CASE("sum")
{
    CHECK(sum(S("{(1,1)}"), IndexSet{}).empty());
    CHECK(sum(IndexSet::smooth(), S("{(1/2,1),(2/3,0)}")) == S("{(1/2,1),(2/3,0)}"));
    CHECK(sum(S("{(1,1)}"), S("{(1/2,0)}")) == S("{(3/2,1)}"));
}

TEST_CASE("shift")
{
    CHECK(shift(IndexSet{}, Rat(-3)).empty());
    CHECK(shift(IndexSet::smooth(), Rat(-2)) == S("{(-2,0)}"));
    CHECK(shift(S("{(1,1),(5/2,0)}"), Rat(1, 2)) == S("{(3/2,1),(3,0)}"));
}

TEST_CASE("extended union")
{
    CHECK(extended_union(IndexSet{}, S("{(1/2,1)}")) == S("{(1/2,1)}"));
    CHECK(extended_union(IndexSet::smooth(), IndexSet::smooth()) == S("{(0,1)}"));
    CHECK(extended_union(IndexSet::smooth(), S("{(1/2,0)}")) == S("{(0,0),(1/2,0)}"));
    // bump where closures meet, not only at equal generators
    CHECK(extended_union(S("{(0,0)}"), S("{(1,0)}")) == S("{(0,0),(1,1)}"));
}

TEST_CASE("inf_re and bounds")
{
    CHECK(!IndexSet{}.inf_re());
    CHECK(*S("{(-1,0),(1/4,2)}").inf_re() == Rat(-1));
    CHECK(*IndexSet::smooth().inf_re() == Rat(0));
    for (int a = -3; a <= 3; ++a) CHECK(satisfies_bound(IndexSet{}, Rat(a)));
    CHECK(satisfies_bound(S("{(2,0)}"), Rat(2)));
    CHECK_FALSE(satisfies_bound(S("{(2,1)}"), Rat(2)));
    CHECK(satisfies_bound(S("{(3/2,5)}"), Rat(1)));
    CHECK_FALSE(gt(S("{(2,0)}"), Rat(2)));
    CHECK(ge_log(S("{(2,1)}"), Rat(2), 1));
    CHECK_FALSE(ge_log(S("{(2,2)}"), Rat(2), 1));
}

TEST_CASE("refines")
{
    CHECK(refines(IndexSet{}, S("{(1,0)}")));
    CHECK(refines(S("{(1,0)}"), IndexSet::smooth()));
    CHECK_FALSE(refines(S("{(1/2,1)}"), S("{(1/2,0)}")));
}

TEST_CASE("parse shorthands")
{
    CHECK(S("N0") == IndexSet::smooth());
    CHECK(S("N0+1") == S("{(1,0)}"));
    CHECK(S("N0-1") == S("{(-1,0)}"));
    CHECK_THROWS(S("(1,0)"));
}

TEST_CASE("algebraic laws on random sets")
{
    std::mt19937 rng(7);
    const Rat hi(5);
    for (int i = 0; i < 300; ++i) {
        IndexSet a = oracle::random_set(rng), b = oracle::random_set(rng), c = oracle::random_set(rng);
        CAPTURE(a.str());
        CAPTURE(b.str());
        CAPTURE(c.str());
        CHECK(extended_union(a, b) == extended_union(b, a));
        CHECK(extended_union(extended_union(a, b), c) == extended_union(a, extended_union(b, c)));
        CHECK(sum(a, b) == sum(b, a));
        CHECK(sum(sum(a, b), c) == sum(a, sum(b, c)));
        if (!a.empty()) CHECK(sum(a, IndexSet::smooth()) == a);
        CHECK(shift(a, Rat(1, 2) + Rat(1)) == shift(shift(a, Rat(1, 2)), Rat(1)));
        CHECK(shift(sum(a, b), Rat(1, 2)) == sum(shift(a, Rat(1, 2)), b));
        CHECK(shift(extended_union(a, b), Rat(-1)) == extended_union(shift(a, Rat(-1)), shift(b, Rat(-1))));
        CHECK(IndexSet::normalize(a.gens()) == a);
        CHECK(refines(a, extended_union(a, b)));
        CHECK(refines(a, a));
        if (!a.empty() && !b.empty()) {
            CHECK(*extended_union(a, b).inf_re() == std::min(*a.inf_re(), *b.inf_re()));
            CHECK(*sum(a, b).inf_re() == *a.inf_re() + *b.inf_re());
        }
        CHECK(oracle::compare(extended_union(a, b),
                              oracle::extended_union(oracle::closure(a, hi), oracle::closure(b, hi)), hi, 5)
                  .empty());
    }
}
