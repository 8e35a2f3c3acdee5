#include "mwc/script.hpp"

#include <doctest.h>

#include <algorithm>

using namespace mwc;

namespace {

std::vector<std::string> sorted_faces(const Space& s)
{
    auto v = s.bhs;
    std::sort(v.begin(), v.end());
    return v;
}

Space product3()
{
    return Space::base("MxMxk", {{"x"}, {"xp"}, {"k"}}, {{"lf", "x", ""}, {"rf", "xp", ""}, {"zf", "k", ""}});
}

} // namespace

TEST_CASE("base space is a full product")
{
    Space s = product3();
    CHECK(s.bhs.size() == 3);
    CHECK(s.complex.size() == 8); // all subsets, including the empty one
    for (const auto& f : s.bhs)
        for (const auto& i : s.ideals) CHECK(s.valuation(f, i.name) == (s.face_index(f) == s.ideal_index(i.name) ? 1 : 0));
    Space one = Space::base("half line", {{"x"}}, {{"bM", "x", ""}});
    CHECK(one.bhs.size() == 1);
}

TEST_CASE("corner blow-up of M^2 gives the b-double space")
{
    Catalog cat;
    const Space& b = cat.space("m2_b");
    CHECK(sorted_faces(b) == std::vector<std::string>{"bf", "lf", "rf"});
    CHECK(b.lift_ideal("x") == std::map<std::string, int>{{"bf", 1}, {"lf", 1}});
    for (const auto& [f, w] : density_weight(b, WeightConvention::b)) CHECK(w.is_zero());
    CHECK(emit_dot(b) == "node bf\nnode lf\nnode rf\nedge bf lf\nedge bf rf\n");
}

TEST_CASE("catalog face counts and names")
{
    Catalog cat;
    CHECK(sorted_faces(cat.space("m2_phi")) == std::vector<std::string>{"ff", "lf", "phibf", "rf"});
    CHECK(sorted_faces(cat.space("m_t")) == std::vector<std::string>{"sc", "tf", "zf"});
    CHECK(sorted_faces(cat.space("m2_kphi")) ==
          std::vector<std::string>{"ff", "ff0", "lf", "lf0", "phibf", "phibf0", "rf", "rf0", "zf"});
    CHECK(cat.space("m3_kb").bhs.size() == 15);
    CHECK(cat.space("m3_kphi").bhs.size() == 29);
    CHECK(emit_dot(cat.space("m_t")) == "node sc\nnode tf\nnode zf\nedge sc tf\nedge tf zf\n");
}

TEST_CASE("each blow-up appends one face and extends the complex")
{
    Space s = product3();
    size_t before = s.complex.size();
    s.blow_corner("bf", {"lf", "rf"});
    CHECK(s.bhs.size() == 4);
    CHECK(s.complex.size() > before);
    // lf and rf no longer meet away from bf
    CHECK_FALSE(s.intersect({"lf", "rf"}));
    CHECK(s.intersect({"lf", "bf"}));
}

TEST_CASE("alternative constructions give isomorphic lattices")
{
    Catalog cat;
    auto a = lattice_iso(cat.space("m2_kphi"), cat.space("m2_kphi_alt"));
    CHECK_MESSAGE(a.ok, a.mismatch);
    CHECK(a.bijection.size() == 9);
    auto b = lattice_iso(cat.space("m2_kid"), cat.space("m2_kid_alt"));
    CHECK_MESSAGE(b.ok, b.mismatch);
    auto c = lattice_iso(cat.space("m2_kphi"), cat.space("m2_kid"));
    CHECK_FALSE(c.ok);
    CHECK_FALSE(c.mismatch.empty());
}

TEST_CASE("commutation verdicts")
{
    Catalog cat;
    auto script = read_json(cat.dir() + "/spaces/m2_kphi_alt.json");
    auto& steps = script.at("blowups");
    // stop before the two Phi blow-ups
    while (steps.back().value("op", "") != "declare") steps.erase(steps.size() - 1);
    Space s = run_script(script, true);
    auto v = check_commutes(s, "Phi0", "Phi+");
    CHECK(v.reason == CommuteReason::normal_form_with_Z);
    REQUIRE(v.z);
    CHECK(v.z->contains == std::vector<std::string>{"bf", "bf0"});

    Space d = product3();
    d.declare({.name = "A", .contains = {"lf"}, .w = {0, 1}});
    PSubDecl b{.name = "B", .contains = {"rf"}, .w = {0, 1}};
    b.rel["A"].kind = RelKind::disjoint;
    d.declare(b);
    CHECK(check_commutes(d, "A", "B").reason == CommuteReason::disjoint);
    CHECK(check_commutes(d, "A", "nope").reason == CommuteReason::unknown);
}

TEST_CASE("face images of the triple-space projections")
{
    Catalog cat;
    auto l = face_images(cat.fibration("kphi_L"));
    std::vector<std::string> pre;
    for (const auto& [f, g] : l)
        if (g == "ff") pre.push_back(f);
    CHECK(pre == std::vector<std::string>{"ff+_L", "ff+_LT", "ff+_T"});
    CHECK(face_image(cat.fibration("kphi_C"), "H1011") == kWhole);
    CHECK(face_image(cat.fibration("kphi_L"), "H1101") == kWhole);
    for (const auto& f : cat.fibration_names()) CHECK_NOTHROW(face_images(cat.fibration(f)));
}

TEST_CASE("density weights on the k,phi triple space")
{
    Catalog cat;
    auto b = density_weight(cat.space("m3_kphi"), WeightConvention::b);
    CHECK(b.at("ff0_T") == HAffine::hp1(2));
    CHECK(b.at("ff+_LT") == HAffine::hp1(1));
    CHECK(b.at("H0000").is_zero());
    auto c = density_weight(cat.space("m3_kphi"), WeightConvention::composition);
    CHECK(c.at("H0000") == HAffine::hp1(-2));
    CHECK(c.at("ff0_R") == HAffine::hp1(-1));
    CHECK(c.at("ff0_T").is_zero());
}

TEST_CASE("script errors")
{
    nlohmann::json bad = {{"name", "bad"},
                          {"ideals", {{{"name", "x"}}}},
                          {"base", {{{"face", "lf"}, {"ideal", "x"}}}},
                          {"blowups", {{{"op", "corner"}, {"face", "c"}, {"contains", {"lf", "nowhere"}}}}}};
    CHECK_THROWS(run_script(bad));
    Catalog cat;
    CHECK_THROWS(cat.space("no_such_space"));
}
