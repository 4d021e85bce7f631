#include <wildram/deformdata.hpp>

#include "support/checks.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <algorithm>

using namespace wildram;
using testsupport::thrown_code;

namespace {

CriticalPoint tame_pt(const char* name, long h, long m) {
    CriticalPoint p;
    p.name = name;
    p.kind = PointKind::Tame;
    p.h = h;
    p.m = m;
    return p;
}

CriticalPoint wild_pt(const char* name, long h, long m, std::vector<Rat> sigmas) {
    CriticalPoint p;
    p.name = name;
    p.kind = PointKind::Wild;
    p.h = h;
    p.m = m;
    p.n_w = (int)sigmas.size();
    p.wild_sigmas = std::move(sigmas);
    return p;
}

// Degree-21 datum with three tame points of invariant 1/3; the local sum is
// 3 (1/3 - 1) = -2.
DeformationDatum three_tame() {
    DeformationDatum d;
    d.p = 7;
    d.base_genus = 0;
    d.cover_degree = 21;
    d.mu = 3;
    d.points = {tame_pt("e1", 1, 3), tame_pt("e2", 1, 3), tame_pt("e3", 1, 3)};
    return d;
}

// One one-level wild point against one tame point, as found next to a tail.
DeformationDatum wild_and_tame() {
    DeformationDatum d;
    d.p = 7;
    d.base_genus = 0;
    d.cover_degree = 21;
    d.mu = 3;
    d.points = {wild_pt("e1r", -1, 3, {Rat(1, 3)}), tame_pt("g1", 1, 3)};
    return d;
}

// Two-level wild stack (1/2, 3/2) balanced by one tame point: the local sum
// is 7/50 - 41/25 + (1/2 - 1) = -2.
DeformationDatum two_level() {
    DeformationDatum d;
    d.p = 5;
    d.base_genus = 0;
    d.cover_degree = 50;
    d.mu = 2;
    d.points = {wild_pt("w", 7, 2, {Rat(1, 2), Rat(3, 2)}), tame_pt("t", 1, 2)};
    return d;
}

} // namespace

TEST_CASE("torsor reduction classification") {
    TorsorReduction m = classify_torsor(Rat(1), 4, 5);
    CHECK(m.classification == TorsorClass::Multiplicative);
    CHECK(!m.n_param);

    TorsorReduction e = classify_torsor(Rat(0), 4, 5);
    CHECK(e.classification == TorsorClass::Etale);
    REQUIRE(e.n_param);
    CHECK(*e.n_param == 1);

    TorsorReduction a = classify_torsor(Rat(1, 2), 8, 5);
    CHECK(a.classification == TorsorClass::Additive);
    REQUIRE(a.n_param);
    CHECK(*a.n_param == 1);

    TorsorReduction e2 = classify_torsor(Rat(0), 8, 5);
    CHECK(e2.classification == TorsorClass::Etale);
    CHECK(*e2.n_param == 2);

    CHECK(thrown_code([] { classify_torsor(Rat(3, 2), 4, 5); }) == "InvalidDelta");
    CHECK(thrown_code([] { classify_torsor(Rat(1, 3), 4, 5); }) == "InvalidDelta");
    CHECK(thrown_code([] { classify_torsor(Rat(1, 2), 4, 5); }) == "InvalidDelta");
}

TEST_CASE("local identity on handmade data") {
    for (DeformationDatum d : {three_tame(), wild_and_tame(), two_level()}) {
        CHECK(validate(d).empty());
        CHECK(check_local_raw(d));
        CHECK(local_raw_lhs(d) == Rat(2) * d.base_genus - 2);
        auto [hurwitz, differential] = genus_consistency(d);
        CHECK(hurwitz == differential);
    }
    // both computations give 2 g_V - 2 = 0 for the tame degree-21 cover
    auto [h, df] = genus_consistency(three_tame());
    CHECK(h == 0);
    CHECK(df == 0);
}

TEST_CASE("local identity detects a perturbed stack") {
    DeformationDatum d = two_level();
    d.points[0].wild_sigmas[1] = Rat(1); // still a valid jump sequence
    CHECK(validate(d).empty());
    CHECK(!check_local_raw(d));
    auto [h, df] = genus_consistency(d);
    CHECK(h != df);
}

TEST_CASE("genus consistency rejects impossible degrees") {
    DeformationDatum d = wild_and_tame();
    d.cover_degree = 20; // not divisible by the local order 21
    auto v = validate(d);
    CHECK(std::any_of(v.begin(), v.end(),
                      [](const Violation& x) { return x.rule == "degree-divisibility"; }));
    CHECK(thrown_code([&] { genus_consistency(d); }) == "NonIntegralGenus");
}

TEST_CASE("structural validation rules") {
    auto rules = [](const DeformationDatum& d) {
        std::vector<std::string> r;
        for (const Violation& v : validate(d)) r.push_back(v.rule);
        return r;
    };

    DeformationDatum d = three_tame();
    d.points[0].m = 14; // divisible by p
    auto r = rules(d);
    CHECK(std::count(r.begin(), r.end(), "m-prime-to-p") == 1);

    d = three_tame();
    d.points[0].h = 1;
    d.points[0].m = 1;
    r = rules(d);
    CHECK(std::count(r.begin(), r.end(), "critical-point-nontrivial") == 1);

    d = three_tame();
    d.points[0].n_w = 1; // tame point with a wild exponent
    r = rules(d);
    CHECK(std::count(r.begin(), r.end(), "tame-shape") == 1);

    d = wild_and_tame();
    d.points[0].wild_sigmas.clear();
    d.points[0].n_w = 0; // wild point without a stack
    r = rules(d);
    CHECK(std::count(r.begin(), r.end(), "wild-shape") == 1);

    d = wild_and_tame();
    d.points[0].wild_sigmas = {Rat(2, 3)}; // 2/3 * 3 = 2 fine; now break integrality
    CHECK(rules(d) == std::vector<std::string>{});
    d.points[0].wild_sigmas = {Rat(1, 2)};
    r = rules(d);
    CHECK(std::count(r.begin(), r.end(), "wild-sigma-jumps") == 1);

    d = two_level();
    d.points[0].wild_sigmas = {Rat(3, 2), Rat(1, 2)}; // decreasing jumps
    r = rules(d);
    CHECK(std::count(r.begin(), r.end(), "wild-sigma-jumps") == 1);

    d = three_tame();
    d.reduction_type = ReductionType::Additive;
    d.points[0].h = 0; // sigma = 0 forces multiplicative reduction
    r = rules(d);
    CHECK(std::count(r.begin(), r.end(), "sigma-zero-multiplicative") == 1);

    d = three_tame();
    d.mu = 1; // tame invariant 1/3 now falls outside (1/mu) Z
    CHECK(!check_denominators(d));
    r = rules(d);
    CHECK(std::count(r.begin(), r.end(), "tame-sigma-denominator") == 1);
}

TEST_CASE("node signature compatibility") {
    RamFiltration node{7, 1, 3, {Int(1)}};
    CHECK(node_compatibility({Int(1), Int(1)}, {Int(-1)}, 2, 1, node));
    CHECK(!node_compatibility({Int(2), Int(1)}, {Int(-1)}, 2, 1, node)); // h_1 != j_1
    CHECK(!node_compatibility({Int(1), Int(2)}, {Int(-1)}, 2, 1, node)); // mirror broken

    CHECK(thrown_code([&] {
              node_compatibility({Int(1)}, {Int(-1)}, 2, 1, node);
          }) == "LengthMismatch");
    CHECK(thrown_code([&] {
              RamFiltration wrong{7, 2, 3, {Int(1), Int(8)}};
              node_compatibility({Int(1), Int(1)}, {Int(-1)}, 2, 1, wrong);
          }) == "LengthMismatch");
}

TEST_CASE("JSON round trip") {
    nlohmann::json doc = {
        {"p", 7},
        {"reduction_type", "multiplicative"},
        {"base_genus", 0},
        {"cover_degree", 21},
        {"mu", 3},
        {"points",
         {{{"name", "e1"}, {"kind", "tame"}, {"h", 1}, {"m", 3}},
          {{"name", "e0"},
           {"kind", "wild"},
           {"h", -1},
           {"m", 3},
           {"n_w", 1},
           {"wild_sigmas", {"1/3"}}}}}};
    DeformationDatum d = datum_from_json(doc, 0);
    CHECK(d.p == 7);
    CHECK(d.points.size() == 2);
    CHECK(d.points[1].wild_sigmas[0] == Rat(1, 3));
    CHECK(datum_to_json(datum_from_json(datum_to_json(d), 0)) == datum_to_json(d));

    // graph-embedded data inherit p through the fallback
    nlohmann::json inherit = doc;
    inherit.erase("p");
    CHECK(datum_from_json(inherit, 7).p == 7);

    CHECK(thrown_code([] { datum_from_json(nlohmann::json::array(), 0); }) ==
          "BadDatumJson");
    nlohmann::json badkind = doc;
    badkind["points"][0]["kind"] = "lukewarm";
    CHECK(thrown_code([&] { datum_from_json(badkind, 0); }) == "BadDatumJson");
    nlohmann::json badrt = doc;
    badrt["reduction_type"] = "banana";
    CHECK(thrown_code([&] { datum_from_json(badrt, 0); }) == "BadDatumJson");
}
