#include <wildram/stablegraph.hpp>

#include "support/checks.hpp"
#include "support/telescoping.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

using namespace wildram;
using testsupport::thrown_code;

namespace {

std::string fixture(const char* name) {
    return std::string(WILDRAM_FIXTURE_DIR "/") + name;
}

std::vector<std::string> rule_names(const std::vector<Violation>& vs) {
    std::vector<std::string> out;
    for (const Violation& v : vs) out.push_back(v.rule);
    std::sort(out.begin(), out.end());
    return out;
}

const char* kValidFixtures[] = {"pgl3.json", "sl2_tower.json", "one_new_tail.json",
                                "new_insep_tail.json"};

} // namespace

TEST_CASE("valid fixtures pass every check") {
    for (const char* name : kValidFixtures) {
        CAPTURE(name);
        StableGraph g = load_graph(fixture(name));
        for (const Violation& v : validate(g)) {
            CAPTURE(v.rule);
            CAPTURE(v.detail);
            CHECK(false);
        }
        CHECK(check_tail_constraints(g).empty());
        CHECK(check_global(g));
        CHECK(is_monotonic(g, g.root));
        CHECK(!monotonic_inconsistency(g, g.root));
        for (int alpha = 0; alpha < g.n; ++alpha) {
            GeneralizedCheck c = check_generalized(g, alpha);
            CAPTURE(alpha);
            CHECK(c.status == GeneralizedCheck::Status::HoldsWithEquality);
            CHECK(c.lhs == c.rhs);
            CHECK(c.slack_matches);
            CHECK(c.expected_slack == 0);
            CHECK(c.monotonic);
        }
    }
}

TEST_CASE("three-primitive-tail fixture in detail") {
    StableGraph g = load_graph(fixture("pgl3.json"));

    auto tails = classify_tails(g);
    REQUIRE(tails.size() == 3);
    for (const TailRecord& t : tails) {
        CHECK(t.flavor == TailFlavor::PrimitiveEtale);
        CHECK(t.r == 1);
        CHECK(t.r_prime == 0);
        CHECK(t.sigma == Rat(1, 3));
        CHECK(t.truncated == std::vector<Rat>{Rat(1, 3)});
    }

    CHECK(check_effective_local(g, "v0", 0));
    CHECK(check_effective_local(g, "v0", 1));
    CHECK(check_effective_local(g, "a1", 0));
    CHECK(thrown_code([&] { check_effective_local(g, "v0", 2); }) == "AlphaNotDefined");
    CHECK(thrown_code([&] { check_effective_local(g, "t1", 0); }) == "AlphaNotDefined");

    // outward order: the root precedes everything, tails are incomparable
    CHECK(preceq(g, "v0", "t1"));
    CHECK(preceq(g, "a1", "t1"));
    CHECK(!preceq(g, "t1", "a1"));
    CHECK(!preceq(g, "a1", "a2"));
    CHECK(preceq(g, "a2", "a2"));

    // level subgraphs shrink toward the root
    LevelSubgraph l0 = subgraph_level(g, 0);
    std::set<std::string> v0set(l0.vertices.begin(), l0.vertices.end());
    CHECK(v0set == std::set<std::string>{"v0", "a1", "a2", "a3"});
    LevelSubgraph l1 = subgraph_level(g, 1);
    CHECK(l1.vertices == std::vector<std::string>{"v0"});
    CHECK(thrown_code([&] { subgraph_level(g, 2); }) == "BadArgument");
    CHECK(thrown_code([&] { subgraph_level(g, -1); }) == "BadArgument");

    // fractional part identity along both interior directions
    CHECK(outward_fraction_check(g, "e1"));
    CHECK(outward_fraction_check(g, "e1r"));
    CHECK(outward_fraction_check(g, "g2"));
}

TEST_CASE("tower fixture: nodes and truncated sums per level") {
    StableGraph g = load_graph(fixture("sl2_tower.json"));

    auto tails = classify_tails(g);
    REQUIRE(tails.size() == 2);
    std::map<std::string, TailFlavor> flavor;
    for (const TailRecord& t : tails) flavor[t.vertex] = t.flavor;
    CHECK(flavor["tn"] == TailFlavor::NewEtale);
    CHECK(flavor["tp"] == TailFlavor::PrimitiveEtale);

    for (int alpha = 0; alpha < 3; ++alpha) {
        GeneralizedCheck c = check_generalized(g, alpha);
        CHECK(c.node_count == 2);
        CHECK(c.components == 1);
        CHECK(c.contains_root);
        CHECK(c.lhs == (alpha == 2 ? Rat(-1) : Rat(0)));
        CHECK(c.status == GeneralizedCheck::Status::HoldsWithEquality);
    }

    CHECK(outward_fraction_check(g, "d1"));
    CHECK(thrown_code([&] { outward_fraction_check(g, "c3"); }) == "BadArgument");
    CHECK(thrown_code([&] { check_effective_local(g, "b3", 0); }) == "BadArgument");

    LevelSubgraph l2 = subgraph_level(g, 2);
    std::set<std::string> v2(l2.vertices.begin(), l2.vertices.end());
    CHECK(v2 == std::set<std::string>{"v0", "b3"});
}

TEST_CASE("single-defect fixtures fire exactly the intended rules") {
    SUBCASE("etale component spliced into the interior") {
        StableGraph g = load_graph(fixture("broken_etale_interior.json"));
        CHECK(rule_names(validate(g)) ==
              std::vector<std::string>{"etale-interior", "tail-inertia-jump"});
        CHECK(thrown_code([&] { classify_tails(g); }) == "BadGraph");
    }
    SUBCASE("tail with the same inertia as its neighbor") {
        StableGraph g = load_graph(fixture("broken_tail_jump.json"));
        CHECK(rule_names(validate(g)) ==
              std::vector<std::string>{"global-vanishing", "local-vanishing",
                                       "tail-inertia-jump"});
        CHECK(thrown_code([&] { check_generalized(g, 0); }) == "NoApplicableNodes");
    }
    SUBCASE("one half-edge invariant not negated") {
        StableGraph g = load_graph(fixture("broken_antisymmetry.json"));
        CHECK(rule_names(validate(g)) == std::vector<std::string>{"sigma-antisymmetry"});
    }
    SUBCASE("tail invariant off by one") {
        StableGraph g = load_graph(fixture("broken_global.json"));
        CHECK(rule_names(validate(g)) ==
              std::vector<std::string>{"datum-edge-consistency", "global-vanishing",
                                       "local-vanishing"});
        GeneralizedCheck c = check_generalized(g, 0);
        CHECK(c.status == GeneralizedCheck::Status::Fails);
        CHECK(!c.slack_matches);
    }
    SUBCASE("wrong component genus") {
        StableGraph g = load_graph(fixture("broken_local.json"));
        CHECK(rule_names(validate(g)) ==
              std::vector<std::string>{"datum-edge-consistency", "datum-edge-consistency",
                                       "local-vanishing", "local-vanishing"});
        CHECK(check_global(g)); // tails are untouched by the genus defect
    }
    SUBCASE("branch point on a component of the wrong inertia") {
        StableGraph g = load_graph(fixture("broken_branch_placement.json"));
        auto rules = rule_names(validate(g));
        CHECK(std::count(rules.begin(), rules.end(), "branch-placement") == 1);
        CHECK(thrown_code([&] { classify_tails(g); }) == "MisplacedBranchPoint");
    }
    SUBCASE("new tail below the lower bound") {
        StableGraph g = load_graph(fixture("broken_tail_bound.json"));
        CHECK(validate(g).empty());
        auto vs = check_tail_constraints(g);
        CHECK(rule_names(vs) == std::vector<std::string>{"new-tail-lower-bound"});
        CHECK(vs[0].detail.find("t0") != std::string::npos);
    }
    SUBCASE("inseparable tail with fractional invariant") {
        StableGraph g = load_graph(fixture("broken_insep_integrality.json"));
        CHECK(validate(g).empty());
        CHECK(rule_names(check_tail_constraints(g)) ==
              std::vector<std::string>{"insep-tail-integral"});
    }
}

TEST_CASE("random telescoping trees satisfy the truncated identities") {
    std::mt19937 rng(60601);
    for (int iter = 0; iter < 200; ++iter) {
        StableGraph g = testsupport::random_telescoping_tree(rng);
        CAPTURE(iter);
        for (const Violation& v : validate(g)) {
            CAPTURE(v.rule);
            CAPTURE(v.detail);
            CHECK(false);
        }
        CHECK(check_global(g));
        for (int alpha = 0; alpha < g.n; ++alpha) {
            GeneralizedCheck c = check_generalized(g, alpha);
            CHECK(c.status == GeneralizedCheck::Status::HoldsWithEquality);
            CHECK(c.slack_matches);
        }
        // serialization round trip is the identity on documents
        nlohmann::json doc = graph_to_json(g);
        CHECK(graph_to_json(graph_from_json(doc)) == doc);
    }
}

namespace {

// Independent enumeration oracle: descending partitions of the unit budget.
void oracle_parts(long budget, long max_part, long max_count, std::vector<long>& cur,
                  std::vector<std::vector<long>>& out) {
    if (budget == 0) {
        out.push_back(cur);
        return;
    }
    if (max_count == 0) return;
    for (long part = std::min(budget, max_part); part >= 1; --part) {
        cur.push_back(part);
        oracle_parts(budget - part, part, max_count - 1, cur, out);
        cur.pop_back();
    }
}

std::set<std::pair<std::vector<Rat>, std::vector<Rat>>> oracle_configs(long p, long m,
                                                                       int wild) {
    std::set<std::pair<std::vector<Rat>, std::vector<Rat>>> out;
    const long max_prim = 3 - wild;
    for (long a = 0; a <= m; ++a) { // units spent on primitive tails
        std::vector<std::vector<long>> prims, news;
        std::vector<long> cur;
        oracle_parts(a, a > 0 ? a : 1, max_prim, cur, prims);
        if (a == 0) prims.push_back({});
        news.clear();
        cur.clear();
        oracle_parts(m - a, m - a > 0 ? m - a : 1, p, cur, news);
        if (m - a == 0) news.push_back({});
        for (const auto& pr : prims)
            for (const auto& nw : news) {
                if ((long)(pr.size() + nw.size()) >= p) continue;
                std::vector<Rat> sp, sn;
                for (long u : pr) {
                    Rat s(u, m);
                    s.canonicalize();
                    sp.push_back(s);
                }
                for (long u : nw) {
                    Rat s(u, m);
                    s.canonicalize();
                    sn.push_back(Rat(1) + s);
                }
                out.emplace(sp, sn);
            }
    }
    return out;
}

} // namespace

TEST_CASE("tail configuration enumeration matches the oracle") {
    auto configs = enumerate_tail_configs(5, 2, 2);
    CHECK(configs.size() == 4);

    std::set<std::pair<std::vector<Rat>, std::vector<Rat>>> got;
    for (const TailConfig& c : configs) got.emplace(c.primitive, c.new_etale);
    CHECK(got.size() == configs.size()); // no duplicates
    CHECK(got == oracle_configs(5, 2, 2));

    auto configs73 = enumerate_tail_configs(7, 3, 0);
    std::set<std::pair<std::vector<Rat>, std::vector<Rat>>> got73;
    for (const TailConfig& c : configs73) got73.emplace(c.primitive, c.new_etale);
    CHECK(got73 == oracle_configs(7, 3, 0));
    // the three-point configuration with all invariants 1/3 and no new tails
    CHECK(got73.count({{Rat(1, 3), Rat(1, 3), Rat(1, 3)}, {}}) == 1);

    CHECK(thrown_code([] { enumerate_tail_configs(6, 1, 0); }) == "BadArgument");
    CHECK(thrown_code([] { enumerate_tail_configs(5, 3, 0); }) == "BadArgument");
    CHECK(thrown_code([] { enumerate_tail_configs(5, 2, 4); }) == "BadArgument");
}

TEST_CASE("every enumerated configuration is realizable as a star") {
    for (auto [p, m, w] : {std::tuple<long, long, int>{5, 2, 2},
                           std::tuple<long, long, int>{7, 3, 0},
                           std::tuple<long, long, int>{3, 2, 1}}) {
        for (const TailConfig& c : enumerate_tail_configs(p, m, w)) {
            StableGraph g = realize_star(p, m, c);
            CAPTURE(p);
            CAPTURE(m);
            for (const Violation& v : validate(g)) {
                CAPTURE(v.rule);
                CAPTURE(v.detail);
                CHECK(false);
            }
            CHECK(check_global(g));
            CHECK(check_tail_constraints(g).empty());

            std::multiset<Rat> prim, fresh;
            for (const TailRecord& t : classify_tails(g)) {
                if (t.flavor == TailFlavor::PrimitiveEtale) prim.insert(t.sigma);
                if (t.flavor == TailFlavor::NewEtale) fresh.insert(t.sigma);
            }
            CHECK(prim == std::multiset<Rat>(c.primitive.begin(), c.primitive.end()));
            CHECK(fresh == std::multiset<Rat>(c.new_etale.begin(), c.new_etale.end()));
        }
    }
}

TEST_CASE("monotonicity diagnostics") {
    // inertia 2 -> 1 -> 2 chain: not monotonic, and with no etale tail in the
    // outward direction the configuration is self-contradictory
    StableGraph g;
    g.p = 5;
    g.n = 2;
    g.m_g = 1;
    auto comp = [&](const char* id, int inertia) {
        Vertex v;
        v.id = id;
        v.inertia = inertia;
        g.vertices.push_back(v);
    };
    comp("root", 2);
    comp("mid", 1);
    comp("deep", 2);
    comp("leaf", 1);
    auto link = [&](const char* id, const char* rid, const char* a, const char* b) {
        Edge e, f;
        e.id = id;
        f.id = rid;
        e.src = a;
        e.dst = b;
        e.opp = rid;
        f.src = b;
        f.dst = a;
        f.opp = id;
        g.edges.push_back(e);
        g.edges.push_back(f);
    };
    link("x1", "x1r", "root", "mid");
    link("x2", "x2r", "mid", "deep");
    link("x3", "x3r", "deep", "leaf");
    g.root = "root";

    CHECK(!is_monotonic(g, "root"));
    CHECK(is_monotonic(g, "deep"));
    auto msg = monotonic_inconsistency(g, "root");
    REQUIRE(msg);
    CHECK(!msg->empty());
    CHECK(!monotonic_inconsistency(g, "deep"));
}

TEST_CASE("monodromy report verdicts") {
    StableGraph pgl3 = load_graph(fixture("pgl3.json"));
    StableGraph tower = load_graph(fixture("sl2_tower.json"));

    MonodromyInputs in;
    in.e_abs = Rat(1);
    MonodromyReport r = monodromy_report(pgl3, in);
    CHECK(r.verdict == "potentially good reduction");
    CHECK(r.indices_prime_to_p);
    CHECK(!r.has_new_etale_tails);
    CHECK(r.below_threshold);
    CHECK(!r.exponent_bound);

    in.assert_center_prime_to_p = true;
    r = monodromy_report(pgl3, in);
    REQUIRE(r.exponent_bound);
    CHECK(*r.exponent_bound == 7); // p^(n-1) at p = 7, n = 2

    MonodromyInputs tin;
    tin.e_abs = Rat(1);
    tin.assert_center_prime_to_p = true;
    MonodromyReport t = monodromy_report(tower, tin);
    REQUIRE(t.exponent_bound);
    CHECK(*t.exponent_bound == 25); // p^(n-1) at p = 5, n = 3
    CHECK(t.has_new_etale_tails);
    CHECK(t.verdict == "inconclusive");

    tin.assert_bad_reduction = true;
    t = monodromy_report(tower, tin);
    CHECK(t.verdict == "nontrivial wild monodromy");

    // at the threshold exactly nothing follows
    tin.assert_bad_reduction = false;
    tin.e_abs = Rat(2);
    t = monodromy_report(tower, tin);
    CHECK(t.threshold_exact);
    CHECK(t.verdict == "inconclusive");

    // large e_abs: only the everywhere-tame criterion applies
    MonodromyInputs big;
    big.e_abs = Rat(10);
    r = monodromy_report(pgl3, big);
    CHECK(r.verdict == "trivial wild monodromy");

    // asserting bad reduction against an everywhere-tame graph contradicts
    MonodromyInputs contra;
    contra.e_abs = Rat(1);
    contra.assert_bad_reduction = true;
    r = monodromy_report(pgl3, contra);
    CHECK(r.inconsistent);
    CHECK(r.verdict == "inconsistent");
}

TEST_CASE("malformed documents are rejected or flagged") {
    nlohmann::json good = graph_to_json(load_graph(fixture("one_new_tail.json")));

    nlohmann::json no_root = good;
    no_root["root"] = "nope";
    CHECK(thrown_code([&] { graph_from_json(no_root); }) == "BadGraph");

    nlohmann::json bad_kind = good;
    bad_kind["vertices"][0]["kind"] = "mystery";
    CHECK(thrown_code([&] { graph_from_json(bad_kind); }) == "BadGraph");

    nlohmann::json bad_edge = good;
    bad_edge["edges"][0]["src"] = "ghost";
    CHECK(thrown_code([&] { graph_from_json(bad_edge); }) == "BadGraph");

    nlohmann::json bad_exp = good;
    for (auto& v : bad_exp["vertices"])
        if (v["kind"] == "wild_branch_point") v["branch_p_exp"] = 7;
    CHECK(thrown_code([&] { graph_from_json(bad_exp); }) == "BadGraph");

    nlohmann::json bad_sigma = good;
    bad_sigma["edges"][0]["sigma_eff"]["not-a-level"] = "1/2";
    CHECK(thrown_code([&] { graph_from_json(bad_sigma); }) == "BadGraph");

    // duplicate ids load fine but fail structural validation
    StableGraph dup = load_graph(fixture("one_new_tail.json"));
    dup.vertices.push_back(dup.vertices.back());
    auto rules = rule_names(validate(dup));
    REQUIRE(!rules.empty());
    CHECK(rules[0] == "well-formed");

    CHECK(thrown_code([] { load_graph("/nonexistent/graph.json"); }) == "BadGraph");
}
