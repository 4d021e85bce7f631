// Command line driver: group analysis, ramification-jump conversions,
// deformation-datum checks, dual-graph validation and enumeration, the
// worked Eisenstein-field example, and Hensel lifting for q^2 + q + 1.
//
// Exit codes: 0 all checks pass, 1 at least one check failed (or the input
// could not be loaded), 2 usage error.

#include "wildram/deformdata.hpp"
#include "wildram/errors.hpp"
#include "wildram/groups.hpp"
#include "wildram/padic.hpp"
#include "wildram/ramification.hpp"
#include "wildram/stablegraph.hpp"

#include <CLI11.hpp>
#include <fmt/core.h>
#include <fmt/ranges.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

using nlohmann::json;
using namespace wildram;

namespace {

bool g_json = false;

void emit(const json& doc, int failures) {
    json out = doc;
    out["failures"] = failures;
    fmt::print("{}\n", out.dump(2));
}

std::vector<Int> parse_int_list(const std::string& text) {
    std::vector<Int> out;
    std::string cur;
    for (char c : text + ",") {
        if (c == ',') {
            if (!cur.empty()) out.emplace_back(cur);
            cur.clear();
        } else if (!isspace((unsigned char)c)) {
            cur += c;
        }
    }
    return out;
}

std::string join_rats(const std::vector<Rat>& v, const char* sep = ", ") {
    std::string out;
    for (const Rat& r : v) out += (out.empty() ? "" : sep) + format_rat(r);
    return out;
}

json rats_to_json(const std::vector<Rat>& v) {
    json a = json::array();
    for (const Rat& r : v) a.push_back(format_rat(r));
    return a;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("BadInput", fmt::format("cannot open '{}'", path));
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        fail("BadInput", fmt::format("{}: {}", path, e.what()));
    }
    return j;
}

// ---------------------------------------------------------------------
// analyze-group
// ---------------------------------------------------------------------

int run_analyze_group(const std::string& spec_text, long p, const std::string& method,
                      long cap, bool quotient, const std::string& triple) {
    GroupSpec spec = GroupSpec::parse(spec_text);
    SylowMethod m = SylowMethod::Auto;
    if (method == "brute") m = SylowMethod::Brute;
    else if (method == "structural") m = SylowMethod::Structural;

    SylowAnalysis a = sylow_analyze(spec, p, m, cap);
    int failures = 0;
    json doc{{"command", "analyze-group"}, {"group", spec.describe()}, {"p", p}};
    doc["order"] = a.group_order.get_str();
    doc["n"] = a.n;
    doc["cyclic"] = a.is_cyclic;
    doc["m_G"] = a.m;
    doc["center_has_p"] = a.center_has_p;
    doc["method"] = a.structural ? "structural" : "exhaustive";

    if (!g_json) {
        fmt::print("group: {}  (order {})\n", spec.describe(), a.group_order.get_str());
        fmt::print("p-Sylow analysis at p={}: n={}, {}, m_G={}, center {} p-torsion  [{}]\n",
                   p, a.n, a.is_cyclic ? "cyclic" : "not cyclic", a.m,
                   a.center_has_p ? "has" : "has no",
                   a.structural ? "structural" : "exhaustive");
    }
    if (a.is_cyclic && a.n >= 1 && (p - 1) % a.m != 0) {
        ++failures;
        if (!g_json)
            fmt::print("FAIL: m_G={} does not divide p-1={}\n", a.m, p - 1);
        doc["m_divides_p_minus_1"] = false;
    }

    if (quotient) {
        QuotientReport q = quotient_structure(spec, p, cap);
        doc["quotient"] = {{"group_order", q.group_order.get_str()},
                           {"prime_to_p_kernel", q.n_order.get_str()},
                           {"quotient_order", q.quotient_order.get_str()},
                           {"n", q.n},
                           {"m", q.m},
                           {"action_order", q.action_order},
                           {"shape", q.shape}};
        if (!g_json)
            fmt::print(
                "quotient by the maximal normal prime-to-p subgroup (order {}): "
                "order {}, shape {}\n",
                q.n_order.get_str(), q.quotient_order.get_str(), q.shape);
    }

    if (!triple.empty()) {
        if (spec.kind != GroupSpec::Kind::SL2)
            fail("BadInput", "--triple applies to sl2 group specs only");
        auto orders_raw = parse_int_list(triple);
        if (orders_raw.size() != 3) fail("BadInput", "--triple needs three orders a,b,c");
        std::array<long, 3> orders{orders_raw[0].get_si(), orders_raw[1].get_si(),
                                   orders_raw[2].get_si()};
        MatrixTriple t = find_sl2_triple(spec.q, orders, cap);
        doc["triple"] = {{"alpha", t.alpha},
                         {"beta", t.beta},
                         {"orders", t.orders},
                         {"trace_beta", t.tau},
                         {"trace_alpha_beta", t.rho},
                         {"generation_verified", t.generation_verified_exhaustively}};
        if (!g_json) {
            fmt::print("triple of orders ({}, {}, {}) in SL2({}):\n", orders[0], orders[1],
                       orders[2], spec.q);
            fmt::print("  alpha = [[{}, {}], [{}, {}]]\n", t.alpha[0], t.alpha[1],
                       t.alpha[2], t.alpha[3]);
            fmt::print("  beta  = [[{}, {}], [{}, {}]]  (tr beta = {}, tr alpha*beta = {})\n",
                       t.beta[0], t.beta[1], t.beta[2], t.beta[3], t.tau, t.rho);
            fmt::print("  generation verified: {}\n",
                       t.generation_verified_exhaustively ? "exhaustively" : "structurally");
        }
    }

    if (g_json) emit(doc, failures);
    return failures ? 1 : 0;
}

// ---------------------------------------------------------------------
// ram
// ---------------------------------------------------------------------

int run_ram(long p, int n, long m, const std::string& lower_text,
            const std::string& upper_text) {
    if (lower_text.empty() == upper_text.empty())
        fail("BadInput", "give exactly one of --lower or --upper");

    RamFiltration f;
    if (!lower_text.empty())
        f = RamFiltration{p, n, m, parse_int_list(lower_text)};
    else
        f = upper_to_lower(p, n, m, parse_rat_list(upper_text));
    if ((int)f.lower_jumps.size() != n)
        fail("BadInput", fmt::format("expected {} jumps, got {}", n, f.lower_jumps.size()));
    validate(f);
    UpperJumps upper = lower_to_upper(f);

    Int diff_lower = different_degree_lower(f);
    Int diff_upper = different_degree_upper(p, n, m, upper);
    Rat cond = conductor(f);
    bool hasse_arf = validate_hasse_arf(upper, m);

    int failures = 0;
    if (diff_lower != diff_upper) ++failures;
    if (cond != conductor_weighted(f)) ++failures;
    if (!hasse_arf) ++failures;

    json doc{{"command", "ram"}, {"p", p}, {"n", n}, {"m", m}};
    doc["lower"] = json::array();
    for (const Int& j : f.lower_jumps) doc["lower"].push_back(j.get_str());
    doc["upper"] = rats_to_json(upper);
    doc["conductor"] = format_rat(cond);
    doc["different"] = diff_lower.get_str();
    doc["hasse_arf"] = hasse_arf;

    if (g_json) {
        emit(doc, failures);
    } else {
        std::string lows;
        for (const Int& j : f.lower_jumps)
            lows += (lows.empty() ? "" : ", ") + j.get_str();
        fmt::print("ramification filtration: p={}, n={}, m={}\n", p, n, m);
        fmt::print("  lower jumps: {}\n", lows);
        fmt::print("  upper jumps: {}\n", join_rats(upper));
        fmt::print("  conductor: {}\n", format_rat(cond));
        fmt::print("  different degree: {} (lower) / {} (upper)\n", diff_lower.get_str(),
                   diff_upper.get_str());
        fmt::print("  upper-numbering integrality: {}\n", hasse_arf ? "ok" : "VIOLATED");
        if (failures) fmt::print("FAIL: {} internal identity checks failed\n", failures);
    }
    return failures ? 1 : 0;
}

// ---------------------------------------------------------------------
// datum check
// ---------------------------------------------------------------------

int check_one_datum(const DeformationDatum& d, const std::string& label, json& items) {
    int failures = 0;
    json entry{{"label", label}};
    entry["violations"] = json::array();
    for (const Violation& v : wildram::validate(d)) {
        ++failures;
        entry["violations"].push_back({{"rule", v.rule}, {"detail", v.detail}});
        if (!g_json) fmt::print("  {}: [{}] {}\n", label, v.rule, v.detail);
    }
    Rat lhs = local_raw_lhs(d);
    bool local_ok = check_local_raw(d);
    entry["local_sum"] = format_rat(lhs);
    entry["local_identity"] = local_ok;
    if (!local_ok) {
        ++failures;
        if (!g_json)
            fmt::print("  {}: [local-identity] sum {} != 2 g_W - 2 = {}\n", label,
                       format_rat(lhs), 2 * d.base_genus - 2);
    }
    try {
        auto [hur, dif] = genus_consistency(d);
        entry["hurwitz_2g_minus_2"] = hur.get_str();
        entry["differential_2g_minus_2"] = dif.get_str();
        if (hur != dif) {
            ++failures;
            if (!g_json)
                fmt::print("  {}: [genus-consistency] Hurwitz {} vs differential {}\n",
                           label, hur.get_str(), dif.get_str());
        }
    } catch (const ToolkitError& e) {
        ++failures;
        entry["genus_error"] = e.what();
        if (!g_json) fmt::print("  {}: [{}] {}\n", label, e.code(), e.what());
    }
    if (failures == 0 && !g_json) fmt::print("  {}: ok\n", label);
    items.push_back(std::move(entry));
    return failures;
}

int run_datum_check(const std::string& path) {
    json j = load_json_file(path);
    json doc{{"command", "datum-check"}, {"file", path}};
    doc["data"] = json::array();
    int failures = 0;

    if (j.contains("vertices")) {
        StableGraph g = graph_from_json(j);
        if (!g_json) fmt::print("deformation data in {}:\n", path);
        long count = 0;
        for (const Vertex& v : g.vertices) {
            for (size_t i = 0; i < v.deformation_data.size(); ++i) {
                ++count;
                failures += check_one_datum(v.deformation_data[i],
                                            fmt::format("vertex {} datum {}", v.id, i + 1),
                                            doc["data"]);
            }
        }
        if (!g_json && count == 0) fmt::print("  (no deformation data attached)\n");
    } else {
        if (!g_json) fmt::print("deformation datum in {}:\n", path);
        failures += check_one_datum(datum_from_json(j, 0), "datum", doc["data"]);
    }

    if (g_json)
        emit(doc, failures);
    else
        fmt::print("{}\n", failures ? fmt::format("FAIL: {} violations", failures)
                                    : "all checks passed");
    return failures ? 1 : 0;
}

// ---------------------------------------------------------------------
// graph check / enumerate / report
// ---------------------------------------------------------------------

const char* flavor_name(TailFlavor f) {
    switch (f) {
        case TailFlavor::PrimitiveEtale: return "primitive etale";
        case TailFlavor::NewEtale: return "new etale";
        case TailFlavor::NewInseparable: return "new inseparable";
        case TailFlavor::InseparableWithBranch: return "inseparable with branch point";
    }
    return "?";
}

int run_graph_check(const std::string& path, std::optional<int> alpha) {
    StableGraph g = load_graph(path);
    int failures = 0;
    json doc{{"command", "graph-check"}, {"file", path},
             {"p", g.p}, {"n", g.n}, {"m_G", g.m_g}, {"g_X", g.g_x}};
    doc["violations"] = json::array();

    if (!g_json)
        fmt::print("graph: {} (p={}, n={}, m_G={}, g_X={}; {} vertices, {} edges)\n", path,
                   g.p, g.n, g.m_g, g.g_x, g.vertices.size(), g.edges.size() / 2);

    auto report = [&](const char* stage, const std::vector<Violation>& vs) {
        for (const Violation& v : vs) {
            ++failures;
            doc["violations"].push_back(
                {{"stage", stage}, {"rule", v.rule}, {"detail", v.detail}});
            if (!g_json) fmt::print("  [{}] {}\n", v.rule, v.detail);
        }
    };
    report("structure", validate(g));

    bool structurally_ok = failures == 0;
    if (structurally_ok) {
        try {
            report("tails", check_tail_constraints(g));
        } catch (const ToolkitError& e) {
            ++failures;
            doc["violations"].push_back(
                {{"stage", "tails"}, {"rule", e.code()}, {"detail", e.what()}});
            if (!g_json) fmt::print("  [{}] {}\n", e.code(), e.what());
        }
    }

    if (structurally_ok && failures == 0) {
        doc["tails"] = json::array();
        for (const TailRecord& t : classify_tails(g)) {
            doc["tails"].push_back({{"vertex", t.vertex},
                                    {"flavor", flavor_name(t.flavor)},
                                    {"inertia", t.r_prime},
                                    {"adjoins_inertia", t.r},
                                    {"sigma", format_rat(t.sigma)},
                                    {"truncated", rats_to_json(t.truncated)}});
            if (!g_json)
                fmt::print("  tail {}: {} (inertia {} on inertia-{} component), "
                           "sigma_b = {}\n",
                           t.vertex, flavor_name(t.flavor), t.r_prime, t.r,
                           format_rat(t.sigma));
        }
        bool mono = is_monotonic(g, g.root);
        doc["monotonic_from_root"] = mono;
        if (!g_json) fmt::print("  monotonic from the root: {}\n", mono ? "yes" : "no");
        if (auto msg = monotonic_inconsistency(g, g.root)) {
            ++failures;
            doc["violations"].push_back(
                {{"stage", "monotonic"}, {"rule", "monotonic-required"}, {"detail", *msg}});
            if (!g_json) fmt::print("  [monotonic-required] {}\n", *msg);
        }
    }

    if (alpha) {
        try {
            GeneralizedCheck c = check_generalized(g, *alpha);
            const char* status =
                c.status == GeneralizedCheck::Status::HoldsWithEquality ? "equality"
                : c.status == GeneralizedCheck::Status::HoldsStrict     ? "strict"
                                                                        : "VIOLATED";
            doc["generalized"] = {{"alpha", *alpha},
                                  {"lhs", format_rat(c.lhs)},
                                  {"rhs", format_rat(c.rhs)},
                                  {"nodes", c.node_count},
                                  {"level_components", c.components},
                                  {"contains_root", c.contains_root},
                                  {"expected_slack", format_rat(c.expected_slack)},
                                  {"slack_matches", c.slack_matches},
                                  {"status", status}};
            if (!g_json)
                fmt::print("  truncated identity at alpha={}: lhs {} vs rhs {} over {} "
                           "nodes [{}; slack {} {}]\n",
                           *alpha, format_rat(c.lhs), format_rat(c.rhs), c.node_count,
                           status, format_rat(c.expected_slack),
                           c.slack_matches ? "as predicted" : "UNEXPLAINED");
            if (c.status == GeneralizedCheck::Status::Fails || !c.slack_matches) ++failures;
        } catch (const ToolkitError& e) {
            ++failures;
            doc["violations"].push_back(
                {{"stage", "generalized"}, {"rule", e.code()}, {"detail", e.what()}});
            if (!g_json) fmt::print("  [{}] {}\n", e.code(), e.what());
        }
    }

    if (g_json)
        emit(doc, failures);
    else
        fmt::print("{}\n", failures ? fmt::format("FAIL: {} violations", failures)
                                    : "all checks passed");
    return failures ? 1 : 0;
}

int run_graph_enumerate(long p, int n, long m, int wild) {
    if (n < 1) fail("BadInput", fmt::format("n={} must be at least 1", n));
    auto configs = enumerate_tail_configs(p, m, wild);
    json doc{{"command", "graph-enumerate"}, {"p", p}, {"n", n}, {"m", m},
             {"wild_branch", wild}};
    doc["configurations"] = json::array();
    for (const TailConfig& c : configs)
        doc["configurations"].push_back(
            {{"primitive", rats_to_json(c.primitive)}, {"new", rats_to_json(c.new_etale)}});
    if (g_json) {
        emit(doc, 0);
    } else {
        fmt::print("{} admissible etale tail configurations (p={}, m={}, {} wild branch "
                   "points):\n",
                   configs.size(), p, m, wild);
        for (size_t i = 0; i < configs.size(); ++i) {
            const TailConfig& c = configs[i];
            fmt::print("  {:2}. primitive: {:<24} new: {}\n", i + 1,
                       c.primitive.empty() ? "(none)" : join_rats(c.primitive),
                       c.new_etale.empty() ? "(none)" : join_rats(c.new_etale));
        }
    }
    return 0;
}

int run_graph_report(const std::string& path, const std::string& e_abs, bool bad_reduction,
                     bool center_prime_to_p) {
    StableGraph g = load_graph(path);
    MonodromyInputs in;
    in.e_abs = parse_rat(e_abs);
    in.assert_bad_reduction = bad_reduction;
    in.assert_center_prime_to_p = center_prime_to_p;
    MonodromyReport r = monodromy_report(g, in);

    json doc{{"command", "graph-report"}, {"file", path}, {"e_abs", format_rat(in.e_abs)}};
    doc["indices_prime_to_p"] = r.indices_prime_to_p;
    doc["has_new_etale_tails"] = r.has_new_etale_tails;
    doc["below_threshold"] = r.below_threshold;
    doc["wild_monodromy_trivial"] = r.wild_monodromy_trivial;
    doc["wild_monodromy_nontrivial"] = r.wild_monodromy_nontrivial;
    doc["potentially_good"] = r.potentially_good;
    doc["verdict"] = r.verdict;
    if (r.exponent_bound) doc["exponent_bound"] = r.exponent_bound->get_str();
    doc["notes"] = r.notes;

    if (!g_json) {
        fmt::print("monodromy report: {}\n", path);
        fmt::print("  branch indices prime to p: {}\n", r.indices_prime_to_p ? "yes" : "no");
        fmt::print("  new etale tails: {}\n", r.has_new_etale_tails ? "present" : "none");
        fmt::print("  e_abs = {} below (p-1)/m_G = {}/{}: {}\n", format_rat(in.e_abs),
                   g.p - 1, g.m_g, r.below_threshold ? "yes" : "no");
        if (r.exponent_bound)
            fmt::print("  wild monodromy exponent bound: {}\n", r.exponent_bound->get_str());
        for (const std::string& n : r.notes) fmt::print("  note: {}\n", n);
        fmt::print("  verdict: {}\n", r.verdict);
    } else {
        emit(doc, r.inconsistent ? 1 : 0);
    }
    return r.inconsistent ? 1 : 0;
}

// ---------------------------------------------------------------------
// appendix-a
// ---------------------------------------------------------------------

struct RefCheck {
    std::string name;
    bool comparable = false;
    bool matches = false;
    std::string detail;
};

RefCheck compare_expansion(const char* name, const EisensteinElem& x, const EisExact& ref,
                           long needed) {
    RefCheck rc;
    rc.name = name;
    if (x.precision() < needed) {
        rc.detail = fmt::format("needs precision {} but only {} available", needed,
                                x.precision());
        return rc;
    }
    rc.comparable = true;
    long best = -1;
    int best_sign = 1;
    for (int sign : {1, -1}) {
        EisExact signed_ref = sign == 1 ? ref : -ref;
        EisensteinElem diff = x - EisensteinElem::from_exact(signed_ref, x.precision());
        long v = diff.val_lower_bound();
        if (v > best) {
            best = v;
            best_sign = sign;
        }
    }
    rc.matches = best >= needed;
    rc.detail = fmt::format("closest sign {}: v(computed - reference) {}= {} pi-units, "
                            "agreement to pi^{} {}",
                            best_sign == 1 ? "+" : "-",
                            best >= (long)x.precision() ? ">" : "", best, needed,
                            rc.matches ? "holds" : "FAILS");
    return rc;
}

int run_appendix_a(long r, long prec, bool strict) {
    if (r != 2 && r != 3)
        fail("BadInput", "the worked example is stated for r in {2, 3}");
    if (prec < 2) fail("BadInput", "need at least two coefficient digits (--prec >= 2)");

    WorkedExampleReport rep = run_worked_example(r, prec);
    const EisensteinElem& g = rep.g;
    json doc{{"command", "appendix-a"}, {"r", r}, {"prec", prec}};

    auto coeffs_str = [](const EisensteinElem& x) {
        std::string s;
        for (size_t i = 0; i < x.coeffs().size(); ++i) {
            if (i && x.coeffs()[i] == 0) continue;
            if (!s.empty()) s += " + ";
            s += x.coeffs()[i].get_str();
            if (i == 1) s += " pi";
            if (i > 1) s += fmt::format(" pi^{}", i);
        }
        return s;
    };

    if (!g_json) {
        fmt::print("field: Q_5(pi), pi^5 = 5; g(d) with d = (10/{}) pi^2, c = -5/{}\n", r, r);
        fmt::print("g  = {}   (coefficients mod 5^{})\n", coeffs_str(g), prec);
        fmt::print("   digits: {}\n", fmt::join(g.digits(g.precision()), " "));
    }
    doc["g_coeffs"] = json::array();
    for (const Int& c : g.coeffs()) doc["g_coeffs"].push_back(c.get_str());
    doc["g_digits"] = g.digits(g.precision());

    int failures = 0;
    doc["is_fifth_power"] = rep.fifth.is_power;
    doc["is_twentyfifth_power"] = rep.twentyfifth.is_power;
    if (!rep.fifth.is_power) ++failures; // expected: g is a 5th power
    if (rep.twentyfifth.is_power) ++failures; // expected: but not a 25th power

    std::optional<EisensteinElem> delta = rep.fifth.witness;
    if (!g_json) {
        fmt::print("g is a 5th power: {}\n", rep.fifth.is_power ? "yes" : "NO");
        if (delta) {
            fmt::print("delta = g^(1/5) = {}   (mod pi^{})\n", coeffs_str(*delta),
                       delta->precision());
            fmt::print("   digits: {}\n", fmt::join(delta->digits(delta->precision()), " "));
        }
        fmt::print("g is a 25th power: {}\n", rep.twentyfifth.is_power ? "YES" : "no");
        fmt::print("congruence transcript for the 25th-power test:\n");
        for (const CertStep& s : rep.twentyfifth.steps)
            fmt::print("  [{}] {}  [{}]\n", s.name, s.equation, s.ok ? "ok" : "obstruction");
    }
    if (delta) {
        doc["delta_coeffs"] = json::array();
        for (const Int& c : delta->coeffs()) doc["delta_coeffs"].push_back(c.get_str());
        doc["delta_digits"] = delta->digits(delta->precision());
    }
    doc["transcript"] = json::array();
    for (const CertStep& s : rep.twentyfifth.steps)
        doc["transcript"].push_back({{"name", s.name},
                                     {"equation", s.equation},
                                     {"lhs", s.lhs.get_str()},
                                     {"rhs", s.rhs.get_str()},
                                     {"modulus", s.modulus.get_str()},
                                     {"ok", s.ok}});

    // Reference expansions as printed in the source being reproduced:
    //   g     = +-(1 - 3*5^(11/5) - 4*5^2)   to 5^(9/4)  (pi^11.25 -> pi^12)
    //   delta = +-(1 - 3*5^(6/5)  - 4*5)     to 5^(5/4)  (pi^6.25  -> pi^7)
    //   transcript: beta = 3 and final congruence lhs 14 (mod 25)
    std::vector<RefCheck> refs;
    {
        EisExact pi = EisExact::pi(5, 5);
        EisExact gref = EisExact::from_rational(5, 5, Rat(1 - 100)) -
                        EisExact::from_rational(5, 5, Rat(3)) * pi.pow(11);
        refs.push_back(compare_expansion("g reference expansion", g, gref, 12));
        if (delta) {
            EisExact dref = EisExact::from_rational(5, 5, Rat(1 - 20)) -
                            EisExact::from_rational(5, 5, Rat(3)) * pi.pow(6);
            refs.push_back(compare_expansion("delta reference expansion", *delta, dref, 7));
        }
        RefCheck beta{"transcript beta digit", false, false, "step layer2.beta not found"};
        RefCheck final{"transcript final congruence", false, false,
                       "step layer2.unit not found"};
        for (const CertStep& s : rep.twentyfifth.steps) {
            if (s.name == "layer2.beta") {
                beta.comparable = true;
                beta.matches = s.lhs == 3;
                beta.detail = fmt::format("computed beta = {}, reference prints 3{}",
                                          s.lhs.get_str(), beta.matches ? "" : "; FAILS");
            }
            if (s.name == "layer2.unit") {
                final.comparable = true;
                final.matches = s.lhs == 14 && s.rhs == 19;
                final.detail = fmt::format(
                    "computed congruence has lhs {} against rhs {} (mod {}); the "
                    "reference prints lhs 14{}",
                    s.lhs.get_str(), s.rhs.get_str(), s.modulus.get_str(),
                    final.matches ? "" : "; FAILS");
            }
        }
        refs.push_back(beta);
        refs.push_back(final);
    }

    int ref_mismatches = 0;
    doc["reference_checks"] = json::array();
    if (!g_json) fmt::print("reference expansion comparison:\n");
    for (const RefCheck& rc : refs) {
        bool bad = rc.comparable && !rc.matches;
        if (bad) ++ref_mismatches;
        doc["reference_checks"].push_back({{"name", rc.name},
                                           {"comparable", rc.comparable},
                                           {"matches", rc.matches},
                                           {"detail", rc.detail}});
        if (!g_json)
            fmt::print("  {}: {}\n", rc.name,
                       rc.comparable ? rc.detail : "skipped (" + rc.detail + ")");
    }
    doc["reference_mismatches"] = ref_mismatches;
    if (!g_json && ref_mismatches)
        fmt::print("note: the computed expansions disagree with the printed reference in "
                   "{} place(s); the power/non-power verdicts still agree\n",
                   ref_mismatches);

    if (strict) failures += ref_mismatches;
    if (g_json) emit(doc, failures);
    return failures ? 1 : 0;
}

// ---------------------------------------------------------------------
// hensel
// ---------------------------------------------------------------------

int run_hensel(long p, int n, bool smallest) {
    std::vector<Int> roots = hensel_qsolve(Int(p), n);
    std::vector<Int> classes;
    for (const Int& r : roots) classes.emplace_back(r % p);
    std::sort(classes.begin(), classes.end());
    json doc{{"command", "hensel"}, {"p", p}, {"n", n}};
    doc["roots"] = json::array();
    for (const Int& r : roots) doc["roots"].push_back(r.get_str());
    doc["classes_mod_p"] = json::array();
    for (const Int& c : classes) doc["classes_mod_p"].push_back(c.get_str());
    if (!g_json) {
        std::string rs, cs;
        for (const Int& r : roots) rs += (rs.empty() ? "" : ", ") + r.get_str();
        for (const Int& c : classes) cs += (cs.empty() ? "" : ", ") + c.get_str();
        fmt::print("x^2 + x + 1 = 0 (mod {}^{}): x = {}\n", p, n, rs);
        fmt::print("classes mod {}: {}\n", p, cs);
    }
    if (smallest) {
        Int q = smallest_prime_power_solution(Int(p), n);
        doc["smallest_prime_power"] = q.get_str();
        if (!g_json)
            fmt::print("smallest prime power q with q^2 + q + 1 = 0 (mod {}^{}): {}\n", p,
                       n, q.get_str());
    }
    if (g_json) emit(doc, 0);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact-arithmetic toolkit for ramification jumps, deformation data, and "
                 "dual-graph identities of wildly ramified covers"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_flag("--json", g_json, "emit machine-readable JSON instead of text");

    int code = 0;
    auto run = [&code](std::function<int()> f) {
        return [&code, f = std::move(f)]() { code = f(); };
    };

    // analyze-group
    std::string ag_spec, ag_method = "auto", ag_triple;
    long ag_p = 0, ag_cap = 2000000;
    bool ag_quotient = false;
    auto* ag = app.add_subcommand("analyze-group",
                                  "p-Sylow invariants of a finite group given by a spec "
                                  "string (sl2 q=11 | pgl3 q=2 | perm ... | cyclic k | "
                                  "semidirect a b action=c | product ... | ...)");
    ag->add_option("spec", ag_spec, "group spec text")->required();
    ag->add_option("--p", ag_p, "the prime p")->required();
    ag->add_option("--method", ag_method, "auto|brute|structural")
        ->check(CLI::IsMember({"auto", "brute", "structural"}));
    ag->add_option("--cap", ag_cap, "element enumeration cap");
    ag->add_flag("--quotient", ag_quotient,
                 "also mod out the maximal normal prime-to-p subgroup");
    ag->add_option("--triple", ag_triple,
                   "find SL2 generators with these element orders a,b,c");
    ag->callback(run([&] {
        return run_analyze_group(ag_spec, ag_p, ag_method, ag_cap, ag_quotient, ag_triple);
    }));

    // ram
    long ram_p = 0, ram_m = 1;
    int ram_n = 0;
    std::string ram_lower, ram_upper;
    auto* ram = app.add_subcommand("ram", "ramification filtration calculator");
    ram->add_option("--p", ram_p, "residue characteristic")->required();
    ram->add_option("--n", ram_n, "number of wild jumps")->required();
    ram->add_option("--m", ram_m, "tame part order");
    ram->add_option("--lower", ram_lower, "lower jumps j1,j2,...");
    ram->add_option("--upper", ram_upper, "upper jumps u1,u2,... (rationals a/b)");
    ram->callback(run([&] { return run_ram(ram_p, ram_n, ram_m, ram_lower, ram_upper); }));

    // datum check
    auto* datum = app.add_subcommand("datum", "deformation datum checks");
    datum->require_subcommand(1);
    std::string datum_file;
    auto* dc = datum->add_subcommand("check", "validate a datum file or every datum "
                                              "attached to a graph file");
    dc->add_option("file", datum_file, "JSON document")->required();
    dc->callback(run([&] { return run_datum_check(datum_file); }));

    // graph check|enumerate|report
    auto* graph = app.add_subcommand("graph", "dual-graph operations");
    graph->require_subcommand(1);

    std::string gc_file;
    int gc_alpha = -1;
    auto* gc = graph->add_subcommand("check", "validate a dual-graph JSON document");
    gc->add_option("file", gc_file, "graph JSON document")->required();
    auto* gc_alpha_opt =
        gc->add_option("--alpha", gc_alpha, "also check the truncated identity at this level");
    gc->callback(run([&] {
        return run_graph_check(gc_file, *gc_alpha_opt ? std::optional<int>(gc_alpha)
                                                      : std::nullopt);
    }));

    long ge_p = 0, ge_m = 1;
    int ge_n = 1, ge_wild = 0;
    auto* ge = graph->add_subcommand("enumerate",
                                     "enumerate admissible etale tail configurations");
    ge->add_option("--p", ge_p, "residue characteristic")->required();
    ge->add_option("--n", ge_n, "p-Sylow exponent (the configurations are the same at "
                                "every level)");
    ge->add_option("--m", ge_m, "m_G")->required();
    ge->add_option("--wild-branch", ge_wild, "number of wild branch points (0..3)");
    ge->callback(run([&] { return run_graph_enumerate(ge_p, ge_n, ge_m, ge_wild); }));

    std::string gr_file, gr_eabs;
    bool gr_bad = false, gr_center = false;
    auto* gr = graph->add_subcommand("report", "monodromy triviality/size report");
    gr->add_option("file", gr_file, "graph JSON document")->required();
    gr->add_option("--e-abs", gr_eabs, "absolute ramification index (rational a/b)")
        ->required();
    gr->add_flag("--bad-reduction", gr_bad, "assert that the cover has bad reduction");
    gr->add_flag("--center-prime-to-p", gr_center,
                 "assert that p does not divide the order of the center");
    gr->callback(run([&] {
        return run_graph_report(gr_file, gr_eabs, gr_bad, gr_center);
    }));

    // appendix-a
    long aa_r = 2, aa_prec = 3;
    bool aa_strict = false;
    auto* aa = app.add_subcommand("appendix-a",
                                  "worked example over Q_5(5^(1/5)): evaluate g(d), "
                                  "extract the 5th root, test 25th-power membership");
    aa->add_option("--r", aa_r, "ramification index parameter (2 or 3)");
    aa->add_option("--prec", aa_prec, "coefficient precision (digits base 5)");
    aa->add_flag("--strict", aa_strict,
                 "exit nonzero when the computed expansions disagree with the printed "
                 "reference values");
    aa->callback(run([&] { return run_appendix_a(aa_r, aa_prec, aa_strict); }));

    // hensel
    long h_p = 0;
    int h_n = 1;
    bool h_smallest = false;
    auto* h = app.add_subcommand("hensel", "solve x^2 + x + 1 = 0 modulo p^n");
    h->add_option("--p", h_p, "odd prime, p = 1 mod 3")->required();
    h->add_option("--n", h_n, "lifting exponent");
    h->add_flag("--smallest-prime-power", h_smallest,
                "also search for the least prime power q with q^2 + q + 1 = 0 mod p^n");
    h->callback(run([&] { return run_hensel(h_p, h_n, h_smallest); }));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const ToolkitError& e) {
        fmt::print(stderr, "error [{}]: {}\n", e.code(), e.what());
        return 1;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
    return code;
}
