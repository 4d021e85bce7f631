#include "wildram/deformdata.hpp"

#include "wildram/errors.hpp"

#include <fmt/core.h>
#include <nlohmann/json.hpp>

#include <numeric>

namespace wildram {

namespace {

bool is_prime_long(long n) {
    if (n < 2) return false;
    Int z = n;
    return mpz_probab_prime_p(z.get_mpz_t(), 30) != 0;
}

Rat make_rat(const Int& num, const Int& den) {
    Rat q(num, den);
    q.canonicalize();
    return q;
}

} // namespace

Rat CriticalPoint::sigma() const { return make_rat(h, Int(m)); }

TorsorReduction classify_torsor(const Rat& delta, long e, long p) {
    if (e < 1) fail("BadArgument", fmt::format("e={} must be positive", e));
    if (!is_prime_long(p)) fail("BadArgument", fmt::format("p={} is not prime", p));
    if (delta < 0 || delta > 1)
        fail("InvalidDelta", fmt::format("delta={} outside [0, 1]", format_rat(delta)));

    TorsorReduction t;
    t.delta = delta;
    t.e = e;
    t.p = p;
    if (delta == 1) {
        t.classification = TorsorClass::Multiplicative;
        return t;
    }
    // delta = 1 - n (p-1)/e for an integer 0 < n <= e/(p-1).
    Rat n = (Rat(1) - delta) * make_rat(Int(e), Int(p - 1));
    if (!is_integer(n) || n <= 0)
        fail("InvalidDelta",
             fmt::format("delta={} gives n={}, not a positive integer",
                         format_rat(delta), format_rat(n)));
    if (n * (p - 1) > e)
        fail("InvalidDelta",
             fmt::format("delta={} gives n={} > e/(p-1)", format_rat(delta),
                         format_rat(n)));
    t.n_param = n.get_num();
    t.classification = delta == 0 ? TorsorClass::Etale : TorsorClass::Additive;
    return t;
}

bool check_denominators(const DeformationDatum& d) {
    for (const CriticalPoint& pt : d.points) {
        if (pt.kind != PointKind::Tame) continue;
        if (!denominator_divides(pt.sigma(), Int(d.mu))) return false;
    }
    return true;
}

Rat local_raw_lhs(const DeformationDatum& d) {
    Rat lhs = 0;
    for (const CriticalPoint& pt : d.points) {
        if (pt.kind == PointKind::Tame) {
            lhs += pt.sigma() - 1;
            continue;
        }
        Rat term = pt.sigma() / pow_int(Int(d.p), (unsigned long)pt.n_w) - 1;
        Int pk = 1;
        for (int i = 1; i <= pt.n_w; ++i) {
            pk *= d.p;
            term -= make_rat(Int(d.p - 1), pk) * pt.wild_sigmas[(size_t)i - 1];
        }
        lhs += term;
    }
    return lhs;
}

bool check_local_raw(const DeformationDatum& d) {
    return local_raw_lhs(d) == Rat(2 * d.base_genus - 2);
}

std::pair<Int, Int> genus_consistency(const DeformationDatum& d) {
    const Rat deg(d.cover_degree);
    Rat hurwitz = deg * Rat(2 * d.base_genus - 2);
    Rat differential = 0;
    for (const CriticalPoint& pt : d.points) {
        if (pt.kind == PointKind::Tame) {
            Rat share = deg / pt.m;
            hurwitz += share * (pt.m - 1);
            differential += share * Rat(pt.h - 1);
            continue;
        }
        // Wild point: the local group has order p^{n_w} m and its different
        // degree comes from the jump filtration j_i = m * sigma_{i,w}.
        RamFiltration f;
        f.p = d.p;
        f.n = pt.n_w;
        f.m = pt.m;
        for (const Rat& s : pt.wild_sigmas) {
            Rat j = s * pt.m;
            if (!is_integer(j))
                fail("NonIntegralGenus",
                     fmt::format("point {}: sigma={} times m={} is not an "
                                 "integral jump",
                                 pt.name, format_rat(s), pt.m));
            f.lower_jumps.push_back(j.get_num());
        }
        Rat share = deg / (pow_int(Int(d.p), (unsigned long)pt.n_w) * pt.m);
        hurwitz += share * Rat(different_degree_lower(f));
        differential += share * Rat(pt.h - 1);
    }
    if (!is_integer(hurwitz))
        fail("NonIntegralGenus",
             fmt::format("Hurwitz side 2g-2 = {} is not an integer",
                         format_rat(hurwitz)));
    if (!is_integer(differential))
        fail("NonIntegralGenus",
             fmt::format("differential side 2g-2 = {} is not an integer",
                         format_rat(differential)));
    return {hurwitz.get_num(), differential.get_num()};
}

bool node_compatibility(const std::vector<Int>& upper_h,
                        const std::vector<Int>& lower_h, int r, int r_prime,
                        const RamFiltration& node_filtration) {
    if (r < 0 || r_prime < 0 || r < r_prime)
        fail("LengthMismatch", fmt::format("need r >= r' >= 0, got r={} r'={}", r, r_prime));
    if ((int)upper_h.size() != r)
        fail("LengthMismatch",
             fmt::format("upper side lists {} signatures, expected r={}",
                         upper_h.size(), r));
    if ((int)lower_h.size() != r_prime)
        fail("LengthMismatch",
             fmt::format("lower side lists {} signatures, expected r'={}",
                         lower_h.size(), r_prime));
    if (node_filtration.n != r - r_prime)
        fail("LengthMismatch",
             fmt::format("node filtration depth {} != r - r' = {}",
                         node_filtration.n, r - r_prime));
    // (i) levels above the node's own depth mirror the lower side's data.
    for (int ip = 1; ip <= r_prime; ++ip) {
        if (upper_h[(size_t)(ip + r - r_prime) - 1] != -lower_h[(size_t)ip - 1])
            return false;
    }
    // (ii) the bottom r - r' levels reproduce the node's lower jumps.
    for (int i = 1; i <= r - r_prime; ++i) {
        if (upper_h[(size_t)i - 1] != node_filtration.lower_jumps[(size_t)i - 1])
            return false;
    }
    return true;
}

std::vector<Violation> validate(const DeformationDatum& d) {
    std::vector<Violation> out;
    auto bad = [&](const char* rule, std::string detail) {
        out.push_back({rule, std::move(detail)});
    };

    if (!is_prime_long(d.p)) bad("p-prime", fmt::format("p={} is not prime", d.p));
    if (d.mu < 1) bad("mu-positive", fmt::format("mu={}", d.mu));
    if (d.base_genus < 0) bad("genus-nonnegative", fmt::format("g_W={}", d.base_genus));
    if (d.cover_degree < 1) bad("positive-degree", fmt::format("d={}", d.cover_degree.get_str()));

    for (const CriticalPoint& pt : d.points) {
        if (pt.m < 1 || (d.p >= 2 && pt.m % d.p == 0))
            bad("m-prime-to-p", fmt::format("point {}: m={} at p={}", pt.name, pt.m, d.p));
        if (pt.h == 1 && pt.m == 1)
            bad("critical-point-nontrivial",
                fmt::format("point {}: (h, m) = (1, 1) is not a critical point", pt.name));
        if (pt.kind == PointKind::Tame) {
            if (pt.n_w != 0 || !pt.wild_sigmas.empty())
                bad("tame-shape",
                    fmt::format("point {}: tame point carries n_w={} and {} wild sigmas",
                                pt.name, pt.n_w, pt.wild_sigmas.size()));
        } else {
            if (pt.n_w < 1 || (int)pt.wild_sigmas.size() != pt.n_w)
                bad("wild-shape",
                    fmt::format("point {}: wild point needs n_w >= 1 sigmas, has n_w={} and {}",
                                pt.name, pt.n_w, pt.wild_sigmas.size()));
            Int prev_jump = 0;
            for (size_t i = 0; i < pt.wild_sigmas.size(); ++i) {
                Rat j = pt.wild_sigmas[i] * pt.m;
                if (pt.wild_sigmas[i] <= 0 || !is_integer(j) || j.get_num() <= prev_jump) {
                    bad("wild-sigma-jumps",
                        fmt::format("point {}: sigma_{}={} does not continue a strictly "
                                    "increasing positive integral jump sequence over m={}",
                                    pt.name, i + 1, format_rat(pt.wild_sigmas[i]), pt.m));
                    break;
                }
                prev_jump = j.get_num();
            }
        }
        Int local_order = pow_int(Int(d.p), (unsigned long)std::max(pt.n_w, 0)) * pt.m;
        if (local_order > 0 && d.cover_degree % local_order != 0)
            bad("degree-divisibility",
                fmt::format("point {}: d={} not divisible by p^{} * {} = {}", pt.name,
                            d.cover_degree.get_str(), pt.n_w, pt.m, local_order.get_str()));
        if (pt.h == 0 && d.reduction_type != ReductionType::Multiplicative)
            bad("sigma-zero-multiplicative",
                fmt::format("point {}: sigma = 0 (branch point specialization) forces "
                            "multiplicative reduction",
                            pt.name));
    }
    if (!check_denominators(d))
        bad("tame-sigma-denominator",
            fmt::format("a tame invariant falls outside (1/{}) Z", d.mu));
    return out;
}

DeformationDatum datum_from_json(const nlohmann::json& j, long fallback_p) {
    if (!j.is_object()) fail("BadDatumJson", "datum must be a JSON object");
    DeformationDatum d;
    try {
        d.p = j.contains("p") ? j.at("p").get<long>() : fallback_p;
        std::string rt = j.value("reduction_type", std::string("multiplicative"));
        if (rt == "multiplicative") {
            d.reduction_type = ReductionType::Multiplicative;
        } else if (rt == "additive") {
            d.reduction_type = ReductionType::Additive;
        } else {
            fail("BadDatumJson", fmt::format("unknown reduction_type '{}'", rt));
        }
        d.base_genus = j.value("base_genus", 0L);
        d.cover_degree = Int(j.value("cover_degree", 0L));
        d.mu = j.value("mu", 1L);
        for (const auto& pj : j.value("points", nlohmann::json::array())) {
            CriticalPoint pt;
            pt.name = pj.value("name", std::string());
            std::string kind = pj.value("kind", std::string("tame"));
            if (kind == "tame") {
                pt.kind = PointKind::Tame;
            } else if (kind == "wild") {
                pt.kind = PointKind::Wild;
            } else {
                fail("BadDatumJson", fmt::format("unknown point kind '{}'", kind));
            }
            pt.h = Int(pj.at("h").get<long>());
            pt.m = pj.value("m", 1L);
            pt.n_w = pj.value("n_w", 0);
            for (const auto& sj : pj.value("wild_sigmas", nlohmann::json::array()))
                pt.wild_sigmas.push_back(parse_rat(sj.get<std::string>()));
            d.points.push_back(std::move(pt));
        }
    } catch (const nlohmann::json::exception& e) {
        fail("BadDatumJson", e.what());
    }
    return d;
}

nlohmann::json datum_to_json(const DeformationDatum& d) {
    nlohmann::json j;
    j["p"] = d.p;
    j["reduction_type"] =
        d.reduction_type == ReductionType::Multiplicative ? "multiplicative" : "additive";
    j["base_genus"] = d.base_genus;
    j["cover_degree"] = d.cover_degree.get_si();
    j["mu"] = d.mu;
    j["points"] = nlohmann::json::array();
    for (const CriticalPoint& pt : d.points) {
        nlohmann::json pj;
        pj["name"] = pt.name;
        pj["kind"] = pt.kind == PointKind::Tame ? "tame" : "wild";
        pj["h"] = pt.h.get_si();
        pj["m"] = pt.m;
        if (pt.kind == PointKind::Wild) {
            pj["n_w"] = pt.n_w;
            pj["wild_sigmas"] = nlohmann::json::array();
            for (const Rat& s : pt.wild_sigmas) pj["wild_sigmas"].push_back(format_rat(s));
        }
        j["points"].push_back(std::move(pj));
    }
    return j;
}

} // namespace wildram
