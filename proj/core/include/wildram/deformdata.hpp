#pragma once

#include "wildram/ramification.hpp"
#include "wildram/rational.hpp"

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace wildram {

// A named check failure.  Checks that return violation lists never throw on
// bad data; an empty list means the object passed.
struct Violation {
    std::string rule;
    std::string detail;
};

// --------------------------------------------------------------------------
// Critical points and deformation data, modeled by signatures only.
//
// A deformation datum lives on a curve W of genus g_W and consists of a
// degree-d cover V -> W together with a logarithmic differential form; all
// identities below consume only the signature (h, m) at each critical point,
// the per-level invariants sigma_{1..n_w} at wild points, g_W, d, and mu.
// --------------------------------------------------------------------------

enum class PointKind { Tame, Wild };

struct CriticalPoint {
    std::string name;           // free-form; when a datum is attached to a
                                // graph vertex, points named after an incident
                                // edge id bind to that edge
    PointKind kind = PointKind::Tame;
    Int h = 0;                  // ord of the form at the point, plus one; may
                                // be negative (pole) or zero (branch point
                                // specialization)
    long m = 1;                 // prime-to-p part of the local inertia
    int n_w = 0;                // wild inertia exponent; 0 at tame points
    std::vector<Rat> wild_sigmas; // sigma_{1,w}..sigma_{n_w,w}; empty if tame

    Rat sigma() const;          // h/m
    bool branch_specialization() const { return h == 0; }
};

enum class ReductionType { Multiplicative, Additive };

struct DeformationDatum {
    long p = 0;
    ReductionType reduction_type = ReductionType::Multiplicative;
    long base_genus = 0;        // g_W
    Int cover_degree = 0;       // d; divisible by p^{n_w} m_w for every point
    long mu = 1;                // order of the inertia image under the
                                // character; tame invariants lie in (1/mu) Z
    std::vector<CriticalPoint> points;
};

// --------------------------------------------------------------------------
// mu_p-torsor reduction classification.
//
// A mu_p-torsor over a complete discretely valued field with absolute
// ramification index e, given by extracting a p-th root of a unit u with
// v(u - 1) = delta * e(p/(p-1)) normalized so delta lands in [0, 1], has
// multiplicative reduction iff delta = 1 and otherwise delta = 1 - n(p-1)/e
// for an integer 0 < n <= e/(p-1); n = e/(p-1) is the etale case.
// --------------------------------------------------------------------------

enum class TorsorClass { Multiplicative, Additive, Etale };

struct TorsorReduction {
    Rat delta;
    long e = 0;
    long p = 0;
    TorsorClass classification = TorsorClass::Multiplicative;
    std::optional<Int> n_param; // absent exactly in the multiplicative case
};

// Throws ToolkitError("InvalidDelta") when delta is outside [0, 1] or when
// 0 <= delta < 1 does not solve to a positive integer n <= e/(p-1).
TorsorReduction classify_torsor(const Rat& delta, long e, long p);

// True iff every tame critical point has h/m with denominator dividing mu.
bool check_denominators(const DeformationDatum& d);

// Left-hand side of the local vanishing-cycles identity:
//   sum_{w wild} (sigma_w/p^{n_w} - 1 - sum_{i=1..n_w} ((p-1)/p^i) sigma_{i,w})
//   + sum_{b tame} (sigma_b - 1).
Rat local_raw_lhs(const DeformationDatum& d);

// True iff local_raw_lhs(d) == 2 g_W - 2 exactly.
bool check_local_raw(const DeformationDatum& d);

// Computes 2 g_V - 2 for the covering curve two independent ways and returns
// both: via Riemann-Hurwitz with exact different degrees, and via the degree
// of the pulled-back differential form.  The pair is equal iff
// check_local_raw(d) holds.  Throws ToolkitError("NonIntegralGenus") when
// either expression is not an integer (e.g. cover_degree not divisible by a
// local group order, or a wild sigma stack with non-integral jumps).
std::pair<Int, Int> genus_consistency(const DeformationDatum& d);

// Compatibility of the signatures of the data above the two sides of a node
// joining a p^r-component (upper_h, data listed bottom level first) to a
// p^r'-component (lower_h), where the node's local extension has filtration
// node_filtration of depth r - r':
//   (i)  h_i = -h'_{i'} for i = i' + r - r', 1 <= i' <= r';
//   (ii) h_i = j_i (the i-th lower jump) for 1 <= i <= r - r'.
// Throws ToolkitError("LengthMismatch") when the list lengths disagree with
// r, r' or the filtration depth is not r - r'.
bool node_compatibility(const std::vector<Int>& upper_h,
                        const std::vector<Int>& lower_h, int r, int r_prime,
                        const RamFiltration& node_filtration);

// Structural validation: point shape per kind, (h, m) != (1, 1), m prime to
// p, degree divisibility, tame denominators, wild sigma stacks (positive,
// strictly increasing, integral against m), and the rule that a sigma = 0
// point forces multiplicative reduction.
std::vector<Violation> validate(const DeformationDatum& d);

// JSON round-trip.  A datum document looks like
//   { "p": 7, "reduction_type": "multiplicative", "base_genus": 0,
//     "cover_degree": 21, "mu": 3,
//     "points": [ { "name": "e1", "kind": "tame", "h": 1, "m": 3 },
//                 { "name": "e0", "kind": "wild", "h": -1, "m": 3,
//                   "n_w": 1, "wild_sigmas": ["1/3"] } ] }
// with rationals serialized as "a/b" strings.  When "p" is absent,
// fallback_p is used (data embedded in a graph inherit the graph's p).
// Throws ToolkitError("BadDatumJson") on malformed documents.
DeformationDatum datum_from_json(const nlohmann::json& j, long fallback_p = 0);
nlohmann::json datum_to_json(const DeformationDatum& d);

} // namespace wildram
