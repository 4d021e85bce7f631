#pragma once

#include "wildram/deformdata.hpp"
#include "wildram/rational.hpp"

#include <nlohmann/json_fwd.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace wildram {

// --------------------------------------------------------------------------
// Augmented dual graph of a stable reduction.
//
// Component vertices carry the generic inertia exponent r (a p^r-component)
// and genus; wild branch points of the generic-fiber cover get their own
// degree-one vertices.  Edges are half-edges: each node or branch-point
// attachment contributes an opposite pair, and the truncated effective
// invariants sigma^{eff,alpha} live on half-edges with the antisymmetry law
// sigma^{eff,alpha}_e = -sigma^{eff,alpha}_{opp(e)}.
// --------------------------------------------------------------------------

enum class VertexKind { Component, WildBranchPoint };

struct Vertex {
    std::string id;
    VertexKind kind = VertexKind::Component;
    long genus = 0;                // components only
    int inertia = 0;               // components: r for a p^r-component
    Int index = 0;                 // branch vertices: the full branching index
    int branch_p_exp = 0;          // branch vertices: v_p(index)
    std::vector<Int> tame_branch_indices; // components: prime-to-p branch
                                          // points specializing here
    std::vector<DeformationDatum> deformation_data; // optional stack, listed
                                                    // bottom level first;
                                                    // size = inertia when given
};

struct Edge {
    std::string id;
    std::string src;
    std::string dst;
    std::string opp;
    std::map<int, Rat> sigma_eff;  // truncation level alpha -> invariant
};

struct StableGraph {
    long p = 0;
    int n = 0;       // p-Sylow exponent of the cover's group
    long m_g = 1;    // m_G = |N_G(P)/Z_G(P)|
    long g_x = 0;    // genus of the base curve
    std::vector<Int> branch_indices; // branching indices of the generic fiber
    std::vector<Vertex> vertices;
    std::vector<Edge> edges;
    std::string root; // id of the original component's vertex

    const Vertex* find_vertex(const std::string& id) const;
    const Edge* find_edge(const std::string& id) const;
};

// --------------------------------------------------------------------------
// Validation and classification.
// --------------------------------------------------------------------------

// Structural and arithmetic validation.  Rules, in check order:
//   opposite-involution        opp is a mirror-image fixed-point-free pairing
//   connected-tree             one component, |E|/2 = |V| - 1, root exists
//   branch-vertex-degree       branch vertices attach once, to a component
//   inertia-bound              0 <= r <= n; 1 <= branch exponent <= n
//   etale-interior             inertia-0 components are non-root leaves
//   tail-inertia-jump          a tail's neighbor has strictly larger inertia
//   branch-placement           v_p(index) matches the hosting component
//   branch-accounting          vertex-attached indices match branch_indices
//   sigma-antisymmetry         per-level negation across opposite pairs
//   branch-vertex-sigma-zero   branch edges carry only zero invariants
//   sigma-levels               level sets are 0..r_max-1 per edge kind
//   datum-edge-consistency     attached data reproduce edge invariants
//   datum-local-identity       attached data satisfy the local identity
//   datum-<rule>               per-datum structural rules (see deformdata)
//   local-vanishing            per-vertex truncated identities hold
//   global-vanishing           the global vanishing-cycles identity holds
// Structural failures (the first three rules) suppress the remaining checks.
std::vector<Violation> validate(const StableGraph& g);

enum class TailFlavor { PrimitiveEtale, NewEtale, NewInseparable, InseparableWithBranch };

struct TailRecord {
    std::string vertex;
    int r_prime = 0;   // the tail's own inertia exponent
    int r = 0;         // inertia exponent of the adjoining component
    TailFlavor flavor = TailFlavor::NewEtale;
    Rat sigma;                  // sigma_b = level-r' invariant at the node
    std::vector<Rat> truncated; // sigma^alpha_b for r' <= alpha < r
};

// Classifies every component leaf other than the root.  Cross-checks that
// branch points sit on components matching their p-valuation and throws
// ToolkitError("MisplacedBranchPoint") otherwise.
std::vector<TailRecord> classify_tails(const StableGraph& g);

// The outward partial order: a <= b iff a = b, a = root, or a separates the
// root from b.  On a tree this says a lies on the root-to-b path.
bool preceq(const StableGraph& g, const std::string& a, const std::string& b);

// Subgraph at truncation level j: components of inertia > j, branch points
// with p^{j+1} dividing the index, and every edge incident to at least one
// such vertex (an edge may dangle).  Requires 0 <= j < n.
struct LevelSubgraph {
    std::vector<std::string> vertices;
    std::vector<std::string> edges;
};
LevelSubgraph subgraph_level(const StableGraph& g, int j);

// Truncated local identity at a component vertex v with inertia r > alpha:
//   sum over outgoing half-edges of (sigma^{eff,alpha}_e - 1) = 2 g_v - 2.
// Throws ToolkitError("AlphaNotDefined") when alpha >= r or the level is
// missing on an incident edge.
bool check_effective_local(const StableGraph& g, const std::string& vertex_id,
                           int alpha);

// Global vanishing-cycles identity:
//   2 g_X - 2 + |Pi| = sum over etale tails of (sigma_b - 1),
// where Pi counts branch indices divisible by p.
bool check_global(const StableGraph& g);

// Generalized (truncated) identity at level alpha.  Sums sigma^alpha_b - 1
// over every node joining a component of inertia > alpha to one of inertia
// <= alpha and compares against 2 g_X - 2 + |Pi_{alpha+1}|.  The exact slack
// is 2 (I - 1) + 2 g_X (1 - delta) where I counts connected components of
// the level subgraph on components and delta records whether the root
// survives; monotonic graphs therefore give equality.  Throws
// ToolkitError("NoApplicableNodes") when no such node exists.
struct GeneralizedCheck {
    enum class Status { HoldsWithEquality, HoldsStrict, Fails };
    Status status = Status::HoldsWithEquality;
    Rat lhs;             // 2 g_X - 2 + |Pi_{alpha+1}|
    Rat rhs;             // sum of (sigma^alpha_b - 1)
    long node_count = 0;
    long components = 0; // I
    bool contains_root = false; // delta
    Rat expected_slack;  // 2 (I - 1) + 2 g_X (1 - delta)
    bool slack_matches = false;
    bool monotonic = false;
};
GeneralizedCheck check_generalized(const StableGraph& g, int alpha);

// True iff inertia is non-increasing outward on the subtree hanging from
// `from` (inclusive).
bool is_monotonic(const StableGraph& g, const std::string& from);

// When `from` has no etale tails strictly outward of it, the reduction is
// forced monotonic from there; returns a diagnostic if the input claims
// otherwise (hypothesis holds but is_monotonic is false), else nullopt.
std::optional<std::string> monotonic_inconsistency(const StableGraph& g,
                                                   const std::string& from);

// Tail bound checks.  Rules:
//   insep-tail-integral            inseparable tails have integral sigma^alpha
//   new-tail-lower-bound           new tails have sigma_b >= 1 + 1/m_G
//   insep-tail-bound               p^{r'}-tail on a p^r-component:
//                                  sigma_b >= p^{r-r'-1}
//   primitive-tail-bound           primitive tail on a p^r-component:
//                                  sigma_b >= p^{r-1}/m_G
//   etale-tail-count               fewer than p etale tails
//   pd-tail-count                  fewer than p^d tails of inertia d, d >= 1
//   tail-count-weighted            k-th largest sigma_b - 1 among p^d-tails
//                                  satisfies k (sigma_b - 1) < p^d
//   no-new-insep-without-new-etale new inseparable tails need a new etale tail
//   sigma-denominator              all sigma^alpha_b lie in (1/m_G) Z
std::vector<Violation> check_tail_constraints(const StableGraph& g);

// Fractional-part identity along an interior edge, taken in the direction
// away from the root: <sigma^{eff,0}_e> equals the fractional part of the
// sum of sigma_b over etale tails outward of e.  Throws
// ToolkitError("BadArgument") on branch-point edges.
bool outward_fraction_check(const StableGraph& g, const std::string& edge_id);

// --------------------------------------------------------------------------
// Enumeration and reporting.
// --------------------------------------------------------------------------

// A candidate multiset of etale-tail invariants for a three-point genus-0
// cover: primitive tails contribute sigma, new tails sigma - 1, and the
// contributions sum to 1.
struct TailConfig {
    std::vector<Rat> primitive; // descending
    std::vector<Rat> new_etale; // descending
};

// All tail configurations with every sigma in (1/m) Z_{> 0}, new tails
// obeying sigma >= 1 + 1/m, at most 3 - num_wild_branch primitive tails, and
// fewer than p etale tails in total.  Requires m | p - 1 and
// 0 <= num_wild_branch <= 3.  Deterministic order, deduplicated.
std::vector<TailConfig> enumerate_tail_configs(long p, long m, int num_wild_branch);

// Realizes a configuration as a star graph: one p-component root carrying
// 3 - #primitive wild branch points, one edge per etale tail.  The result
// passes validate() and check_global().
StableGraph realize_star(long p, long m, const TailConfig& config);

struct MonodromyInputs {
    Rat e_abs;  // absolute ramification index of the field of definition
    bool assert_center_prime_to_p = false; // p does not divide |Z(G)|
    bool assert_bad_reduction = false;     // the cover has bad reduction
};

struct MonodromyReport {
    std::optional<Int> exponent_bound; // p^{n-1}; present iff the center flag
    bool indices_prime_to_p = false;
    bool has_new_etale_tails = false;
    bool below_threshold = false;   // e_abs < (p-1)/m_G
    bool threshold_exact = false;   // e_abs = (p-1)/m_G
    bool wild_monodromy_trivial = false;
    bool wild_monodromy_nontrivial = false;
    bool potentially_good = false;
    bool inconsistent = false;
    std::string verdict; // "inconsistent" | "potentially good reduction" |
                         // "trivial wild monodromy" |
                         // "nontrivial wild monodromy" | "inconclusive"
    std::vector<std::string> notes;
};

// Decision rules, strongest verdict first:
//   inconsistent       trivial and nontrivial both derivable
//   potentially good   e_abs < (p-1)/m_G and no new etale tails
//   trivial            all indices prime to p and no new etale tails
//   nontrivial         e_abs < (p-1)/m_G and bad reduction asserted
//   inconclusive       otherwise (in particular at e_abs = (p-1)/m_G exactly)
MonodromyReport monodromy_report(const StableGraph& g, const MonodromyInputs& in);

// --------------------------------------------------------------------------
// Serialization.  Document shape:
//   { "p": 7, "n": 2, "m": 3, "gX": 0, "branch_indices": [2, 4, 66],
//     "vertices": [ { "id": "v0", "kind": "component", "genus": 0,
//                     "inertia": 2 },
//                   { "id": "t1", "kind": "component", "genus": 0,
//                     "inertia": 0, "tame_branch_indices": [2] },
//                   { "id": "b1", "kind": "wild_branch_point",
//                     "index": 50 } ],
//     "edges": [ { "id": "e1", "src": "v0", "dst": "t1", "opp": "e1r",
//                  "sigma_eff": { "0": "1/3" } }, ... ],
//     "root": "v0" }
// Rationals are "a/b" strings; vertices may carry "deformation_data" (a list
// of datum documents inheriting the graph's p) and branch vertices may spell
// out "branch_p_exp", which must match v_p(index).  Malformed documents
// throw ToolkitError("BadGraph").
// --------------------------------------------------------------------------

StableGraph graph_from_json(const nlohmann::json& j);
nlohmann::json graph_to_json(const StableGraph& g);
StableGraph load_graph(const std::string& path);

} // namespace wildram
