#include "wildram/stablegraph.hpp"

#include "wildram/errors.hpp"
#include "wildram/ramification.hpp"

#include <fmt/core.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <deque>
#include <fstream>
#include <functional>
#include <map>
#include <set>

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

int vp(const Int& x, long p) {
    if (x == 0) return 0;
    Int a = abs(x);
    return (int)valuation_int(a, Int(p));
}

bool is_component(const Vertex& v) { return v.kind == VertexKind::Component; }

// Outgoing half-edges of a vertex, in declaration order.
std::vector<const Edge*> out_edges(const StableGraph& g, const std::string& id) {
    std::vector<const Edge*> out;
    for (const Edge& e : g.edges)
        if (e.src == id) out.push_back(&e);
    return out;
}

// Component vertices adjacent to a component vertex.
std::vector<const Vertex*> comp_neighbors(const StableGraph& g, const std::string& id) {
    std::vector<const Vertex*> out;
    for (const Edge* e : out_edges(g, id)) {
        const Vertex* w = g.find_vertex(e->dst);
        if (w && is_component(*w)) out.push_back(w);
    }
    return out;
}

// Parent map of the breadth-first spanning tree rooted at g.root.  On a
// valid graph (a tree) this realizes the outward partial order.
std::map<std::string, std::string> parent_map(const StableGraph& g) {
    std::map<std::string, std::string> parent;
    if (!g.find_vertex(g.root)) fail("BadArgument", fmt::format("unknown root '{}'", g.root));
    std::set<std::string> seen{g.root};
    std::deque<std::string> queue{g.root};
    while (!queue.empty()) {
        std::string v = queue.front();
        queue.pop_front();
        for (const Edge* e : out_edges(g, v)) {
            if (seen.insert(e->dst).second) {
                parent[e->dst] = v;
                queue.push_back(e->dst);
            }
        }
    }
    return parent;
}

// True when an etale tail hangs (weakly) outward of `from`.
bool has_etale_tail_outward(const StableGraph& g, const std::string& from, bool strict) {
    for (const Vertex& v : g.vertices) {
        if (!is_component(v) || v.inertia != 0 || v.id == g.root) continue;
        if (strict && v.id == from) continue;
        if (preceq(g, from, v.id)) return true;
    }
    return false;
}

// Number of branch indices divisible by p^k.
long pi_count(const StableGraph& g, int k) {
    long count = 0;
    for (const Int& e : g.branch_indices)
        if (vp(e, g.p) >= k) ++count;
    return count;
}

const Rat* edge_level(const Edge& e, int alpha) {
    auto it = e.sigma_eff.find(alpha);
    return it == e.sigma_eff.end() ? nullptr : &it->second;
}

// The half-edge from a tail's adjoining component into the tail.
const Edge* tail_in_edge(const StableGraph& g, const std::string& tail_id) {
    for (const Edge& e : g.edges) {
        const Vertex* s = g.find_vertex(e.src);
        if (e.dst == tail_id && s && is_component(*s)) return &e;
    }
    return nullptr;
}

} // namespace

const Vertex* StableGraph::find_vertex(const std::string& id) const {
    for (const Vertex& v : vertices)
        if (v.id == id) return &v;
    return nullptr;
}

const Edge* StableGraph::find_edge(const std::string& id) const {
    for (const Edge& e : edges)
        if (e.id == id) return &e;
    return nullptr;
}

bool preceq(const StableGraph& g, const std::string& a, const std::string& b) {
    if (!g.find_vertex(a)) fail("BadArgument", fmt::format("unknown vertex '{}'", a));
    if (!g.find_vertex(b)) fail("BadArgument", fmt::format("unknown vertex '{}'", b));
    if (a == b || a == g.root) return true;
    auto parent = parent_map(g);
    // a precedes b iff a lies on the root-to-b path.
    std::string cur = b;
    while (true) {
        auto it = parent.find(cur);
        if (it == parent.end()) return false; // reached the root (or b unreachable)
        cur = it->second;
        if (cur == a) return true;
    }
}

// --------------------------------------------------------------------------
// Validation.
// --------------------------------------------------------------------------

std::vector<Violation> validate(const StableGraph& g) {
    std::vector<Violation> out;
    auto bad = [&](const char* rule, std::string detail) {
        out.push_back({rule, std::move(detail)});
    };

    // Well-formedness: anything that makes ids unresolvable stops the run.
    {
        std::set<std::string> vids, eids;
        for (const Vertex& v : g.vertices)
            if (!vids.insert(v.id).second)
                bad("well-formed", fmt::format("duplicate vertex id '{}'", v.id));
        for (const Edge& e : g.edges)
            if (!eids.insert(e.id).second)
                bad("well-formed", fmt::format("duplicate edge id '{}'", e.id));
        for (const Edge& e : g.edges) {
            if (!vids.count(e.src))
                bad("well-formed", fmt::format("edge {}: unknown source '{}'", e.id, e.src));
            if (!vids.count(e.dst))
                bad("well-formed", fmt::format("edge {}: unknown target '{}'", e.id, e.dst));
            if (!eids.count(e.opp))
                bad("well-formed", fmt::format("edge {}: unknown opposite '{}'", e.id, e.opp));
        }
        const Vertex* root = g.find_vertex(g.root);
        if (!root)
            bad("well-formed", fmt::format("root '{}' is not a vertex", g.root));
        else if (!is_component(*root))
            bad("well-formed", fmt::format("root '{}' is not a component", g.root));
        if (!is_prime_long(g.p)) bad("well-formed", fmt::format("p={} is not prime", g.p));
        if (g.n < 0) bad("well-formed", fmt::format("n={} is negative", g.n));
        if (g.m_g < 1) bad("well-formed", fmt::format("m_G={} is not positive", g.m_g));
        if (g.g_x < 0) bad("well-formed", fmt::format("g_X={} is negative", g.g_x));
        for (const Vertex& v : g.vertices) {
            if (is_component(v) && v.genus < 0)
                bad("well-formed", fmt::format("vertex {}: negative genus", v.id));
            if (!is_component(v) && v.index < 2)
                bad("well-formed",
                    fmt::format("branch vertex {}: index must be at least 2", v.id));
        }
        if (!out.empty()) return out;
    }

    // Opposite pairing: a fixed-point-free involution swapping endpoints.
    for (const Edge& e : g.edges) {
        const Edge& o = *g.find_edge(e.opp);
        if (o.id == e.id)
            bad("opposite-involution", fmt::format("edge {} is its own opposite", e.id));
        else if (o.opp != e.id)
            bad("opposite-involution",
                fmt::format("edge {}: opposite {} points back to {}", e.id, o.id, o.opp));
        else if (o.src != e.dst || o.dst != e.src)
            bad("opposite-involution",
                fmt::format("edge {} ({} -> {}) vs opposite {} ({} -> {})", e.id, e.src,
                            e.dst, o.id, o.src, o.dst));
    }

    // Connectivity and tree shape over the full augmented graph.
    {
        std::set<std::string> seen{g.root};
        std::deque<std::string> queue{g.root};
        while (!queue.empty()) {
            std::string v = queue.front();
            queue.pop_front();
            for (const Edge* e : out_edges(g, v))
                if (seen.insert(e->dst).second) queue.push_back(e->dst);
        }
        if (seen.size() != g.vertices.size())
            bad("connected-tree",
                fmt::format("{} of {} vertices reachable from the root", seen.size(),
                            g.vertices.size()));
        if (g.edges.size() % 2 != 0)
            bad("connected-tree", "odd number of half-edges");
        else if (g.edges.size() / 2 + 1 != g.vertices.size())
            bad("connected-tree",
                fmt::format("{} undirected edges on {} vertices is not a tree",
                            g.edges.size() / 2, g.vertices.size()));
    }
    if (!out.empty()) return out; // traversal below needs the tree structure

    for (const Vertex& v : g.vertices) {
        if (is_component(v)) continue;
        auto outs = out_edges(g, v.id);
        const Vertex* host = outs.size() == 1 ? g.find_vertex(outs[0]->dst) : nullptr;
        if (outs.size() != 1 || !host || !is_component(*host))
            bad("branch-vertex-degree",
                fmt::format("branch vertex {} must attach to exactly one component", v.id));
    }

    for (const Vertex& v : g.vertices) {
        if (is_component(v)) {
            if (v.inertia < 0 || v.inertia > g.n)
                bad("inertia-bound",
                    fmt::format("vertex {}: inertia {} outside [0, {}]", v.id, v.inertia, g.n));
        } else if (v.branch_p_exp < 1 || v.branch_p_exp > g.n) {
            bad("inertia-bound",
                fmt::format("branch vertex {}: exponent {} outside [1, {}]", v.id,
                            v.branch_p_exp, g.n));
        }
    }

    for (const Vertex& v : g.vertices) {
        if (!is_component(v) || v.inertia != 0) continue;
        auto nbrs = comp_neighbors(g, v.id);
        if (v.id == g.root || nbrs.size() != 1)
            bad("etale-interior",
                fmt::format("etale component {} must be a non-root leaf", v.id));
    }

    for (const Vertex& v : g.vertices) {
        if (!is_component(v) || v.id == g.root) continue;
        auto nbrs = comp_neighbors(g, v.id);
        if (nbrs.size() == 1 && nbrs[0]->inertia <= v.inertia)
            bad("tail-inertia-jump",
                fmt::format("tail {} (inertia {}) adjoins {} (inertia {})", v.id, v.inertia,
                            nbrs[0]->id, nbrs[0]->inertia));
    }

    for (const Vertex& v : g.vertices) {
        if (!is_component(v)) {
            if (vp(v.index, g.p) != v.branch_p_exp)
                bad("branch-placement",
                    fmt::format("branch vertex {}: v_{}({}) = {} but exponent says {}", v.id,
                                g.p, v.index.get_str(), vp(v.index, g.p), v.branch_p_exp));
            auto outs = out_edges(g, v.id);
            const Vertex* host = outs.empty() ? nullptr : g.find_vertex(outs[0]->dst);
            if (host && is_component(*host) && host->inertia != v.branch_p_exp)
                bad("branch-placement",
                    fmt::format("branch vertex {} (exponent {}) sits on {} (inertia {})",
                                v.id, v.branch_p_exp, host->id, host->inertia));
            continue;
        }
        for (const Int& idx : v.tame_branch_indices) {
            if (vp(idx, g.p) != 0)
                bad("branch-placement",
                    fmt::format("vertex {}: index {} is not prime to p", v.id, idx.get_str()));
            else if (v.inertia != 0)
                bad("branch-placement",
                    fmt::format("vertex {}: tame index {} on a component of inertia {}", v.id,
                                idx.get_str(), v.inertia));
        }
    }

    {
        std::vector<Int> attached;
        for (const Vertex& v : g.vertices) {
            if (is_component(v))
                attached.insert(attached.end(), v.tame_branch_indices.begin(),
                                v.tame_branch_indices.end());
            else
                attached.push_back(v.index);
        }
        std::vector<Int> declared = g.branch_indices;
        std::sort(attached.begin(), attached.end());
        std::sort(declared.begin(), declared.end());
        if (attached != declared) {
            auto join = [](const std::vector<Int>& v) {
                std::string s;
                for (const Int& x : v) s += (s.empty() ? "" : ", ") + x.get_str();
                return s;
            };
            bad("branch-accounting",
                fmt::format("declared indices [{}] vs attached [{}]", join(declared),
                            join(attached)));
        }
    }

    for (const Edge& e : g.edges) {
        const Edge& o = *g.find_edge(e.opp);
        if (e.id > o.id) continue; // handle each pair once
        auto keys = [](const Edge& x) {
            std::vector<int> k;
            for (const auto& [a, s] : x.sigma_eff) k.push_back(a);
            return k;
        };
        if (keys(e) != keys(o)) {
            bad("sigma-antisymmetry",
                fmt::format("edges {} and {} carry different level sets", e.id, o.id));
            continue;
        }
        for (const auto& [alpha, s] : e.sigma_eff)
            if (s + o.sigma_eff.at(alpha) != 0)
                bad("sigma-antisymmetry",
                    fmt::format("edge {} level {}: {} + {} != 0", e.id, alpha, format_rat(s),
                                format_rat(o.sigma_eff.at(alpha))));
    }

    for (const Edge& e : g.edges) {
        const Vertex& s = *g.find_vertex(e.src);
        const Vertex& d = *g.find_vertex(e.dst);
        if (is_component(s) && is_component(d)) continue;
        for (const auto& [alpha, val] : e.sigma_eff)
            if (val != 0)
                bad("branch-vertex-sigma-zero",
                    fmt::format("edge {} level {}: {} on a branch-point edge", e.id, alpha,
                                format_rat(val)));
    }

    for (const Edge& e : g.edges) {
        const Vertex& s = *g.find_vertex(e.src);
        const Vertex& d = *g.find_vertex(e.dst);
        int levels = 0;
        if (is_component(s) && is_component(d))
            levels = std::max(s.inertia, d.inertia);
        else
            levels = is_component(s) ? d.branch_p_exp : s.branch_p_exp;
        bool ok = (int)e.sigma_eff.size() == levels;
        for (int a = 0; ok && a < levels; ++a) ok = e.sigma_eff.count(a) > 0;
        if (!ok) {
            std::string want =
                levels == 0 ? "no levels" : fmt::format("levels 0..{}", levels - 1);
            bad("sigma-levels", fmt::format("edge {}: expected {}, found {} entries",
                                            e.id, want, e.sigma_eff.size()));
        }
    }

    // Deformation data attached to vertices.
    for (const Vertex& v : g.vertices) {
        if (!is_component(v) || v.deformation_data.empty()) continue;
        const int r = v.inertia;
        if ((int)v.deformation_data.size() != r) {
            bad("datum-edge-consistency",
                fmt::format("vertex {}: {} data on a component of inertia {}", v.id,
                            v.deformation_data.size(), r));
            continue;
        }
        for (size_t i = 0; i < v.deformation_data.size(); ++i) {
            const DeformationDatum& dd = v.deformation_data[i];
            if (dd.p != g.p)
                bad("datum-edge-consistency",
                    fmt::format("vertex {} datum {}: p={} differs from the graph's {}", v.id,
                                i + 1, dd.p, g.p));
            if (dd.base_genus != v.genus)
                bad("datum-edge-consistency",
                    fmt::format("vertex {} datum {}: base genus {} differs from the "
                                "component's genus {}",
                                v.id, i + 1, dd.base_genus, v.genus));
            for (const Violation& sub : wildram::validate(dd))
                bad("datum-edge-consistency",
                    fmt::format("vertex {} datum {}: [datum-{}] {}", v.id, i + 1, sub.rule,
                                sub.detail));
            if (!check_local_raw(dd))
                bad("datum-local-identity",
                    fmt::format("vertex {} datum {}: local sum {} != 2 g_W - 2 = {}", v.id,
                                i + 1, format_rat(local_raw_lhs(dd)),
                                2 * dd.base_genus - 2));
        }

        auto point_named = [](const DeformationDatum& dd,
                              const std::string& name) -> const CriticalPoint* {
            for (const CriticalPoint& pt : dd.points)
                if (pt.name == name) return &pt;
            return nullptr;
        };

        for (const Edge* e : out_edges(g, v.id)) {
            const Vertex& w = *g.find_vertex(e->dst);
            if (!is_component(w)) {
                // Branch point specialization: every datum must vanish there.
                for (size_t i = 0; i < v.deformation_data.size(); ++i) {
                    const CriticalPoint* pt = point_named(v.deformation_data[i], e->id);
                    if (!pt || pt->h != 0)
                        bad("datum-edge-consistency",
                            fmt::format("vertex {} datum {}: edge {} needs a critical point "
                                        "with h = 0 at the branch point",
                                        v.id, i + 1, e->id));
                }
                continue;
            }
            if (w.inertia < r) {
                // High side of the node: the data's invariants at the point
                // must reproduce every truncation level on this half-edge.
                std::vector<Rat> stack;
                bool usable = true;
                for (size_t i = 0; i < v.deformation_data.size(); ++i) {
                    const CriticalPoint* pt = point_named(v.deformation_data[i], e->id);
                    if (!pt || pt->kind != PointKind::Tame) {
                        bad("datum-edge-consistency",
                            fmt::format("vertex {} datum {}: edge {} needs a tame critical "
                                        "point on the high side",
                                        v.id, i + 1, e->id));
                        usable = false;
                        break;
                    }
                    stack.push_back(pt->sigma());
                }
                if (!usable) continue;
                for (int alpha = 0; alpha < r; ++alpha) {
                    const Rat* have = edge_level(*e, alpha);
                    Rat want = effective_invariant(g.p, stack, alpha);
                    if (!have || *have != want)
                        bad("datum-edge-consistency",
                            fmt::format("vertex {}: edge {} level {} is {} but the datum "
                                        "stack gives {}",
                                        v.id, e->id, alpha,
                                        have ? format_rat(*have) : "missing",
                                        format_rat(want)));
                }
            } else if (w.inertia > r) {
                // Low side: wild points describe the node filtration, which
                // pins the high levels of the opposite half-edge and, when
                // the upper component also carries data, the signatures.
                const int depth = w.inertia - r;
                std::vector<Rat> node_sigmas;
                long node_m = 0;
                bool usable = true;
                for (size_t i = 0; i < v.deformation_data.size() && usable; ++i) {
                    const CriticalPoint* pt = point_named(v.deformation_data[i], e->id);
                    if (!pt || pt->kind != PointKind::Wild || pt->n_w != depth) {
                        bad("datum-edge-consistency",
                            fmt::format("vertex {} datum {}: edge {} needs a wild critical "
                                        "point of depth {}",
                                        v.id, i + 1, e->id, depth));
                        usable = false;
                    } else if (i == 0) {
                        node_sigmas = pt->wild_sigmas;
                        node_m = pt->m;
                    } else if (pt->wild_sigmas != node_sigmas || pt->m != node_m) {
                        bad("datum-edge-consistency",
                            fmt::format("vertex {} datum {}: edge {} node filtration differs "
                                        "between data",
                                        v.id, i + 1, e->id));
                        usable = false;
                    }
                }
                if (!usable || (int)node_sigmas.size() != depth) continue;
                const Edge& o = *g.find_edge(e->opp);
                for (int alpha = r; alpha < w.inertia; ++alpha) {
                    const Rat* have = edge_level(o, alpha);
                    Rat want = effective_invariant(g.p, node_sigmas, alpha - r);
                    if (!have || *have != want)
                        bad("datum-edge-consistency",
                            fmt::format("vertex {}: edge {} level {} is {} but the node "
                                        "filtration gives {}",
                                        v.id, o.id, alpha, have ? format_rat(*have) : "missing",
                                        format_rat(want)));
                }
                if (!w.deformation_data.empty() &&
                    (int)w.deformation_data.size() == w.inertia) {
                    std::vector<Int> upper_h, lower_h;
                    bool bound = true;
                    for (const DeformationDatum& dd : w.deformation_data) {
                        const CriticalPoint* pt = point_named(dd, o.id);
                        if (!pt) { bound = false; break; }
                        upper_h.push_back(pt->h);
                    }
                    for (const DeformationDatum& dd : v.deformation_data) {
                        const CriticalPoint* pt = point_named(dd, e->id);
                        lower_h.push_back(pt->h); // existence checked above
                    }
                    if (bound) {
                        RamFiltration f;
                        f.p = g.p;
                        f.n = depth;
                        f.m = node_m;
                        for (const Rat& s : node_sigmas) {
                            Rat j = s * node_m;
                            if (!is_integer(j)) { bound = false; break; }
                            f.lower_jumps.push_back(j.get_num());
                        }
                        if (bound &&
                            !node_compatibility(upper_h, lower_h, w.inertia, r, f))
                            bad("datum-edge-consistency",
                                fmt::format("node {}: signatures above and below are "
                                            "incompatible",
                                            e->id));
                    }
                }
            }
        }
    }

    for (const Vertex& v : g.vertices) {
        if (!is_component(v) || v.inertia < 1) continue;
        for (int alpha = 0; alpha < v.inertia; ++alpha) {
            Rat sum = 0;
            bool complete = true;
            for (const Edge* e : out_edges(g, v.id)) {
                const Rat* s = edge_level(*e, alpha);
                if (!s) { complete = false; break; } // sigma-levels already fired
                sum += *s - 1;
            }
            if (complete && sum != Rat(2 * v.genus - 2))
                bad("local-vanishing",
                    fmt::format("vertex {} level {}: sum {} != 2 g - 2 = {}", v.id, alpha,
                                format_rat(sum), 2 * v.genus - 2));
        }
    }

    try {
        if (!check_global(g)) {
            Rat rhs = 0;
            for (const Vertex& v : g.vertices) {
                if (!is_component(v) || v.inertia != 0 || v.id == g.root) continue;
                const Edge* in = tail_in_edge(g, v.id);
                const Rat* s = in ? edge_level(*in, 0) : nullptr;
                if (s) rhs += *s - 1;
            }
            bad("global-vanishing",
                fmt::format("2 g_X - 2 + |Pi| = {} but the etale tails sum to {}",
                            2 * g.g_x - 2 + pi_count(g, 1), format_rat(rhs)));
        }
    } catch (const ToolkitError&) {
        // A tail edge lacks its level-0 entry; sigma-levels reported it.
    }

    return out;
}

// --------------------------------------------------------------------------
// Tails.
// --------------------------------------------------------------------------

std::vector<TailRecord> classify_tails(const StableGraph& g) {
    // Branch points sit exactly on components matching their p-valuation.
    for (const Vertex& v : g.vertices) {
        if (!is_component(v)) {
            auto outs = out_edges(g, v.id);
            const Vertex* host = outs.empty() ? nullptr : g.find_vertex(outs[0]->dst);
            int exp = vp(v.index, g.p);
            if (!host || !is_component(*host) || host->inertia != exp)
                fail("MisplacedBranchPoint",
                     fmt::format("branch point {} (index {}) requires a component of "
                                 "inertia {}",
                                 v.id, v.index.get_str(), exp));
        } else {
            for (const Int& idx : v.tame_branch_indices)
                if (vp(idx, g.p) != 0 || v.inertia != 0)
                    fail("MisplacedBranchPoint",
                         fmt::format("index {} cannot specialize to component {} of "
                                     "inertia {}",
                                     idx.get_str(), v.id, v.inertia));
        }
    }

    std::vector<TailRecord> out;
    for (const Vertex& v : g.vertices) {
        if (!is_component(v) || v.id == g.root) continue;
        auto nbrs = comp_neighbors(g, v.id);
        if (nbrs.size() != 1) continue; // interior component
        TailRecord t;
        t.vertex = v.id;
        t.r_prime = v.inertia;
        t.r = nbrs[0]->inertia;
        const Edge* in = tail_in_edge(g, v.id);
        if (!in) fail("BadGraph", fmt::format("tail {} has no incoming edge", v.id));
        for (int alpha = t.r_prime; alpha < t.r; ++alpha) {
            const Rat* s = edge_level(*in, alpha);
            if (!s)
                fail("BadGraph",
                     fmt::format("tail {}: edge {} lacks level {}", v.id, in->id, alpha));
            t.truncated.push_back(*s);
        }
        if (t.truncated.empty())
            fail("BadGraph",
                 fmt::format("tail {}: no truncation levels between {} and {}", v.id,
                             t.r_prime, t.r));
        t.sigma = t.truncated.front();
        bool has_wild_branch = false;
        for (const Edge* e : out_edges(g, v.id)) {
            const Vertex* w = g.find_vertex(e->dst);
            if (w && !is_component(*w)) has_wild_branch = true;
        }
        if (v.inertia == 0)
            t.flavor = v.tame_branch_indices.empty() ? TailFlavor::NewEtale
                                                     : TailFlavor::PrimitiveEtale;
        else
            t.flavor = has_wild_branch ? TailFlavor::InseparableWithBranch
                                       : TailFlavor::NewInseparable;
        out.push_back(std::move(t));
    }
    return out;
}

// --------------------------------------------------------------------------
// Level subgraphs and vanishing-cycles checks.
// --------------------------------------------------------------------------

LevelSubgraph subgraph_level(const StableGraph& g, int j) {
    if (j < 0 || j >= g.n)
        fail("BadArgument", fmt::format("level {} outside [0, {})", j, g.n));
    LevelSubgraph s;
    std::set<std::string> in;
    for (const Vertex& v : g.vertices) {
        bool keep = is_component(v) ? v.inertia > j : v.branch_p_exp >= j + 1;
        if (keep) {
            s.vertices.push_back(v.id);
            in.insert(v.id);
        }
    }
    for (const Edge& e : g.edges)
        if (in.count(e.src) || in.count(e.dst)) s.edges.push_back(e.id);
    return s;
}

bool check_effective_local(const StableGraph& g, const std::string& vertex_id, int alpha) {
    const Vertex* v = g.find_vertex(vertex_id);
    if (!v || !is_component(*v))
        fail("BadArgument", fmt::format("'{}' is not a component vertex", vertex_id));
    if (alpha < 0 || alpha >= v->inertia)
        fail("AlphaNotDefined",
             fmt::format("level {} undefined on a component of inertia {}", alpha,
                         v->inertia));
    Rat sum = 0;
    for (const Edge* e : out_edges(g, vertex_id)) {
        const Rat* s = edge_level(*e, alpha);
        if (!s)
            fail("AlphaNotDefined",
                 fmt::format("edge {} lacks level {}", e->id, alpha));
        sum += *s - 1;
    }
    return sum == Rat(2 * v->genus - 2);
}

bool check_global(const StableGraph& g) {
    Rat rhs = 0;
    for (const Vertex& v : g.vertices) {
        if (!is_component(v) || v.inertia != 0 || v.id == g.root) continue;
        const Edge* in = tail_in_edge(g, v.id);
        if (!in) fail("BadGraph", fmt::format("etale tail {} has no incoming edge", v.id));
        const Rat* s = edge_level(*in, 0);
        if (!s)
            fail("BadGraph", fmt::format("edge {} lacks level 0", in->id));
        rhs += *s - 1;
    }
    return Rat(2 * g.g_x - 2 + pi_count(g, 1)) == rhs;
}

GeneralizedCheck check_generalized(const StableGraph& g, int alpha) {
    if (alpha < 0 || alpha >= g.n)
        fail("BadArgument", fmt::format("level {} outside [0, {})", alpha, g.n));

    GeneralizedCheck c;
    // Every node joining inertia > alpha to inertia <= alpha, taken on the
    // downhill half-edge so the invariant is the node's own sigma^alpha.
    for (const Edge& e : g.edges) {
        const Vertex& s = *g.find_vertex(e.src);
        const Vertex& d = *g.find_vertex(e.dst);
        if (!is_component(s) || !is_component(d)) continue;
        if (s.inertia <= alpha || d.inertia > alpha) continue;
        const Rat* val = edge_level(e, alpha);
        if (!val)
            fail("BadGraph", fmt::format("edge {} lacks level {}", e.id, alpha));
        c.rhs += *val - 1;
        ++c.node_count;
    }
    if (c.node_count == 0)
        fail("NoApplicableNodes",
             fmt::format("no node joins inertia > {} to inertia <= {}", alpha, alpha));

    c.lhs = Rat(2 * g.g_x - 2 + pi_count(g, alpha + 1));

    // Connected components of the level subgraph on component vertices.
    std::set<std::string> high;
    for (const Vertex& v : g.vertices)
        if (is_component(v) && v.inertia > alpha) high.insert(v.id);
    std::set<std::string> seen;
    for (const std::string& start : high) {
        if (seen.count(start)) continue;
        ++c.components;
        std::deque<std::string> queue{start};
        seen.insert(start);
        while (!queue.empty()) {
            std::string v = queue.front();
            queue.pop_front();
            for (const Edge* e : out_edges(g, v))
                if (high.count(e->dst) && seen.insert(e->dst).second)
                    queue.push_back(e->dst);
        }
    }
    c.contains_root = high.count(g.root) > 0;
    c.expected_slack =
        Rat(2 * (c.components - 1)) + Rat(2 * g.g_x) * (c.contains_root ? 0 : 1);
    Rat slack = c.lhs - c.rhs;
    c.slack_matches = slack == c.expected_slack;
    c.monotonic = is_monotonic(g, g.root);
    if (slack == 0)
        c.status = GeneralizedCheck::Status::HoldsWithEquality;
    else if (slack > 0)
        c.status = GeneralizedCheck::Status::HoldsStrict;
    else
        c.status = GeneralizedCheck::Status::Fails;
    return c;
}

bool is_monotonic(const StableGraph& g, const std::string& from) {
    const Vertex* f = g.find_vertex(from);
    if (!f || !is_component(*f))
        fail("BadArgument", fmt::format("'{}' is not a component vertex", from));
    auto parent = parent_map(g);
    // Walk outward from `from`; inertia must never increase along an edge.
    std::deque<const Vertex*> queue{f};
    while (!queue.empty()) {
        const Vertex* v = queue.front();
        queue.pop_front();
        for (const Edge* e : out_edges(g, v->id)) {
            const Vertex* w = g.find_vertex(e->dst);
            if (!w || !is_component(*w)) continue;
            auto it = parent.find(w->id);
            if (it == parent.end() || it->second != v->id) continue; // not a child
            if (w->inertia > v->inertia) return false;
            queue.push_back(w);
        }
    }
    return true;
}

std::optional<std::string> monotonic_inconsistency(const StableGraph& g,
                                                   const std::string& from) {
    if (has_etale_tail_outward(g, from, /*strict=*/true)) return std::nullopt;
    if (is_monotonic(g, from)) return std::nullopt;
    return fmt::format(
        "no etale tail lies strictly outward of {}, which forces the reduction to be "
        "monotonic from there, yet the inertia labels increase outward; the input "
        "cannot arise from a stable reduction",
        from);
}

// --------------------------------------------------------------------------
// Tail bounds.
// --------------------------------------------------------------------------

std::vector<Violation> check_tail_constraints(const StableGraph& g) {
    std::vector<Violation> out;
    auto bad = [&](const char* rule, std::string detail) {
        out.push_back({rule, std::move(detail)});
    };
    std::vector<TailRecord> tails = classify_tails(g);

    long etale_count = 0;
    bool has_new_etale = false;
    std::map<int, std::vector<Rat>> by_depth; // p^d-tails: sigma_b values
    for (const TailRecord& t : tails) {
        if (t.r_prime == 0) {
            ++etale_count;
            if (t.flavor == TailFlavor::NewEtale) has_new_etale = true;
        } else {
            by_depth[t.r_prime].push_back(t.sigma);
        }

        if (t.r_prime >= 1) {
            for (size_t i = 0; i < t.truncated.size(); ++i)
                if (!is_integer(t.truncated[i]))
                    bad("insep-tail-integral",
                        fmt::format("tail {}: sigma^{} = {} is not an integer", t.vertex,
                                    t.r_prime + (int)i, format_rat(t.truncated[i])));
            Int bound = pow_int(Int(g.p), (unsigned long)(t.r - t.r_prime - 1));
            if (t.sigma < Rat(bound))
                bad("insep-tail-bound",
                    fmt::format("tail {} (inertia {}) on a component of inertia {}: "
                                "sigma = {} < {}",
                                t.vertex, t.r_prime, t.r, format_rat(t.sigma),
                                bound.get_str()));
        }
        if (t.flavor == TailFlavor::NewEtale || t.flavor == TailFlavor::NewInseparable) {
            Rat bound = Rat(1) + make_rat(1, Int(g.m_g));
            if (t.sigma < bound)
                bad("new-tail-lower-bound",
                    fmt::format("new tail {}: sigma = {} < 1 + 1/{}", t.vertex,
                                format_rat(t.sigma), g.m_g));
        }
        if (t.flavor == TailFlavor::PrimitiveEtale) {
            Rat bound = make_rat(pow_int(Int(g.p), (unsigned long)(t.r - 1)), Int(g.m_g));
            if (t.sigma < bound)
                bad("primitive-tail-bound",
                    fmt::format("primitive tail {} on a component of inertia {}: "
                                "sigma = {} < {}",
                                t.vertex, t.r, format_rat(t.sigma), format_rat(bound)));
        }
        for (const Rat& s : t.truncated)
            if (!denominator_divides(s, Int(g.m_g)))
                bad("sigma-denominator",
                    fmt::format("tail {}: {} is not in (1/{}) Z", t.vertex, format_rat(s),
                                g.m_g));
    }

    if (etale_count >= g.p)
        bad("etale-tail-count",
            fmt::format("{} etale tails but fewer than p = {} are possible", etale_count,
                        g.p));
    for (const auto& [d, sigmas] : by_depth) {
        Int pd = pow_int(Int(g.p), (unsigned long)d);
        if (Int((long)sigmas.size()) >= pd)
            bad("pd-tail-count",
                fmt::format("{} tails of inertia {} but fewer than p^{} = {} are possible",
                            sigmas.size(), d, d, pd.get_str()));
        // k-th largest excess x = sigma - 1 must satisfy k x < p^d; this is
        // the prefix form of the weighted count bound over all cutoffs.
        std::vector<Rat> excess;
        for (const Rat& s : sigmas)
            if (s > 1) excess.push_back(s - 1);
        std::sort(excess.rbegin(), excess.rend());
        for (size_t k = 1; k <= excess.size(); ++k)
            if (Rat((long)k) * excess[k - 1] >= Rat(pd)) {
                bad("tail-count-weighted",
                    fmt::format("inertia-{} tails: {} of them have sigma - 1 >= {}, "
                                "exceeding the weighted bound against p^{} = {}",
                                d, k, format_rat(excess[k - 1]), d, pd.get_str()));
                break;
            }
    }

    bool has_new_insep = false;
    for (const TailRecord& t : tails)
        if (t.flavor == TailFlavor::NewInseparable) has_new_insep = true;
    if (has_new_insep && !has_new_etale)
        bad("no-new-insep-without-new-etale",
            "a new inseparable tail exists but no new etale tail does");

    return out;
}

bool outward_fraction_check(const StableGraph& g, const std::string& edge_id) {
    const Edge* e = g.find_edge(edge_id);
    if (!e) fail("BadArgument", fmt::format("unknown edge '{}'", edge_id));
    const Vertex* s = g.find_vertex(e->src);
    const Vertex* d = g.find_vertex(e->dst);
    if (!s || !d || !is_component(*s) || !is_component(*d))
        fail("BadArgument",
             fmt::format("edge {} touches a branch point; the identity applies to "
                         "component edges",
                         edge_id));
    // Point the edge away from the root.
    if (preceq(g, e->dst, e->src)) e = g.find_edge(e->opp);
    const Rat* level0 = edge_level(*e, 0);
    if (!level0) fail("BadGraph", fmt::format("edge {} lacks level 0", e->id));

    Rat outward_sum = 0;
    for (const Vertex& v : g.vertices) {
        if (!is_component(v) || v.inertia != 0 || v.id == g.root) continue;
        if (!preceq(g, e->dst, v.id)) continue;
        const Edge* in = tail_in_edge(g, v.id);
        const Rat* sb = in ? edge_level(*in, 0) : nullptr;
        if (!sb) fail("BadGraph", fmt::format("tail {} lacks a level-0 invariant", v.id));
        outward_sum += *sb;
    }
    return frac_part(*level0) == frac_part(outward_sum);
}

// --------------------------------------------------------------------------
// Enumeration.
// --------------------------------------------------------------------------

std::vector<TailConfig> enumerate_tail_configs(long p, long m, int num_wild_branch) {
    if (!is_prime_long(p)) fail("BadArgument", fmt::format("p={} is not prime", p));
    if (m < 1 || (p - 1) % m != 0)
        fail("BadArgument", fmt::format("m={} must divide p - 1 = {}", m, p - 1));
    if (num_wild_branch < 0 || num_wild_branch > 3)
        fail("BadArgument",
             fmt::format("num_wild_branch={} outside 0..3", num_wild_branch));

    // In units of 1/m the identity reads: primitive parts a = m sigma >= 1
    // and new parts b = m (sigma - 1) >= 1 sum to m, so this is a two-color
    // partition of m with the primitive color bounded in count.
    const int max_prim = 3 - num_wild_branch;
    std::vector<TailConfig> out;
    std::vector<long> prim_parts, new_parts;

    auto emit = [&]() {
        if ((long)(prim_parts.size() + new_parts.size()) >= p) return;
        TailConfig c;
        for (long a : prim_parts) c.primitive.push_back(make_rat(Int(a), Int(m)));
        for (long b : new_parts) c.new_etale.push_back(make_rat(Int(m + b), Int(m)));
        out.push_back(std::move(c));
    };
    std::function<void(long, long)> gen_new = [&](long rem, long maxpart) {
        if (rem == 0) {
            emit();
            return;
        }
        for (long b = std::min(rem, maxpart); b >= 1; --b) {
            new_parts.push_back(b);
            gen_new(rem - b, b);
            new_parts.pop_back();
        }
    };
    std::function<void(long, long)> gen_prim = [&](long rem, long maxpart) {
        gen_new(rem, rem); // stop taking primitive parts here
        if (rem == 0 || (int)prim_parts.size() >= max_prim) return;
        for (long a = std::min(rem, maxpart); a >= 1; --a) {
            prim_parts.push_back(a);
            gen_prim(rem - a, a);
            prim_parts.pop_back();
        }
    };
    gen_prim(m, m);
    return out;
}

StableGraph realize_star(long p, long m, const TailConfig& config) {
    StableGraph g;
    g.p = p;
    g.n = 1;
    g.m_g = m;
    g.g_x = 0;
    g.root = "v0";
    Vertex root;
    root.id = "v0";
    root.inertia = 1;
    g.vertices.push_back(root);

    const Int tame_index = p == 2 ? 3 : 2;
    int k = 0;
    auto add_tail = [&](const Rat& sigma, bool primitive) {
        Vertex t;
        t.id = fmt::format("t{}", k);
        t.inertia = 0;
        if (primitive) {
            t.tame_branch_indices.push_back(tame_index);
            g.branch_indices.push_back(tame_index);
        }
        g.vertices.push_back(t);
        Edge e{fmt::format("e{}", k), "v0", t.id, fmt::format("e{}r", k), {{0, sigma}}};
        Edge r{fmt::format("e{}r", k), t.id, "v0", fmt::format("e{}", k), {{0, -sigma}}};
        g.edges.push_back(e);
        g.edges.push_back(r);
        ++k;
    };
    for (const Rat& s : config.primitive) add_tail(s, true);
    for (const Rat& s : config.new_etale) add_tail(s, false);

    const int wild = 3 - (int)config.primitive.size();
    for (int i = 0; i < wild; ++i) {
        Vertex b;
        b.id = fmt::format("b{}", i);
        b.kind = VertexKind::WildBranchPoint;
        b.index = p;
        b.branch_p_exp = 1;
        g.vertices.push_back(b);
        g.branch_indices.push_back(Int(p));
        Edge e{fmt::format("f{}", i), "v0", b.id, fmt::format("f{}r", i), {{0, Rat(0)}}};
        Edge r{fmt::format("f{}r", i), b.id, "v0", fmt::format("f{}", i), {{0, Rat(0)}}};
        g.edges.push_back(e);
        g.edges.push_back(r);
    }
    return g;
}

// --------------------------------------------------------------------------
// Monodromy reporting.
// --------------------------------------------------------------------------

MonodromyReport monodromy_report(const StableGraph& g, const MonodromyInputs& in) {
    MonodromyReport r;
    r.indices_prime_to_p = true;
    for (const Int& e : g.branch_indices)
        if (vp(e, g.p) > 0) r.indices_prime_to_p = false;
    for (const TailRecord& t : classify_tails(g))
        if (t.flavor == TailFlavor::NewEtale) r.has_new_etale_tails = true;

    Rat threshold = make_rat(Int(g.p - 1), Int(g.m_g));
    r.below_threshold = in.e_abs < threshold;
    r.threshold_exact = in.e_abs == threshold;

    if (in.assert_center_prime_to_p && g.n >= 1) {
        r.exponent_bound = pow_int(Int(g.p), (unsigned long)(g.n - 1));
        r.notes.push_back(fmt::format(
            "p-part of the monodromy has exponent dividing p^(n-1) = {} since p does "
            "not divide the center's order",
            r.exponent_bound->get_str()));
    }

    r.wild_monodromy_trivial = r.indices_prime_to_p && !r.has_new_etale_tails;
    r.wild_monodromy_nontrivial = r.below_threshold && in.assert_bad_reduction;
    r.potentially_good = r.below_threshold && !r.has_new_etale_tails;
    r.inconsistent = r.wild_monodromy_trivial && r.wild_monodromy_nontrivial;

    if (r.threshold_exact)
        r.notes.push_back(fmt::format(
            "e_abs equals (p-1)/m_G = {} exactly; the reduction criteria require "
            "strict inequality",
            format_rat(threshold)));
    if (r.inconsistent) {
        r.verdict = "inconsistent";
        r.notes.push_back(
            "prime-to-p indices with no new etale tails force trivial wild monodromy, "
            "but bad reduction below the (p-1)/m_G threshold forces it nontrivial");
    } else if (r.potentially_good) {
        r.verdict = "potentially good reduction";
    } else if (r.wild_monodromy_trivial) {
        r.verdict = "trivial wild monodromy";
    } else if (r.wild_monodromy_nontrivial) {
        r.verdict = "nontrivial wild monodromy";
    } else {
        r.verdict = "inconclusive";
    }
    return r;
}

// --------------------------------------------------------------------------
// Serialization.
// --------------------------------------------------------------------------

StableGraph graph_from_json(const nlohmann::json& j) {
    if (!j.is_object()) fail("BadGraph", "graph document must be a JSON object");
    StableGraph g;
    try {
        g.p = j.at("p").get<long>();
        g.n = j.at("n").get<int>();
        g.m_g = j.value("m", 1L);
        g.g_x = j.value("gX", 0L);
        for (const auto& b : j.value("branch_indices", nlohmann::json::array()))
            g.branch_indices.push_back(Int(b.get<long>()));
        g.root = j.at("root").get<std::string>();

        for (const auto& vj : j.at("vertices")) {
            Vertex v;
            v.id = vj.at("id").get<std::string>();
            std::string kind = vj.value("kind", std::string("component"));
            if (kind == "component") {
                v.kind = VertexKind::Component;
                v.genus = vj.value("genus", 0L);
                v.inertia = vj.value("inertia", 0);
                for (const auto& b :
                     vj.value("tame_branch_indices", nlohmann::json::array()))
                    v.tame_branch_indices.push_back(Int(b.get<long>()));
                for (const auto& dj :
                     vj.value("deformation_data", nlohmann::json::array()))
                    v.deformation_data.push_back(datum_from_json(dj, g.p));
            } else if (kind == "wild_branch_point") {
                v.kind = VertexKind::WildBranchPoint;
                v.index = Int(vj.at("index").get<long>());
                int derived = vp(v.index, g.p);
                v.branch_p_exp = vj.value("branch_p_exp", derived);
                if (v.branch_p_exp != derived)
                    fail("BadGraph",
                         fmt::format("vertex {}: branch_p_exp {} but v_{}({}) = {}", v.id,
                                     v.branch_p_exp, g.p, v.index.get_str(), derived));
            } else {
                fail("BadGraph", fmt::format("vertex {}: unknown kind '{}'", v.id, kind));
            }
            g.vertices.push_back(std::move(v));
        }

        for (const auto& ej : j.at("edges")) {
            Edge e;
            e.id = ej.at("id").get<std::string>();
            e.src = ej.at("src").get<std::string>();
            e.dst = ej.at("dst").get<std::string>();
            e.opp = ej.at("opp").get<std::string>();
            const nlohmann::json sig = ej.value("sigma_eff", nlohmann::json::object());
            for (const auto& [key, val] : sig.items()) {
                size_t pos = 0;
                int alpha = std::stoi(key, &pos);
                if (pos != key.size() || alpha < 0)
                    fail("BadGraph",
                         fmt::format("edge {}: bad truncation level '{}'", e.id, key));
                e.sigma_eff[alpha] = parse_rat(val.get<std::string>());
            }
            g.edges.push_back(std::move(e));
        }
    } catch (const nlohmann::json::exception& ex) {
        fail("BadGraph", ex.what());
    } catch (const std::invalid_argument&) {
        fail("BadGraph", "truncation levels must be small nonnegative integers");
    }

    for (const Edge& e : g.edges) {
        if (!g.find_vertex(e.src) || !g.find_vertex(e.dst))
            fail("BadGraph", fmt::format("edge {} references an unknown vertex", e.id));
        if (!g.find_edge(e.opp))
            fail("BadGraph", fmt::format("edge {} references unknown opposite '{}'", e.id,
                                         e.opp));
    }
    if (!g.find_vertex(g.root))
        fail("BadGraph", fmt::format("root '{}' is not a vertex", g.root));
    return g;
}

nlohmann::json graph_to_json(const StableGraph& g) {
    nlohmann::json j;
    j["p"] = g.p;
    j["n"] = g.n;
    j["m"] = g.m_g;
    j["gX"] = g.g_x;
    j["branch_indices"] = nlohmann::json::array();
    for (const Int& b : g.branch_indices) j["branch_indices"].push_back(b.get_si());
    j["root"] = g.root;
    j["vertices"] = nlohmann::json::array();
    for (const Vertex& v : g.vertices) {
        nlohmann::json vj;
        vj["id"] = v.id;
        if (is_component(v)) {
            vj["kind"] = "component";
            vj["genus"] = v.genus;
            vj["inertia"] = v.inertia;
            if (!v.tame_branch_indices.empty()) {
                vj["tame_branch_indices"] = nlohmann::json::array();
                for (const Int& b : v.tame_branch_indices)
                    vj["tame_branch_indices"].push_back(b.get_si());
            }
            if (!v.deformation_data.empty()) {
                vj["deformation_data"] = nlohmann::json::array();
                for (const DeformationDatum& d : v.deformation_data)
                    vj["deformation_data"].push_back(datum_to_json(d));
            }
        } else {
            vj["kind"] = "wild_branch_point";
            vj["index"] = v.index.get_si();
            vj["branch_p_exp"] = v.branch_p_exp;
        }
        j["vertices"].push_back(std::move(vj));
    }
    j["edges"] = nlohmann::json::array();
    for (const Edge& e : g.edges) {
        nlohmann::json ej;
        ej["id"] = e.id;
        ej["src"] = e.src;
        ej["dst"] = e.dst;
        ej["opp"] = e.opp;
        ej["sigma_eff"] = nlohmann::json::object();
        for (const auto& [alpha, s] : e.sigma_eff)
            ej["sigma_eff"][std::to_string(alpha)] = format_rat(s);
        j["edges"].push_back(std::move(ej));
    }
    return j;
}

StableGraph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("BadGraph", fmt::format("cannot open '{}'", path));
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& ex) {
        fail("BadGraph", fmt::format("{}: {}", path, ex.what()));
    }
    return graph_from_json(j);
}

} // namespace wildram
