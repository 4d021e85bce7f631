#pragma once

// Random monotonic component trees whose edge invariants are solved level by
// level so that every truncated local identity holds by construction.  Every
// component gets exactly one etale tail; its invariant absorbs whatever the
// randomly chosen sibling edges leave over, which is what makes the local
// sums telescope into the global identity.

#include <wildram/stablegraph.hpp>

#include <map>
#include <random>
#include <string>
#include <vector>

namespace testsupport {

inline wildram::StableGraph random_telescoping_tree(std::mt19937& rng) {
    using namespace wildram;
    auto pick = [&](int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(rng);
    };

    StableGraph g;
    const long primes[] = {3, 5, 7};
    g.p = primes[pick(0, 2)];
    g.n = pick(1, 3);
    g.m_g = 1;
    g.g_x = 0;

    long vid = 0, eid = 0;
    auto add_component = [&](int inertia) {
        Vertex v;
        v.id = "v" + std::to_string(vid++);
        v.kind = VertexKind::Component;
        v.inertia = inertia;
        g.vertices.push_back(v);
        return v.id;
    };
    // Opposite half-edge pair a -> b with the given levels; the reverse gets
    // the negated invariants.  Returns the forward id.
    auto connect = [&](const std::string& a, const std::string& b,
                       const std::map<int, Rat>& levels) {
        Edge e, f;
        e.id = "e" + std::to_string(eid);
        f.id = "e" + std::to_string(eid) + "r";
        ++eid;
        e.src = a;
        e.dst = b;
        e.opp = f.id;
        f.src = b;
        f.dst = a;
        f.opp = e.id;
        e.sigma_eff = levels;
        for (const auto& [alpha, s] : levels) f.sigma_eff[alpha] = -s;
        g.edges.push_back(e);
        g.edges.push_back(f);
        return e.id;
    };

    std::vector<std::string> etale_tails;

    // Builds the subtree under a fresh component of the given inertia and
    // returns its id; to_parent holds sigma^alpha on the half-edge pointing
    // back at the parent (empty for the root).
    auto build = [&](auto&& self, int inertia,
                     const std::vector<Rat>& to_parent) -> std::string {
        const std::string me = add_component(inertia);
        const int degree_budget = inertia >= 2 ? pick(0, 2) : pick(0, 1);

        struct Child {
            int inertia;
            std::vector<Rat> down; // sigma on my half-edge toward the child
        };
        std::vector<Child> children;
        for (int c = 0; c < degree_budget; ++c) {
            Child ch;
            ch.inertia = pick(1, inertia > 1 ? inertia - 1 : 1);
            if (ch.inertia >= inertia) continue; // keep inertia strictly decreasing
            for (int alpha = 0; alpha < inertia; ++alpha)
                ch.down.emplace_back(pick(-3, 3));
            children.push_back(ch);
        }

        // One etale tail; solve its invariant per level from the identity
        // sum over incident half-edges of (sigma^alpha - 1) = 2g - 2 = -2.
        const long degree = 1 + (long)children.size() + (to_parent.empty() ? 0 : 1);
        std::map<int, Rat> tail_levels;
        for (int alpha = 0; alpha < inertia; ++alpha) {
            Rat sum = 0;
            if (!to_parent.empty()) sum += to_parent[(size_t)alpha];
            for (const Child& ch : children) sum += ch.down[(size_t)alpha];
            tail_levels[alpha] = Rat(degree - 2) - sum;
        }
        const std::string tail = add_component(0);
        etale_tails.push_back(tail);
        connect(me, tail, tail_levels);

        for (const Child& ch : children) {
            std::map<int, Rat> lv;
            std::vector<Rat> child_up;
            for (int alpha = 0; alpha < inertia; ++alpha) {
                lv[alpha] = ch.down[(size_t)alpha];
                if (alpha < ch.inertia) child_up.emplace_back(-ch.down[(size_t)alpha]);
            }
            connect(me, self(self, ch.inertia, child_up), lv);
        }
        return me;
    };

    g.root = build(build, g.n, {});

    // Three tame branch points, prime to p, hosted on etale tails.
    for (int i = 0; i < 3; ++i) {
        long idx = 2 + pick(0, 5);
        while (idx % g.p == 0) ++idx;
        g.branch_indices.emplace_back(idx);
        std::string host = etale_tails[(size_t)pick(0, (int)etale_tails.size() - 1)];
        for (Vertex& v : g.vertices)
            if (v.id == host) v.tame_branch_indices.emplace_back(idx);
    }
    return g;
}

} // namespace testsupport
