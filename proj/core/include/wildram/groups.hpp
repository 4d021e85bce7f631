#pragma once

#include "wildram/rational.hpp"

#include <array>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace wildram {

// A finite group given by generators in one of a handful of concrete shapes.
// Text forms accepted by parse():
//   perm (1 2 3)(4 5); (1 2)
//   cyclic 15
//   semidirect 5 4 action=2          (Z/5 x| Z/4, generator acting by x -> 2x)
//   product cyclic 3 | semidirect 5 4 action=2
//   sl2 q=11
//   pgl3 q=2
struct GroupSpec {
    enum class Kind { Permutation, Cyclic, Semidirect, Product, SL2, PGL3 };
    Kind kind = Kind::Permutation;
    long q = 0;                                // SL2 / PGL3 field size
    std::vector<std::vector<long>> perm_gens;  // 0-based image arrays, equal degree
    long cyc = 0;                              // cyclic order
    long sd_a = 0, sd_b = 0, sd_action = 0;    // Z/a x| Z/b via x -> action * x
    std::vector<GroupSpec> factors;            // direct product

    static GroupSpec parse(std::string_view text);
    std::string describe() const;
};

// Generator-based multiplication oracle.  Elements are flat arrays of small
// nonnegative integers in a kind-specific canonical encoding (permutation
// images, matrix entries, projective matrices scaled so the first nonzero
// entry is 1).
class FiniteGroup {
public:
    using Elem = std::vector<uint16_t>;

    virtual ~FiniteGroup() = default;
    virtual Elem identity() const = 0;
    virtual Elem mul(const Elem& a, const Elem& b) const = 0;
    virtual Elem inv(const Elem& a) const = 0;
    virtual const std::vector<Elem>& generators() const = 0;
    // Theoretical order when the shape determines it, else 0.
    virtual Int order_hint() const { return Int(0); }
};

std::unique_ptr<FiniteGroup> realize(const GroupSpec& spec);

// Breadth-first closure of the generators.  Throws
// ToolkitError("OrderCapExceeded") when more than order_cap elements appear.
std::vector<FiniteGroup::Elem> enumerate_elements(const FiniteGroup& g, long order_cap);

struct SylowAnalysis {
    long p = 0;
    int n = 0;              // v_p of the group order
    bool is_cyclic = false; // p-Sylow cyclic
    long m = 1;             // |N(P) / Z(P)| for a p-Sylow P
    bool center_has_p = false;
    Int group_order;
    bool structural = false; // derived from a classification shortcut, not by closure
};

enum class SylowMethod { Auto, Brute, Structural };

// p-Sylow invariants.  Brute force enumerates the group (subject to
// order_cap); the structural path covers SL2(q) for p dividing q^2 - 1 or
// p = char, and PGL3(q) for p >= 5 dividing q^2 + q + 1.  Auto prefers brute
// force within the cap and falls back to structure.
SylowAnalysis sylow_analyze(const GroupSpec& spec, long p,
                            SylowMethod method = SylowMethod::Auto,
                            long order_cap = 2000000);

struct QuotientReport {
    Int group_order;
    Int n_order;        // maximal normal subgroup of order prime to p
    Int quotient_order;
    int n = 0;          // p-exponent of the quotient
    long m = 1;         // prime-to-p part of the quotient order
    long action_order = 1;
    std::string shape;  // "Z/p^n", "Z/p^n x| Z/m", or "other"
};

// Quotient of G by its maximal normal prime-to-p subgroup, for G with a
// normal subgroup of order p (checked; ToolkitError("NoNormalPSubgroup")
// otherwise).  The quotient is classified as a cyclic p-group extended by a
// faithful cyclic tame action whenever that holds.
QuotientReport quotient_structure(const GroupSpec& spec, long p, long order_cap = 2000000);

struct MatrixTriple {
    long q = 0;
    std::array<long, 4> alpha{}, beta{}; // row-major 2x2 over GF(q)
    std::array<long, 3> orders{};
    long tau = 0, rho = 0; // tr(beta), tr(alpha*beta)
    bool generation_verified_exhaustively = false;
};

// Matrices alpha = [[1,1],[0,1]] and beta with the requested element orders
// (ord alpha, ord beta, ord alpha*beta) generating SL2(q).  The search runs
// over the traces realizing the orders; the lexicographically least beta is
// returned, so the result is reproducible.  Errors: "NoSuchTraces" when no
// trace assignment works, "GenerationUnverified" when the group is too large
// to enumerate and no structural certificate applies.
MatrixTriple find_sl2_triple(long q, const std::array<long, 3>& orders,
                             long order_cap = 2000000);

struct Pgl3Data {
    int n = 0;                  // v_p(q^2 + q + 1)
    long m = 0;                 // normalizer-modulo-centralizer order (3) when applicable
    bool in_singer_torus = false;
};

// p-Sylow data of PGL3(q) for p >= 5 prime to q: the Sylow lies in the
// cyclic torus of order q^2 + q + 1 iff p divides that number; then it is
// cyclic of order p^n with m = 3.
Pgl3Data pgl3_p_data(long q, long p);

} // namespace wildram
