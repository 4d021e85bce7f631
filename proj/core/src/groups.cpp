#include "wildram/groups.hpp"

#include "wildram/errors.hpp"
#include "wildram/gf.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <memory>
#include <unordered_set>
#include <utility>

namespace wildram {

namespace {

using Elem = FiniteGroup::Elem;

struct ElemHash {
    size_t operator()(const Elem& e) const noexcept {
        size_t h = 1469598103934665603ull;
        for (uint16_t v : e) {
            h ^= v;
            h *= 1099511628211ull;
        }
        return h;
    }
};

using ElemSet = std::unordered_set<Elem, ElemHash>;

bool is_prime_long(long n) {
    if (n < 2) return false;
    for (long d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

// Smallest prime factor, with the cofactor check that n is a power of it.
bool is_prime_power_long(long n) {
    if (n < 2) return false;
    long d = 2;
    while (d * d <= n && n % d != 0) ++d;
    long p = (d * d <= n) ? d : n;
    while (n % p == 0) n /= p;
    return n == 1;
}

int vp_long(long n, long p) {
    int v = 0;
    while (n != 0 && n % p == 0) {
        n /= p;
        ++v;
    }
    return v;
}

// ---------------------------------------------------------------------------
// Parsing helpers
// ---------------------------------------------------------------------------

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

long parse_long_tok(std::string_view tok, const char* what) {
    long value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        fail("BadGroupSpec", fmt::format("expected an integer for {}, got '{}'", what, std::string(tok)));
    return value;
}

std::vector<std::string_view> whitespace_tokens(std::string_view s) {
    std::vector<std::string_view> out;
    size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

// "(1 2 3)(4 5)" -> {{1,2,3},{4,5}}; points are 1-based and must be distinct
// within one generator.
std::vector<std::vector<long>> parse_cycles(std::string_view s) {
    std::vector<std::vector<long>> cycles;
    size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        if (i >= s.size()) break;
        if (s[i] != '(')
            fail("BadGroupSpec", fmt::format("expected '(' in cycle notation, got '{}'", s[i]));
        ++i;
        std::vector<long> cycle;
        while (true) {
            while (i < s.size() && (std::isspace(static_cast<unsigned char>(s[i])) || s[i] == ','))
                ++i;
            if (i >= s.size()) fail("BadGroupSpec", "unterminated cycle");
            if (s[i] == ')') {
                ++i;
                break;
            }
            size_t j = i;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            if (j == i) fail("BadGroupSpec", "expected a point number inside a cycle");
            cycle.push_back(parse_long_tok(s.substr(i, j - i), "cycle point"));
            i = j;
        }
        if (cycle.empty()) fail("BadGroupSpec", "empty cycle");
        cycles.push_back(std::move(cycle));
    }
    if (cycles.empty()) fail("BadGroupSpec", "permutation generator needs at least one cycle");
    return cycles;
}

long parse_q_token(std::string_view rest, const char* kind) {
    auto toks = whitespace_tokens(rest);
    if (toks.size() != 1 || toks[0].substr(0, 2) != "q=")
        fail("BadGroupSpec", fmt::format("{} takes a single argument of the form q=<prime power>", kind));
    long q = parse_long_tok(toks[0].substr(2), "field size");
    if (q < 2 || !is_prime_power_long(q))
        fail("BadGroupSpec", fmt::format("field size {} is not a prime power >= 2", q));
    return q;
}

// ---------------------------------------------------------------------------
// Concrete realizations
// ---------------------------------------------------------------------------

class PermutationGroup final : public FiniteGroup {
public:
    PermutationGroup(std::vector<std::vector<long>> images, Int hint)
        : hint_(std::move(hint)) {
        if (images.empty()) fail("BadGroupSpec", "permutation group needs a generator");
        degree_ = images.front().size();
        for (const auto& img : images) {
            if (img.size() != degree_)
                fail("BadGroupSpec", "permutation generators act on different point sets");
            Elem e(degree_);
            for (size_t i = 0; i < degree_; ++i) e[i] = static_cast<uint16_t>(img[i]);
            gens_.push_back(std::move(e));
        }
    }

    Elem identity() const override {
        Elem e(degree_);
        for (size_t i = 0; i < degree_; ++i) e[i] = static_cast<uint16_t>(i);
        return e;
    }
    // (ab)(i) = a(b(i))
    Elem mul(const Elem& a, const Elem& b) const override {
        Elem r(degree_);
        for (size_t i = 0; i < degree_; ++i) r[i] = a[b[i]];
        return r;
    }
    Elem inv(const Elem& a) const override {
        Elem r(degree_);
        for (size_t i = 0; i < degree_; ++i) r[a[i]] = static_cast<uint16_t>(i);
        return r;
    }
    const std::vector<Elem>& generators() const override { return gens_; }
    Int order_hint() const override { return hint_; }

private:
    size_t degree_ = 0;
    std::vector<Elem> gens_;
    Int hint_;
};

class SL2Group final : public FiniteGroup {
public:
    explicit SL2Group(long q, std::vector<Elem> gens = {}) : gf_(q) {
        if (gens.empty()) {
            // Upper and lower transvections over an additive basis of the
            // field generate the full group.
            long g = gf_.k() == 1 ? 1 : gf_.primitive_element();
            long lambda = 1;
            for (int i = 0; i < gf_.k(); ++i) {
                gens.push_back(make(1, lambda, 0, 1));
                gens.push_back(make(1, 0, lambda, 1));
                lambda = gf_.mul(lambda, g);
            }
        }
        gens_ = std::move(gens);
    }

    static Elem make(long a, long b, long c, long d) {
        return Elem{static_cast<uint16_t>(a), static_cast<uint16_t>(b),
                    static_cast<uint16_t>(c), static_cast<uint16_t>(d)};
    }

    Elem identity() const override { return make(1, 0, 0, 1); }
    Elem mul(const Elem& x, const Elem& y) const override {
        const GF& f = gf_;
        return make(f.add(f.mul(x[0], y[0]), f.mul(x[1], y[2])),
                    f.add(f.mul(x[0], y[1]), f.mul(x[1], y[3])),
                    f.add(f.mul(x[2], y[0]), f.mul(x[3], y[2])),
                    f.add(f.mul(x[2], y[1]), f.mul(x[3], y[3])));
    }
    // Determinant-one inverse.
    Elem inv(const Elem& x) const override {
        return make(x[3], gf_.neg(x[1]), gf_.neg(x[2]), x[0]);
    }
    const std::vector<Elem>& generators() const override { return gens_; }
    Int order_hint() const override {
        Int q(gf_.q());
        return q * (q * q - 1);
    }
    const GF& field() const { return gf_; }

private:
    GF gf_;
    std::vector<Elem> gens_;
};

class PGL3Group final : public FiniteGroup {
public:
    explicit PGL3Group(long q) : gf_(q) {
        long g = gf_.k() == 1 ? (q > 2 ? gf_.primitive_element() : 1) : gf_.primitive_element();
        // 3-cycle and transposition permutation matrices, a transvection per
        // basis scalar, and a determinant twist.
        gens_.push_back(canon({0, 0, 1, 1, 0, 0, 0, 1, 0}));
        gens_.push_back(canon({0, 1, 0, 1, 0, 0, 0, 0, 1}));
        long lambda = 1;
        for (int i = 0; i < gf_.k(); ++i) {
            gens_.push_back(canon({1, (uint16_t)lambda, 0, 0, 1, 0, 0, 0, 1}));
            lambda = gf_.mul(lambda, g);
        }
        if (g != 1) gens_.push_back(canon({(uint16_t)g, 0, 0, 0, 1, 0, 0, 0, 1}));
    }

    Elem canon(Elem m) const {
        for (size_t i = 0; i < 9; ++i) {
            if (m[i] != 0) {
                if (m[i] != 1) {
                    long s = gf_.inv(m[i]);
                    for (size_t j = i; j < 9; ++j)
                        m[j] = static_cast<uint16_t>(gf_.mul(m[j], s));
                }
                return m;
            }
        }
        fail("InternalError", "zero matrix in projective group");
    }

    Elem identity() const override { return Elem{1, 0, 0, 0, 1, 0, 0, 0, 1}; }
    Elem mul(const Elem& x, const Elem& y) const override {
        Elem r(9, 0);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                long acc = 0;
                for (int k = 0; k < 3; ++k)
                    acc = gf_.add(acc, gf_.mul(x[3 * i + k], y[3 * k + j]));
                r[3 * i + j] = static_cast<uint16_t>(acc);
            }
        return canon(std::move(r));
    }
    // The adjugate is a scalar multiple of the inverse, which is the same
    // projective element.
    Elem inv(const Elem& x) const override {
        auto mn = [&](int a, int b, int c, int d) {
            return gf_.sub(gf_.mul(x[a], x[d]), gf_.mul(x[b], x[c]));
        };
        Elem r(9, 0);
        r[0] = static_cast<uint16_t>(mn(4, 5, 7, 8));
        r[1] = static_cast<uint16_t>(gf_.neg(mn(1, 2, 7, 8)));
        r[2] = static_cast<uint16_t>(mn(1, 2, 4, 5));
        r[3] = static_cast<uint16_t>(gf_.neg(mn(3, 5, 6, 8)));
        r[4] = static_cast<uint16_t>(mn(0, 2, 6, 8));
        r[5] = static_cast<uint16_t>(gf_.neg(mn(0, 2, 3, 5)));
        r[6] = static_cast<uint16_t>(mn(3, 4, 6, 7));
        r[7] = static_cast<uint16_t>(gf_.neg(mn(0, 1, 6, 7)));
        r[8] = static_cast<uint16_t>(mn(0, 1, 3, 4));
        return canon(std::move(r));
    }
    const std::vector<Elem>& generators() const override { return gens_; }
    Int order_hint() const override {
        Int q(gf_.q());
        Int q3 = q * q * q;
        return (q3 - 1) * (q3 - q) * (q3 - q * q) / (q - 1);
    }

private:
    GF gf_;
    std::vector<Elem> gens_;
};

class ProductGroup final : public FiniteGroup {
public:
    explicit ProductGroup(std::vector<std::unique_ptr<FiniteGroup>> factors)
        : factors_(std::move(factors)) {
        for (const auto& f : factors_) {
            ids_.push_back(f->identity());
            lens_.push_back(ids_.back().size());
        }
        for (size_t i = 0; i < factors_.size(); ++i) {
            for (const Elem& g : factors_[i]->generators()) {
                Elem e;
                for (size_t j = 0; j < factors_.size(); ++j) {
                    const Elem& block = (j == i) ? g : ids_[j];
                    e.insert(e.end(), block.begin(), block.end());
                }
                gens_.push_back(std::move(e));
            }
        }
    }

    Elem identity() const override {
        Elem e;
        for (const Elem& id : ids_) e.insert(e.end(), id.begin(), id.end());
        return e;
    }
    Elem mul(const Elem& a, const Elem& b) const override { return blockwise(a, b); }
    Elem inv(const Elem& a) const override {
        Elem e;
        size_t off = 0;
        for (size_t i = 0; i < factors_.size(); ++i) {
            Elem block(a.begin() + off, a.begin() + off + lens_[i]);
            Elem r = factors_[i]->inv(block);
            e.insert(e.end(), r.begin(), r.end());
            off += lens_[i];
        }
        return e;
    }
    const std::vector<Elem>& generators() const override { return gens_; }
    Int order_hint() const override {
        Int h(1);
        for (const auto& f : factors_) {
            Int fh = f->order_hint();
            if (fh == 0) return Int(0);
            h *= fh;
        }
        return h;
    }

private:
    Elem blockwise(const Elem& a, const Elem& b) const {
        Elem e;
        size_t off = 0;
        for (size_t i = 0; i < factors_.size(); ++i) {
            Elem ab(a.begin() + off, a.begin() + off + lens_[i]);
            Elem bb(b.begin() + off, b.begin() + off + lens_[i]);
            Elem r = factors_[i]->mul(ab, bb);
            e.insert(e.end(), r.begin(), r.end());
            off += lens_[i];
        }
        return e;
    }

    std::vector<std::unique_ptr<FiniteGroup>> factors_;
    std::vector<Elem> ids_;
    std::vector<size_t> lens_;
    std::vector<Elem> gens_;
};

// Quotient by a normal subgroup given by its full element list.  Elements
// are the lexicographically least representatives of their cosets, so the
// FiniteGroup interface stays usable (identity/mul/inv are all computed in
// canonical form).
class CosetGroup final : public FiniteGroup {
public:
    CosetGroup(const FiniteGroup& base, std::vector<Elem> nels)
        : base_(base), nels_(std::move(nels)) {
        if (nels_.empty()) fail("InternalError", "coset group needs a nonempty kernel");
        id_ = canon(base_.identity());
        for (const Elem& g : base_.generators()) gens_.push_back(canon(g));
    }

    Elem canon(const Elem& x) const {
        Elem best = base_.mul(x, nels_.front());
        for (size_t i = 1; i < nels_.size(); ++i) {
            Elem cand = base_.mul(x, nels_[i]);
            if (cand < best) best = std::move(cand);
        }
        return best;
    }

    Elem identity() const override { return id_; }
    Elem mul(const Elem& a, const Elem& b) const override { return canon(base_.mul(a, b)); }
    Elem inv(const Elem& a) const override { return canon(base_.inv(a)); }
    const std::vector<Elem>& generators() const override { return gens_; }

private:
    const FiniteGroup& base_;
    std::vector<Elem> nels_;
    std::vector<Elem> gens_;
    Elem id_;
};

// ---------------------------------------------------------------------------
// Generic machinery
// ---------------------------------------------------------------------------

std::vector<Elem> closure_from(const FiniteGroup& g, const std::vector<Elem>& seeds, long cap) {
    std::vector<Elem> out;
    ElemSet seen;
    out.push_back(g.identity());
    seen.insert(out.back());
    for (size_t head = 0; head < out.size(); ++head) {
        for (const Elem& s : seeds) {
            Elem next = g.mul(out[head], s);
            if (seen.insert(next).second) {
                out.push_back(std::move(next));
                if (static_cast<long>(out.size()) > cap)
                    fail("OrderCapExceeded",
                         fmt::format("group closure exceeded the cap of {} elements", cap));
            }
        }
    }
    return out;
}

Elem elem_pow(const FiniteGroup& g, Elem x, long e) {
    Elem acc = g.identity();
    while (e > 0) {
        if (e & 1) acc = g.mul(acc, x);
        x = g.mul(x, x);
        e >>= 1;
    }
    return acc;
}

long elem_order(const FiniteGroup& g, const Elem& x, long cap) {
    Elem id = g.identity();
    Elem acc = x;
    long k = 1;
    while (acc != id) {
        acc = g.mul(acc, x);
        if (++k > cap) fail("InternalError", "element order exceeded the scan cap");
    }
    return k;
}

long center_order(const FiniteGroup& g, const std::vector<Elem>& els) {
    long c = 0;
    for (const Elem& x : els) {
        bool central = true;
        for (const Elem& gen : g.generators())
            if (g.mul(x, gen) != g.mul(gen, x)) {
                central = false;
                break;
            }
        if (central) ++c;
    }
    return c;
}

struct SylowCore {
    int n = 0;
    bool is_cyclic = true;
    std::vector<Elem> sylow; // all elements of one p-Sylow subgroup
    std::vector<Elem> seeds; // generating set of that subgroup
};

// One p-Sylow subgroup of an enumerated group.  The p-parts x^(|G|/p^n) of
// the elements exhaust the p-elements; a maximal-order one seeds the
// subgroup, which is grown inside its normalizer until it has full order.
SylowCore sylow_core(const FiniteGroup& g, const std::vector<Elem>& els, long p) {
    SylowCore out;
    long order = static_cast<long>(els.size());
    out.n = vp_long(order, p);
    if (out.n == 0) {
        out.sylow = {g.identity()};
        return out;
    }
    long pn = 1;
    for (int i = 0; i < out.n; ++i) pn *= p;
    long mprime = order / pn;

    ElemSet pset;
    std::vector<Elem> pelems;
    for (const Elem& x : els) {
        Elem y = elem_pow(g, x, mprime);
        if (pset.insert(y).second) pelems.push_back(std::move(y));
    }

    auto p_exponent = [&](const Elem& y) {
        Elem z = y;
        Elem id = g.identity();
        int j = 0;
        while (z != id) {
            z = elem_pow(g, z, p);
            if (++j > out.n) fail("InternalError", "p-power order exceeds the Sylow exponent");
        }
        return j;
    };

    int best_j = 0;
    const Elem* best = nullptr;
    for (const Elem& y : pelems) {
        int j = p_exponent(y);
        if (j > best_j) {
            best_j = j;
            best = &y;
        }
    }
    if (best == nullptr) fail("InternalError", "no p-element found despite p dividing the order");

    out.is_cyclic = (best_j == out.n);
    out.seeds = {*best};
    out.sylow = closure_from(g, out.seeds, pn);

    // A proper p-subgroup always has a p-element outside it in its
    // normalizer, so this terminates with a full Sylow subgroup.
    while (static_cast<long>(out.sylow.size()) < pn) {
        ElemSet cur(out.sylow.begin(), out.sylow.end());
        bool grew = false;
        for (const Elem& x : pelems) {
            if (cur.count(x)) continue;
            Elem xi = g.inv(x);
            bool normalizes = true;
            for (const Elem& s : out.seeds)
                if (!cur.count(g.mul(g.mul(x, s), xi))) {
                    normalizes = false;
                    break;
                }
            if (!normalizes) continue;
            out.seeds.push_back(x);
            out.sylow = closure_from(g, out.seeds, pn);
            grew = true;
            break;
        }
        if (!grew) fail("InternalError", "Sylow subgroup growth stalled");
    }
    return out;
}

// |N_G(P)| and |Z_G(P)| in one scan; conjugating the generating set decides
// both membership questions.
std::pair<long, long> normalizer_centralizer(const FiniteGroup& g, const std::vector<Elem>& els,
                                             const SylowCore& core) {
    ElemSet pset(core.sylow.begin(), core.sylow.end());
    long n_count = 0, z_count = 0;
    for (const Elem& x : els) {
        Elem xi = g.inv(x);
        bool normalizes = true, centralizes = true;
        for (const Elem& s : core.seeds) {
            Elem conj = g.mul(g.mul(x, s), xi);
            if (conj != s) centralizes = false;
            if (!pset.count(conj)) {
                normalizes = false;
                break;
            }
        }
        if (normalizes) {
            ++n_count;
            if (centralizes) ++z_count;
        }
    }
    return {n_count, z_count};
}

bool subgroup_is_normal(const FiniteGroup& g, const ElemSet& sub_set,
                        const std::vector<Elem>& sub_seeds) {
    for (const Elem& gen : g.generators()) {
        Elem gi = g.inv(gen);
        for (const Elem& s : sub_seeds)
            if (!sub_set.count(g.mul(g.mul(gen, s), gi))) return false;
    }
    return true;
}

std::vector<std::vector<Elem>> conjugacy_classes(const FiniteGroup& g,
                                                 const std::vector<Elem>& els) {
    std::vector<std::vector<Elem>> classes;
    ElemSet done;
    for (const Elem& x : els) {
        if (done.count(x)) continue;
        std::vector<Elem> cls{x};
        done.insert(x);
        for (size_t head = 0; head < cls.size(); ++head) {
            for (const Elem& gen : g.generators()) {
                Elem conj = g.mul(g.mul(gen, cls[head]), g.inv(gen));
                if (done.insert(conj).second) cls.push_back(std::move(conj));
            }
        }
        classes.push_back(std::move(cls));
    }
    return classes;
}

SylowAnalysis structural_sylow(const GroupSpec& spec, long p) {
    SylowAnalysis a;
    a.p = p;
    a.structural = true;
    a.center_has_p = false;
    if (spec.kind == GroupSpec::Kind::SL2) {
        long q = spec.q;
        a.group_order = Int(q) * (Int(q) * q - 1);
        if (p == q) {
            // Characteristic case over the prime field: the Sylow is the
            // unipotent subgroup, normalized by the Borel.
            if (p < 3)
                fail("NoStructuralPath", "characteristic shortcut needs an odd prime field");
            a.n = 1;
            a.is_cyclic = true;
            a.m = (p - 1) / 2;
            return a;
        }
        if (p >= 3 && q % p != 0 && ((q - 1) % p == 0 || (q + 1) % p == 0)) {
            // Odd p dividing q^2 - 1: the Sylow sits in the split or
            // nonsplit torus, inverted by the Weyl element.
            long t = (q - 1) % p == 0 ? q - 1 : q + 1;
            a.n = vp_long(t, p);
            a.is_cyclic = true;
            a.m = 2;
            return a;
        }
        fail("NoStructuralPath",
             fmt::format("no shortcut for p={} in a special linear group over GF({})", p, q));
    }
    if (spec.kind == GroupSpec::Kind::PGL3) {
        long q = spec.q;
        Int qi(q);
        Int q3 = qi * qi * qi;
        a.group_order = (q3 - 1) * (q3 - qi) * (q3 - qi * qi) / (qi - 1);
        long torus = q * q + q + 1;
        if (p >= 5 && q % p != 0 && torus % p == 0) {
            a.n = vp_long(torus, p);
            a.is_cyclic = true;
            a.m = 3;
            return a;
        }
        fail("NoStructuralPath",
             fmt::format("no shortcut for p={} in a projective linear group over GF({})", p, q));
    }
    fail("NoStructuralPath", "no classification shortcut for this group kind");
}

SylowAnalysis brute_sylow(const GroupSpec& spec, long p, long cap) {
    auto g = realize(spec);
    auto els = enumerate_elements(*g, cap);
    auto core = sylow_core(*g, els, p);
    auto [nc, zc] = normalizer_centralizer(*g, els, core);
    if (zc == 0 || nc % zc != 0) fail("InternalError", "normalizer not a multiple of centralizer");
    SylowAnalysis a;
    a.p = p;
    a.n = core.n;
    a.is_cyclic = core.is_cyclic;
    a.m = nc / zc;
    a.center_has_p = (center_order(*g, els) % p == 0);
    a.group_order = Int(static_cast<long>(els.size()));
    a.structural = false;
    return a;
}

} // namespace

// ---------------------------------------------------------------------------
// GroupSpec
// ---------------------------------------------------------------------------

GroupSpec GroupSpec::parse(std::string_view text) {
    auto s = trim(text);
    if (s.empty()) fail("BadGroupSpec", "empty group description");
    size_t sp = s.find_first_of(" \t");
    std::string_view head = (sp == std::string_view::npos) ? s : s.substr(0, sp);
    std::string_view rest = (sp == std::string_view::npos) ? std::string_view{} : trim(s.substr(sp + 1));

    GroupSpec g;
    if (head == "product") {
        g.kind = Kind::Product;
        size_t start = 0;
        std::string_view body = rest;
        while (true) {
            size_t bar = body.find('|', start);
            std::string_view piece =
                trim(body.substr(start, bar == std::string_view::npos ? bar : bar - start));
            if (piece.empty()) fail("BadGroupSpec", "empty factor in a product");
            GroupSpec factor = parse(piece);
            if (factor.kind == Kind::Product)
                fail("BadGroupSpec", "nested products are not supported; flatten the factor list");
            g.factors.push_back(std::move(factor));
            if (bar == std::string_view::npos) break;
            start = bar + 1;
        }
        if (g.factors.size() < 2) fail("BadGroupSpec", "a product needs at least two factors");
        return g;
    }
    if (head == "perm") {
        g.kind = Kind::Permutation;
        if (rest.empty()) fail("BadGroupSpec", "permutation group needs at least one generator");
        std::vector<std::vector<std::vector<long>>> gen_cycles;
        size_t start = 0;
        while (true) {
            size_t semi = rest.find(';', start);
            std::string_view piece =
                trim(rest.substr(start, semi == std::string_view::npos ? semi : semi - start));
            if (piece.empty()) fail("BadGroupSpec", "empty permutation generator");
            gen_cycles.push_back(parse_cycles(piece));
            if (semi == std::string_view::npos) break;
            start = semi + 1;
        }
        long degree = 0;
        for (const auto& cycles : gen_cycles)
            for (const auto& cycle : cycles)
                for (long pt : cycle) {
                    if (pt < 1 || pt > 65535)
                        fail("BadGroupSpec", fmt::format("point {} out of range [1, 65535]", pt));
                    degree = std::max(degree, pt);
                }
        for (const auto& cycles : gen_cycles) {
            std::vector<long> image(degree);
            for (long i = 0; i < degree; ++i) image[i] = i;
            std::vector<bool> seen(degree + 1, false);
            for (const auto& cycle : cycles) {
                for (long pt : cycle) {
                    if (seen[pt])
                        fail("BadGroupSpec",
                             fmt::format("point {} repeats within one generator", pt));
                    seen[pt] = true;
                }
                for (size_t i = 0; i < cycle.size(); ++i)
                    image[cycle[i] - 1] = cycle[(i + 1) % cycle.size()] - 1;
            }
            g.perm_gens.push_back(std::move(image));
        }
        return g;
    }
    if (head == "cyclic") {
        g.kind = Kind::Cyclic;
        auto toks = whitespace_tokens(rest);
        if (toks.size() != 1) fail("BadGroupSpec", "cyclic takes exactly one order argument");
        g.cyc = parse_long_tok(toks[0], "cyclic order");
        if (g.cyc < 1 || g.cyc > 65535)
            fail("BadGroupSpec", fmt::format("cyclic order {} out of range [1, 65535]", g.cyc));
        return g;
    }
    if (head == "semidirect") {
        g.kind = Kind::Semidirect;
        auto toks = whitespace_tokens(rest);
        if (toks.size() != 3 || toks[2].substr(0, 7) != "action=")
            fail("BadGroupSpec", "expected: semidirect <a> <b> action=<c>");
        g.sd_a = parse_long_tok(toks[0], "normal cyclic order");
        g.sd_b = parse_long_tok(toks[1], "acting cyclic order");
        g.sd_action = parse_long_tok(toks[2].substr(7), "action multiplier");
        if (g.sd_a < 1 || g.sd_b < 1 || g.sd_a + g.sd_b > 65535)
            fail("BadGroupSpec", "semidirect orders out of range");
        g.sd_action = ((g.sd_action % g.sd_a) + g.sd_a) % g.sd_a;
        Int a(g.sd_a);
        if (gcd(Int(g.sd_action), a) != 1 && g.sd_a > 1)
            fail("BadGroupSpec",
                 fmt::format("action multiplier {} is not invertible mod {}", g.sd_action, g.sd_a));
        Int pw;
        mpz_powm_ui(pw.get_mpz_t(), Int(g.sd_action).get_mpz_t(),
                    static_cast<unsigned long>(g.sd_b), a.get_mpz_t());
        if (pw != Int(1) % a)
            fail("BadGroupSpec",
                 fmt::format("action multiplier {} does not have order dividing {} mod {}",
                             g.sd_action, g.sd_b, g.sd_a));
        return g;
    }
    if (head == "sl2") {
        g.kind = Kind::SL2;
        g.q = parse_q_token(rest, "sl2");
        return g;
    }
    if (head == "pgl3") {
        g.kind = Kind::PGL3;
        g.q = parse_q_token(rest, "pgl3");
        return g;
    }
    fail("BadGroupSpec", fmt::format("unknown group kind '{}'", std::string(head)));
}

std::string GroupSpec::describe() const {
    switch (kind) {
    case Kind::Cyclic:
        return fmt::format("cyclic {}", cyc);
    case Kind::Semidirect:
        return fmt::format("semidirect {} {} action={}", sd_a, sd_b, sd_action);
    case Kind::SL2:
        return fmt::format("sl2 q={}", q);
    case Kind::PGL3:
        return fmt::format("pgl3 q={}", q);
    case Kind::Product: {
        std::string out = "product ";
        for (size_t i = 0; i < factors.size(); ++i) {
            if (i) out += " | ";
            out += factors[i].describe();
        }
        return out;
    }
    case Kind::Permutation: {
        std::string out = "perm ";
        for (size_t gi = 0; gi < perm_gens.size(); ++gi) {
            if (gi) out += "; ";
            const auto& img = perm_gens[gi];
            std::string text;
            std::vector<bool> used(img.size(), false);
            for (size_t i = 0; i < img.size(); ++i) {
                if (used[i] || img[i] == static_cast<long>(i)) continue;
                text += '(';
                size_t j = i;
                bool first = true;
                while (!used[j]) {
                    used[j] = true;
                    if (!first) text += ' ';
                    text += std::to_string(j + 1);
                    first = false;
                    j = static_cast<size_t>(img[j]);
                }
                text += ')';
            }
            out += text.empty() ? "(1)" : text;
        }
        return out;
    }
    }
    fail("InternalError", "unhandled group kind");
}

std::unique_ptr<FiniteGroup> realize(const GroupSpec& spec) {
    switch (spec.kind) {
    case GroupSpec::Kind::Permutation:
        return std::make_unique<PermutationGroup>(spec.perm_gens, Int(0));
    case GroupSpec::Kind::Cyclic: {
        std::vector<long> image(spec.cyc);
        for (long i = 0; i < spec.cyc; ++i) image[i] = (i + 1) % spec.cyc;
        return std::make_unique<PermutationGroup>(std::vector<std::vector<long>>{image},
                                                  Int(spec.cyc));
    }
    case GroupSpec::Kind::Semidirect: {
        long a = spec.sd_a, b = spec.sd_b, c = spec.sd_action;
        long deg = a + b;
        std::vector<long> x(deg), y(deg);
        for (long i = 0; i < deg; ++i) x[i] = y[i] = i;
        for (long i = 0; i < a; ++i) {
            x[i] = (i + 1) % a;
            y[i] = (c * i) % a;
        }
        for (long j = 0; j < b; ++j) y[a + j] = a + (j + 1) % b;
        return std::make_unique<PermutationGroup>(std::vector<std::vector<long>>{x, y},
                                                  Int(a) * Int(b));
    }
    case GroupSpec::Kind::Product: {
        std::vector<std::unique_ptr<FiniteGroup>> factors;
        for (const auto& f : spec.factors) factors.push_back(realize(f));
        return std::make_unique<ProductGroup>(std::move(factors));
    }
    case GroupSpec::Kind::SL2:
        return std::make_unique<SL2Group>(spec.q);
    case GroupSpec::Kind::PGL3:
        return std::make_unique<PGL3Group>(spec.q);
    }
    fail("InternalError", "unhandled group kind");
}

std::vector<FiniteGroup::Elem> enumerate_elements(const FiniteGroup& g, long order_cap) {
    return closure_from(g, g.generators(), order_cap);
}

SylowAnalysis sylow_analyze(const GroupSpec& spec, long p, SylowMethod method, long order_cap) {
    if (!is_prime_long(p)) fail("BadArgument", fmt::format("p={} is not prime", p));
    switch (method) {
    case SylowMethod::Brute:
        return brute_sylow(spec, p, order_cap);
    case SylowMethod::Structural:
        return structural_sylow(spec, p);
    case SylowMethod::Auto: {
        Int hint = realize(spec)->order_hint();
        if (hint > 0 && hint > Int(order_cap)) return structural_sylow(spec, p);
        try {
            return brute_sylow(spec, p, order_cap);
        } catch (const ToolkitError& e) {
            if (e.code() == "OrderCapExceeded") return structural_sylow(spec, p);
            throw;
        }
    }
    }
    fail("InternalError", "unhandled Sylow method");
}

QuotientReport quotient_structure(const GroupSpec& spec, long p, long order_cap) {
    if (!is_prime_long(p)) fail("BadArgument", fmt::format("p={} is not prime", p));
    auto g = realize(spec);
    auto els = enumerate_elements(*g, order_cap);
    long order = static_cast<long>(els.size());
    if (order % p != 0)
        fail("NoNormalPSubgroup", fmt::format("group order {} is not divisible by {}", order, p));

    // Look for a normal subgroup of order p: every such subgroup is
    // generated by an order-p element, and normality only needs to be
    // checked on the generators.
    bool found_normal_p = false;
    std::map<std::vector<Elem>, bool> tested; // sorted subgroup elements -> seen
    for (const Elem& x : els) {
        if (found_normal_p) break;
        if (elem_order(*g, x, order) != p) continue;
        std::vector<Elem> sub{g->identity()};
        Elem acc = x;
        for (long i = 1; i < p; ++i) {
            sub.push_back(acc);
            acc = g->mul(acc, x);
        }
        std::vector<Elem> key = sub;
        std::sort(key.begin(), key.end());
        if (tested.count(key)) continue;
        tested[key] = true;
        ElemSet sub_set(sub.begin(), sub.end());
        if (subgroup_is_normal(*g, sub_set, {x})) found_normal_p = true;
    }
    if (!found_normal_p)
        fail("NoNormalPSubgroup",
             fmt::format("no normal subgroup of order {} (checked {} candidate subgroups)", p,
                         tested.size()));

    // Maximal normal subgroup of order prime to p, grown greedily over the
    // conjugacy classes of prime-to-p order.  Every accepted closure is a
    // normal p'-subgroup, so it stays inside the maximal one; at the
    // fixpoint every class of the maximal one has been absorbed.
    auto classes = conjugacy_classes(*g, els);
    std::vector<Elem> nels{g->identity()};
    ElemSet nset{g->identity()};
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& cls : classes) {
            if (elem_order(*g, cls.front(), order) % p == 0) continue;
            if (nset.count(cls.front())) continue;
            std::vector<Elem> seeds(nels.begin(), nels.end());
            seeds.insert(seeds.end(), cls.begin(), cls.end());
            auto closed = closure_from(*g, seeds, order);
            if (static_cast<long>(closed.size()) % p == 0) continue;
            nels = std::move(closed);
            nset = ElemSet(nels.begin(), nels.end());
            changed = true;
        }
    }

    CosetGroup qg(*g, nels);
    auto qels = enumerate_elements(qg, order_cap);
    long qorder = static_cast<long>(qels.size());
    auto core = sylow_core(qg, qels, p);
    long pn = 1;
    for (int i = 0; i < core.n; ++i) pn *= p;
    long m = qorder / pn;

    QuotientReport r;
    r.group_order = Int(order);
    r.n_order = Int(static_cast<long>(nels.size()));
    r.quotient_order = Int(qorder);
    r.n = core.n;
    r.m = m;
    r.action_order = 1;
    r.shape = "other";

    ElemSet syl_set(core.sylow.begin(), core.sylow.end());
    bool normal_sylow = subgroup_is_normal(qg, syl_set, core.seeds);
    if (core.is_cyclic && normal_sylow) {
        if (m == 1) {
            r.shape = fmt::format("Z/{}", pn);
        } else {
            CosetGroup tg(qg, core.sylow);
            auto tels = enumerate_elements(tg, order_cap);
            if (static_cast<long>(tels.size()) != m)
                fail("InternalError", "tame quotient order mismatch");
            bool tame_cyclic = false;
            for (const Elem& t : tels)
                if (elem_order(tg, t, m) == m) {
                    tame_cyclic = true;
                    break;
                }
            if (tame_cyclic) {
                r.shape = fmt::format("Z/{} x| Z/{}", pn, m);
                long cent = 0;
                for (const Elem& x : qels) {
                    bool commutes = true;
                    for (const Elem& s : core.seeds)
                        if (qg.mul(x, s) != qg.mul(s, x)) {
                            commutes = false;
                            break;
                        }
                    if (commutes) ++cent;
                }
                if (cent == 0 || qorder % cent != 0)
                    fail("InternalError", "centralizer does not divide the quotient order");
                r.action_order = qorder / cent;
            }
        }
    }
    return r;
}

MatrixTriple find_sl2_triple(long q, const std::array<long, 3>& orders, long order_cap) {
    GF gf(q);
    long p = gf.p();
    if (orders[0] != p)
        fail("BadArgument",
             fmt::format("the first order must be the characteristic {}; the first matrix is "
                         "pinned to the standard unipotent",
                         p));
    for (long o : orders)
        if (o < 1) fail("BadArgument", "orders must be positive");

    SL2Group base(q);
    Elem alpha = SL2Group::make(1, 1, 0, 1);
    long order_scan_cap = 4 * q + 8;

    auto order_of = [&](const Elem& x) { return elem_order(base, x, order_scan_cap); };

    // Non-scalar matrices are classified up to conjugacy by their trace, so
    // the candidate traces for each requested order come from companion
    // matrices.
    std::vector<long> t2, t3;
    for (long tau = 0; tau < q; ++tau) {
        Elem comp = SL2Group::make(tau, gf.neg(1), 1, 0);
        long o = order_of(comp);
        if (o == orders[1]) t2.push_back(tau);
        if (o == orders[2]) t3.push_back(tau);
    }
    if (t2.empty() || t3.empty())
        fail("NoSuchTraces",
             fmt::format("no trace over GF({}) realizes orders ({}, {})", q, orders[1], orders[2]));

    Int full_order = Int(q) * (Int(q) * q - 1);
    bool enumerable = full_order <= Int(order_cap);

    for (long tau : t2) {
        for (long rho : t3) {
            long c = gf.sub(rho, tau);
            // tr(alpha*beta) = tr(beta) + c, so c = 0 would force the two
            // requested traces to coincide with a lower-triangular beta,
            // which cannot generate.
            if (c == 0) continue;
            long cinv = gf.inv(c);
            for (long a = 0; a < q; ++a) {
                long d = gf.sub(tau, a);
                long b = gf.mul(gf.sub(gf.mul(a, d), 1), cinv);
                Elem beta = SL2Group::make(a, b, c, d);
                if (order_of(beta) != orders[1]) continue;
                Elem ab = base.mul(alpha, beta);
                if (order_of(ab) != orders[2]) continue;

                bool verified = false;
                if (enumerable) {
                    auto closed = closure_from(base, {alpha, beta}, order_cap);
                    if (Int(static_cast<long>(closed.size())) != full_order) continue;
                    verified = true;
                } else if (gf.k() == 1 && q >= 5) {
                    // Structural certificate over a prime field: the pair
                    // has order divisible by p and no common fixed line
                    // (beta moves the unique fixed line of alpha because
                    // c != 0), so its image in the projective group is the
                    // whole simple group; the only involution upstairs is
                    // -1, which the even order forces into the subgroup.
                } else {
                    fail("GenerationUnverified",
                         fmt::format("group order {} exceeds the cap {} and no structural "
                                     "certificate applies over GF({})",
                                     full_order.get_str(), order_cap, q));
                }

                MatrixTriple t;
                t.q = q;
                t.alpha = {1, 1, 0, 1};
                t.beta = {a, b, c, d};
                t.orders = orders;
                t.tau = tau;
                t.rho = rho;
                t.generation_verified_exhaustively = verified;
                return t;
            }
        }
    }
    fail("NoSuchTraces",
         fmt::format("no trace assignment over GF({}) yields a generating pair with orders "
                     "({}, {}, {})",
                     q, orders[0], orders[1], orders[2]));
}

Pgl3Data pgl3_p_data(long q, long p) {
    if (p < 5 || !is_prime_long(p))
        fail("BadArgument", fmt::format("p={} must be a prime >= 5", p));
    if (q < 2 || !is_prime_power_long(q))
        fail("BadArgument", fmt::format("q={} must be a prime power >= 2", q));
    if (q % p == 0) fail("BadArgument", "p must not divide q");
    Pgl3Data d;
    long torus = q * q + q + 1;
    int t = vp_long(torus, p);
    if (t == 0) return d;
    d.n = t;
    d.m = 3;
    d.in_singer_torus = true;
    return d;
}

} // namespace wildram
