#include "wildram/ramification.hpp"

#include "wildram/errors.hpp"

#include <fmt/format.h>

namespace wildram {

namespace {

bool coprime(const Int& a, const Int& b) {
    Int g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g == 1;
}

} // namespace

void validate(const RamFiltration& f) {
    if (f.p < 2)
        fail("BadFiltration", "p must be at least 2");
    if (f.n < 0)
        fail("BadFiltration", "n must be nonnegative");
    if (f.m < 1)
        fail("BadFiltration", "m must be positive");
    if (!coprime(Int(f.m), Int(f.p)))
        fail("BadFiltration", fmt::format("m = {} must be prime to p = {}", f.m, f.p));
    if (static_cast<int>(f.lower_jumps.size()) != f.n)
        fail("BadFiltration",
             fmt::format("expected {} lower jumps, got {}", f.n, f.lower_jumps.size()));
    Int prev = 0;
    for (const Int& j : f.lower_jumps) {
        if (j <= prev)
            fail("BadFiltration", "lower jumps must be strictly increasing and positive");
        prev = j;
    }
}

UpperJumps lower_to_upper(const RamFiltration& f) {
    validate(f);
    UpperJumps u;
    u.reserve(f.lower_jumps.size());
    Rat acc = 0;
    Int prev = 0;
    Int scale = f.m; // m p^(i-1) at step i
    for (int i = 0; i < f.n; ++i) {
        acc += Rat(f.lower_jumps[i] - prev) / Rat(scale);
        u.push_back(acc);
        prev = f.lower_jumps[i];
        scale *= f.p;
    }
    return u;
}

RamFiltration upper_to_lower(long p, int n, long m, const UpperJumps& upper) {
    if (static_cast<int>(upper.size()) != n)
        fail("BadFiltration",
             fmt::format("expected {} upper jumps, got {}", n, upper.size()));
    Rat prev_u = 0;
    for (const Rat& u : upper) {
        if (u <= prev_u)
            fail("BadFiltration", "upper jumps must be strictly increasing and positive");
        prev_u = u;
    }
    RamFiltration f;
    f.p = p;
    f.n = n;
    f.m = m;
    Rat prev_j = 0;
    Rat pu = 0;
    Int scale = m;
    for (int i = 0; i < n; ++i) {
        Rat j = prev_j + Rat(scale) * (upper[i] - pu);
        if (!is_integer(j))
            fail("NotIntegralLowerJumps",
                 fmt::format("jump {} reconstructs to {}, not an integer", i + 1,
                             format_rat(j)));
        f.lower_jumps.push_back(j.get_num());
        prev_j = j;
        pu = upper[i];
        scale *= p;
    }
    validate(f);
    return f;
}

Int different_degree_lower(const RamFiltration& f) {
    validate(f);
    const Int pn = pow_int(Int(f.p), static_cast<unsigned long>(f.n));
    // Term-by-term: p^n m - 1 + sum_i j_i p^(n-i) (p - 1).
    Int direct = pn * f.m - 1;
    Int pni = pn; // p^(n-i+1) at step i after one division
    for (int i = 0; i < f.n; ++i) {
        pni /= f.p; // now p^(n-i) for i-th jump (1-based i)
        direct += f.lower_jumps[i] * pni * (f.p - 1);
    }
    // Telescoped: p^n m - 1 + sum_i (p^(n-i+1) - 1)(j_i - j_{i-1}).
    Int tele = pn * f.m - 1;
    Int prev = 0;
    Int pup = pn; // p^(n-i+1) at step i
    for (int i = 0; i < f.n; ++i) {
        tele += (pup - 1) * (f.lower_jumps[i] - prev);
        prev = f.lower_jumps[i];
        pup /= f.p;
    }
    if (direct != tele)
        fail("InternalError", "different degree identities disagree");
    return direct;
}

Int different_degree_upper(long p, int n, long m, const UpperJumps& upper) {
    if (static_cast<int>(upper.size()) != n)
        fail("BadFiltration",
             fmt::format("expected {} upper jumps, got {}", n, upper.size()));
    const Int pn = pow_int(Int(p), static_cast<unsigned long>(n));
    Rat acc = Rat(pn * m - 1);
    Rat prev = 0;
    Int scale = m;      // m p^(i-1)
    Int pup = pn * p;   // p^(n-i+1) after one division
    for (int i = 0; i < n; ++i) {
        pup /= p;
        acc += Rat(scale * (pup - 1)) * (upper[i] - prev);
        prev = upper[i];
        scale *= p;
    }
    if (!is_integer(acc))
        fail("NonIntegralDifferent",
             fmt::format("different degree {} is not an integer", format_rat(acc)));
    return acc.get_num();
}

Int tame_different(const Int& e, long p) {
    if (e < 1)
        fail("BadFiltration", "ramification index must be positive");
    if (mpz_divisible_ui_p(e.get_mpz_t(), static_cast<unsigned long>(p)))
        fail("NotTame", fmt::format("index {} is divisible by p = {}", e.get_str(), p));
    return e - 1;
}

Rat conductor(const RamFiltration& f) {
    validate(f);
    Rat acc = 0;
    Int prev = 0;
    Int scale = 1; // p^(i-1)
    for (int i = 0; i < f.n; ++i) {
        acc += Rat(f.lower_jumps[i] - prev) / Rat(scale);
        prev = f.lower_jumps[i];
        scale *= f.p;
    }
    return acc / Rat(f.m);
}

Rat conductor_weighted(const RamFiltration& f) {
    validate(f);
    Rat acc = 0;
    Int pi = 1; // p^i
    for (int i = 0; i + 1 < f.n; ++i) {
        pi *= f.p;
        acc += Rat(f.p - 1) * Rat(f.lower_jumps[i]) / Rat(pi * f.m);
    }
    const Int pn1 = pow_int(Int(f.p), static_cast<unsigned long>(f.n > 0 ? f.n - 1 : 0));
    if (f.n > 0)
        acc += Rat(f.lower_jumps[f.n - 1]) / Rat(pn1 * f.m);
    return acc;
}

Rat compositum_conductor(const Rat& sigma, const Rat& tau, long p) {
    if (tau > sigma)
        fail("TauExceedsSigma",
             fmt::format("tau = {} exceeds sigma = {}", format_rat(tau), format_rat(sigma)));
    return tau + Rat(p) * (sigma - tau);
}

Rat effective_invariant(long p, const std::vector<Rat>& sigmas, int alpha) {
    const int r = static_cast<int>(sigmas.size());
    if (r == 0)
        fail("BadFiltration", "invariant stack must be nonempty");
    if (alpha < 0 || alpha >= r)
        fail("AlphaOutOfRange",
             fmt::format("alpha = {} not in [0, {}]", alpha, r - 1));
    const int top = r - alpha; // number of levels kept
    Rat acc = 0;
    Int pi = 1;
    for (int i = 1; i <= top - 1; ++i) {
        pi *= p;
        acc += Rat(p - 1) / Rat(pi) * sigmas[i - 1];
    }
    acc += sigmas[top - 1] / Rat(pow_int(Int(p), static_cast<unsigned long>(top - 1)));
    return acc;
}

bool validate_hasse_arf(const UpperJumps& upper, long m) {
    for (const Rat& u : upper) {
        if (!is_integer(u * Rat(m)))
            return false;
    }
    return true;
}

} // namespace wildram
