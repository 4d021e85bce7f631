#include "wildram/gf.hpp"

#include "wildram/errors.hpp"

#include <fmt/format.h>

namespace wildram {

namespace {

using Poly = std::vector<long>; // coefficients mod p, low degree first

Poly poly_mod(Poly a, const Poly& m, long p) {
    while (!a.empty() && a.back() == 0)
        a.pop_back();
    const int dm = static_cast<int>(m.size()) - 1;
    while (static_cast<int>(a.size()) - 1 >= dm) {
        const int shift = static_cast<int>(a.size()) - 1 - dm;
        const long lead = a.back() % p; // m is monic
        for (int i = 0; i <= dm; ++i) {
            long& c = a[static_cast<size_t>(i + shift)];
            c = ((c - lead * m[static_cast<size_t>(i)]) % p + p) % p;
        }
        while (!a.empty() && a.back() == 0)
            a.pop_back();
    }
    return a;
}

Poly poly_mul(const Poly& a, const Poly& b, long p) {
    if (a.empty() || b.empty())
        return {};
    Poly r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j)
            r[i + j] = (r[i + j] + a[i] * b[j]) % p;
    return r;
}

// Trial division by every monic polynomial of degree <= deg(f)/2.
bool poly_irreducible(const Poly& f, long p) {
    const int d = static_cast<int>(f.size()) - 1;
    for (int dd = 1; 2 * dd <= d; ++dd) {
        long count = 1;
        for (int i = 0; i < dd; ++i)
            count *= p;
        for (long code = 0; code < count; ++code) {
            Poly g(static_cast<size_t>(dd + 1), 0);
            long c = code;
            for (int i = 0; i < dd; ++i) {
                g[static_cast<size_t>(i)] = c % p;
                c /= p;
            }
            g[static_cast<size_t>(dd)] = 1;
            if (poly_mod(f, g, p).empty())
                return false;
        }
    }
    return true;
}

long encode(const Poly& a, long p) {
    long code = 0, scale = 1;
    for (long c : a) {
        code += c * scale;
        scale *= p;
    }
    return code;
}

Poly decode(long code, long p, int k) {
    Poly a(static_cast<size_t>(k), 0);
    for (int i = 0; i < k; ++i) {
        a[static_cast<size_t>(i)] = code % p;
        code /= p;
    }
    while (!a.empty() && a.back() == 0)
        a.pop_back();
    return a;
}

} // namespace

GF::GF(long q) : q_(q) {
    if (q < 2)
        fail("BadArgument", "field size must be at least 2");
    // The smallest prime factor of a prime power is its base.
    long p = q;
    for (long d = 2; d * d <= q; ++d) {
        if (q % d == 0) {
            p = d;
            break;
        }
    }
    long rest = q;
    int k = 0;
    while (rest % p == 0) {
        rest /= p;
        ++k;
    }
    if (rest != 1)
        fail("BadArgument", fmt::format("{} is not a prime power", q));
    p_ = p;
    k_ = k;
    if (q_ > 4096)
        fail("BadArgument", fmt::format("field size {} too large for table arithmetic", q));

    if (k_ == 1) {
        modulus_ = {0, 1}; // unused
    } else {
        // Deterministic search for a monic irreducible of degree k.
        long count = 1;
        for (int i = 0; i < k_; ++i)
            count *= p_;
        bool found = false;
        for (long code = 0; code < count && !found; ++code) {
            Poly f(static_cast<size_t>(k_ + 1), 0);
            long c = code;
            for (int i = 0; i < k_; ++i) {
                f[static_cast<size_t>(i)] = c % p_;
                c /= p_;
            }
            f[static_cast<size_t>(k_)] = 1;
            if (poly_irreducible(f, p_)) {
                modulus_ = f;
                found = true;
            }
        }
        if (!found)
            fail("InternalError", "no irreducible polynomial found");
    }

    mul_.assign(static_cast<size_t>(q_) * static_cast<size_t>(q_), 0);
    for (long a = 0; a < q_; ++a) {
        const Poly pa = decode(a, p_, k_);
        for (long b = a; b < q_; ++b) {
            const Poly pb = decode(b, p_, k_);
            Poly prod = poly_mul(pa, pb, p_);
            if (k_ > 1)
                prod = poly_mod(prod, modulus_, p_);
            else if (!prod.empty())
                prod[0] %= p_;
            const long code = encode(prod, p_);
            mul_[static_cast<size_t>(a) * static_cast<size_t>(q_) + static_cast<size_t>(b)] = code;
            mul_[static_cast<size_t>(b) * static_cast<size_t>(q_) + static_cast<size_t>(a)] = code;
        }
    }
}

long GF::add(long a, long b) const {
    long r = 0, scale = 1;
    for (int i = 0; i < k_; ++i) {
        const long da = (a / scale) % p_;
        const long db = (b / scale) % p_;
        r += ((da + db) % p_) * scale;
        scale *= p_;
    }
    return r;
}

long GF::neg(long a) const {
    long r = 0, scale = 1;
    for (int i = 0; i < k_; ++i) {
        const long da = (a / scale) % p_;
        r += ((p_ - da) % p_) * scale;
        scale *= p_;
    }
    return r;
}

long GF::sub(long a, long b) const {
    return add(a, neg(b));
}

long GF::inv(long a) const {
    if (a == 0)
        fail("BadArgument", "division by zero in GF");
    return pow(a, q_ - 2);
}

long GF::pow(long a, long e) const {
    e %= (q_ - 1);
    if (e < 0)
        e += q_ - 1;
    long acc = 1, base = a;
    while (e > 0) {
        if (e & 1)
            acc = mul(acc, base);
        base = mul(base, base);
        e >>= 1;
    }
    return acc;
}

long GF::from_int(long n) const {
    long r = n % p_;
    if (r < 0)
        r += p_;
    return r;
}

long GF::primitive_element() const {
    for (long a = 1; a < q_; ++a)
        if (mult_order(a) == q_ - 1)
            return a;
    fail("InternalError", "no primitive element found");
}

long GF::mult_order(long a) const {
    if (a == 0)
        fail("BadArgument", "zero has no multiplicative order");
    long x = a, o = 1;
    while (x != 1) {
        x = mul(x, a);
        ++o;
    }
    return o;
}

} // namespace wildram
