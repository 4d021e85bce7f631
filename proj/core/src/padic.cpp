#include "wildram/padic.hpp"

#include "wildram/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cstdlib>

namespace wildram {

namespace {

Int int_pow(long base, long exp) {
    return pow_int(Int(base), static_cast<unsigned long>(exp));
}

// a / b mod m for b prime to m; fails when b is not invertible.
Int rat_mod(const Rat& q, const Int& m) {
    Rat c = q;
    c.canonicalize();
    Int inv;
    if (mpz_invert(inv.get_mpz_t(), c.get_den().get_mpz_t(), m.get_mpz_t()) == 0)
        fail("NegativeValuation",
             fmt::format("denominator {} not invertible modulo {}",
                         c.get_den().get_str(), m.get_str()));
    Int r = (c.get_num() % m) * inv % m;
    if (r < 0)
        r += m;
    return r;
}

Int mod_pow(const Int& b, const Int& e, const Int& m) {
    Int r;
    mpz_powm(r.get_mpz_t(), b.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
    return r;
}

Int mod_inv(const Int& a, const Int& m) {
    Int r;
    if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0)
        fail("InternalError", "non-invertible element in modular inverse");
    return r;
}

} // namespace

// ---------------------------------------------------------------------------
// EisExact
// ---------------------------------------------------------------------------

EisExact::EisExact(long p, long e) : p_(p), e_(e), c_(static_cast<size_t>(e), Rat(0)) {
    if (p < 2 || e < 1)
        fail("BadArgument", "need p >= 2 and e >= 1");
}

EisExact EisExact::from_rational(long p, long e, const Rat& value) {
    EisExact x(p, e);
    x.c_[0] = value;
    return x;
}

EisExact EisExact::pi(long p, long e) {
    EisExact x(p, e);
    if (e == 1)
        x.c_[0] = p;
    else
        x.c_[1] = 1;
    return x;
}

bool EisExact::is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](const Rat& q) { return q == 0; });
}

long EisExact::val_pi() const {
    if (is_zero())
        fail("BadValuation", "valuation of zero is undefined");
    long best = 0;
    bool first = true;
    for (long i = 0; i < e_; ++i) {
        const Rat& q = c_[static_cast<size_t>(i)];
        if (q == 0)
            continue;
        long v = i + e_ * valuation_rat(q, Int(p_));
        if (first || v < best) {
            best = v;
            first = false;
        }
    }
    return best;
}

EisExact EisExact::operator-() const {
    EisExact r = *this;
    for (Rat& q : r.c_)
        q = -q;
    return r;
}

EisExact EisExact::operator+(const EisExact& o) const {
    EisExact r = *this;
    for (long i = 0; i < e_; ++i)
        r.c_[static_cast<size_t>(i)] += o.c_[static_cast<size_t>(i)];
    return r;
}

EisExact EisExact::operator-(const EisExact& o) const {
    return *this + (-o);
}

EisExact EisExact::operator*(const EisExact& o) const {
    EisExact r(p_, e_);
    for (long i = 0; i < e_; ++i) {
        if (c_[static_cast<size_t>(i)] == 0)
            continue;
        for (long j = 0; j < e_; ++j) {
            if (o.c_[static_cast<size_t>(j)] == 0)
                continue;
            long k = i + j;
            Rat term = c_[static_cast<size_t>(i)] * o.c_[static_cast<size_t>(j)];
            if (k >= e_) {
                k -= e_;
                term *= p_;
            }
            r.c_[static_cast<size_t>(k)] += term;
        }
    }
    return r;
}

EisExact EisExact::inv() const {
    if (is_zero())
        fail("BadValuation", "cannot invert zero");
    // Solve (this * y) = 1 as a linear system over Q in the basis powers.
    const size_t n = static_cast<size_t>(e_);
    // Column j of the multiplication matrix is this * pi^j.
    std::vector<std::vector<Rat>> m(n, std::vector<Rat>(n + 1, Rat(0)));
    EisExact col = *this;
    const EisExact pix = pi(p_, e_);
    for (size_t j = 0; j < n; ++j) {
        for (size_t i = 0; i < n; ++i)
            m[i][j] = col.c_[i];
        col = col * pix;
    }
    m[0][n] = 1; // right-hand side e_0
    // Gaussian elimination with exact pivoting.
    for (size_t c = 0; c < n; ++c) {
        size_t piv = c;
        while (piv < n && m[piv][c] == 0)
            ++piv;
        if (piv == n)
            fail("InternalError", "singular multiplication matrix");
        std::swap(m[c], m[piv]);
        const Rat d = m[c][c];
        for (size_t k = c; k <= n; ++k)
            m[c][k] /= d;
        for (size_t r2 = 0; r2 < n; ++r2) {
            if (r2 == c || m[r2][c] == 0)
                continue;
            const Rat f = m[r2][c];
            for (size_t k = c; k <= n; ++k)
                m[r2][k] -= f * m[c][k];
        }
    }
    EisExact y(p_, e_);
    for (size_t i = 0; i < n; ++i)
        y.c_[i] = m[i][n];
    return y;
}

EisExact EisExact::pow(long k) const {
    if (k < 0)
        return inv().pow(-k);
    EisExact acc = from_rational(p_, e_, Rat(1));
    EisExact base = *this;
    long kk = k;
    while (kk > 0) {
        if (kk & 1)
            acc = acc * base;
        base = base * base;
        kk >>= 1;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// EisensteinElem
// ---------------------------------------------------------------------------

EisensteinElem::EisensteinElem(long p, long e, long N)
    : p_(p), e_(e), N_(N), c_(static_cast<size_t>(e), Int(0)) {
    if (p < 2 || e < 1)
        fail("BadArgument", "need p >= 2 and e >= 1");
    if (N < 1)
        fail("BadArgument", "precision must be at least one pi-digit");
}

Int EisensteinElem::coeff_modulus(int i) const {
    const long levels = (N_ - i + e_ - 1) / e_; // ceil((N - i) / e)
    return int_pow(p_, std::max(levels, 0L));
}

void EisensteinElem::reduce() {
    for (long i = 0; i < e_; ++i) {
        const Int m = coeff_modulus(static_cast<int>(i));
        if (m == 1) {
            c_[static_cast<size_t>(i)] = 0;
            continue;
        }
        Int& x = c_[static_cast<size_t>(i)];
        x %= m;
        if (x < 0)
            x += m;
    }
}

EisensteinElem EisensteinElem::from_exact(const EisExact& x, long N) {
    EisensteinElem r(x.p(), x.e(), N);
    for (long i = 0; i < x.e(); ++i) {
        const Int m = r.coeff_modulus(static_cast<int>(i));
        if (m == 1)
            continue;
        r.c_[static_cast<size_t>(i)] = rat_mod(x.coeff(static_cast<int>(i)), m);
    }
    r.reduce();
    return r;
}

EisensteinElem EisensteinElem::from_rational(long p, long e, const Rat& v, long N) {
    return from_exact(EisExact::from_rational(p, e, v), N);
}

bool EisensteinElem::is_zero_at_precision() const {
    return std::all_of(c_.begin(), c_.end(), [](const Int& x) { return x == 0; });
}

std::optional<long> EisensteinElem::val_pi() const {
    std::optional<long> best;
    for (long i = 0; i < e_; ++i) {
        const Int& x = c_[static_cast<size_t>(i)];
        if (x == 0)
            continue;
        const long v = i + e_ * static_cast<long>(valuation_int(x, Int(p_)));
        if (!best || v < *best)
            best = v;
    }
    return best;
}

long EisensteinElem::val_lower_bound() const {
    auto v = val_pi();
    return v ? *v : N_;
}

int EisensteinElem::digit(long t) const {
    if (t < 0 || t >= N_)
        fail("PrecisionExhausted",
             fmt::format("digit {} beyond stored precision {}", t, N_));
    const long i = t % e_;
    const long level = t / e_;
    Int x = c_[static_cast<size_t>(i)] / int_pow(p_, level);
    x %= p_;
    return static_cast<int>(x.get_si());
}

std::vector<int> EisensteinElem::digits(long count) const {
    std::vector<int> out;
    out.reserve(static_cast<size_t>(count));
    for (long t = 0; t < count; ++t)
        out.push_back(digit(t));
    return out;
}

EisensteinElem EisensteinElem::truncated(long N2) const {
    if (N2 > N_)
        fail("PrecisionExhausted",
             fmt::format("cannot raise precision from {} to {}", N_, N2));
    EisensteinElem r(p_, e_, N2);
    r.c_ = c_;
    r.reduce();
    return r;
}

EisensteinElem EisensteinElem::operator-() const {
    EisensteinElem r = *this;
    for (Int& x : r.c_)
        x = -x;
    r.reduce();
    return r;
}

EisensteinElem EisensteinElem::operator+(const EisensteinElem& o) const {
    EisensteinElem r(p_, e_, std::min(N_, o.N_));
    for (long i = 0; i < e_; ++i)
        r.c_[static_cast<size_t>(i)] = c_[static_cast<size_t>(i)] + o.c_[static_cast<size_t>(i)];
    r.reduce();
    return r;
}

EisensteinElem EisensteinElem::operator-(const EisensteinElem& o) const {
    return *this + (-o);
}

EisensteinElem EisensteinElem::operator*(const EisensteinElem& o) const {
    const long N = std::min(N_ + o.val_lower_bound(), o.N_ + val_lower_bound());
    EisensteinElem r(p_, e_, N);
    for (long i = 0; i < e_; ++i) {
        if (c_[static_cast<size_t>(i)] == 0)
            continue;
        for (long j = 0; j < e_; ++j) {
            if (o.c_[static_cast<size_t>(j)] == 0)
                continue;
            long k = i + j;
            Int term = c_[static_cast<size_t>(i)] * o.c_[static_cast<size_t>(j)];
            if (k >= e_) {
                k -= e_;
                term *= p_;
            }
            r.c_[static_cast<size_t>(k)] += term;
        }
    }
    r.reduce();
    return r;
}

EisensteinElem EisensteinElem::inv() const {
    if (is_zero_at_precision())
        fail("PrecisionExhausted", "cannot invert an element that vanishes at precision");
    if (*val_pi() != 0)
        fail("NotAUnit", "inverse requires a unit (valuation zero)");
    // Invert the integer representative exactly, then reduce.  The
    // representative is a unit of Z_p[pi], so the exact inverse has
    // denominators prime to p.
    EisExact rep(p_, e_);
    for (long i = 0; i < e_; ++i)
        rep.coeff(static_cast<int>(i)) = Rat(c_[static_cast<size_t>(i)]);
    return from_exact(rep.inv(), N_);
}

EisensteinElem EisensteinElem::pow(const Int& k) const {
    if (k < 0) {
        Int nk = -k;
        return inv().pow(nk);
    }
    EisensteinElem acc = from_rational(p_, e_, Rat(1), N_);
    EisensteinElem base = *this;
    Int kk = k;
    while (kk > 0) {
        if (mpz_odd_p(kk.get_mpz_t()))
            acc = acc * base;
        kk >>= 1;
        if (kk > 0)
            base = base * base;
    }
    return acc;
}

EisensteinElem EisensteinElem::shift(long k) const {
    EisensteinElem r = *this;
    while (k > 0) {
        // multiply by pi: rotate coefficients up, top wraps with a factor p.
        std::vector<Int> next(static_cast<size_t>(e_));
        next[0] = r.c_[static_cast<size_t>(e_ - 1)] * p_;
        for (long i = 1; i < e_; ++i)
            next[static_cast<size_t>(i)] = r.c_[static_cast<size_t>(i - 1)];
        r.c_ = std::move(next);
        r.N_ += 1;
        r.reduce();
        --k;
    }
    while (k < 0) {
        if (r.N_ <= 1)
            fail("PrecisionExhausted", "shift exhausts the stored precision");
        if (r.c_[0] % p_ != 0)
            fail("NegativeValuation", "shift would produce negative valuation");
        std::vector<Int> next(static_cast<size_t>(e_));
        for (long i = 0; i + 1 < e_; ++i)
            next[static_cast<size_t>(i)] = r.c_[static_cast<size_t>(i + 1)];
        next[static_cast<size_t>(e_ - 1)] = r.c_[0] / p_;
        r.c_ = std::move(next);
        r.N_ -= 1;
        r.reduce();
        ++k;
    }
    return r;
}

bool EisensteinElem::congruent(const EisensteinElem& o, long upto) const {
    if (upto > std::min(N_, o.N_))
        fail("PrecisionExhausted",
             fmt::format("congruence mod pi^{} exceeds stored precision", upto));
    for (long t = 0; t < upto; ++t)
        if (digit(t) != o.digit(t))
            return false;
    return true;
}

// ---------------------------------------------------------------------------
// Roots
// ---------------------------------------------------------------------------

namespace {

// k-th root of a unit, k prime to p.  Deterministic: the least leading digit
// among the mod-p solutions is lifted.
EisensteinElem tame_unit_root(const EisensteinElem& u, long k) {
    const long p = u.p(), e = u.e(), N = u.precision();
    const int u0 = u.digit(0);
    int lead = -1;
    for (int d = 1; d < p; ++d) {
        long dp = 1;
        for (long i = 0; i < k; ++i)
            dp = dp * d % p;
        if (dp == u0 % p) {
            lead = d;
            break;
        }
    }
    if (lead < 0)
        fail("NoRootAtPrecision",
             fmt::format("no solution of y^{} = {} modulo {}", k, u0, p));
    EisensteinElem y = EisensteinElem::from_rational(p, e, Rat(lead), N);
    // Newton: y <- y - (y^k - u) / (k y^(k-1)); the derivative is a unit, so
    // the iteration converges quadratically and keeps full precision.
    for (int iter = 0; iter < 64; ++iter) {
        EisensteinElem f = y.pow(Int(k)) - u;
        if (f.is_zero_at_precision())
            return y;
        EisensteinElem deriv = y.pow(Int(k - 1)) * EisensteinElem::from_rational(p, e, Rat(k), N);
        y = (y - f * deriv.inv()).truncated(N);
    }
    fail("InternalError", "tame Newton iteration failed to converge");
}

struct WildRootOutcome {
    std::optional<EisensteinElem> root;
    std::vector<CertStep> steps;
};

// p-th root of a unit on a field with e = p, by digit lifting.  The first
// two digits come from an explicit window of congruences modulo pi^(e+2)
// (which is also a complete decision procedure modulo pi^(2e)); every later
// digit is determined linearly.  On failure the decisive congruence is left
// in `steps`.
WildRootOutcome wild_unit_root(const EisensteinElem& u, int layer) {
    const long p = u.p(), e = u.e(), N = u.precision();
    WildRootOutcome out;
    if (e != p)
        fail("Unsupported", "p-th roots implemented for e = p only");
    if (N < e + 2)
        fail("PrecisionInsufficient",
             fmt::format("p-th root needs precision >= {}, have {}", e + 2, N));

    const Int p2 = Int(p) * Int(p);
    const int alpha = u.digit(0);
    out.steps.push_back({fmt::format("layer{}.alpha", layer),
                         fmt::format("alpha^{} = x (mod pi): alpha = {}", p, alpha),
                         Int(alpha), Int(alpha), Int(p), true});

    // A p-th power has no digits strictly between pi^0 and pi^e.
    for (long j = 1; j < e; ++j) {
        const int dj = u.digit(j);
        const bool ok = dj == 0;
        out.steps.push_back({fmt::format("layer{}.window{}", layer, j),
                             fmt::format("digit {} of a p-th power must vanish; found {}", j, dj),
                             Int(dj), Int(0), Int(p), ok});
        if (!ok)
            return out;
    }

    // beta from the pi^(e+1) digit: p alpha^(p-1) beta = c_1 (mod p^2).
    Int a_pm1 = 1;
    for (long i = 0; i + 1 < p; ++i)
        a_pm1 = a_pm1 * alpha % p;
    const Int a_pm1_inv = mod_inv(a_pm1, Int(p));
    const int c1digit = u.digit(e + 1);
    const Int beta = Int(c1digit) * a_pm1_inv % p;
    out.steps.push_back({fmt::format("layer{}.beta", layer),
                         fmt::format("alpha^{} * beta = {} (mod {}): beta = {}", p - 1,
                                     c1digit, p, beta.get_str()),
                         beta, beta, Int(p), true});

    // Consistency at pi^e: alpha^p + p beta^p = c_0 (mod p^2).
    const Int lhs = (mod_pow(Int(alpha), Int(p), p2) + Int(p) * mod_pow(beta, Int(p), p2)) % p2;
    const Int rhs = u.coeffs()[0] % p2;
    const bool main_ok = lhs == rhs;
    out.steps.push_back({fmt::format("layer{}.unit", layer),
                         fmt::format("alpha^{} + {}*beta^{} = {} required {} (mod {})", p, p, p,
                                     lhs.get_str(), rhs.get_str(), p2.get_str()),
                         lhs, rhs, p2, main_ok});
    if (!main_ok)
        return out;

    // Assemble the root digit by digit; digit t matches digit e+t of u.
    EisensteinElem y = EisensteinElem::from_rational(p, e, Rat(alpha), N);
    y = y + EisensteinElem::from_rational(p, e, Rat(beta), N).shift(1).truncated(N);
    for (long t = 2; t + e < N; ++t) {
        const EisensteinElem yp = y.pow(Int(p));
        long want = u.digit(e + t);
        long have = yp.digit(e + t);
        Int dt = (Int(want - have) % p) * a_pm1_inv % p;
        if (dt < 0)
            dt += p;
        if (dt != 0) {
            EisensteinElem add =
                EisensteinElem::from_rational(p, e, Rat(dt), N).shift(t).truncated(N);
            y = y + add;
        }
    }
    const EisensteinElem yp = y.pow(Int(p));
    const bool verify = yp.congruent(u, N);
    out.steps.push_back({fmt::format("layer{}.verify", layer),
                         fmt::format("y^{} = x (mod pi^{})", p, N),
                         Int(verify ? 1 : 0), Int(1), Int(p), verify});
    if (!verify)
        return out;
    out.root = y.truncated(N - e);
    return out;
}

} // namespace

EisensteinElem nth_root(const EisensteinElem& x, long k) {
    if (k < 2)
        fail("BadArgument", "root degree must be at least 2");
    const long p = x.p();
    auto v = x.val_pi();
    if (!v)
        fail("PrecisionExhausted", "element vanishes at precision; root undetermined");
    if (*v % k != 0)
        fail("NoRootAtPrecision",
             fmt::format("valuation {} not divisible by {}", *v, k));
    EisensteinElem u = x.shift(-*v);
    long kk = k;
    int layer = 1;
    while (kk % p == 0) {
        auto out = wild_unit_root(u, layer++);
        if (!out.root) {
            const CertStep& bad = out.steps.back();
            fail("NoRootAtPrecision", "no p-th root: " + bad.equation);
        }
        u = *out.root;
        kk /= p;
    }
    if (kk > 1)
        u = tame_unit_root(u, kk);
    return u.shift(*v / k);
}

PowerCertificate is_nth_power(const EisensteinElem& x, long k) {
    if (k < 2)
        fail("BadArgument", "power degree must be at least 2");
    const long p = x.p(), e = x.e();
    PowerCertificate cert;
    auto v = x.val_pi();
    if (!v)
        fail("PrecisionExhausted", "element vanishes at precision; test undetermined");

    long kk = k;
    int wild = 0;
    while (kk % p == 0) {
        kk /= p;
        ++wild;
    }
    if (wild > 2)
        fail("Unsupported", "at most two wild layers are implemented");
    if (wild >= 1 && e != p)
        fail("Unsupported", "wild power tests implemented for e = p only");
    const long need = wild == 0 ? 1 : (wild == 1 ? 2 * e : 3 * e);
    if (x.precision() - *v < need)
        fail("PrecisionInsufficient",
             fmt::format("power test needs unit precision >= {}, have {}", need,
                         x.precision() - *v));

    {
        const bool ok = *v % k == 0;
        cert.steps.push_back({"valuation",
                              fmt::format("v(x) = {} must be divisible by {}", *v, k),
                              Int(*v), Int(k), Int(0), ok});
        if (!ok)
            return cert;
    }

    EisensteinElem u = x.shift(-*v);
    for (int layer = 1; layer <= wild; ++layer) {
        auto out = wild_unit_root(u, layer);
        cert.steps.insert(cert.steps.end(), out.steps.begin(), out.steps.end());
        if (!out.root)
            return cert;
        u = *out.root;
    }
    if (kk > 1) {
        // Tame solvability is visible on the leading digit.
        const int u0 = u.digit(0);
        bool solvable = false;
        for (int d = 1; d < p && !solvable; ++d) {
            long dp = 1;
            for (long i = 0; i < kk; ++i)
                dp = dp * d % p;
            solvable = dp == u0 % p;
        }
        cert.steps.push_back({"tame",
                              fmt::format("y^{} = {} (mod {}) solvable: {}", kk, u0, p,
                                          solvable ? "yes" : "no"),
                              Int(u0), Int(u0), Int(p), solvable});
        if (!solvable)
            return cert;
        u = tame_unit_root(u, kk);
    }
    cert.is_power = true;
    cert.witness = u.shift(*v / k);
    return cert;
}

// ---------------------------------------------------------------------------
// Worked example
// ---------------------------------------------------------------------------

EisensteinElem eval_g_at_d(long r, int root_sign, long prec_coeff) {
    if (r == 0 || r % 5 == 0)
        fail("BadArgument", "r must be nonzero and prime to 5");
    if (root_sign != 1 && root_sign != -1)
        fail("BadArgument", "root_sign must be +1 or -1");
    if (prec_coeff < 1)
        fail("BadArgument", "precision must be at least one coefficient level");
    const long p = 5, e = 5;
    const long N = e * prec_coeff;

    // d = (10/r) pi^2, a unit-free value of valuation 7 (in pi-units its
    // square d^2 = (100/r^2) pi^4 ... the relevant fact is v(d) = 7/5 in
    // p-units, i.e. 7 pi-units: 10 = 2*5 contributes 5, pi^2 contributes 2.
    EisExact d(p, e);
    d.coeff(2) = Rat(10) / Rat(r);

    const EisExact one = EisExact::from_rational(p, e, Rat(1));
    const EisExact ratio1 = ((d + one) * (d - one).inv()).pow(r);

    // c = root_sign * 5/r; both (d + c)/5 and (d - c)/5 are units and are
    // written down exactly instead of dividing valuation-5 elements.
    EisExact up(p, e), dn(p, e);
    up.coeff(0) = Rat(root_sign) / Rat(r);
    up.coeff(2) = Rat(2) / Rat(r);
    dn.coeff(0) = Rat(-root_sign) / Rat(r);
    dn.coeff(2) = Rat(2) / Rat(r);
    const EisExact ratio2 = (up * dn.inv()).pow(5);

    return EisensteinElem::from_exact(ratio1 * ratio2, N);
}

WorkedExampleReport run_worked_example(long r, long prec_coeff) {
    WorkedExampleReport rep{r, prec_coeff, eval_g_at_d(r, -1, prec_coeff), {}, {}};
    rep.fifth = is_nth_power(rep.g, 5);
    rep.twentyfifth = is_nth_power(rep.g, 25);
    return rep;
}

// ---------------------------------------------------------------------------
// x^2 + x + 1 modulo p^n
// ---------------------------------------------------------------------------

namespace {

// Tonelli-Shanks square root modulo an odd prime; nullopt for non-residues.
std::optional<Int> sqrt_mod_prime(const Int& a_in, const Int& p) {
    Int a = a_in % p;
    if (a < 0)
        a += p;
    if (a == 0)
        return Int(0);
    const Int leg = mod_pow(a, (p - 1) / 2, p);
    if (leg == p - 1)
        return std::nullopt;
    if (p % 4 == 3)
        return mod_pow(a, (p + 1) / 4, p);
    // Write p - 1 = q 2^s with q odd.
    Int q = p - 1;
    unsigned long s = 0;
    while (mpz_even_p(q.get_mpz_t())) {
        q /= 2;
        ++s;
    }
    // Find a quadratic non-residue z.
    Int z = 2;
    while (mod_pow(z, (p - 1) / 2, p) != p - 1)
        ++z;
    Int m(static_cast<long>(s));
    Int c = mod_pow(z, q, p);
    Int t = mod_pow(a, q, p);
    Int r = mod_pow(a, (q + 1) / 2, p);
    while (t != 1) {
        Int tt = t;
        long i = 0;
        while (tt != 1) {
            tt = tt * tt % p;
            ++i;
        }
        Int b = c;
        for (long j = 0; j < m.get_si() - i - 1; ++j)
            b = b * b % p;
        m = i;
        c = b * b % p;
        t = t * c % p;
        r = r * b % p;
    }
    return r;
}

} // namespace

std::vector<Int> hensel_qsolve(const Int& p, int n) {
    if (n < 1)
        fail("BadArgument", "n must be positive");
    if (mpz_probab_prime_p(p.get_mpz_t(), 32) == 0)
        fail("BadArgument", fmt::format("{} is not prime", p.get_str()));
    if (p == 2 || p % 3 != 1)
        fail("NoSolution",
             fmt::format("x^2+x+1 has no simple roots modulo {}: need p = 1 (mod 3)",
                         p.get_str()));
    // Roots mod p: x = (-1 +- sqrt(-3)) / 2.
    auto s = sqrt_mod_prime(Int(-3), p);
    if (!s)
        fail("InternalError", "-3 must be a square modulo p = 1 (mod 3)");
    const Int inv2 = mod_inv(Int(2), p);
    std::vector<Int> roots = {(p - 1 + *s) % p * inv2 % p, (p - 1 - *s + p) % p * inv2 % p};
    // Newton lifting; f'(x) = 2x + 1 is a unit at both roots for p > 3.
    const Int target = pow_int(p, static_cast<unsigned long>(n));
    for (Int& x : roots) {
        Int mod = p;
        while (mod < target) {
            mod = mod * mod;
            if (mod > target)
                mod = target;
            const Int f = (x * x + x + 1) % mod;
            const Int fp = (2 * x + 1) % mod;
            x = (x - f * mod_inv(fp, mod)) % mod;
            if (x < 0)
                x += mod;
        }
        x %= target;
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

namespace {

bool is_prime_power(const Int& q) {
    if (q < 2)
        return false;
    if (mpz_probab_prime_p(q.get_mpz_t(), 32) != 0)
        return true;
    // Find the smallest prime factor by trial division; a prime power q has
    // that factor as its base.
    Int f = 2;
    while (f * f <= q) {
        if (mpz_divisible_p(q.get_mpz_t(), f.get_mpz_t())) {
            Int rest = q;
            while (mpz_divisible_p(rest.get_mpz_t(), f.get_mpz_t()))
                rest /= f;
            return rest == 1;
        }
        f += (f == 2) ? 1 : 2;
    }
    return true; // unreachable: q prime would have been caught above
}

} // namespace

Int smallest_prime_power_solution(const Int& p, int n, const Int& cap) {
    std::vector<Int> classes = hensel_qsolve(p, n);
    const Int pn = pow_int(p, static_cast<unsigned long>(n));
    for (Int base = 0; base <= cap; base += pn) {
        for (const Int& c : classes) {
            const Int q = base + c;
            if (q < 2 || q > cap)
                continue;
            if (is_prime_power(q))
                return q;
        }
    }
    fail("NoSolution",
         fmt::format("no prime power solution below {}", cap.get_str()));
}

} // namespace wildram
