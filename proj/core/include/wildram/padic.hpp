#pragma once

#include "wildram/rational.hpp"

#include <optional>
#include <string>
#include <vector>

namespace wildram {

// ---------------------------------------------------------------------------
// Exact arithmetic in Q(pi), pi^e = p.
// ---------------------------------------------------------------------------

// Field element as an exact rational coefficient vector c_0..c_{e-1} with
// respect to the basis 1, pi, ..., pi^(e-1).  Everything here is exact; the
// truncated type below is produced from it at the end of a pipeline.
class EisExact {
public:
    EisExact(long p, long e);
    static EisExact from_rational(long p, long e, const Rat& value);
    static EisExact pi(long p, long e);

    long p() const { return p_; }
    long e() const { return e_; }
    const std::vector<Rat>& coeffs() const { return c_; }
    Rat& coeff(int i) { return c_[static_cast<size_t>(i)]; }
    const Rat& coeff(int i) const { return c_[static_cast<size_t>(i)]; }

    bool is_zero() const;
    // pi-adic valuation (in units of v(pi) = 1, so v(p) = e).  Fails on zero.
    long val_pi() const;

    EisExact operator-() const;
    EisExact operator+(const EisExact& o) const;
    EisExact operator-(const EisExact& o) const;
    EisExact operator*(const EisExact& o) const;
    // Exact inverse via linear algebra over Q; fails on zero.
    EisExact inv() const;
    // Integer powers, negative allowed.
    EisExact pow(long k) const;

private:
    long p_ = 0, e_ = 0;
    std::vector<Rat> c_;
};

// ---------------------------------------------------------------------------
// Truncated elements with precision bookkeeping.
// ---------------------------------------------------------------------------

// Element of Z_p[pi] known modulo pi^N: coefficient i is stored reduced
// modulo p^ceil((N-i)/e).  N is the absolute precision in pi-units.
class EisensteinElem {
public:
    EisensteinElem(long p, long e, long N);
    // Reduce an exact element.  Coefficient denominators must be prime to p
    // (i.e. the element must lie in Z_(p)[pi]); fails with code
    // "NegativeValuation" otherwise.
    static EisensteinElem from_exact(const EisExact& x, long N);
    static EisensteinElem from_rational(long p, long e, const Rat& v, long N);

    long p() const { return p_; }
    long e() const { return e_; }
    long precision() const { return N_; }
    // p^ceil((N-i)/e), the modulus coefficient i is known to.
    Int coeff_modulus(int i) const;
    const std::vector<Int>& coeffs() const { return c_; }

    bool is_zero_at_precision() const;
    // Exact pi-adic valuation when it is determined by the stored residues
    // (i.e. provably < N); nullopt when the element vanishes to the stored
    // precision.
    std::optional<long> val_pi() const;
    // Largest v such that the element is provably divisible by pi^v (equals
    // val_pi when determined, N otherwise).
    long val_lower_bound() const;

    // pi-adic digit at position t (0 <= t < N).
    int digit(long t) const;
    std::vector<int> digits(long count) const;

    EisensteinElem truncated(long N2) const;

    EisensteinElem operator-() const;
    EisensteinElem operator+(const EisensteinElem& o) const;
    EisensteinElem operator-(const EisensteinElem& o) const;
    EisensteinElem operator*(const EisensteinElem& o) const;
    // Inverse of a unit.  Fails with "PrecisionExhausted" when the element
    // vanishes at the stored precision and "NotAUnit" when val > 0.
    EisensteinElem inv() const;
    EisensteinElem pow(const Int& k) const;
    // Multiply by pi^k (k may be negative; the result must still have
    // nonnegative valuation, else "NegativeValuation").
    EisensteinElem shift(long k) const;

    // Congruence modulo pi^upto (upto <= min precision of the two operands).
    bool congruent(const EisensteinElem& o, long upto) const;

private:
    void reduce();
    long p_ = 0, e_ = 0;
    long N_ = 0;
    std::vector<Int> c_;
};

// ---------------------------------------------------------------------------
// Roots and power certificates.
// ---------------------------------------------------------------------------

// k-th root of x (k >= 2).  The valuation of x must be a multiple of k and
// determined at the stored precision.  For p | k the root loses e pi-units
// of precision per factor of p in k.  Among the (possibly several) roots the
// one with the least leading digit is returned, so repeated calls are
// deterministic.  Fails with "NoRootAtPrecision" when no root exists to the
// stored precision and "PrecisionExhausted" when x vanishes at precision.
EisensteinElem nth_root(const EisensteinElem& x, long k);

// One verification step of a power test: a congruence that was checked,
// with both sides reduced modulo `modulus`.
struct CertStep {
    std::string name;     // "alpha", "beta", "unit-window", ...
    std::string equation; // human-readable rendering
    Int lhs, rhs, modulus;
    bool ok = true;
};

struct PowerCertificate {
    bool is_power = false;
    std::optional<EisensteinElem> witness; // a k-th root when is_power
    std::vector<CertStep> steps;
};

// Decide whether x is a k-th power to the stored precision, with a replayable
// transcript of the congruences examined.  Supported k: any k prime to p,
// k = p and k = p^2 (optionally times a prime-to-p factor), on fields with
// e = p for the wildly ramified part.  Requires N >= 2e per factor of p in k
// plus e slack for the nested case; otherwise fails "PrecisionInsufficient".
PowerCertificate is_nth_power(const EisensteinElem& x, long k);

// ---------------------------------------------------------------------------
// The built-in worked example over Q_5(5^(1/5)).
// ---------------------------------------------------------------------------

// g(d) = ((d+1)/(d-1))^r * ((d+c)/(d-c))^5 with d = (10/r) pi^2 and
// c = root_sign * 5/r, the two square roots of 1 - a for a = 1 - 25/r^2.
// Only the root_sign = -1 branch makes g a unit congruent to +-1; the other
// branch leaves a valuation-7 tail.  prec_coeff = M means coefficients are
// reported modulo 5^M (absolute precision N = 5M).
EisensteinElem eval_g_at_d(long r, int root_sign, long prec_coeff);

struct WorkedExampleReport {
    long r = 0;
    long prec_coeff = 0;
    EisensteinElem g;
    PowerCertificate fifth;        // certificate that g is a 5th power
    PowerCertificate twentyfifth;  // certificate test on the 5th root
};

WorkedExampleReport run_worked_example(long r, long prec_coeff);

// ---------------------------------------------------------------------------
// x^2 + x + 1 = 0 mod p^n.
// ---------------------------------------------------------------------------

// Both solutions modulo p^n (p an odd prime, p = 1 mod 3 required, else
// "NoSolution"), sorted ascending.  Newton lifting from the mod-p roots.
std::vector<Int> hensel_qsolve(const Int& p, int n);

// Least prime power q with q^2 + q + 1 = 0 mod p^n.  Scans prime powers in
// increasing order; `cap` bounds the search (fails "NoSolution" beyond it).
Int smallest_prime_power_solution(const Int& p, int n, const Int& cap = Int(100000000));

} // namespace wildram
