#pragma once

#include "wildram/rational.hpp"

#include <vector>

namespace wildram {

// Higher ramification data of a totally ramified Z/p^n x| Z/m extension of
// complete discrete valuation rings (m prime to p, the order-m part acting
// faithfully on the order-p^n part or trivially; only p, n, m and the break
// numbers matter here).  lower_jumps are the breaks j_1 < ... < j_n of the
// filtration in the lower numbering, restricted to the p-part: the subgroup
// fixing the i-th break has order p^(n-i+1).
struct RamFiltration {
    long p = 0;
    int n = 0;
    long m = 1;
    std::vector<Int> lower_jumps;
};

// Breaks in the upper numbering, u_1 <= ... <= u_n, rational with
// denominator dividing m.
using UpperJumps = std::vector<Rat>;

// Structural sanity: p prime-ish (>= 2), n >= 0, m >= 1, gcd(m, p) = 1,
// jumps strictly increasing positive integers, j_i = j_1 mod p for ... (not
// enforced; congruence conditions vary by context).  Throws
// ToolkitError("BadFiltration") on violation.
void validate(const RamFiltration& f);

// u_1 = j_1/m, u_{i+1} = u_i + (j_{i+1} - j_i) / (m p^i).
UpperJumps lower_to_upper(const RamFiltration& f);

// Inverse of lower_to_upper; throws ToolkitError("NotIntegralLowerJumps")
// when the reconstructed lower jumps are not integers, and
// ToolkitError("BadFiltration") when the upper jumps are not increasing or
// not positive.
RamFiltration upper_to_lower(long p, int n, long m, const UpperJumps& upper);

// Degree of the different of the full Z/p^n x| Z/m extension, computed two
// ways (term-by-term over the filtration and telescoped over jump gaps);
// both must agree.
Int different_degree_lower(const RamFiltration& f);

// Same quantity from the upper numbering:
//   p^n m - 1 + sum_i m p^(i-1) (p^(n-i+1) - 1) (u_i - u_{i-1}).
// Throws ToolkitError("NonIntegralDifferent") if the sum is not an integer.
Int different_degree_upper(long p, int n, long m, const UpperJumps& upper);

// Different degree e - 1 of a tame extension; requires gcd(e, p) = 1, else
// ToolkitError("NotTame").
Int tame_different(const Int& e, long p);

// Conductor (largest upper jump) u_n = (1/m) sum_i (j_i - j_{i-1}) / p^(i-1).
Rat conductor(const RamFiltration& f);

// The same conductor through the weighted-sum identity
//   sum_{i<n} ((p-1)/(p^i m)) j_i  +  j_n / (p^(n-1) m).
Rat conductor_weighted(const RamFiltration& f);

// Conductor of the composite of a degree-p extension (conductor sigma) with
// a further degree-p layer whose own conductor is tau, under tau <= sigma:
//   rho = tau + p (sigma - tau).
// Throws ToolkitError("TauExceedsSigma") when tau > sigma.
Rat compositum_conductor(const Rat& sigma, const Rat& tau, long p);

// Truncated invariant of a stack sigma_1..sigma_r of per-level invariants,
// discarding the top alpha levels:
//   sum_{i=1}^{r-alpha-1} ((p-1)/p^i) sigma_i  +  sigma_{r-alpha} / p^(r-alpha-1).
// alpha must satisfy 0 <= alpha <= r-1, else ToolkitError("AlphaOutOfRange").
Rat effective_invariant(long p, const std::vector<Rat>& sigmas, int alpha);

// Integrality condition on the upper numbering: every m * u_i is an integer.
bool validate_hasse_arf(const UpperJumps& upper, long m);

} // namespace wildram
