#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>
#include <vector>

namespace wildram {

using Int = mpz_class;
using Rat = mpq_class;

// Parse "a/b" or "a" (optional sign, canonicalized, b > 0 enforced).
// Throws ToolkitError("BadRational") on malformed input or zero denominator.
Rat parse_rat(std::string_view s);

// Canonical form: "a" when the denominator is 1, otherwise "a/b" with b > 1.
std::string format_rat(const Rat& q);

// Comma separated list of rationals, e.g. "1,21" or "1/2,3/2".
std::vector<Rat> parse_rat_list(std::string_view s);

Int floor_rat(const Rat& q);

// q - floor(q), always in [0, 1).
Rat frac_part(const Rat& q);

bool is_integer(const Rat& q);

// True when the reduced denominator of q divides m.
bool denominator_divides(const Rat& q, const Int& m);

Int pow_int(const Int& base, unsigned long exp);

// Exact p-adic valuation of a nonzero integer.
unsigned long valuation_int(Int x, const Int& p);

// Valuation of a nonzero rational (may be negative).
long valuation_rat(const Rat& q, const Int& p);

} // namespace wildram
