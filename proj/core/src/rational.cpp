#include "wildram/rational.hpp"

#include "wildram/errors.hpp"

namespace wildram {

Rat parse_rat(std::string_view s) {
    if (s.empty())
        fail("BadRational", "empty rational literal");
    const std::string str(s);
    // mpq_class::set_str accepts "a/b"; validate shape first so that
    // garbage like "1/2/3" or "1//2" is rejected rather than truncated.
    const auto slash = str.find('/');
    if (slash != std::string::npos) {
        if (str.find('/', slash + 1) != std::string::npos)
            fail("BadRational", "more than one '/' in rational literal: " + str);
        if (slash == 0 || slash + 1 == str.size())
            fail("BadRational", "missing numerator or denominator: " + str);
    }
    Rat q;
    if (q.set_str(str, 10) != 0)
        fail("BadRational", "cannot parse rational literal: " + str);
    if (q.get_den() == 0)
        fail("BadRational", "zero denominator: " + str);
    q.canonicalize();
    return q;
}

std::string format_rat(const Rat& q) {
    Rat c = q;
    c.canonicalize();
    if (c.get_den() == 1)
        return c.get_num().get_str();
    return c.get_num().get_str() + "/" + c.get_den().get_str();
}

std::vector<Rat> parse_rat_list(std::string_view s) {
    std::vector<Rat> out;
    size_t start = 0;
    while (start <= s.size()) {
        size_t comma = s.find(',', start);
        if (comma == std::string_view::npos)
            comma = s.size();
        out.push_back(parse_rat(s.substr(start, comma - start)));
        start = comma + 1;
        if (comma == s.size())
            break;
    }
    return out;
}

Int floor_rat(const Rat& q) {
    Int f;
    mpz_fdiv_q(f.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
    return f;
}

Rat frac_part(const Rat& q) {
    return q - Rat(floor_rat(q));
}

bool is_integer(const Rat& q) {
    Rat c = q;
    c.canonicalize();
    return c.get_den() == 1;
}

bool denominator_divides(const Rat& q, const Int& m) {
    Rat c = q;
    c.canonicalize();
    if (m == 0)
        return false;
    return mpz_divisible_p(m.get_mpz_t(), c.get_den().get_mpz_t()) != 0;
}

Int pow_int(const Int& base, unsigned long exp) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exp);
    return r;
}

unsigned long valuation_int(Int x, const Int& p) {
    if (x == 0)
        fail("BadValuation", "valuation of zero is undefined");
    if (p < 2)
        fail("BadValuation", "valuation base must be >= 2");
    unsigned long v = 0;
    while (mpz_divisible_p(x.get_mpz_t(), p.get_mpz_t())) {
        x /= p;
        ++v;
    }
    return v;
}

long valuation_rat(const Rat& q, const Int& p) {
    if (q == 0)
        fail("BadValuation", "valuation of zero is undefined");
    Rat c = q;
    c.canonicalize();
    return static_cast<long>(valuation_int(c.get_num(), p)) -
           static_cast<long>(valuation_int(c.get_den(), p));
}

} // namespace wildram
