#include <wildram/rational.hpp>

#include "support/checks.hpp"

#include <doctest.h>

#include <random>

using namespace wildram;
using testsupport::thrown_code;

TEST_CASE("parse and format round trip") {
    CHECK(format_rat(parse_rat("3/4")) == "3/4");
    CHECK(format_rat(parse_rat("-3/4")) == "-3/4");
    CHECK(format_rat(parse_rat("5")) == "5");
    CHECK(format_rat(parse_rat("0")) == "0");
    // canonicalization
    CHECK(format_rat(parse_rat("6/8")) == "3/4");
    CHECK(format_rat(parse_rat("4/2")) == "2");
    CHECK(format_rat(parse_rat("-6/-8")) == "3/4");
}

TEST_CASE("parse rejects malformed input") {
    CHECK(thrown_code([] { parse_rat("1/0"); }) == "BadRational");
    CHECK(thrown_code([] { parse_rat(""); }) == "BadRational");
    CHECK(thrown_code([] { parse_rat("x"); }) == "BadRational");
    CHECK(thrown_code([] { parse_rat("1/2/3"); }) == "BadRational");
    CHECK(thrown_code([] { parse_rat("1.5"); }) == "BadRational");
    // only a minus sign is accepted, and only on the numerator
    CHECK(thrown_code([] { parse_rat("+7/2"); }) == "BadRational");
}

TEST_CASE("parse_rat_list") {
    auto v = parse_rat_list("1,21");
    REQUIRE(v.size() == 2);
    CHECK(v[0] == Rat(1));
    CHECK(v[1] == Rat(21));
    auto w = parse_rat_list("1/2, 3/2");
    REQUIRE(w.size() == 2);
    CHECK(w[1] == Rat(3, 2));
    CHECK(thrown_code([] { parse_rat_list("1,,2"); }) == "BadRational");
}

TEST_CASE("floor and fractional part") {
    CHECK(floor_rat(Rat(7, 2)) == 3);
    CHECK(floor_rat(Rat(-7, 2)) == -4);
    CHECK(frac_part(Rat(7, 2)) == Rat(1, 2));
    CHECK(frac_part(Rat(-7, 2)) == Rat(1, 2));
    CHECK(frac_part(Rat(4)) == 0);

    std::mt19937 rng(2024);
    std::uniform_int_distribution<long> num(-500, 500), den(1, 40);
    for (int i = 0; i < 500; ++i) {
        Rat q(num(rng), den(rng));
        q.canonicalize();
        Rat r = frac_part(q);
        CHECK(r >= 0);
        CHECK(r < 1);
        CHECK(Rat(floor_rat(q)) + r == q);
    }
}

TEST_CASE("integrality and denominator divisibility") {
    CHECK(is_integer(Rat(4, 2)));
    CHECK(!is_integer(Rat(1, 3)));
    CHECK(denominator_divides(Rat(5, 3), Int(6)));
    CHECK(!denominator_divides(Rat(5, 4), Int(6)));
    CHECK(denominator_divides(Rat(7), Int(1)));
}

TEST_CASE("integer powers and valuations") {
    CHECK(pow_int(Int(5), 0) == 1);
    CHECK(pow_int(Int(5), 3) == 125);
    CHECK(pow_int(Int(-2), 5) == -32);

    CHECK(valuation_int(Int(250), Int(5)) == 3);
    CHECK(valuation_int(Int(7), Int(5)) == 0);
    CHECK(valuation_rat(Rat(1, 25), Int(5)) == -2);
    CHECK(valuation_rat(Rat(50, 3), Int(5)) == 2);

    std::mt19937 rng(99);
    std::uniform_int_distribution<long> e(0, 6), u(1, 40);
    for (int i = 0; i < 300; ++i) {
        long k = e(rng);
        Int unit = u(rng);
        while (unit % 3 == 0) ++unit;
        CHECK(valuation_int(pow_int(Int(3), (unsigned long)k) * unit, Int(3)) ==
              (unsigned long)k);
    }
}
