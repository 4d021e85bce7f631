#pragma once

#include <vector>

namespace wildram {

// Arithmetic in GF(p^k) for small prime powers q.  Elements are encoded as
// integers in [0, q): the base-p digits of the code are the coefficients of
// the residue polynomial, so codes 0..p-1 are the prime field and the code p
// is the class of the polynomial variable.
class GF {
public:
    explicit GF(long q);

    long q() const { return q_; }
    long p() const { return p_; }
    int k() const { return k_; }

    long add(long a, long b) const;
    long sub(long a, long b) const;
    long neg(long a) const;
    long mul(long a, long b) const { return mul_[static_cast<size_t>(a) * static_cast<size_t>(q_) + static_cast<size_t>(b)]; }
    long inv(long a) const;
    long pow(long a, long e) const;
    // n mod p, embedded in the prime field.
    long from_int(long n) const;
    // A generator of the multiplicative group.
    long primitive_element() const;
    // Multiplicative order of a nonzero element.
    long mult_order(long a) const;

private:
    long q_ = 0, p_ = 0;
    int k_ = 0;
    std::vector<long> modulus_; // monic irreducible, degree k, coefficients mod p
    std::vector<long> mul_;     // full q x q multiplication table
};

} // namespace wildram
