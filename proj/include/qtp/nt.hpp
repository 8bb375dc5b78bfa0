#pragma once

#include <cstdint>
#include <vector>

namespace qtp {

bool is_prime_u64(uint64_t n);
// Trial-division factorization; pairs (prime, exponent) in increasing order.
std::vector<std::pair<uint64_t, int>> factorize(uint64_t n);
bool is_squarefree(uint64_t n);

int valuation_i64(int64_t a, uint64_t p);  // a != 0
// Legendre symbol (a/p) for odd prime p; 0 when p | a.
int legendre_i64(int64_t a, uint64_t p);
// Hilbert symbol (a,b)_v over Q_v; v = 0 encodes the real place.
int hilbert_symbol(int64_t a, int64_t b, uint64_t v);

// Modular helpers for arbitrary uint64 moduli (used by local splittings).
uint64_t mulmod_u64(uint64_t a, uint64_t b, uint64_t m);
uint64_t powmod_u64(uint64_t a, uint64_t e, uint64_t m);
// Inverse of a mod m; requires gcd(a, m) = 1.
uint64_t invmod_u64(uint64_t a, uint64_t m);

}  // namespace qtp
