#include "qtp/nt.hpp"

#include <numeric>
#include <stdexcept>

namespace qtp {

bool is_prime_u64(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::vector<std::pair<uint64_t, int>> factorize(uint64_t n) {
  std::vector<std::pair<uint64_t, int>> f;
  for (uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      int e = 0;
      while (n % d == 0) {
        n /= d;
        ++e;
      }
      f.emplace_back(d, e);
    }
  }
  if (n > 1) f.emplace_back(n, 1);
  return f;
}

bool is_squarefree(uint64_t n) {
  for (auto& [q, e] : factorize(n))
    if (e > 1) return false;
  return true;
}

int valuation_i64(int64_t a, uint64_t p) {
  if (a == 0) throw std::invalid_argument("valuation of zero");
  int v = 0;
  while (a % (int64_t)p == 0) {
    a /= (int64_t)p;
    ++v;
  }
  return v;
}

int legendre_i64(int64_t a, uint64_t p) {
  int64_t pp = (int64_t)p;
  int64_t r = ((a % pp) + pp) % pp;
  if (r == 0) return 0;
  uint64_t s = powmod_u64((uint64_t)r, (p - 1) / 2, p);
  return s == 1 ? 1 : -1;
}

int hilbert_symbol(int64_t a, int64_t b, uint64_t v) {
  if (a == 0 || b == 0) throw std::invalid_argument("hilbert symbol of zero");
  if (v == 0) return (a < 0 && b < 0) ? -1 : 1;
  if (v == 2) {
    int alpha = valuation_i64(a, 2), beta = valuation_i64(b, 2);
    int64_t u = a >> alpha, w = b >> beta;  // odd parts, signed
    auto eps = [](int64_t x) { return (int)(((x - 1) / 2) & 1); };
    auto om = [](int64_t x) { return (int)(((x * x - 1) / 8) & 1); };
    int e = eps(u) * eps(w) + alpha * om(w) + beta * om(u);
    return (e & 1) ? -1 : 1;
  }
  int alpha = valuation_i64(a, v), beta = valuation_i64(b, v);
  int64_t u = a, w = b;
  for (int i = 0; i < alpha; ++i) u /= (int64_t)v;
  for (int i = 0; i < beta; ++i) w /= (int64_t)v;
  int e = (alpha * beta * (int)((v - 1) / 2)) & 1;
  int s = (e ? -1 : 1);
  if (beta & 1) s *= legendre_i64(u, v);
  if (alpha & 1) s *= legendre_i64(w, v);
  return s;
}

uint64_t mulmod_u64(uint64_t a, uint64_t b, uint64_t m) {
  return (uint64_t)((__uint128_t)a * b % m);
}

uint64_t powmod_u64(uint64_t a, uint64_t e, uint64_t m) {
  uint64_t r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod_u64(r, a, m);
    a = mulmod_u64(a, a, m);
    e >>= 1;
  }
  return r;
}

uint64_t invmod_u64(uint64_t a, uint64_t m) {
  int64_t t = 0, nt = 1;
  int64_t r = (int64_t)m, nr = (int64_t)(a % m);
  while (nr != 0) {
    int64_t q = r / nr;
    int64_t tmp = t - q * nt;
    t = nt;
    nt = tmp;
    tmp = r - q * nr;
    r = nr;
    nr = tmp;
  }
  if (r != 1) throw std::invalid_argument("invmod: not invertible");
  return (uint64_t)((t % (int64_t)m + (int64_t)m) % (int64_t)m);
}

}  // namespace qtp
