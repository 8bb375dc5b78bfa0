#include "qtp/padic.hpp"

#include <sstream>

namespace qtp {

namespace {

bool is_prime_u64(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

}  // namespace

void PadicParams::validate() const {
  if (!is_prime_u64(p)) throw ValidationError("p must be prime");
  if (p < 5) throw ValidationError("p must be at least 5");
  if (M_w < 2) throw ValidationError("M_w must be at least 2");
  if (M_mom < 2) throw ValidationError("M_mom must be at least 2");
  if (N < M_mom + 4) throw ValidationError("N must be at least M_mom + 4");
  // Working modulus must fit: p^(N+2) < 2^62.
  unsigned __int128 m = 1;
  const unsigned __int128 cap = (unsigned __int128)1 << 62;
  for (int i = 0; i < N + 2; ++i) {
    m *= p;
    if (m >= cap) throw ValidationError("p^(N+2) exceeds 62 bits; reduce N");
  }
}

PadicRing::PadicRing(uint64_t p, int N) : p_(p), N_(N) {
  if (!is_prime_u64(p) || p < 5) throw ValidationError("PadicRing: bad p");
  if (N < 1) throw ValidationError("PadicRing: N must be positive");
  // Choose the largest guard G <= 4 with p^(N+G) < 2^62; require G >= 2 so
  // the ell pipeline (one /p plus one /p^{v(j)}) stays good mod p^N.
  const unsigned __int128 cap = (unsigned __int128)1 << 62;
  int G = 0;
  unsigned __int128 m = 1;
  for (int i = 0; i < N; ++i) {
    m *= p;
    if (m >= cap) throw ValidationError("PadicRing: p^N exceeds 62 bits");
  }
  while (G < 4) {
    unsigned __int128 nm = m * p;
    if (nm >= cap) break;
    m = nm;
    ++G;
  }
  if (G < 2) throw ValidationError("PadicRing: p^(N+2) exceeds 62 bits; reduce N");
  G_ = G;
  mod_ = (uint64_t)m;
  ppow_.resize(N_ + G_ + 1);
  ppow_[0] = 1;
  for (int i = 1; i <= N_ + G_; ++i) ppow_[i] = ppow_[i - 1] * p_;
}

uint64_t PadicRing::ppow(int k) const {
  if (k < 0 || k > W()) throw ValidationError("PadicRing::ppow: out of range");
  return ppow_[k];
}

uint64_t PadicRing::reduce(int64_t a) const {
  int64_t r = a % (int64_t)mod_;
  if (r < 0) r += (int64_t)mod_;
  return (uint64_t)r;
}

uint64_t PadicRing::add(uint64_t a, uint64_t b) const {
  uint64_t s = a + b;
  if (s >= mod_) s -= mod_;
  return s;
}

uint64_t PadicRing::sub(uint64_t a, uint64_t b) const {
  return a >= b ? a - b : a + (mod_ - b);
}

uint64_t PadicRing::neg(uint64_t a) const { return a == 0 ? 0 : mod_ - a; }

uint64_t PadicRing::mul(uint64_t a, uint64_t b) const {
  return (uint64_t)(((unsigned __int128)a * b) % mod_);
}

uint64_t PadicRing::pow(uint64_t a, uint64_t e) const {
  uint64_t r = 1 % mod_, base = a % mod_;
  while (e) {
    if (e & 1) r = mul(r, base);
    base = mul(base, base);
    e >>= 1;
  }
  return r;
}

uint64_t PadicRing::pow_signed(uint64_t a, int64_t e) const {
  if (e >= 0) return pow(a, (uint64_t)e);
  return pow(inv(a), (uint64_t)(-e));
}

uint64_t PadicRing::inv(uint64_t a) const {
  a %= mod_;
  if (a % p_ == 0) throw PrecisionError("PadicRing::inv of a non-unit");
  // Extended Euclid over Z; mod_ is odd so int64 is safe below 2^62.
  int64_t r0 = (int64_t)mod_, r1 = (int64_t)a, s0 = 0, s1 = 1;
  while (r1 != 0) {
    int64_t q = r0 / r1;
    int64_t r2 = r0 - q * r1;
    int64_t s2 = s0 - q * s1;
    r0 = r1; r1 = r2; s0 = s1; s1 = s2;
  }
  // r0 = gcd = 1 since a is a unit.
  int64_t inv = s0 % (int64_t)mod_;
  if (inv < 0) inv += (int64_t)mod_;
  return (uint64_t)inv;
}

int PadicRing::val(uint64_t a) const {
  if (a == 0) return W();
  int v = 0;
  while (a % p_ == 0) {
    a /= p_;
    ++v;
  }
  return v;
}

uint64_t PadicRing::div_pk(uint64_t a, int k) const {
  if (k == 0) return a;
  uint64_t pk = ppow(k);
  if (a % pk != 0) throw PrecisionError("PadicRing::div_pk: not divisible");
  return a / pk;
}

uint64_t PadicRing::div(uint64_t a, uint64_t b) const {
  int vb = val(b);
  if (vb >= W()) throw PrecisionError("PadicRing::div by zero residue");
  if (vb == 0) return mul(a, inv(b));
  int va = val(a);
  if (va < vb) throw PrecisionError("PadicRing::div: quotient not integral");
  return mul(div_pk(a, vb), inv(b / ppow(vb)));
}

uint64_t PadicRing::teichmuller(uint64_t t) const {
  t %= mod_;
  if (!is_unit(t)) throw ValidationError("teichmuller: argument is not a unit");
  uint64_t x = t;
  for (int i = 0; i <= W() + 1; ++i) {
    uint64_t nx = pow(x, p_);
    if (nx == x) return x;
    x = nx;
  }
  return x;  // unreachable: iteration is convergent
}

uint64_t PadicRing::unit_one_part(uint64_t t) const {
  return mul(t, inv(teichmuller(t)));
}

uint64_t PadicRing::log_one_unit(uint64_t x) const {
  x %= mod_;
  if (x % p_ != 1 % p_ || val(sub(x, 1)) < 1)
    throw ValidationError("log_one_unit: argument is not 1 mod p");
  uint64_t y = sub(x, 1);
  // log(1+y) = sum_{j>=1} (-1)^{j+1} y^j / j.  Terms with v(y^j) >= W vanish.
  uint64_t acc = 0, yj = 1;
  for (int j = 1; j <= W(); ++j) {
    yj = mul(yj, y);
    if (yj == 0) break;
    uint64_t jj = (uint64_t)j;
    int e = 0;
    while (jj % p_ == 0) {
      jj /= p_;
      ++e;
    }
    uint64_t term = mul(div_pk(yj, e), inv(reduce((int64_t)jj)));
    acc = (j % 2 == 1) ? add(acc, term) : sub(acc, term);
  }
  return acc;
}

uint64_t PadicRing::ell(uint64_t t) const {
  // ell(t) = log<t> / log(1+p); both logs have valuation >= 1, the
  // denominator exactly 1, so divide the p-shifted values.
  uint64_t a = log_one_unit(unit_one_part(t));
  uint64_t b = log_one_unit(reduce((int64_t)(1 + p_)));
  return mul(div_pk(a, 1), inv(div_pk(b, 1)));
}

PadicApprox padic_add(const PadicRing& R, const PadicApprox& a, const PadicApprox& b) {
  return {R.add(a.value, b.value), std::min(a.known_prec, b.known_prec)};
}

PadicApprox padic_sub(const PadicRing& R, const PadicApprox& a, const PadicApprox& b) {
  return {R.sub(a.value, b.value), std::min(a.known_prec, b.known_prec)};
}

PadicApprox padic_mul(const PadicRing& R, const PadicApprox& a, const PadicApprox& b) {
  // Unknown digits of one factor are attenuated by the valuation of the
  // other: prec(ab) >= min(prec(a) + v(b), prec(b) + v(a)), capped at N.
  int va = R.val(a.value), vb = R.val(b.value);
  int prec = std::min(a.known_prec + vb, b.known_prec + va);
  prec = std::min(prec, R.N());
  return {R.mul(a.value, b.value), prec};
}

PadicApprox padic_div_pk(const PadicRing& R, const PadicApprox& a, int k) {
  return {R.div_pk(a.value, k), std::max(0, a.known_prec - k)};
}

bool padic_eq(const PadicRing& R, const PadicApprox& a, const PadicApprox& b) {
  int m = std::min(a.known_prec, b.known_prec);
  if (m <= 0) return true;
  return R.sub(a.value, b.value) % R.ppow(m) == 0;
}

int residual_valuation(const PadicRing& R, const PadicApprox& a, const PadicApprox& b) {
  int m = std::min(a.known_prec, b.known_prec);
  int v = R.val(R.sub(a.value, b.value));
  return std::min(v, m);
}

std::string padic_to_string(const PadicRing& R, const PadicApprox& a) {
  std::ostringstream os;
  os << (a.value % R.ppow(std::max(0, std::min(a.known_prec, R.N()))))
     << " + O(" << R.p() << "^" << a.known_prec << ")";
  return os.str();
}

}  // namespace qtp
