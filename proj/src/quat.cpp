#include "qtp/quat.hpp"

#include <algorithm>
#include <set>

#include "qtp/nt.hpp"

namespace qtp {

Quat QuatAlgebra::add(const Quat& x, const Quat& y) const {
  Quat r;
  for (size_t t = 0; t < 4; ++t) r.c[t] = x.c[t] + y.c[t];
  return r;
}

Quat QuatAlgebra::sub(const Quat& x, const Quat& y) const {
  Quat r;
  for (size_t t = 0; t < 4; ++t) r.c[t] = x.c[t] - y.c[t];
  return r;
}

Quat QuatAlgebra::neg(const Quat& x) const {
  Quat r;
  for (size_t t = 0; t < 4; ++t) r.c[t] = -x.c[t];
  return r;
}

Quat QuatAlgebra::scal(const BigRat& s, const Quat& x) const {
  Quat r;
  for (size_t t = 0; t < 4; ++t) r.c[t] = s * x.c[t];
  return r;
}

Quat QuatAlgebra::mul(const Quat& x, const Quat& y) const {
  const BigRat &x0 = x.c[0], &x1 = x.c[1], &x2 = x.c[2], &x3 = x.c[3];
  const BigRat &y0 = y.c[0], &y1 = y.c[1], &y2 = y.c[2], &y3 = y.c[3];
  BigRat A(a), B(b);
  Quat r;
  r.c[0] = x0 * y0 + A * x1 * y1 + B * x2 * y2 - A * B * x3 * y3;
  r.c[1] = x0 * y1 + x1 * y0 - B * x2 * y3 + B * x3 * y2;
  r.c[2] = x0 * y2 + x2 * y0 + A * x1 * y3 - A * x3 * y1;
  r.c[3] = x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1;
  return r;
}

Quat QuatAlgebra::conj(const Quat& x) const {
  Quat r;
  r.c[0] = x.c[0];
  for (size_t t = 1; t < 4; ++t) r.c[t] = -x.c[t];
  return r;
}

BigRat QuatAlgebra::nrd(const Quat& x) const {
  BigRat A(a), B(b);
  return x.c[0] * x.c[0] - A * x.c[1] * x.c[1] - B * x.c[2] * x.c[2] +
         A * B * x.c[3] * x.c[3];
}

Quat QuatAlgebra::inv(const Quat& x) const {
  BigRat n = nrd(x);
  if (n == 0) throw ValidationError("quaternion inverse of zero divisor");
  return scal(BigRat(1) / n, conj(x));
}

std::vector<uint64_t> ramified_primes(int64_t a, int64_t b) {
  std::set<uint64_t> cand{2};
  for (int64_t x : {a, b}) {
    uint64_t n = (uint64_t)(x < 0 ? -x : x);
    for (auto& [q, e] : factorize(n)) cand.insert(q);
  }
  std::vector<uint64_t> ram;
  for (uint64_t q : cand)
    if (hilbert_symbol(a, b, q) == -1) ram.push_back(q);
  return ram;
}

QuatAlgebra build_algebra(uint64_t D) {
  if (D < 2 || !is_squarefree(D))
    throw ValidationError("algebra discriminant must be squarefree > 1");
  auto fac = factorize(D);
  if (fac.size() % 2 == 0)
    throw ValidationError(
        "discriminant with an even number of prime factors defines an "
        "indefinite algebra");
  std::vector<uint64_t> target;
  for (auto& [q, e] : fac) target.push_back(q);

  for (int64_t aa = -1; aa >= -30; --aa) {
    for (int64_t bb = -1; bb >= -2 * (int64_t)D - 40; --bb) {
      if (hilbert_symbol(aa, bb, 0) != -1) continue;  // definite required
      std::vector<uint64_t> ram = ramified_primes(aa, bb);
      if (ram == target) {
        QuatAlgebra B;
        B.a = aa;
        B.b = bb;
        B.disc = D;
        B.ramified = ram;
        return B;
      }
    }
  }
  throw ValidationError("no small (a,b) found for requested discriminant");
}

}  // namespace qtp
