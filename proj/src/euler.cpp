#include "qtp/euler.hpp"

namespace qtp {

namespace {

// Num(X) = X1X2X3 - a1 X2X3 - a2 X1X3 - a3 X1X2 + a1 X1 + a2 X2 + a3 X3
//          - p^(2 kstar); the product form times X1X2X3.
uint64_t cleared_numerator(const PadicRing& R, const BalancedWeights& kk,
                           const std::array<uint64_t, 3>& a,
                           const std::array<uint64_t, 3>& X) {
  uint64_t x123 = R.mul(R.mul(X[0], X[1]), X[2]);
  uint64_t acc = x123;
  acc = R.sub(acc, R.mul(a[0], R.mul(X[1], X[2])));
  acc = R.sub(acc, R.mul(a[1], R.mul(X[0], X[2])));
  acc = R.sub(acc, R.mul(a[2], R.mul(X[0], X[1])));
  acc = R.add(acc, R.mul(a[0], X[0]));
  acc = R.add(acc, R.mul(a[1], X[1]));
  acc = R.add(acc, R.mul(a[2], X[2]));
  acc = R.sub(acc, R.ppow(2 * kk.kstar()));
  return acc;
}

}  // namespace

std::array<EulerSlot, 3> euler_E13(const PadicRing& R,
                                   const BalancedWeights& kk,
                                   const std::array<PadicApprox, 3>& alpha) {
  const std::array<int, 3> k{kk.k1, kk.k2, kk.k3};
  const std::array<int, 3> ks{kk.kstar1(), kk.kstar2(), kk.kstar3()};
  std::array<uint64_t, 3> al, inv_al, a;
  int prec = R.N();
  for (int i = 0; i < 3; ++i) {
    if (!R.is_unit(alpha[i].value))
      throw ValidationError("stabilization roots must be p-units");
    al[i] = alpha[i].value;
    inv_al[i] = R.inv(al[i]);
    a[i] = R.add(al[i], R.mul(R.ppow(k[i] + 1), inv_al[i]));
    prec = std::min(prec, alpha[i].known_prec);
  }
  std::array<EulerSlot, 3> out;
  for (int i = 0; i < 3; ++i) {
    int j = (i + 1) % 3, m = (i + 2) % 3;
    uint64_t inv_jm = R.mul(inv_al[j], inv_al[m]);
    uint64_t e1 = R.sub(1, R.mul(R.mul(al[i], R.ppow(ks[i])), inv_jm));
    std::array<uint64_t, 3> X;
    X[i] = R.mul(R.ppow(k[i]), inv_al[i]);
    X[j] = al[j];
    X[m] = al[m];
    uint64_t e2 = R.neg(R.mul(cleared_numerator(R, kk, a, X), inv_jm));
    out[i].E1 = PadicApprox(e1, prec);
    out[i].E2 = PadicApprox(e2, prec);
  }
  return out;
}

PadicApprox euler_Ep(const PadicRing& R, const BalancedWeights& kk,
                     const std::array<uint64_t, 3>& a,
                     const std::array<uint64_t, 3>& X) {
  for (uint64_t x : X)
    if (!R.is_unit(x))
      throw ValidationError("symmetric product form needs unit arguments");
  uint64_t i1 = R.inv(X[0]), i2 = R.inv(X[1]), i3 = R.inv(X[2]);
  uint64_t acc = 1;
  acc = R.sub(acc, R.mul(a[0], i1));
  acc = R.sub(acc, R.mul(a[1], i2));
  acc = R.sub(acc, R.mul(a[2], i3));
  acc = R.add(acc, R.mul(a[2], R.mul(i1, i2)));
  acc = R.add(acc, R.mul(a[1], R.mul(i1, i3)));
  acc = R.add(acc, R.mul(a[0], R.mul(i2, i3)));
  acc = R.sub(acc, R.mul(R.ppow(2 * kk.kstar()), R.mul(R.mul(i1, i2), i3)));
  return PadicApprox(acc, R.N());
}

PadicApprox euler_Ep_oracle(const PadicRing& R, const BalancedWeights& kk,
                            const std::array<uint64_t, 3>& a,
                            const std::array<uint64_t, 3>& X) {
  for (uint64_t x : X)
    if (!R.is_unit(x))
      throw ValidationError("symmetric product form needs unit arguments");
  uint64_t acc = 0;
  for (int mask = 0; mask < 8; ++mask) {
    int bits = __builtin_popcount(mask);
    uint64_t term;
    switch (bits) {
      case 0:
        term = 1;
        break;
      case 1:
        term = a[mask == 1 ? 0 : mask == 2 ? 1 : 2];
        break;
      case 2:
        term = a[mask == 6 ? 0 : mask == 5 ? 1 : 2];  // complementary slot
        break;
      default:
        term = R.ppow(2 * kk.kstar());
    }
    for (int i = 0; i < 3; ++i)
      if (mask & (1 << i)) term = R.mul(term, R.inv(X[i]));
    acc = bits % 2 ? R.sub(acc, term) : R.add(acc, term);
  }
  return PadicApprox(acc, R.N());
}

}  // namespace qtp
