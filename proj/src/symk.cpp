#include "qtp/symk.hpp"

#include <algorithm>

namespace qtp {

SymVec SymVec::zero(const PadicRing& R, int k) {
  if (k < 0) throw ValidationError("negative symmetric power");
  SymVec v;
  v.k = k;
  v.c.assign((size_t)k + 1, 0);
  v.prec = R.N();
  return v;
}

static void check_same(const SymVec& v, const SymVec& w) {
  if (v.k != w.k) throw ValidationError("weight mismatch between dual vectors");
}

SymVec sym_add(const PadicRing& R, const SymVec& v, const SymVec& w) {
  check_same(v, w);
  SymVec r = v;
  r.prec = std::min(v.prec, w.prec);
  for (size_t j = 0; j < r.c.size(); ++j) r.c[j] = R.add(v.c[j], w.c[j]);
  return r;
}

SymVec sym_sub(const PadicRing& R, const SymVec& v, const SymVec& w) {
  check_same(v, w);
  SymVec r = v;
  r.prec = std::min(v.prec, w.prec);
  for (size_t j = 0; j < r.c.size(); ++j) r.c[j] = R.sub(v.c[j], w.c[j]);
  return r;
}

SymVec sym_scal(const PadicRing& R, uint64_t a, const SymVec& v) {
  SymVec r = v;
  for (uint64_t& x : r.c) x = R.mul(x, a);
  return r;
}

bool sym_is_zero(const PadicRing& R, const SymVec& v) {
  for (uint64_t x : v.c)
    if (R.val(x) < v.prec) return false;
  return true;
}

int sym_residual_valuation(const PadicRing& R, const SymVec& v, const SymVec& w) {
  check_same(v, w);
  int r = std::min(v.prec, w.prec);
  for (size_t j = 0; j < v.c.size(); ++j)
    r = std::min(r, R.val(R.sub(v.c[j], w.c[j])));
  return r;
}

uint64_t binom_mod(const PadicRing& R, int n, int j) {
  if (j < 0 || j > n) return 0;
  j = std::min(j, n - j);
  uint64_t num = 1;
  for (int t = 1; t <= j; ++t) {
    // exact division at every step keeps the product in 64 bits for desk k
    num = num * (uint64_t)(n - t + 1) / (uint64_t)t;
  }
  return num % R.mod();
}

SymVec act_dual(const PadicRing& R, const SymVec& v, const Mat2& g, int gprec) {
  int k = v.k;
  uint64_t a = g[0] % R.mod(), b = g[1] % R.mod();
  uint64_t cc = g[2] % R.mod(), d = g[3] % R.mod();
  // row j of the action matrix: coefficients of (Xa+Yc)^j (Xb+Yd)^(k-j)
  SymVec out = SymVec::zero(R, k);
  out.prec = std::min({v.prec, gprec, R.W()});
  std::vector<uint64_t> pa(k + 1), pc(k + 1), pb(k + 1), pd(k + 1);
  pa[0] = pc[0] = pb[0] = pd[0] = 1 % R.mod();
  for (int t = 1; t <= k; ++t) {
    pa[t] = R.mul(pa[t - 1], a);
    pc[t] = R.mul(pc[t - 1], cc);
    pb[t] = R.mul(pb[t - 1], b);
    pd[t] = R.mul(pd[t - 1], d);
  }
  // (l.g)_m = l( (Xa+Yc)^m (Xb+Yd)^(k-m) ): expand the image of the m-th
  // monomial and read l off its coefficients.
  for (int m = 0; m <= k; ++m) {
    for (int s = 0; s <= m; ++s) {
      uint64_t f1 = R.mul(binom_mod(R, m, s), R.mul(pa[s], pc[m - s]));
      if (f1 == 0) continue;
      for (int t = 0; t <= k - m; ++t) {
        uint64_t f2 = R.mul(binom_mod(R, k - m, t), R.mul(pb[t], pd[k - m - t]));
        out.c[m] = R.add(out.c[m], R.mul(v.c[s + t], R.mul(f1, f2)));
      }
    }
  }
  return out;
}

SymVec act_dual(const PadicRing& R, const SymVec& v, const LocalUnit& g) {
  return act_dual(R, v, g.m, g.prec);
}

PadicApprox pairing_k(const PadicRing& R, const SymVec& v, const SymVec& w) {
  check_same(v, w);
  int k = v.k;
  uint64_t s = 0;
  for (int j = 0; j <= k; ++j) {
    uint64_t term = R.mul(binom_mod(R, k, j), R.mul(v.c[j], w.c[k - j]));
    s = ((k - j) % 2 == 0) ? R.add(s, term) : R.sub(s, term);
  }
  return PadicApprox(s, std::min(v.prec, w.prec));
}

BalancedWeights::BalancedWeights(int a, int b, int c) : k1(a), k2(b), k3(c) {
  if (k1 < 0 || k2 < 0 || k3 < 0 || (k1 + k2 + k3) % 2 != 0)
    throw ValidationError("weights must be non-negative with even sum");
  if (kstar1() < 0 || kstar2() < 0 || kstar3() < 0)
    throw ValidationError("weights are not balanced");
}

PadicApprox lambda_balanced(const PadicRing& R, const BalancedWeights& kk,
                            const SymVec& v1, const SymVec& v2, const SymVec& v3) {
  if (v1.k != kk.k1 || v2.k != kk.k2 || v3.k != kk.k3)
    throw ValidationError("dual vectors do not match the weight triple");
  int a1 = kk.kstar1(), a2 = kk.kstar2(), a3 = kk.kstar3();
  uint64_t s = 0;
  for (int m1 = 0; m1 <= a1; ++m1)
    for (int m2 = 0; m2 <= a2; ++m2)
      for (int m3 = 0; m3 <= a3; ++m3) {
        uint64_t coef = R.mul(binom_mod(R, a1, m1),
                              R.mul(binom_mod(R, a2, m2), binom_mod(R, a3, m3)));
        uint64_t term =
            R.mul(coef, R.mul(v1.c[(size_t)(m2 + m3)],
                              R.mul(v2.c[(size_t)(m1 + a3 - m3)],
                                    v3.c[(size_t)(a1 - m1 + a2 - m2)])));
        int sign = (a1 - m1) + (a2 - m2) + (a3 - m3);
        s = (sign % 2 == 0) ? R.add(s, term) : R.sub(s, term);
      }
  return PadicApprox(s, std::min({v1.prec, v2.prec, v3.prec}));
}

}  // namespace qtp
