#include "qtp/weight.hpp"

#include <algorithm>

namespace qtp {

AlgElem::AlgElem(const WeightAlgebra& a, uint64_t constant)
    : alg_(a), c_(a.dim(), 0), prec_(a.R->N()) {
  c_[0] = constant % a.R->mod();
}

AlgElem AlgElem::zero(const WeightAlgebra& a) { return AlgElem(a, 0); }
AlgElem AlgElem::one(const WeightAlgebra& a) { return AlgElem(a, 1); }

bool AlgElem::is_unit() const { return alg_.R->is_unit(constant_term()); }

AlgElem& AlgElem::operator+=(const AlgElem& o) {
  const PadicRing& R = *alg_.R;
  for (size_t i = 0; i < c_.size(); ++i) c_[i] = R.add(c_[i], o.c_[i]);
  prec_ = std::min(prec_, o.prec_);
  return *this;
}

AlgElem& AlgElem::operator-=(const AlgElem& o) {
  const PadicRing& R = *alg_.R;
  for (size_t i = 0; i < c_.size(); ++i) c_[i] = R.sub(c_[i], o.c_[i]);
  prec_ = std::min(prec_, o.prec_);
  return *this;
}

AlgElem operator*(const AlgElem& a, const AlgElem& b) {
  const WeightAlgebra& A = a.alg_;
  if (!(A == b.alg_)) throw ValidationError("AlgElem: shape mismatch in product");
  const PadicRing& R = *A.R;
  AlgElem r = AlgElem::zero(A);
  for (size_t i = 0; i < a.c_.size(); ++i) {
    if (a.c_[i] == 0) continue;
    auto di = A.degs(i);
    for (size_t j = 0; j < b.c_.size(); ++j) {
      if (b.c_[j] == 0) continue;
      auto dj = A.degs(j);
      std::array<int, 3> d{};
      bool keep = true;
      for (int v = 0; v < A.nvars; ++v) {
        d[(size_t)v] = di[(size_t)v] + dj[(size_t)v];
        if (d[(size_t)v] >= A.M_w) { keep = false; break; }
      }
      if (!keep) continue;
      size_t ix = A.idx(d);
      r.c_[ix] = R.add(r.c_[ix], R.mul(a.c_[i], b.c_[j]));
    }
  }
  r.prec_ = std::min(a.prec_, b.prec_);
  return r;
}

AlgElem AlgElem::scaled(uint64_t c) const {
  AlgElem r = *this;
  for (auto& x : r.c_) x = alg_.R->mul(x, c);
  return r;
}

AlgElem AlgElem::negated() const {
  AlgElem r = *this;
  for (auto& x : r.c_) x = alg_.R->neg(x);
  return r;
}

AlgElem AlgElem::inverse() const {
  const PadicRing& R = *alg_.R;
  if (!is_unit()) throw PrecisionError("AlgElem::inverse of a non-unit");
  uint64_t c0i = R.inv(constant_term());
  // A = c0 (1 + n) with n nilpotent; A^{-1} = c0^{-1} sum (-n)^m.
  AlgElem n = scaled(c0i);
  n.c_[0] = 0;
  AlgElem acc = AlgElem::one(alg_), term = AlgElem::one(alg_);
  int nil = alg_.nvars * (alg_.M_w - 1);
  for (int m = 1; m <= nil; ++m) {
    term = term * n;
    if (m % 2 == 1)
      acc -= term;
    else
      acc += term;
  }
  acc.prec_ = prec_;
  return acc.scaled(c0i);
}

AlgElem AlgElem::pow_signed(int64_t e) const {
  AlgElem base = e >= 0 ? *this : inverse();
  uint64_t n = (uint64_t)(e >= 0 ? e : -e);
  AlgElem r = AlgElem::one(alg_);
  r.prec_ = prec_;
  while (n) {
    if (n & 1) r = r * base;
    base = base * base;
    n >>= 1;
  }
  return r;
}

AlgElem AlgElem::div_pk(int k) const {
  AlgElem r = *this;
  for (auto& x : r.c_) x = alg_.R->div_pk(x, k);
  r.prec_ = std::max(0, prec_ - k);
  return r;
}

AlgElem AlgElem::embedded(const WeightAlgebra& bigger) const {
  if (bigger.M_w != alg_.M_w || bigger.R != alg_.R || bigger.nvars < alg_.nvars)
    throw ValidationError("AlgElem::embedded: incompatible shapes");
  AlgElem r = AlgElem::zero(bigger);
  for (size_t i = 0; i < c_.size(); ++i) {
    auto d = alg_.degs(i);
    r.c_[bigger.idx(d)] = c_[i];
  }
  r.prec_ = prec_;
  return r;
}

AlgElem AlgElem::substituted(int var, uint64_t s) const {
  const PadicRing& R = *alg_.R;
  if (var < 0 || var >= alg_.nvars)
    throw ValidationError("AlgElem::substituted: no such variable");
  AlgElem r = AlgElem::zero(alg_);
  std::vector<uint64_t> spow((size_t)alg_.M_w);
  spow[0] = 1;
  for (int m = 1; m < alg_.M_w; ++m) spow[(size_t)m] = R.mul(spow[(size_t)m - 1], s);
  for (size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] == 0) continue;
    auto d = alg_.degs(i);
    int dv = d[(size_t)var];
    d[(size_t)var] = 0;
    size_t ix = alg_.idx(d);
    r.c_[ix] = R.add(r.c_[ix], R.mul(c_[i], spow[(size_t)dv]));
  }
  r.prec_ = prec_;
  return r;
}

AlgElem one_plus_w_pow(const WeightAlgebra& a, int var, uint64_t c) {
  const PadicRing& R = *a.R;
  if (var < 0 || var >= a.nvars)
    throw ValidationError("one_plus_w_pow: no such variable");
  AlgElem r = AlgElem::zero(a);
  int loss = 0;
  // C(c, m) = c (c-1) ... (c-m+1) / m!
  uint64_t num = 1;
  uint64_t mfact_unit = 1;
  int mfact_val = 0;
  for (int m = 0; m < a.M_w; ++m) {
    if (m > 0) {
      num = R.mul(num, R.sub(c, R.reduce(m - 1)));
      uint64_t mm = (uint64_t)m;
      while (mm % R.p() == 0) {
        mm /= R.p();
        ++mfact_val;
      }
      mfact_unit = R.mul(mfact_unit, R.reduce((int64_t)mm));
    }
    uint64_t binom = R.mul(R.div_pk(num, mfact_val), R.inv(mfact_unit));
    loss = std::max(loss, mfact_val);
    std::array<int, 3> d{0, 0, 0};
    d[(size_t)var] = m;
    r.coeff(a.idx(d)) = binom;
  }
  r.set_known_prec(std::max(0, R.N() - loss));
  return r;
}

bool alg_eq(const AlgElem& a, const AlgElem& b) {
  const PadicRing& R = *a.alg().R;
  int m = std::min(a.known_prec(), b.known_prec());
  if (m <= 0) return true;
  uint64_t pm = R.ppow(m);
  for (size_t i = 0; i < a.size(); ++i)
    if (R.sub(a.coeff(i), b.coeff(i)) % pm != 0) return false;
  return true;
}

int alg_residual_valuation(const AlgElem& a, const AlgElem& b) {
  const PadicRing& R = *a.alg().R;
  int m = std::min(a.known_prec(), b.known_prec());
  int v = R.W();
  for (size_t i = 0; i < a.size(); ++i)
    v = std::min(v, R.val(R.sub(a.coeff(i), b.coeff(i))));
  return std::min(v, m);
}

WeightChar weight_char_integer(const PadicRing& R, int64_t k) {
  WeightChar c;
  int64_t pm1 = (int64_t)R.p() - 1;
  c.t0 = ((k % pm1) + pm1) % pm1;
  c.k0 = k;
  return c;
}

WeightChar weight_char_family(const PadicRing& R, int64_t k, int var) {
  WeightChar c = weight_char_integer(R, k);
  c.e2[(size_t)var] = 2;
  return c;
}

WeightChar weight_add(const PadicRing& R, const WeightChar& a, const WeightChar& b) {
  WeightChar c;
  int64_t pm1 = (int64_t)R.p() - 1;
  c.t0 = (a.t0 + b.t0) % pm1;
  c.k0 = a.k0 + b.k0;
  for (size_t i = 0; i < 3; ++i) c.e2[i] = a.e2[i] + b.e2[i];
  c.ext_at_p = R.mul(a.ext_at_p, b.ext_at_p);
  return c;
}

WeightChar weight_neg(const PadicRing& R, const WeightChar& a) {
  WeightChar c;
  int64_t pm1 = (int64_t)R.p() - 1;
  c.t0 = (pm1 - a.t0) % pm1;
  c.k0 = -a.k0;
  for (size_t i = 0; i < 3; ++i) c.e2[i] = -a.e2[i];
  c.ext_at_p = R.inv(a.ext_at_p);
  return c;
}

WeightChar weight_half(const PadicRing& R, const WeightChar& a) {
  int64_t pm1 = (int64_t)R.p() - 1;
  if (((a.k0 - a.t0) % pm1 + pm1) % pm1 != 0)
    throw ValidationError("weight_half: requires t0 = k0 mod p-1");
  if (a.k0 % 2 != 0) throw ValidationError("weight_half: requires even k0");
  for (int64_t e : a.e2)
    if (e % 2 != 0) throw ValidationError("weight_half: disc part not divisible by 2");
  if (a.ext_at_p != 1)
    throw ValidationError("weight_half: only the trivial extension has a fixed square root");
  WeightChar c;
  c.k0 = a.k0 / 2;
  c.t0 = ((c.k0 % pm1) + pm1) % pm1;
  for (size_t i = 0; i < 3; ++i) c.e2[i] = a.e2[i] / 2;
  return c;
}

AlgElem eval_weight(const WeightAlgebra& a, const WeightChar& k, uint64_t t) {
  const PadicRing& R = *a.R;
  if (!R.is_unit(t)) throw ValidationError("eval_weight: t must be a unit");
  uint64_t om = R.teichmuller(t);
  uint64_t one = R.mul(t, R.inv(om));
  uint64_t scalar = R.mul(R.pow(om, (uint64_t)k.t0), R.pow_signed(one, k.k0));
  AlgElem r(a, scalar);
  if (k.family()) {
    uint64_t l = R.ell(t);
    uint64_t half = R.inv(2);
    for (int v = 0; v < 3; ++v) {
      if (k.e2[(size_t)v] == 0) continue;
      if (v >= a.nvars)
        throw ValidationError("eval_weight: character uses a variable outside the algebra");
      uint64_t c = R.mul(R.mul(R.reduce(k.e2[(size_t)v]), half), l);
      r = r * one_plus_w_pow(a, v, c);
    }
  }
  return r;
}

AlgElem eval_weight_ext(const WeightAlgebra& a, const WeightChar& k, uint64_t tu, int tv) {
  const PadicRing& R = *a.R;
  AlgElem r = eval_weight(a, k, tu);
  return r.scaled(R.pow(k.ext_at_p, (uint64_t)tv));
}

std::array<uint64_t, 3> disc_substitutions(const PadicRing& R, const DiscPoint& pt) {
  int64_t pm1 = (int64_t)R.p() - 1;
  std::array<uint64_t, 3> s{};
  for (size_t i = 0; i < 3; ++i) {
    int64_t d = pt.j[i] - pt.center[i];
    if (d % pm1 != 0)
      throw ValidationError("disc point not congruent to center mod p-1");
    s[i] = R.sub(R.pow_signed(R.reduce((int64_t)(1 + R.p())), d), 1);
  }
  return s;
}

int64_t specialized_exponent(const WeightChar& k, const DiscPoint& pt) {
  int64_t acc = 2 * k.k0;
  for (size_t i = 0; i < 3; ++i) acc += k.e2[i] * (pt.j[i] - pt.center[i]);
  if (acc % 2 != 0)
    throw ValidationError("specialized exponent is not an integer");
  return acc / 2;
}

PadicApprox specialize_elem(const AlgElem& x, const DiscPoint& pt) {
  const PadicRing& R = *x.alg().R;
  auto s = disc_substitutions(R, pt);
  AlgElem r = x;
  for (int v = 0; v < x.alg().nvars; ++v) r = r.substituted(v, s[(size_t)v]);
  return {r.constant_term(), r.known_prec()};
}

}  // namespace qtp
