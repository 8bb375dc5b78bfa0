#include "qtp/series.hpp"

#include <algorithm>

namespace qtp {

MomPoly::MomPoly(const MomShape& s) : shape_(s) {
  if (s.nmom < 1 || s.nmom > 3 || s.M < 1)
    throw ValidationError("MomPoly: bad shape");
  c_.assign(s.cube(), AlgElem::zero(s.alg));
}

MomPoly MomPoly::constant(const MomShape& s, const AlgElem& c) {
  if (!(c.alg() == s.alg))
    throw ValidationError("MomPoly::constant: coefficient algebra mismatch");
  MomPoly r(s);
  r.c_[0] = c;
  return r;
}

MomPoly MomPoly::scalar(const MomShape& s, uint64_t c) {
  MomPoly r(s);
  r.c_[0] = AlgElem(s.alg, c);
  return r;
}

MomPoly MomPoly::var(const MomShape& s, int i) {
  if (i < 0 || i >= s.nmom) throw ValidationError("MomPoly::var: no such variable");
  if (s.M < 2) throw ValidationError("MomPoly::var: truncation too tight");
  MomPoly r(s);
  std::array<int, 3> d{0, 0, 0};
  d[(size_t)i] = 1;
  r.c_[s.idx(d)] = AlgElem::one(s.alg);
  return r;
}

bool MomPoly::is_zero_value() const {
  for (size_t ix = 0; ix < c_.size(); ++ix) {
    if (shape_.total_deg(ix) >= shape_.M) continue;
    for (size_t j = 0; j < c_[ix].size(); ++j)
      if (c_[ix].coeff(j) != 0) return false;
  }
  return true;
}

bool MomPoly::p_divisible() const {
  uint64_t p = shape_.alg.R->p();
  for (size_t ix = 0; ix < c_.size(); ++ix) {
    if (shape_.total_deg(ix) >= shape_.M) continue;
    for (size_t j = 0; j < c_[ix].size(); ++j)
      if (c_[ix].coeff(j) % p != 0) return false;
  }
  return true;
}

int MomPoly::min_prec() const {
  int m = shape_.alg.R->N();
  for (size_t ix = 0; ix < c_.size(); ++ix) {
    if (shape_.total_deg(ix) >= shape_.M) continue;
    m = std::min(m, c_[ix].known_prec());
  }
  return m;
}

MomPoly& MomPoly::operator+=(const MomPoly& o) {
  if (!(shape_ == o.shape_)) throw ValidationError("MomPoly: shape mismatch in sum");
  for (size_t ix = 0; ix < c_.size(); ++ix) c_[ix] += o.c_[ix];
  return *this;
}

MomPoly& MomPoly::operator-=(const MomPoly& o) {
  if (!(shape_ == o.shape_)) throw ValidationError("MomPoly: shape mismatch in sum");
  for (size_t ix = 0; ix < c_.size(); ++ix) c_[ix] -= o.c_[ix];
  return *this;
}

namespace {
bool elem_zero(const AlgElem& x) {
  for (size_t j = 0; j < x.size(); ++j)
    if (x.coeff(j) != 0) return false;
  return true;
}
}  // namespace

MomPoly operator*(const MomPoly& a, const MomPoly& b) {
  if (!(a.shape_ == b.shape_))
    throw ValidationError("MomPoly: shape mismatch in product");
  const MomShape& s = a.shape_;
  MomPoly r(s);
  // Nonzero slot lists keep sparse products cheap.
  std::vector<size_t> la, lb;
  for (size_t ix = 0; ix < a.c_.size(); ++ix)
    if (s.total_deg(ix) < s.M && !elem_zero(a.c_[ix])) la.push_back(ix);
  for (size_t ix = 0; ix < b.c_.size(); ++ix)
    if (s.total_deg(ix) < s.M && !elem_zero(b.c_[ix])) lb.push_back(ix);
  int prec = std::min(a.min_prec(), b.min_prec());
  for (size_t ia : la) {
    auto da = s.degs(ia);
    int ta = s.total_deg(ia);
    for (size_t ib : lb) {
      if (ta + s.total_deg(ib) >= s.M) continue;
      auto db = s.degs(ib);
      std::array<int, 3> d{da[0] + db[0], da[1] + db[1], da[2] + db[2]};
      r.c_[s.idx(d)] += a.c_[ia] * b.c_[ib];
    }
  }
  for (auto& x : r.c_) x.set_known_prec(prec);
  return r;
}

MomPoly MomPoly::scaled(const AlgElem& c) const {
  MomPoly r = *this;
  for (auto& x : r.c_) x = x * c;
  return r;
}

MomPoly MomPoly::scaled(uint64_t c) const {
  MomPoly r = *this;
  for (auto& x : r.c_) x = x.scaled(c);
  return r;
}

MomPoly MomPoly::negated() const {
  MomPoly r = *this;
  for (auto& x : r.c_) x = x.negated();
  return r;
}

MomPoly MomPoly::pow_nonneg(int n) const {
  if (n < 0) throw ValidationError("MomPoly::pow_nonneg: negative exponent");
  MomPoly r = one(shape_);
  MomPoly base = *this;
  while (n) {
    if (n & 1) r = r * base;
    if (n >>= 1) base = base * base;
  }
  return r;
}

MomPoly MomPoly::div_pk(int k) const {
  MomPoly r = *this;
  for (auto& x : r.c_) x = x.div_pk(k);
  return r;
}

MomPoly MomPoly::substituted_mom(int var, const AlgElem& value) const {
  if (var < 0 || var >= shape_.nmom)
    throw ValidationError("MomPoly::substituted_mom: no such variable");
  if (!(value.alg() == shape_.alg))
    throw ValidationError("MomPoly::substituted_mom: value algebra mismatch");
  std::vector<AlgElem> vpow((size_t)shape_.M, AlgElem::one(shape_.alg));
  for (int m = 1; m < shape_.M; ++m) vpow[(size_t)m] = vpow[(size_t)m - 1] * value;
  MomPoly r(shape_);
  for (size_t ix = 0; ix < c_.size(); ++ix) {
    if (shape_.total_deg(ix) >= shape_.M) continue;
    if (elem_zero(c_[ix])) continue;
    auto d = shape_.degs(ix);
    int dv = d[(size_t)var];
    d[(size_t)var] = 0;
    r.c_[shape_.idx(d)] += c_[ix] * vpow[(size_t)dv];
  }
  return r;
}

MomPoly MomPoly::embedded_mom(const MomShape& bigger,
                              const std::array<int, 3>& var_map) const {
  if (bigger.M < shape_.M || bigger.alg.R != shape_.alg.R)
    throw ValidationError("MomPoly::embedded_mom: incompatible shapes");
  for (int i = 0; i < shape_.nmom; ++i)
    if (var_map[(size_t)i] < 0 || var_map[(size_t)i] >= bigger.nmom)
      throw ValidationError("MomPoly::embedded_mom: variable map out of range");
  bool same_alg = shape_.alg == bigger.alg;
  MomPoly r(bigger);
  for (size_t ix = 0; ix < c_.size(); ++ix) {
    if (shape_.total_deg(ix) >= shape_.M) continue;
    if (elem_zero(c_[ix]) && c_[ix].known_prec() >= shape_.alg.R->N()) continue;
    auto d = shape_.degs(ix);
    std::array<int, 3> e{0, 0, 0};
    for (int i = 0; i < shape_.nmom; ++i) e[(size_t)var_map[(size_t)i]] += d[(size_t)i];
    AlgElem cf = same_alg ? c_[ix] : c_[ix].embedded(bigger.alg);
    r.c_[bigger.idx(e)] += cf;
  }
  return r;
}

bool mom_eq(const MomPoly& a, const MomPoly& b) {
  if (!(a.shape() == b.shape())) return false;
  for (size_t ix = 0; ix < a.size(); ++ix) {
    if (a.shape().total_deg(ix) >= a.shape().M) continue;
    if (!alg_eq(a.coeff(ix), b.coeff(ix))) return false;
  }
  return true;
}

int mom_residual_valuation(const MomPoly& a, const MomPoly& b) {
  int v = a.shape().alg.R->W();
  for (size_t ix = 0; ix < a.size(); ++ix) {
    if (a.shape().total_deg(ix) >= a.shape().M) continue;
    v = std::min(v, alg_residual_valuation(a.coeff(ix), b.coeff(ix)));
  }
  return v;
}

MomPoly specialize_mom(const MomPoly& x, const DiscPoint& pt) {
  const MomShape& s = x.shape();
  const PadicRing& R = *s.alg.R;
  MomShape s0{WeightAlgebra{&R, 0, s.alg.M_w}, s.nmom, s.M};
  MomPoly r(s0);
  for (size_t ix = 0; ix < x.size(); ++ix) {
    if (s.total_deg(ix) >= s.M) continue;
    PadicApprox v = specialize_elem(x.coeff(ix), pt);
    AlgElem c(s0.alg, v.value);
    c.set_known_prec(v.known_prec);
    r.coeff(ix) = c;
  }
  return r;
}

MomPoly mom_log1p(const MomPoly& x) {
  const MomShape& s = x.shape();
  const PadicRing& R = *s.alg.R;
  if (!x.p_divisible())
    throw ValidationError("mom_log1p: argument must vanish mod p");
  MomPoly acc = MomPoly::zero(s);
  MomPoly xp = MomPoly::one(s);
  // x^j has valuation >= j in every residue, so terms die out by j = W.
  for (int j = 1; j <= R.W() + 1; ++j) {
    xp = xp * x;
    if (xp.is_zero_value()) break;
    uint64_t jj = (uint64_t)j;
    int jval = 0;
    while (jj % R.p() == 0) {
      jj /= R.p();
      ++jval;
    }
    MomPoly term = xp.div_pk(jval).scaled(R.inv(R.reduce((int64_t)jj)));
    if (j % 2 == 0) term = term.negated();
    acc += term;
  }
  return acc;
}

MomPoly char_series(const MomShape& s, const WeightChar& k, uint64_t u0,
                    const MomPoly& S) {
  const PadicRing& R = *s.alg.R;
  if (!R.is_unit(u0)) throw ValidationError("char_series: u0 must be a unit");
  if (!(S.shape() == s)) throw ValidationError("char_series: shape mismatch");
  if (!S.p_divisible())
    throw ValidationError("char_series: series part must vanish mod p");

  // Split off the constant term so the remaining part is nilpotent in the
  // moment grading: 1 + S = (1 + s0)(1 + T).
  AlgElem s0 = S.constant_term();
  AlgElem c0 = AlgElem::one(s.alg) + s0;
  MomPoly T = (S - MomPoly::constant(s, s0)).scaled(c0.inverse());

  AlgElem front = eval_weight(s.alg, k, u0) * c0.pow_signed(k.k0);
  MomPoly res = MomPoly::one(s).scaled(front);

  // (1+T)^{k0} with integer binomials: exact, at most M-1 terms.
  {
    MomPoly bin = MomPoly::one(s);
    MomPoly Tp = MomPoly::one(s);
    long long C = 1;
    for (int j = 1; j < s.M; ++j) {
      C = C * (long long)(k.k0 - j + 1) / (long long)j;
      Tp = Tp * T;
      if (Tp.is_zero_value()) break;  // T nilpotent: all later powers vanish too
      bin += Tp.scaled(R.reduce((int64_t)C));
    }
    res = res * bin;
  }

  if (k.family()) {
    // L(S) = log(1+S)/log(1+p); the disc factors are binomials in L.
    uint64_t logp = R.log_one_unit(R.reduce((int64_t)(1 + R.p())));
    uint64_t logp_unit = R.div_pk(logp, 1);
    MomPoly L = mom_log1p(S).div_pk(1).scaled(R.inv(logp_unit));
    uint64_t half = R.inv(2);
    for (int v = 0; v < 3; ++v) {
      if (k.e2[(size_t)v] == 0) continue;
      if (v >= s.alg.nvars)
        throw ValidationError("char_series: character uses a variable outside the algebra");
      MomPoly E = L.scaled(R.mul(R.reduce(k.e2[(size_t)v]), half));
      MomPoly f = MomPoly::zero(s);
      MomPoly rising = MomPoly::one(s);  // E (E-1) ... (E-m+1)
      uint64_t mfact = 1;
      for (int m = 0; m < s.alg.M_w; ++m) {
        if (m > 0) {
          rising = rising * (E - MomPoly::scalar(s, R.reduce((int64_t)(m - 1))));
          mfact = R.mul(mfact, (uint64_t)m);
        }
        AlgElem wm = AlgElem::zero(s.alg);
        std::array<int, 3> d{0, 0, 0};
        d[(size_t)v] = m;
        wm.coeff(s.alg.idx(d)) = 1;
        f += rising.scaled(R.inv(mfact)).scaled(wm);
      }
      res = res * f;
    }
  }
  return res;
}

}  // namespace qtp
