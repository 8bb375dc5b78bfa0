#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "qtp/padic.hpp"

namespace qtp {

/* Shape of the truncated weight algebra
 *   A = (Z/p^N)[w_1..w_nvars] / (w_1^M_w, ..., w_nvars^M_w),
 * nvars in {0,1,2,3}.  nvars = 0 is the scalar case; the three-variable
 * shape hosts the three-parameter objects (one disc per tensor slot). */
struct WeightAlgebra {
  const PadicRing* R = nullptr;
  int nvars = 0;
  int M_w = 4;

  size_t dim() const {
    size_t d = 1;
    for (int i = 0; i < nvars; ++i) d *= (size_t)M_w;
    return d;
  }
  // Dense index of the monomial w_1^{d0} w_2^{d1} w_3^{d2}.
  size_t idx(const std::array<int, 3>& d) const {
    size_t r = 0;
    for (int i = nvars - 1; i >= 0; --i) r = r * (size_t)M_w + (size_t)d[(size_t)i];
    return r;
  }
  std::array<int, 3> degs(size_t ix) const {
    std::array<int, 3> d{0, 0, 0};
    for (int i = 0; i < nvars; ++i) {
      d[(size_t)i] = (int)(ix % (size_t)M_w);
      ix /= (size_t)M_w;
    }
    return d;
  }
  bool operator==(const WeightAlgebra& o) const {
    return R == o.R && nvars == o.nvars && M_w == o.M_w;
  }
};

/* Element of A with a precision ledger: every coefficient is known mod
 * p^known_prec (conservative minimum across coefficients). */
class AlgElem {
 public:
  AlgElem() = default;
  AlgElem(const WeightAlgebra& a, uint64_t constant);
  static AlgElem zero(const WeightAlgebra& a);
  static AlgElem one(const WeightAlgebra& a);

  const WeightAlgebra& alg() const { return alg_; }
  int known_prec() const { return prec_; }
  void set_known_prec(int p) { prec_ = p; }
  uint64_t coeff(size_t ix) const { return c_[ix]; }
  uint64_t& coeff(size_t ix) { return c_[ix]; }
  uint64_t constant_term() const { return c_.empty() ? 0 : c_[0]; }
  size_t size() const { return c_.size(); }
  bool is_unit() const;

  AlgElem& operator+=(const AlgElem& o);
  AlgElem& operator-=(const AlgElem& o);
  friend AlgElem operator+(AlgElem a, const AlgElem& b) { return a += b; }
  friend AlgElem operator-(AlgElem a, const AlgElem& b) { return a -= b; }
  friend AlgElem operator*(const AlgElem& a, const AlgElem& b);
  AlgElem& operator*=(const AlgElem& o) { return *this = *this * o; }

  AlgElem scaled(uint64_t c) const;       // multiply by scalar residue
  AlgElem negated() const;
  AlgElem inverse() const;                // requires unit constant term
  AlgElem pow_signed(int64_t e) const;    // negative e requires a unit
  AlgElem div_pk(int k) const;            // exact /p^k on all coefficients

  // Embed into a larger-shape algebra (same M_w, more variables).
  AlgElem embedded(const WeightAlgebra& bigger) const;
  // Substitute w_var -> s (s a residue divisible by p), collapsing that
  // variable; the shape keeps nvars but the element no longer involves it.
  AlgElem substituted(int var, uint64_t s) const;

 private:
  WeightAlgebra alg_;
  std::vector<uint64_t> c_;
  int prec_ = 0;
};

// (1 + w_var)^c as an element of a: sum_m C(c, m) w_var^m.  c is a residue
// (a p-adic integer exponent); the binomials cost v_p(m!) ledger digits.
AlgElem one_plus_w_pow(const WeightAlgebra& a, int var, uint64_t c);

bool alg_eq(const AlgElem& a, const AlgElem& b);
int alg_residual_valuation(const AlgElem& a, const AlgElem& b);

/* A weight character: t runs over units of Z_p,
 *   eval(k, t) = omega(t)^t0 * <t>^k0 * prod_i (1 + w_i)^{e_i * ell(t)},
 * with e_i = e2[i]/2 (halves arise from the balanced-weight splitting).
 * ext_at_p extends the character to p^Z: eval(k, p^v u) = ext^v eval(k, u).
 * The character is a family character iff some e2[i] is nonzero. */
struct WeightChar {
  int64_t t0 = 0;                       // reduced mod p-1
  int64_t k0 = 0;                       // integer exponent at the center
  std::array<int64_t, 3> e2{0, 0, 0};   // disc coefficients times 2
  uint64_t ext_at_p = 1;

  bool family() const { return e2[0] != 0 || e2[1] != 0 || e2[2] != 0; }
};

WeightChar weight_char_integer(const PadicRing& R, int64_t k);
// The slot-var family character through center k: t0 = k mod (p-1), k0 = k,
// e = 1 in the given variable.
WeightChar weight_char_family(const PadicRing& R, int64_t k, int var);

WeightChar weight_add(const PadicRing& R, const WeightChar& a, const WeightChar& b);
WeightChar weight_neg(const PadicRing& R, const WeightChar& a);
// Half character: requires t0 = k0 mod (p-1), k0 even, all e2 even, and
// trivial ext (the square root of ext is fixed to 1).
WeightChar weight_half(const PadicRing& R, const WeightChar& a);

AlgElem eval_weight(const WeightAlgebra& a, const WeightChar& k, uint64_t t);
// Extended evaluation at t = p^tv * (unit residue tu).
AlgElem eval_weight_ext(const WeightAlgebra& a, const WeightChar& k, uint64_t tu, int tv);

/* Arithmetic specialization data: integer points j_i congruent to the slot
 * centers mod p-1; each active variable substitutes
 *   w_i -> (1+p)^{j_i - center_i} - 1. */
struct DiscPoint {
  std::array<int64_t, 3> j{0, 0, 0};
  std::array<int64_t, 3> center{0, 0, 0};
};

std::array<uint64_t, 3> disc_substitutions(const PadicRing& R, const DiscPoint& pt);
// Integer exponent of a character after specialization:
// k0 + sum_i e_i (j_i - center_i).  Requires the result to be integral.
int64_t specialized_exponent(const WeightChar& k, const DiscPoint& pt);
// Full collapse of an element at a point.
PadicApprox specialize_elem(const AlgElem& x, const DiscPoint& pt);

}  // namespace qtp
