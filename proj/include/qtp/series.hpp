#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "qtp/weight.hpp"

namespace qtp {

/* Shape of the truncated moment polynomial ring
 *   A[u_1..u_nmom] / (monomials of total degree >= M),
 * nmom in {1,2,3}.  Coefficients live in a weight algebra; the moment
 * variables carry z-expansions of kernels paired against distributions.
 * Storage is a dense cube of side M; slots whose total degree reaches M
 * are identically zero and every operation skips them. */
struct MomShape {
  WeightAlgebra alg;
  int nmom = 1;
  int M = 8;

  size_t cube() const {
    size_t c = 1;
    for (int i = 0; i < nmom; ++i) c *= (size_t)M;
    return c;
  }
  size_t idx(const std::array<int, 3>& d) const {
    size_t r = 0;
    for (int i = nmom - 1; i >= 0; --i) r = r * (size_t)M + (size_t)d[(size_t)i];
    return r;
  }
  std::array<int, 3> degs(size_t ix) const {
    std::array<int, 3> d{0, 0, 0};
    for (int i = 0; i < nmom; ++i) {
      d[(size_t)i] = (int)(ix % (size_t)M);
      ix /= (size_t)M;
    }
    return d;
  }
  int total_deg(size_t ix) const {
    auto d = degs(ix);
    return d[0] + d[1] + d[2];
  }
  bool operator==(const MomShape& o) const {
    return alg == o.alg && nmom == o.nmom && M == o.M;
  }
};

class MomPoly {
 public:
  MomPoly() = default;
  explicit MomPoly(const MomShape& s);
  static MomPoly zero(const MomShape& s) { return MomPoly(s); }
  static MomPoly constant(const MomShape& s, const AlgElem& c);
  static MomPoly scalar(const MomShape& s, uint64_t c);
  static MomPoly one(const MomShape& s) { return scalar(s, 1); }
  static MomPoly var(const MomShape& s, int i);  // the monomial u_{i+1}

  const MomShape& shape() const { return shape_; }
  const AlgElem& coeff(size_t ix) const { return c_[ix]; }
  AlgElem& coeff(size_t ix) { return c_[ix]; }
  const AlgElem& coeff(const std::array<int, 3>& d) const { return c_[shape_.idx(d)]; }
  AlgElem& coeff(const std::array<int, 3>& d) { return c_[shape_.idx(d)]; }
  size_t size() const { return c_.size(); }

  AlgElem constant_term() const { return c_.empty() ? AlgElem() : c_[0]; }
  bool is_zero_value() const;   // all residues zero (ledger ignored)
  bool p_divisible() const;     // every residue divisible by p
  int min_prec() const;         // worst known_prec across live slots

  MomPoly& operator+=(const MomPoly& o);
  MomPoly& operator-=(const MomPoly& o);
  friend MomPoly operator+(MomPoly a, const MomPoly& b) { return a += b; }
  friend MomPoly operator-(MomPoly a, const MomPoly& b) { return a -= b; }
  friend MomPoly operator*(const MomPoly& a, const MomPoly& b);
  MomPoly& operator*=(const MomPoly& o) { return *this = *this * o; }

  MomPoly scaled(const AlgElem& c) const;
  MomPoly scaled(uint64_t c) const;
  MomPoly negated() const;
  MomPoly pow_nonneg(int n) const;
  MomPoly div_pk(int k) const;

  // Ring-hom collapse of u_var to a coefficient-algebra value.
  MomPoly substituted_mom(int var, const AlgElem& value) const;
  // Relabel variable i -> var_map[i] inside a shape with at least as many
  // moment variables (and a coefficient algebra this one embeds into).
  MomPoly embedded_mom(const MomShape& bigger, const std::array<int, 3>& var_map) const;

 private:
  MomShape shape_;
  std::vector<AlgElem> c_;
};

bool mom_eq(const MomPoly& a, const MomPoly& b);
int mom_residual_valuation(const MomPoly& a, const MomPoly& b);

// Collapse the disc variables of every coefficient at an arithmetic point;
// the result lives over the scalar (nvars = 0) algebra on the same ring.
MomPoly specialize_mom(const MomPoly& x, const DiscPoint& pt);

// log(1+x) for x with every residue divisible by p.  Ledger cost: the
// division by j inside the series charges at most v_p(j) digits, plus the
// usual conservative minimum over terms.
MomPoly mom_log1p(const MomPoly& x);

/* Character composition series: the weight character applied along the
 * one-unit family u0 (1 + S),
 *   char_series(k, u0, S) = eval(k, u0) (1+S)^{k0} prod_i (1+w_i)^{e_i L(S)},
 * L(S) = log(1+S)/log(1+p).  Requires u0 a unit and every residue of S
 * divisible by p; under these the expansion converges within the moment
 * truncation.  Substituting the moment variables by integers recovers the
 * pointwise character value (up to the truncation tail). */
MomPoly char_series(const MomShape& s, const WeightChar& k, uint64_t u0, const MomPoly& S);

}  // namespace qtp
