#pragma once

#include <cstdint>
#include <vector>

#include "qtp/hecke.hpp"
#include "qtp/padic.hpp"

namespace qtp {

/* Element of V_k, the dual of the degree-k binary forms, stored on the dual
 * of the monomial basis: c[j] is the value on X^j Y^(k-j).  Right action
 * (l.g)(P) = l(gP) with (gP)(X,Y) = P((X,Y)g).  prec is the digit count the
 * entries are claimed to (the ledger travels with the vector). */
struct SymVec {
  int k = 0;
  std::vector<uint64_t> c;
  int prec = 0;

  static SymVec zero(const PadicRing& R, int k);
};

SymVec sym_add(const PadicRing& R, const SymVec& v, const SymVec& w);
SymVec sym_sub(const PadicRing& R, const SymVec& v, const SymVec& w);
SymVec sym_scal(const PadicRing& R, uint64_t a, const SymVec& v);
bool sym_is_zero(const PadicRing& R, const SymVec& v);
// min over entries of val(difference), capped by the shared claimed precision
int sym_residual_valuation(const PadicRing& R, const SymVec& v, const SymVec& w);

// The matrix action on the dual; gprec caps the claimed precision of g.
SymVec act_dual(const PadicRing& R, const SymVec& v, const Mat2& g,
                int gprec = 1 << 20);
SymVec act_dual(const PadicRing& R, const SymVec& v, const LocalUnit& g);

/* <v,w>_k = sum_j (-1)^(k-j) C(k,j) v_j w_(k-j): the value of v (x) w on the
 * k-th power of the determinant form; symmetric for even k, alternating for
 * odd k; equivariant with multiplier det(g)^k. */
PadicApprox pairing_k(const PadicRing& R, const SymVec& v, const SymVec& w);

/* Balanced weight triple with the derived exponents
 * k* = (k1+k2+k3)/2 and k*_i = k* - k_i (all required >= 0). */
struct BalancedWeights {
  int k1 = 0, k2 = 0, k3 = 0;

  BalancedWeights(int a, int b, int c);
  int kstar() const { return (k1 + k2 + k3) / 2; }
  int kstar1() const { return kstar() - k1; }
  int kstar2() const { return kstar() - k2; }
  int kstar3() const { return kstar() - k3; }
};

/* The balanced invariant functional: the value of v1 (x) v2 (x) v3 on
 * det(W2,W3)^(k*_1) det(W1,W3)^(k*_2) det(W1,W2)^(k*_3), expanded by the
 * triple binomial sum.  Equivariant with multiplier det(g)^(k*). */
PadicApprox lambda_balanced(const PadicRing& R, const BalancedWeights& kk,
                            const SymVec& v1, const SymVec& v2, const SymVec& v3);

// C(n, j) reduced into the working residue ring.
uint64_t binom_mod(const PadicRing& R, int n, int j);

}  // namespace qtp
