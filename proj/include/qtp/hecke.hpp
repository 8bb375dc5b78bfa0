#pragma once

#include <cstdint>
#include <vector>

#include "qtp/classset.hpp"
#include "qtp/padic.hpp"

namespace qtp {

/* One resolved neighbor: the w-labelled neighbor of the source class ideal
 * equals gamma * (representative of target). */
struct CosetEntry {
  size_t target = 0;
  Quat gamma;
  uint64_t w = 0;
};

/* For each class x, the ell+1 neighbors of its representative resolved to
 * class representatives.  ell must not divide D*N.  Entry order is the label
 * order w = 0..ell, so output is deterministic. */
std::vector<std::vector<CosetEntry>> hecke_coset_reps(const ClassSet& cs,
                                                      uint64_t ell);

// Weight-zero action: entry [x][y] counts neighbors of x landing in class y.
std::vector<std::vector<int64_t>> brandt_matrix(const ClassSet& cs, uint64_t ell);

// pi attached to a projective label: w < ell -> [[ell,-w],[0,1]],
// w = ell -> [[1,0],[0,ell]].
Mat2 coset_pi(uint64_t w, uint64_t ell, uint64_t modulus);

Mat2 mat2_reduce(const Mat2& x, uint64_t modulus);

/* A GL_2(Z_p) element known to finitely many digits: entries mod p^prec. */
struct LocalUnit {
  Mat2 m{1, 0, 0, 1};
  int prec = 0;
};

/* u = iota_p(gamma)^{-1} pi_w for a p-neighbor step (gamma, w) with
 * v_p(nrd gamma) = 1.  sp must split the order mod p^W.  The exact division
 * by p inside costs one working digit, so the result carries prec = W-1; its
 * determinant is the p-unit nrd(target rep)/nrd(source rep).  Throws if the
 * quotient is not integral (the label/matrix convention would be broken). */
LocalUnit up_local_matrix(const PadicRing& R, const SplitData& sp,
                          const QuatAlgebra& B, const Quat& gamma, uint64_t w);

// iota_p(gamma)^{-1} mod p^W for gamma of p-unit norm (transport at ell != p).
LocalUnit unit_local_matrix(const PadicRing& R, const SplitData& sp,
                            const QuatAlgebra& B, const Quat& gamma);

/* ell iota_p(gamma)^{-1} mod p^W for an ell-neighbor witness gamma with
 * nrd(gamma) = ell times a p-adic unit.  This is the value transport of the
 * Hecke sum in the ell direction: translation by a degree-ell coset composed
 * with the adjugate coefficient twist that keeps images equivariant under
 * the compact group.  The uniform scale ell (rather than the bare inverse)
 * makes every Hecke operator integral and its eigenvalues the classical
 * ones of weight k+2.  Integral matrix, no precision loss. */
LocalUnit neighbor_transport_matrix(const PadicRing& R, const SplitData& sp,
                                    const QuatAlgebra& B, const Quat& gamma,
                                    uint64_t ell);

}  // namespace qtp
