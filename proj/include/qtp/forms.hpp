#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qtp/classset.hpp"
#include "qtp/hecke.hpp"
#include "qtp/padic.hpp"
#include "qtp/symk.hpp"

namespace qtp {

/* A vector-valued automorphic form on the finite class set: one element of
 * the weight-k dual per ideal class, invariant under the stabilizer units of
 * that class acting through the splitting at p.
 *
 * level_p marks vectors on the Gamma_0(p)-structure.  A class with p-level
 * structure is an ideal class together with a choice of colength-p subideal,
 * i.e. an oriented edge of the p-neighbor graph; we store one value per
 * (class, label) pair at index x*(p+1) + L, where L runs over the p+1
 * neighbor labels of class x.  The storage is redundant (the unit group of a
 * class may identify labels) but the redundancy is uniform: summing all
 * labels with the class weight 1/|Gamma_x| equals the orbit sum with the
 * true pair stabilizers, so pairings and periods over the pairs are the
 * level-p mass sums on the nose. */
struct QuatModFormV {
  int k = 0;
  bool level_p = false;
  std::vector<SymVec> vals;
};

/* Resolved neighbor data for one prime: the labelled neighbors of every
 * class representative together with the local transport attached to each
 * step (ell * iota_p(gamma)^{-1}, integral).  For ell == p the table also
 * records the edge reversal `back`: back[x][L] is the unique label at the
 * target of (x, L) whose step returns to x with composite transport
 * divisible by p (the two-step witness is p times a stabilizer unit).  That
 * label realises the dual subideal, so it is what the level-p operators
 * must exclude (U_p) or follow (W_p). */
struct HeckeLocal {
  uint64_t ell = 0;
  std::vector<std::vector<CosetEntry>> cosets;
  std::vector<std::vector<LocalUnit>> locals;
  std::vector<std::vector<uint64_t>> back;
};

/* Shared per-run operator state: the class set, the splitting of the order
 * at p mod p^W, the split images of all stabilizer units, the class norms
 * as p-units, and lazily built neighbor tables per prime. */
class HeckeContext {
 public:
  HeckeContext(const PadicRing& R, const ClassSet& cs);

  const PadicRing& ring() const { return *R_; }
  const ClassSet& classes() const { return *cs_; }
  const SplitData& split() const { return sp_; }
  // iota_p images of the stored stabilizer units of class x (one per +-pair)
  const std::vector<LocalUnit>& stabilizer(size_t x) const { return stab_[x]; }
  // nrd of the representative of class x reduced mod p^W (always a p-unit)
  uint64_t class_norm_unit(size_t x) const { return nrd_units_[x]; }
  const HeckeLocal& local(uint64_t ell);

 private:
  const PadicRing* R_;
  const ClassSet* cs_;
  SplitData sp_;
  std::vector<std::vector<LocalUnit>> stab_;
  std::vector<uint64_t> nrd_units_;
  std::map<uint64_t, HeckeLocal> tables_;
};

QuatModFormV form_zero(const PadicRing& R, const ClassSet& cs, int k,
                       bool level_p);
QuatModFormV form_add(const PadicRing& R, const QuatModFormV& f,
                      const QuatModFormV& g);
QuatModFormV form_sub(const PadicRing& R, const QuatModFormV& f,
                      const QuatModFormV& g);
QuatModFormV form_scal(const PadicRing& R, uint64_t c, const QuatModFormV& f);
bool form_is_zero(const PadicRing& R, const QuatModFormV& f);
// min over classes of the valuation of the entrywise difference
int form_residual_valuation(const PadicRing& R, const QuatModFormV& f,
                            const QuatModFormV& g);

/* Average over the full stabilizer unit group of each class (the stored
 * half-list doubled by the sign, which acts by (-1)^k).  Idempotent; its
 * image is exactly the invariant subspace.  Unit orders divide 24, so the
 * averaging denominators are p-units. */
QuatModFormV project_invariant(HeckeContext& ctx, const QuatModFormV& f);
// min over classes/units of val(v.u - v); large when invariant
int invariance_defect(HeckeContext& ctx, const QuatModFormV& f);
QuatModFormV random_invariant_form(HeckeContext& ctx, int k, uint64_t seed);

// T_ell for ell coprime to D*N*p, on the prime-to-p level.
QuatModFormV hecke_apply(HeckeContext& ctx, const QuatModFormV& f, uint64_t ell);
// Full T_p on the prime-to-p level (all p+1 labels); input must not be level_p.
QuatModFormV tp_apply(HeckeContext& ctx, const QuatModFormV& f);
/* The twisted degeneracy map to level p: the value at the pair (x, L) is the
 * value of f at the L-neighbor, transported back along that edge.  This is
 * the normalisation whose U_p eigenvalue relation is
 * (twist f)|U_p = p^(k+1) (include f). */
QuatModFormV degeneracy_twist(HeckeContext& ctx, const QuatModFormV& f);
// The untwisted degeneracy: the same class value at every label of a fiber.
QuatModFormV degeneracy_include(HeckeContext& ctx, const QuatModFormV& f);
// Dispatch on the two maps above: which = 1 includes, which = p twists.
QuatModFormV degeneracy(HeckeContext& ctx, const QuatModFormV& f,
                        uint64_t which);
/* U_p on the level-p space: at the pair (x, L), sum the p other labels
 * L' != L of x, reading f at (target(L'), reversal of L') and transporting
 * along L'.  On degeneracy images this gives the two defining relations
 *   U_p (include f) = include(f|T_p) - twist f,
 *   U_p (twist f)   = p^(k+1) include f,
 * so the old space of an eigenpacket carries U_p = [[a_p, p^(k+1)], [-1, 0]]
 * in the basis (include, twist). */
QuatModFormV up_apply(HeckeContext& ctx, const QuatModFormV& f);
/* The p-Fricke map on the level-p space: the pair (x, L) reads the value at
 * (target(L), reversal of L) transported along L — pass to the p-isogenous
 * class carrying the dual subideal.  W_p (include f) = twist f and
 * W_p (twist f) = p^k include f, so W_p^2 = p^k on old spaces. */
QuatModFormV wp_apply(HeckeContext& ctx, const QuatModFormV& f);

/* Weight-k Gram pairing: sum over classes of <f(x), g(x)>_k weighted by
 * nrd(x)^k / |Gamma_x|.  The norm power makes each term independent of the
 * representative choice; all denominators are p-units.  Both arguments must
 * carry the same level flag; at level p the sum runs over the (class, label)
 * pairs with the same class weight, which is the level-p mass sum (the
 * pairing of two includes is p+1 times the prime-to-p pairing). */
PadicApprox form_pairing(HeckeContext& ctx, const QuatModFormV& f,
                         const QuatModFormV& g);

// Weight-0 average: sum f(x) / |Gamma_x| (the measure-1 period).
PadicApprox global_T(HeckeContext& ctx, const QuatModFormV& f);
BigRat global_T_exact(const ClassSet& cs, const std::vector<BigRat>& vals);

/* The balanced classical trilinear period: sum over classes of the balanced
 * invariant functional of the three values, weighted by nrd(x)^(k*) and
 * divided by |Gamma_x|.  The three forms must carry one common level flag;
 * at level p the sum runs over the (class, label) pairs with the same class
 * weight.  Identities relating the two levels are stated per level (the
 * period of three includes is p+1 times the prime-to-p period), so no cross-
 * level normalisation enters. */
PadicApprox classical_t_k(HeckeContext& ctx, const BalancedWeights& kk,
                          const QuatModFormV& f1, const QuatModFormV& f2,
                          const QuatModFormV& f3);

/* One Hecke eigensystem with p-integral rational eigenvalues.  `a` maps each
 * sampled prime ell (coprime to D*N*p) to its integer eigenvalue; ap is the
 * full T_p eigenvalue.  alpha/beta are the roots of X^2 - ap X + p^(k+1)
 * ordered so alpha is the unit root when one exists; absent when the roots
 * are irrational over Z_p. */
struct EigenPacket {
  int k = 0;
  std::map<uint64_t, int64_t> a;
  int64_t ap = 0;
  bool eisenstein = false;
  QuatModFormV form;
  std::optional<PadicApprox> alpha, beta;
  std::string note;
};

struct EigenSearch {
  std::vector<EigenPacket> packets;
  std::vector<std::string> skipped;  // systems dropped as irrational/unresolved
};

/* Diagonalise the sampled Hecke operators on the invariant subspace.
 * Characteristic polynomials are taken mod p^W by a division-free recursion,
 * recognised as integer polynomials through symmetric residues (the bounds
 * come from the eigenvalue estimates), and split over Z; only simple
 * simultaneous systems with integral eigenvalues become packets, everything
 * else is reported in `skipped`.  Odd weights have no forms and return
 * empty.  Default sample: the first three primes coprime to D*N*p. */
EigenSearch eigenforms(HeckeContext& ctx, int k,
                       std::vector<uint64_t> sample = {});

/* Newton lift of a simple root: coeffs[i] is the X^i coefficient, r0 a root
 * mod p with f'(r0) a unit.  Returns the root mod p^W. */
uint64_t hensel_root(const PadicRing& R, const std::vector<int64_t>& coeffs,
                     uint64_t r0);

/* Old-space coordinates at p: the vector a*phi + b*phi_twist in the basis
 * (phi, phi_twist) of the span of a packet and its twisted degeneracy image.
 * U_p and the Fricke involution act by the matrices
 *   U_p = [[ap, p^(k+1)], [-1, 0]],   W_p = [[0, p^k], [1, 0]],
 * forced by the coset algebra; the value-level content of this calculus is
 * certified by the Gram and trilinear batteries. */
struct OldCoords {
  PadicApprox a, b;
};

OldCoords up_old(const PadicRing& R, const EigenPacket& f, const OldCoords& v);
OldCoords wp_old(const PadicRing& R, const EigenPacket& f, const OldCoords& v);
// v = root*phi - phi_twist, the denominator-cleared stabilization (any root)
OldCoords stabilize_cleared(const PadicRing& R, const EigenPacket& f,
                            const PadicApprox& root);
/* phi - root^{-1} phi_twist.  Requires a unit root; throws ValidationError
 * for non-unit roots, missing roots, or the supersingular case alpha = beta. */
OldCoords p_stabilize(const PadicRing& R, const EigenPacket& f,
                      const PadicApprox& root);
// realise coordinates as a class-indexed value vector (level_p = true)
QuatModFormV old_values(HeckeContext& ctx, const EigenPacket& f,
                        const OldCoords& v);

/* The local sign proxy at a good prime: -a1*a2*a3 * ell^{-k*}.  Throws
 * ValidationError when the value is not a p-unit. */
PadicApprox generic_sign_local(const PadicRing& R, int64_t a1, int64_t a2,
                               int64_t a3, const BalancedWeights& kk,
                               uint64_t ell);

/* Two-sided adjointness report for the mass pairing: compares <Tf, g>
 * against factor * <f, Tg>, where T is T_ell (ell == p runs the full T_p
 * sum and ell == 1 the identity).  With the trivial desk-scale character
 * the factor is 1.  Reports rather than throws: `defect` is the valuation
 * of the difference capped by the ledger, `ok` says it reached the
 * attainable precision. */
struct AdjointReport {
  uint64_t factor = 1;
  int defect = 0;
  bool ok = false;
};
AdjointReport adjoint_check(HeckeContext& ctx, const QuatModFormV& f,
                            const QuatModFormV& g, uint64_t ell);

}  // namespace qtp
