#pragma once

#include <array>

#include "qtp/padic.hpp"
#include "qtp/symk.hpp"

namespace qtp {

/* Local correction factors attached to a balanced triple of stabilized
 * eigensystems at p.  Slot i carries
 *   E1_i = 1 - alpha_i p^(kstar_i) / (alpha_j alpha_m)
 *   E2_i = -Num(X)/(alpha_j alpha_m),  X_i = p^(k_i)/alpha_i, X_j = alpha_j,
 *                                      X_m = alpha_m,
 * where Num is the cleared numerator of the symmetric product form below.
 * Everything is computed by unit inversions and exact multiplications; no
 * p-division is performed, so non-unit X_i in higher weight are handled
 * without precision loss. */
struct EulerSlot {
  PadicApprox E1;
  PadicApprox E2;
};

std::array<EulerSlot, 3> euler_E13(const PadicRing& R,
                                   const BalancedWeights& kk,
                                   const std::array<PadicApprox, 3>& alpha);

/* Symmetric local product form on unit arguments:
 *   1 - a1/X1 - a2/X2 - a3/X3 + a3/(X1 X2) + a2/(X1 X3) + a1/(X2 X3)
 *     - p^(2 kstar)/(X1 X2 X3).
 * Each inverted pair of slots carries the third slot's trace.  Throws if any
 * X_i fails to be a p-unit. */
PadicApprox euler_Ep(const PadicRing& R, const BalancedWeights& kk,
                     const std::array<uint64_t, 3>& a,
                     const std::array<uint64_t, 3>& X);

/* Proof-side expansion of the same factor as the alternating subset sum
 * A - B + C - D: a subset S of the three slots contributes (-1)^|S| times
 * prod_{i in S} X_i^{-1} times the transfer trace of S: a_i for a single
 * slot, the complementary a_m for a pair, p^(2 kstar) for all three.  The
 * pair rule carries the complementary trace because moving two twisted
 * slots across the pairing leaves the third slot's operator behind; the
 * acceptance suite checks this expansion against the closed form above. */
PadicApprox euler_Ep_oracle(const PadicRing& R, const BalancedWeights& kk,
                            const std::array<uint64_t, 3>& a,
                            const std::array<uint64_t, 3>& X);

}  // namespace qtp
