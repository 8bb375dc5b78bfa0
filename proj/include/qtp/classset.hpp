#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qtp/order.hpp"
#include "qtp/psplit.hpp"

namespace qtp {

/* One right-ideal class: an integral representative whose reduced norm is
 * prime to every modulus the later Hecke/period layers care about, together
 * with its left order and that order's unit group (one unit per +-pair). */
struct IdealClass {
  Lattice ideal;
  BigInt nrd;
  Lattice left_order;
  std::vector<Quat> units;
};

struct ClassSet {
  QuatAlgebra B;
  uint64_t D = 2;
  uint64_t N = 1;
  Lattice order;                // Eichler order of level N; right order of every rep
  std::vector<uint64_t> avoid;  // primes kept out of representative norms
  std::vector<IdealClass> cls;  // cls[0] is the trivial class

  size_t h() const { return cls.size(); }
  size_t unit_count(size_t x) const { return 2 * cls[x].units.size(); }
};

// Reduced norm of an integral right O-ideal: sqrt([O : I]).
BigInt ideal_nrd(const Lattice& O, const Lattice& I);

// Smallest prime not dividing n.
uint64_t coprime_prime(uint64_t n);

/* The ell-neighbor of I attached to a point of P^1(F_ell), encoded as
 * w in [0..ell]: w < ell is the covector (1, w), w = ell is (0, 1).
 * The neighbor is {x in I : w * iota_ell(x) = 0 mod ell} + ell*I; it has
 * index ell^2 in I.  sp must be a splitting of the right order at ell with
 * m = 1, and nrd(I) must be prime to ell. */
Lattice ideal_neighbor(const QuatAlgebra& B, const SplitData& sp, const Lattice& I,
                       uint64_t w);

/* Left-multiply I into an equivalent integral ideal whose norm avoids the
 * given primes: ideal = mult * I with mult = conj(gamma)/nrd(I) for a short
 * gamma in I.  Throws (with the bound in the message) if no suitable gamma
 * of norm <= 200*nrd(I) exists. */
struct Reduction {
  Lattice ideal;
  Quat mult;
};
Reduction reduce_ideal(const QuatAlgebra& B, const Lattice& I,
                       const std::vector<uint64_t>& avoid);

// gamma with J = gamma * I when the right-ideal classes agree.
std::optional<Quat> equivalence_witness(const QuatAlgebra& B, const Lattice& I,
                                        const Lattice& J);

Lattice left_order(const QuatAlgebra& B, const Lattice& I);

/* Breadth-first enumeration of the right ideal classes of the level-N
 * Eichler order, walking ell-neighbors for the smallest valid ell.  The
 * result is certified complete against the exact mass formula
 * sum 2/|units| = phi(D) psi(N) / 12. */
ClassSet build_class_set(uint64_t D, uint64_t N);

BigRat class_mass(const ClassSet& cs);

}  // namespace qtp
