#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "qtp/quat.hpp"

namespace qtp {

/* Full-rank Z-lattice in B, stored as a row-basis over (1, i, j, ij) in
 * Hermite normal form after every operation, so equal lattices have equal
 * representations. */
struct Lattice {
  std::array<Quat, 4> rows;

  const Quat& operator[](size_t t) const { return rows[t]; }
  Quat& operator[](size_t t) { return rows[t]; }
  bool operator==(const Lattice& o) const { return rows == o.rows; }
};

// Rows -> HNF basis (scaled integer HNF over a common denominator).
// Throws if the span has rank < 4.
Lattice lattice_from_rows(const std::vector<Quat>& rows);

Lattice lattice_sum(const Lattice& a, const Lattice& b);
// Z-span of all pairwise products of basis vectors.
Lattice lattice_mul(const QuatAlgebra& B, const Lattice& a, const Lattice& b);
Lattice lattice_scal(const BigRat& c, const Lattice& a);
Lattice lattice_lmul(const QuatAlgebra& B, const Quat& g, const Lattice& a);
Lattice lattice_rmul(const QuatAlgebra& B, const Lattice& a, const Quat& g);
Lattice lattice_conj(const QuatAlgebra& B, const Lattice& a);

// |det| of the basis matrix: covolume relative to Z<1,i,j,ij>.
BigRat lattice_det(const Lattice& a);
// Coordinates of x in the basis of a (exact solve).
std::array<BigRat, 4> lattice_coords(const Lattice& a, const Quat& x);
bool lattice_contains(const Lattice& a, const Quat& x);
// [b : a] = det(a)/det(b) for a subset of b (positive rational in general).
BigRat lattice_index(const Lattice& sub, const Lattice& sup);

// Reduced discriminant: sqrt |det trd(b_s b_t)|.  Throws if the determinant
// is not a perfect square (cannot happen for orders).
BigRat reduced_discriminant(const QuatAlgebra& B, const Lattice& L);

bool is_order(const QuatAlgebra& B, const Lattice& L);

// A maximal order containing Z<1,i,j,ij>, by repeated saturation at primes
// where the reduced discriminant exceeds disc(B).
Lattice maximal_order(const QuatAlgebra& B);

// Eichler order of squarefree level N coprime to disc(B): the sublattice of
// a maximal order cut out by lower-left congruences at each q | N.
// Reduced discriminant disc(B)*N, index N in the maximal order.
Lattice eichler_order(const QuatAlgebra& B, const Lattice& Omax, uint64_t N);

/* Enumeration of vectors with prescribed reduced norm (positive definite
 * quartic form).  Returns all solutions up to sign (one of each +-pair)
 * when collect_all, else stops at the first. */
std::vector<Quat> lattice_vectors_with_norm(const QuatAlgebra& B, const Lattice& L,
                                            const BigRat& target, bool collect_all,
                                            size_t cap = 100000);

// Exact integer square root; throws if n is not a perfect square.
BigInt exact_sqrt(const BigInt& n);

}  // namespace qtp
