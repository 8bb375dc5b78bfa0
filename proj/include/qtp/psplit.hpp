#pragma once

#include <array>
#include <cstdint>

#include "qtp/order.hpp"

namespace qtp {

// Local splitting B tensor Q_q ~ M_2(Q_q) realised on an order whose index in
// a maximal order is prime to q.  Matrices are stored row-major mod q^m.
struct SplitData {
  uint64_t q = 0;
  int m = 0;
  uint64_t modulus = 0;       // q^m
  Lattice order;              // basis the images refer to
  std::array<std::array<uint64_t, 4>, 4> img{};  // image of each basis row
};

using Mat2 = std::array<uint64_t, 4>;  // row-major [a b; c d]

Mat2 mat2_mul(const Mat2& x, const Mat2& y, uint64_t mod);
Mat2 mat2_add(const Mat2& x, const Mat2& y, uint64_t mod);
uint64_t mat2_det(const Mat2& x, uint64_t mod);
uint64_t mat2_tr(const Mat2& x, uint64_t mod);
Mat2 mat2_scal(uint64_t c, const Mat2& x, uint64_t mod);
// adjugate: [d -b; -c a]
Mat2 mat2_adj(const Mat2& x, uint64_t mod);
// inverse of a matrix with unit determinant
Mat2 mat2_inv(const Mat2& x, uint64_t mod, uint64_t q);

// Build the splitting for a prime q not dividing the discriminant.  Requires
// q^m < 2^62.  The resulting map is a unital ring homomorphism on q-integral
// elements: det = nrd, tr = trd, conjugate -> adjugate (all mod q^m).
SplitData split_order_at(const QuatAlgebra& B, const Lattice& O, uint64_t q,
                         int m);

// Image of x, for x whose coordinates w.r.t. the stored order basis have
// denominators prime to q.
Mat2 split_apply(const SplitData& sp, const Quat& x);

}  // namespace qtp
