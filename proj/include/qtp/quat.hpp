#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "qtp/padic.hpp"

namespace qtp {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

/* Element of the quaternion algebra B = (a,b / Q) on the basis (1, i, j, ij):
 * i^2 = a, j^2 = b, ij = -ji.  Coordinates are exact rationals. */
struct Quat {
  std::array<BigRat, 4> c{BigRat(0), BigRat(0), BigRat(0), BigRat(0)};

  Quat() = default;
  explicit Quat(const std::array<BigRat, 4>& v) : c(v) {}
  static Quat one() { return Quat({BigRat(1), BigRat(0), BigRat(0), BigRat(0)}); }

  bool is_zero() const { return c[0] == 0 && c[1] == 0 && c[2] == 0 && c[3] == 0; }
  bool operator==(const Quat& o) const { return c == o.c; }
};

/* Definite quaternion algebra over Q with its computed ramification data. */
struct QuatAlgebra {
  int64_t a = -1;
  int64_t b = -1;
  uint64_t disc = 2;                 // product of ramified finite primes
  std::vector<uint64_t> ramified;    // sorted finite ramified primes

  Quat add(const Quat& x, const Quat& y) const;
  Quat sub(const Quat& x, const Quat& y) const;
  Quat neg(const Quat& x) const;
  Quat scal(const BigRat& c, const Quat& x) const;
  Quat mul(const Quat& x, const Quat& y) const;
  Quat conj(const Quat& x) const;    // main involution x -> trd(x) - x
  BigRat trd(const Quat& x) const { return 2 * x.c[0]; }
  BigRat nrd(const Quat& x) const;
  Quat inv(const Quat& x) const;     // conj(x)/nrd(x)
};

// Finite ramified primes of (a,b / Q), via Hilbert symbols at all candidate
// places (primes dividing 2ab).
std::vector<uint64_t> ramified_primes(int64_t a, int64_t b);

// Search small negative (a, b) whose algebra ramifies exactly at the primes
// dividing D (and infinity).  D must be squarefree with an odd number of
// prime factors.
QuatAlgebra build_algebra(uint64_t D);

}  // namespace qtp
