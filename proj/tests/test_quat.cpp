#include <doctest.h>

#include <set>

#include "qtp/nt.hpp"
#include "qtp/order.hpp"
#include "qtp/psplit.hpp"

using namespace qtp;

namespace {

// Square-class code of a nonzero integer in Q_q: valuation parity plus the
// class of the unit part (Legendre for odd q, residue mod 8 for q = 2).
int sq_class(int64_t t, uint64_t q) {
  int v = valuation_i64(t, q);
  int64_t u = t;
  for (int i = 0; i < v; ++i) u /= (int64_t)q;
  if (q == 2) return (v % 2) * 8 + (int)(((u % 8) + 8) % 8);
  return (v % 2) * 2 + (legendre_i64(u, q) == 1 ? 0 : 1);
}

int class_mul(int c1, int c2, uint64_t q) {
  if (q == 2) return ((c1 / 8 + c2 / 8) % 2) * 8 + (c1 % 8) * (c2 % 8) % 8;
  return ((c1 / 2 + c2 / 2) % 2) * 2 + (c1 % 2 + c2 % 2) % 2;
}

bool is_square_qq(int64_t a, uint64_t q) {
  int v = valuation_i64(a, q);
  if (v % 2 != 0) return false;
  int64_t u = a;
  for (int i = 0; i < v; ++i) u /= (int64_t)q;
  if (q == 2) return ((u % 8) + 8) % 8 == 1;
  return legendre_i64(u, q) == 1;
}

// Independent route to (a,b)_q: b is represented by x^2 - a y^2 over Q_q
// exactly when the symbol is +1.  The represented square classes form the
// norm group of the quadratic extension; enumerate them from integer pairs
// and close under multiplication.
int hilbert_oracle(int64_t a, int64_t b, uint64_t q) {
  size_t expect = (q == 2 ? 8u : 4u) / (is_square_qq(a, q) ? 1u : 2u);
  std::set<int> cl;
  for (int64_t L = 8; L <= 64 && cl.size() < expect; L *= 2) {
    for (int64_t x = -L; x <= L; ++x)
      for (int64_t y = -L; y <= L; ++y) {
        int64_t n = x * x - a * y * y;
        if (n != 0) cl.insert(sq_class(n, q));
      }
    for (bool grew = true; grew;) {
      grew = false;
      for (int c1 : std::set<int>(cl))
        for (int c2 : std::set<int>(cl))
          grew = cl.insert(class_mul(c1, c2, q)).second || grew;
    }
  }
  REQUIRE(cl.size() == expect);  // norm group has index 1 or 2
  return cl.count(sq_class(b, q)) ? 1 : -1;
}

uint64_t lcg(uint64_t& st) {
  st = st * 6364136223846793005ULL + 1442695040888963407ULL;
  return st >> 33;
}

Quat int_combo(const QuatAlgebra& B, const Lattice& L, uint64_t& st, int span = 9) {
  Quat x;
  for (size_t t = 0; t < 4; ++t) {
    int64_t c = (int64_t)(lcg(st) % (2 * (uint64_t)span + 1)) - span;
    x = B.add(x, B.scal(BigRat(c), L.rows[t]));
  }
  return x;
}

int64_t sum_divisors_not_div4(int64_t n) {
  int64_t s = 0;
  for (int64_t d = 1; d <= n; ++d)
    if (n % d == 0 && d % 4 != 0) s += d;
  return s;
}

int64_t sum_odd_divisors(int64_t n) {
  int64_t s = 0;
  for (int64_t d = 1; d <= n; ++d)
    if (n % d == 0 && d % 2 == 1) s += d;
  return s;
}

uint64_t rat_mod_u64(const BigRat& r, uint64_t mod) {
  BigInt n = numerator(r) % BigInt(mod);
  if (n < 0) n += BigInt(mod);
  BigInt d = denominator(r) % BigInt(mod);
  return mulmod_u64((uint64_t)n, invmod_u64((uint64_t)d, mod), mod);
}

size_t rank4_mod_q(const std::array<Mat2, 4>& rows, uint64_t q) {
  uint64_t m[4][4];
  for (size_t s = 0; s < 4; ++s)
    for (size_t t = 0; t < 4; ++t) m[s][t] = rows[s][t] % q;
  size_t rank = 0;
  for (size_t col = 0; col < 4 && rank < 4; ++col) {
    size_t piv = rank;
    while (piv < 4 && m[piv][col] == 0) ++piv;
    if (piv == 4) continue;
    std::swap(m[piv], m[rank]);
    uint64_t inv = invmod_u64(m[rank][col], q);
    for (size_t s = rank + 1; s < 4; ++s) {
      uint64_t f = mulmod_u64(m[s][col], inv, q);
      for (size_t t = 0; t < 4; ++t)
        m[s][t] = (m[s][t] + q * q - mulmod_u64(f, m[rank][t], q)) % q;
    }
    ++rank;
  }
  return rank;
}

}  // namespace

TEST_CASE("hilbert symbol matches norm-group membership") {
  const int64_t vals[] = {1,  -1, 2,  -2, 3,  -3, 5,   -5, 6,   -6, 7,  -7,
                          10, -10, 11, -11, 13, -13, 15, -15, 17, -17, 26, -26};
  for (uint64_t q : {2, 3, 5, 7, 11, 13})
    for (int64_t a : vals)
      for (int64_t b : vals)
        CHECK(hilbert_symbol(a, b, q) == hilbert_oracle(a, b, q));
}

TEST_CASE("hilbert product formula over all places") {
  uint64_t st = 2024;
  for (int trial = 0; trial < 200; ++trial) {
    int64_t a = (int64_t)(lcg(st) % 121) - 60;
    int64_t b = (int64_t)(lcg(st) % 121) - 60;
    if (a == 0 || b == 0) continue;
    int prod = hilbert_symbol(a, b, 0);
    std::set<uint64_t> places{2};
    for (auto& [p, e] : factorize((uint64_t)(a < 0 ? -a : a))) places.insert(p);
    for (auto& [p, e] : factorize((uint64_t)(b < 0 ? -b : b))) places.insert(p);
    for (uint64_t p : places) prod *= hilbert_symbol(a, b, p);
    CHECK(prod == 1);
  }
}

TEST_CASE("definite algebra search hits the requested ramification") {
  for (uint64_t D : {2, 3, 5, 7, 11, 13, 30}) {
    QuatAlgebra B = build_algebra(D);
    CHECK(B.disc == D);
    CHECK(hilbert_symbol(B.a, B.b, 0) == -1);  // definite
    std::vector<uint64_t> want;
    for (auto& [q, e] : factorize(D)) want.push_back(q);
    CHECK(B.ramified == want);
    for (uint64_t q : {2, 3, 5, 7, 11, 13}) {
      bool ram = D % q == 0;
      CHECK(hilbert_symbol(B.a, B.b, q) == (ram ? -1 : 1));
    }
  }
  CHECK(build_algebra(2).a == -1);
  CHECK(build_algebra(2).b == -1);
  CHECK_THROWS_AS(build_algebra(1), ValidationError);
  CHECK_THROWS_AS(build_algebra(4), ValidationError);
  CHECK_THROWS_AS(build_algebra(6), ValidationError);    // even factor count
  CHECK_THROWS_AS(build_algebra(10), ValidationError);
}

TEST_CASE("lattice normal form, determinant, coordinates") {
  QuatAlgebra B = build_algebra(2);
  std::vector<Quat> std_rows(4);
  for (size_t t = 0; t < 4; ++t) std_rows[t].c[t] = 1;
  Lattice O = lattice_from_rows(std_rows);
  CHECK(lattice_det(O) == 1);

  // redundant shuffled generators give the identical normal form
  std::vector<Quat> gen{B.add(std_rows[1], std_rows[2]), std_rows[0], std_rows[2],
                        std_rows[3], std_rows[1], B.add(std_rows[0], std_rows[3])};
  CHECK(lattice_from_rows(gen) == O);

  Lattice half = lattice_scal(BigRat(1, 2), O);
  CHECK(lattice_det(half) == BigRat(1, 16));
  Lattice twice = lattice_scal(BigRat(2), O);
  CHECK(lattice_index(twice, O) == 16);
  CHECK(lattice_contains(O, std_rows[2]));
  CHECK(!lattice_contains(twice, std_rows[2]));
  CHECK(lattice_sum(O, half) == half);
  CHECK(lattice_mul(B, twice, O) == twice);  // O is a ring with identity

  uint64_t st = 7;
  for (int trial = 0; trial < 20; ++trial) {
    Quat x = int_combo(B, half, st);
    auto co = lattice_coords(half, x);
    Quat back;
    for (size_t t = 0; t < 4; ++t)
      back = B.add(back, B.scal(co[t], half.rows[t]));
    CHECK(back == x);
    CHECK(lattice_contains(half, x));
  }
  CHECK_THROWS_AS(lattice_from_rows({std_rows[0], std_rows[1], std_rows[2]}),
                  ValidationError);
}

TEST_CASE("maximal orders: discriminant, integrality, unit counts") {
  const std::pair<uint64_t, size_t> table[] = {
      {2, 24}, {3, 12}, {5, 6}, {7, 4}, {13, 2}};
  for (auto [D, units] : table) {
    QuatAlgebra B = build_algebra(D);
    Lattice O = maximal_order(B);
    CHECK(is_order(B, O));
    CHECK(reduced_discriminant(B, O) == BigRat(BigInt(D)));
    auto ups = lattice_vectors_with_norm(B, O, BigRat(1), true);
    CHECK(2 * ups.size() == units);
    for (const Quat& u : ups) CHECK(B.nrd(u) == 1);
  }
  // disc 2 is the classical case: basis (-1,-1), half-integral element
  QuatAlgebra B2 = build_algebra(2);
  Lattice H = maximal_order(B2);
  Quat hur({BigRat(1, 2), BigRat(1, 2), BigRat(1, 2), BigRat(1, 2)});
  CHECK(lattice_contains(H, hur));
  std::vector<Quat> std_rows(4);
  for (size_t t = 0; t < 4; ++t) std_rows[t].c[t] = 1;
  CHECK(lattice_index(lattice_from_rows(std_rows), H) == 2);
}

TEST_CASE("norm counts agree with classical four-square formulas") {
  QuatAlgebra B = build_algebra(2);
  std::vector<Quat> std_rows(4);
  for (size_t t = 0; t < 4; ++t) std_rows[t].c[t] = 1;
  Lattice L = lattice_from_rows(std_rows);  // nrd = sum of four squares
  for (int64_t n : {1, 2, 3, 4, 5, 6, 8, 12}) {
    auto v = lattice_vectors_with_norm(B, L, BigRat(n), true);
    CHECK(2 * (int64_t)v.size() == 8 * sum_divisors_not_div4(n));
  }
  Lattice H = maximal_order(B);
  for (int64_t n : {1, 2, 3, 4, 6}) {
    auto v = lattice_vectors_with_norm(B, H, BigRat(n), true);
    CHECK(2 * (int64_t)v.size() == 24 * sum_odd_divisors(n));
  }
  // single-witness mode returns one representative with the exact norm
  auto w = lattice_vectors_with_norm(B, H, BigRat(2), false);
  REQUIRE(w.size() == 1);
  CHECK(B.nrd(w[0]) == 2);
}

TEST_CASE("eichler orders: index and reduced discriminant") {
  QuatAlgebra B = build_algebra(2);
  Lattice O = maximal_order(B);
  for (uint64_t N : {3, 5, 15}) {
    Lattice E = eichler_order(B, O, N);
    CHECK(is_order(B, E));
    CHECK(lattice_index(E, O) == BigRat(BigInt(N)));
    CHECK(reduced_discriminant(B, E) == BigRat(BigInt(2 * N)));
    for (const Quat& r : E.rows) CHECK(lattice_contains(O, r));
  }
  CHECK(eichler_order(B, O, 1) == O);
  CHECK_THROWS_AS(eichler_order(B, O, 4), ValidationError);
  CHECK_THROWS_AS(eichler_order(B, O, 0), ValidationError);
  QuatAlgebra B3 = build_algebra(3);
  Lattice O3 = maximal_order(B3);
  CHECK_THROWS_AS(eichler_order(B3, O3, 3), ValidationError);
  Lattice E6 = eichler_order(B3, O3, 2);
  CHECK(reduced_discriminant(B3, E6) == 6);
}

TEST_CASE("local splitting is a unital ring homomorphism") {
  QuatAlgebra B = build_algebra(2);
  Lattice O = maximal_order(B);
  const std::pair<uint64_t, int> cases[] = {{3, 1}, {3, 4}, {5, 6}, {7, 2}};
  for (auto [q, m] : cases) {
    SplitData sp = split_order_at(B, O, q, m);
    uint64_t mod = sp.modulus;
    Mat2 id = split_apply(sp, Quat::one());
    CHECK(id == Mat2{1, 0, 0, 1});
    CHECK(rank4_mod_q(sp.img, q) == 4);  // surjective mod q
    uint64_t st = 101 + q;
    for (int trial = 0; trial < 25; ++trial) {
      Quat x = int_combo(B, O, st);
      Quat y = int_combo(B, O, st);
      Mat2 mx = split_apply(sp, x), my = split_apply(sp, y);
      CHECK(split_apply(sp, B.mul(x, y)) == mat2_mul(mx, my, mod));
      CHECK(split_apply(sp, B.add(x, y)) == mat2_add(mx, my, mod));
      CHECK(mat2_det(mx, mod) == rat_mod_u64(B.nrd(x), mod));
      CHECK(mat2_tr(mx, mod) == rat_mod_u64(B.trd(x), mod));
      CHECK(split_apply(sp, B.conj(x)) == mat2_adj(mx, mod));
    }
  }
  // ramified prime must be rejected
  CHECK_THROWS_AS(split_order_at(B, O, 2, 1), ValidationError);
}

TEST_CASE("splitting exhibits the eichler level structure") {
  QuatAlgebra B = build_algebra(2);
  Lattice O = maximal_order(B);
  Lattice E = eichler_order(B, O, 5);
  SplitData sp = split_order_at(B, O, 5, 1);
  uint64_t st = 404;
  bool some_unit_corner = false;
  for (int trial = 0; trial < 30; ++trial) {
    CHECK(split_apply(sp, int_combo(B, E, st))[2] % 5 == 0);
    some_unit_corner = some_unit_corner || split_apply(sp, int_combo(B, O, st))[2] % 5 != 0;
  }
  CHECK(some_unit_corner);  // the congruence is nontrivial on the big order
}
