#include <doctest.h>

#include "qtp/padic.hpp"

using namespace qtp;

TEST_CASE("parameter validation") {
  PadicParams good;
  CHECK_NOTHROW(good.validate());

  PadicParams bad = good;
  bad.p = 3;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = good;
  bad.p = 6;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = good;
  bad.N = bad.M_mom + 3;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = good;
  bad.N = 40;  // 5^42 overflows the working width
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  PadicParams p7 = good;
  p7.p = 7;
  CHECK_NOTHROW(p7.validate());  // 7^22 < 2^62
}

TEST_CASE("ring arithmetic basics") {
  PadicRing R(5, 6);
  CHECK(R.guard() >= 2);
  uint64_t a = R.reduce(-3);
  CHECK(R.add(a, R.reduce(3)) == 0);
  CHECK(R.mul(R.inv(7), 7) == 1);
  CHECK(R.val(250) == 3);
  CHECK(R.val(0) == R.W());
  CHECK(R.div_pk(250, 3) == 2);
  CHECK_THROWS_AS(R.div_pk(251, 1), PrecisionError);
  CHECK_THROWS_AS(R.inv(10), PrecisionError);
  CHECK(R.pow_signed(2, -1) == R.inv(2));
}

TEST_CASE("teichmuller lift at p=5") {
  // Oracle, frozen: iterating t -> t^5 mod 5^4 from t=2 stabilizes at 182
  // (2^5=32, 32^5=57, 57^5=182, 182^5=182 mod 625).
  PadicRing R(5, 4);
  uint64_t w = R.teichmuller(2);
  CHECK(w % 625 == 182);
  CHECK(R.pow(w, 4) == 1);
  CHECK(w % 5 == 2);

  // omega is multiplicative and fixes 1.
  CHECK(R.teichmuller(1) == 1);
  uint64_t w2 = R.teichmuller(3), w3 = R.mul(w, w2);
  CHECK(R.teichmuller(R.mul(2, 3) % R.mod()) == w3 % R.mod());
}

TEST_CASE("teichmuller lift at p=7, full precision") {
  PadicRing R(7, 20);
  for (uint64_t t : {2ull, 3ull, 10ull, 123456789ull}) {
    uint64_t w = R.teichmuller(t);
    CHECK(R.pow(w, 6) == 1);
    CHECK(w % 7 == t % 7);
  }
}

TEST_CASE("one-unit logarithm") {
  PadicRing R(5, 12);
  uint64_t l1p = R.log_one_unit(6);
  CHECK(R.val(l1p) == 1);  // log(1+p) = p * unit
  // log is a homomorphism on one-units.
  uint64_t x = R.reduce(1 + 5 * 7), y = R.reduce(1 + 25 * 3);
  uint64_t lx = R.log_one_unit(x), ly = R.log_one_unit(y);
  uint64_t lxy = R.log_one_unit(R.mul(x, y));
  // Valid at least mod p^N (guard absorbs the /p^{v(j)} losses).
  CHECK(R.sub(lxy, R.add(lx, ly)) % R.modN() == 0);
  CHECK_THROWS_AS(R.log_one_unit(2), ValidationError);
}

TEST_CASE("ell stretches along powers of 1+p") {
  PadicRing R(5, 12);
  uint64_t u = R.reduce(6);
  for (int m : {0, 1, 2, 3, 7}) {
    uint64_t t = R.pow(u, (uint64_t)m);
    CHECK(R.ell(t) % R.modN() == (uint64_t)m % R.modN());
  }
  // ell kills Teichmuller representatives and doubles on squares.
  CHECK(R.ell(R.teichmuller(3)) % R.modN() == 0);
  uint64_t t = R.reduce(123457);  // random unit
  uint64_t e1 = R.ell(t), e2 = R.ell(R.mul(t, t));
  CHECK(R.sub(e2, R.add(e1, e1)) % R.modN() == 0);
}

TEST_CASE("ledgered approximations") {
  PadicRing R(5, 8);
  PadicApprox a(R.reduce(7), 8), b(R.reduce(5 * 5 * 3), 8);
  auto prod = padic_mul(R, a, b);
  CHECK(prod.known_prec == 8);  // capped at N
  auto q = padic_div_pk(R, b, 1);
  CHECK(q.known_prec == 7);
  CHECK(q.value == 15);
  // Division by p never increases knowledge.
  auto q2 = padic_div_pk(R, q, 1);
  CHECK(q2.known_prec == 6);
  CHECK(q2.value == 3);

  // Equality is mod p^min(prec).
  PadicApprox x(R.reduce(2 + 5 * 5 * 5), 3), y(R.reduce(2), 3);
  CHECK(padic_eq(R, x, y));
  PadicApprox z(R.reduce(2 + 25), 3);
  CHECK(!padic_eq(R, z, y));
  CHECK(residual_valuation(R, x, y) == 3);
  CHECK(residual_valuation(R, z, y) == 2);
}
