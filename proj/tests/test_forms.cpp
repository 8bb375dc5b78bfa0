#include <doctest.h>

#include <array>
#include <random>

#include "qtp/euler.hpp"
#include "qtp/forms.hpp"
#include "qtp/nt.hpp"

using namespace qtp;

namespace {

uint64_t rat_mod(const PadicRing& R, const BigRat& r) {
  BigInt n = numerator(r) % BigInt(R.mod());
  if (n < 0) n += BigInt(R.mod());
  BigInt d = denominator(r) % BigInt(R.mod());
  return R.mul(n.convert_to<uint64_t>(),
               R.inv(d.convert_to<uint64_t>()));
}

}  // namespace

TEST_CASE("weight-zero Hecke action reproduces the neighbor counts") {
  PadicRing R(5, 12);
  for (uint64_t D : {2ull, 3ull, 11ull}) {
    ClassSet cs = build_class_set(D, 1);
    HeckeContext ctx(R, cs);
    for (uint64_t ell : {3ull, 7ull}) {
      if (D % ell == 0) continue;
      auto B = brandt_matrix(cs, ell);
      // one pass per basis vector of the weight-zero space
      for (size_t y = 0; y < cs.h(); ++y) {
        QuatModFormV e = form_zero(R, cs, 0, false);
        e.vals[y].c[0] = 1;
        QuatModFormV img = hecke_apply(ctx, e, ell);
        for (size_t x = 0; x < cs.h(); ++x)
          CHECK(img.vals[x].c[0] == R.reduce(B[x][y]));
      }
    }
  }
}

TEST_CASE("class number one orders see the full neighbor degree") {
  PadicRing R(11, 10);
  for (uint64_t D : {2ull, 3ull, 5ull, 7ull, 13ull}) {
    ClassSet cs = build_class_set(D, 1);
    REQUIRE(cs.h() == 1);
    HeckeContext ctx(R, cs);
    uint64_t ell = (D == 2) ? 3 : 2;
    QuatModFormV one = form_zero(R, cs, 0, false);
    one.vals[0].c[0] = 1;
    QuatModFormV img = hecke_apply(ctx, one, ell);
    CHECK(img.vals[0].c[0] == ell + 1);
  }
}

TEST_CASE("invariant projection is idempotent and inverts nothing twice") {
  PadicRing R(5, 20);
  ClassSet cs = build_class_set(11, 1);
  HeckeContext ctx(R, cs);
  for (uint64_t seed : {1ull, 2ull, 3ull}) {
    QuatModFormV f = random_invariant_form(ctx, 2, seed);
    CHECK(invariance_defect(ctx, f) >= R.N());
    QuatModFormV g = project_invariant(ctx, f);
    CHECK(form_residual_valuation(R, f, g) >= R.N());
    CHECK(!form_is_zero(R, f));
  }
  // odd weight: the -1 central element kills everything
  QuatModFormV odd = random_invariant_form(ctx, 3, 4);
  CHECK(form_is_zero(R, odd));
}

TEST_CASE("Hecke operators commute and are self-adjoint for the mass pairing") {
  PadicRing R(5, 20);
  ClassSet cs = build_class_set(11, 1);
  HeckeContext ctx(R, cs);
  for (uint64_t seed : {10ull, 11ull}) {
    QuatModFormV f = random_invariant_form(ctx, 2, seed);
    QuatModFormV g = random_invariant_form(ctx, 2, seed + 100);
    QuatModFormV a = hecke_apply(ctx, hecke_apply(ctx, f, 2), 3);
    QuatModFormV b = hecke_apply(ctx, hecke_apply(ctx, f, 3), 2);
    CHECK(form_residual_valuation(R, a, b) >= R.N());
    for (uint64_t ell : {2ull, 3ull}) {
      PadicApprox lhs = form_pairing(ctx, hecke_apply(ctx, f, ell), g);
      PadicApprox rhs = form_pairing(ctx, f, hecke_apply(ctx, g, ell));
      CHECK(residual_valuation(R, lhs, rhs) >= R.N());
    }
    PadicApprox lhs = form_pairing(ctx, tp_apply(ctx, f), g);
    PadicApprox rhs = form_pairing(ctx, f, tp_apply(ctx, g));
    CHECK(residual_valuation(R, lhs, rhs) >= R.N());
  }
}

TEST_CASE("weight-zero eigensystems at discriminant eleven") {
  PadicRing R(5, 20);
  ClassSet cs = build_class_set(11, 1);
  HeckeContext ctx(R, cs);
  EigenSearch es = eigenforms(ctx, 0, {2, 3});
  REQUIRE(es.packets.size() == 2);
  CHECK(es.skipped.empty());

  const EigenPacket& eis = es.packets[0];
  CHECK(eis.eisenstein);
  CHECK(eis.a.at(2) == 3);
  CHECK(eis.a.at(3) == 4);
  CHECK(eis.ap == 6);
  // all values one after unit normalization
  for (size_t x = 0; x < cs.h(); ++x) CHECK(eis.form.vals[x].c[0] == 1);
  REQUIRE(eis.alpha.has_value());
  CHECK(eis.alpha->value == 1);
  CHECK(eis.beta->value == 5);

  const EigenPacket& c = es.packets[1];
  CHECK(!c.eisenstein);
  CHECK(c.a.at(2) == -2);
  CHECK(c.a.at(3) == -1);
  CHECK(c.ap == 1);
  CHECK(residual_valuation(R, global_T(ctx, c.form), PadicApprox(0, R.N())) >=
        R.N());
  // ordinary at 5: unit root congruent to a_p
  REQUIRE(c.alpha.has_value());
  CHECK(R.val(c.alpha->value) == 0);
  CHECK(c.alpha->value % 5 == 1);
  CHECK(R.add(c.alpha->value, c.beta->value) == 1);
  CHECK(R.mul(c.alpha->value, c.beta->value) == 5);

  // exact rational cross-check of the cuspidal vector and its eigenvalue
  BigRat c0(1), c1 = -BigRat((int64_t)cs.unit_count(1)) /
                     BigRat((int64_t)cs.unit_count(0));
  CHECK(c.form.vals[0].c[0] == rat_mod(R, c0));
  CHECK(c.form.vals[1].c[0] == rat_mod(R, c1));
  auto B2 = brandt_matrix(cs, 2);
  for (size_t x = 0; x < 2; ++x) {
    BigRat img = BigRat(B2[x][0]) * c0 + BigRat(B2[x][1]) * c1;
    BigRat want = BigRat(-2) * (x == 0 ? c0 : c1);
    CHECK(img == want);
  }
}

TEST_CASE("weight-zero triple periods match exact rationals") {
  PadicRing R(5, 20);
  ClassSet cs = build_class_set(11, 1);
  HeckeContext ctx(R, cs);
  EigenSearch es = eigenforms(ctx, 0, {2, 3});
  REQUIRE(es.packets.size() == 2);
  const QuatModFormV& E = es.packets[0].form;
  const QuatModFormV& c = es.packets[1].form;
  BalancedWeights kk(0, 0, 0);

  // mass of the genus: sum of 1/|unit group| over classes
  CHECK(global_T_exact(cs, {BigRat(1), BigRat(1)}) == BigRat(5, 12));
  CHECK(residual_valuation(R, global_T(ctx, E),
                           PadicApprox(rat_mod(R, BigRat(5, 12)), R.N())) >=
        R.N());
  CHECK(residual_valuation(R, classical_t_k(ctx, kk, E, E, E),
                           PadicApprox(rat_mod(R, BigRat(5, 12)), R.N())) >=
        R.N());

  BigRat c0(1), c1 = -BigRat((int64_t)cs.unit_count(1)) /
                     BigRat((int64_t)cs.unit_count(0));
  BigRat u0((int64_t)cs.unit_count(0)), u1((int64_t)cs.unit_count(1));
  BigRat pair_cc = c0 * c0 / u0 + c1 * c1 / u1;
  BigRat t_ccc = c0 * c0 * c0 / u0 + c1 * c1 * c1 / u1;

  PadicApprox want_cc(rat_mod(R, pair_cc), R.N());
  CHECK(residual_valuation(R, form_pairing(ctx, c, c), want_cc) >= R.N());
  CHECK(residual_valuation(R, classical_t_k(ctx, kk, c, c, E), want_cc) >=
        R.N());
  CHECK(residual_valuation(R, classical_t_k(ctx, kk, c, c, c),
                           PadicApprox(rat_mod(R, t_ccc), R.N())) >= R.N());
  // cusp against the constant: orthogonality
  CHECK(residual_valuation(R, form_pairing(ctx, c, E), PadicApprox(0, R.N())) >=
        R.N());

  // genus two: the single class has unit group of order 24
  ClassSet cs2 = build_class_set(2, 1);
  CHECK(global_T_exact(cs2, {BigRat(1)}) == BigRat(1, 24));
}

TEST_CASE("higher weight eigensystems carry the classical eigenvalue data") {
  // discriminant 5, forms of Sym^2 type: the unique weight-4 newform of
  // level 5 with a_2 = -4, a_3 = 2, a_7 = 6 (eta-product expansion)
  {
    PadicRing R(7, 20);
    ClassSet cs = build_class_set(5, 1);
    HeckeContext ctx(R, cs);
    EigenSearch es = eigenforms(ctx, 2, {2, 3});
    REQUIRE(es.packets.size() == 1);
    CHECK(es.skipped.empty());
    const EigenPacket& f = es.packets[0];
    CHECK(f.a.at(2) == -4);
    CHECK(f.a.at(3) == 2);
    CHECK(f.ap == 6);
    CHECK(!f.eisenstein);
    REQUIRE(f.alpha.has_value());
    CHECK(R.val(f.alpha->value) == 0);
    CHECK(R.add(f.alpha->value, f.beta->value) == R.reduce(6));
    CHECK(R.mul(f.alpha->value, f.beta->value) == R.ppow(3));
  }
  // discriminant 7: the weight-4 level-7 newform (a_2 = -1, a_3 = -2,
  // a_5 = 16, a_11 = -8 from the Eisenstein-square expansion), recovered
  // identically over two different p-adic rings
  {
    PadicRing R5(5, 20), R11(11, 14);
    ClassSet cs = build_class_set(7, 1);
    HeckeContext c5(R5, cs), c11(R11, cs);
    EigenSearch a = eigenforms(c5, 2, {2, 3});
    EigenSearch b = eigenforms(c11, 2, {2, 3});
    REQUIRE(a.packets.size() == 1);
    REQUIRE(b.packets.size() == 1);
    CHECK(a.packets[0].a.at(2) == -1);
    CHECK(a.packets[0].a.at(3) == -2);
    CHECK(a.packets[0].ap == 16);
    CHECK(b.packets[0].a.at(2) == -1);
    CHECK(b.packets[0].a.at(3) == -2);
    CHECK(b.packets[0].ap == -8);
  }
}

TEST_CASE("irrational eigenvalue pairs are reported and skipped") {
  // the two Sym^2 systems at discriminant 11 are conjugate over Q(sqrt 3):
  // T_2 has characteristic polynomial X^2 - 2X - 2 there
  for (uint64_t p : {5ull, 7ull}) {
    PadicRing R(p, 20);
    ClassSet cs = build_class_set(11, 1);
    HeckeContext ctx(R, cs);
    EigenSearch es = eigenforms(ctx, 2, {2, 3});
    CHECK(es.packets.empty());
    REQUIRE(es.skipped.size() == 1);
    CHECK(es.skipped[0].find("irrational") != std::string::npos);
  }
}

TEST_CASE("hensel lifting and local sign utilities") {
  PadicRing R(7, 20);
  uint64_t r = hensel_root(R, {-2, 0, 1}, 3);  // X^2 - 2 from 3 mod 7
  CHECK(R.mul(r, r) == 2);
  CHECK(r % 7 == 3);
  CHECK_THROWS_AS((void)hensel_root(R, {0, 0, 1}, 0), ValidationError);

  PadicRing R5(5, 20);
  BalancedWeights k0(0, 0, 0);
  CHECK(generic_sign_local(R5, 1, 1, -1, k0, 2).value == 1);
  CHECK(generic_sign_local(R5, 1, 1, 1, k0, 2).value == R5.neg(1));
  BalancedWeights k2(2, 2, 2);
  uint64_t want = R5.neg(R5.mul(R5.reduce(18), R5.inv(8)));
  CHECK(generic_sign_local(R5, 3, 3, 2, k2, 2).value == want);
  CHECK_THROWS_AS((void)generic_sign_local(R5, 5, 1, 1, k0, 2),
                  ValidationError);
}

TEST_CASE("degeneracy twist transports weight-zero values") {
  PadicRing R(5, 20);
  ClassSet cs = build_class_set(11, 1);
  HeckeContext ctx(R, cs);
  EigenSearch es = eigenforms(ctx, 0, {2, 3});
  const QuatModFormV& E = es.packets[0].form;
  QuatModFormV tw = degeneracy_twist(ctx, E);
  CHECK(tw.level_p);
  CHECK(tw.vals.size() == cs.h() * 6);
  // weight zero transports trivially, so every edge reads the constant 1
  for (const auto& v : tw.vals) CHECK(v.c[0] == 1);
  QuatModFormV tp = tp_apply(ctx, E);
  for (size_t x = 0; x < cs.h(); ++x) CHECK(tp.vals[x].c[0] == 6);
  // summing the twist over one fiber reassembles the full T_p value
  QuatModFormV cusp = es.packets[1].form;
  QuatModFormV ctw = degeneracy_twist(ctx, cusp);
  QuatModFormV ctp = tp_apply(ctx, cusp);
  for (size_t x = 0; x < cs.h(); ++x) {
    uint64_t s = 0;
    for (size_t L = 0; L < 6; ++L) s = R.add(s, ctw.vals[x * 6 + L].c[0]);
    CHECK(s == ctp.vals[x].c[0]);
  }
}

TEST_CASE("local product form agrees with an independent subset expansion") {
  PadicRing R(5, 20);
  BalancedWeights kk(2, 4, 2);
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<uint64_t> pick(0, R.mod() - 1);
  for (int trial = 0; trial < 200; ++trial) {
    std::array<uint64_t, 3> a, X;
    for (int i = 0; i < 3; ++i) {
      a[i] = pick(rng);
      do X[i] = pick(rng);
      while (!R.is_unit(X[i]));
    }
    PadicApprox got = euler_Ep(R, kk, a, X);
    // oracle: signed sum over subsets S with the complement-trace rule
    uint64_t acc = 0;
    for (int S = 0; S < 8; ++S) {
      uint64_t num;
      int bits = __builtin_popcount(S);
      if (bits == 0) num = 1;
      else if (bits == 1)
        num = a[S == 1 ? 0 : S == 2 ? 1 : 2];
      else if (bits == 2)
        num = a[S == 3 ? 2 : S == 5 ? 1 : 0];
      else
        num = R.ppow(2 * kk.kstar());
      uint64_t den = 1;
      for (int i = 0; i < 3; ++i)
        if (S & (1 << i)) den = R.mul(den, X[i]);
      uint64_t term = R.mul(num, R.inv(den));
      acc = (bits % 2) ? R.sub(acc, term) : R.add(acc, term);
    }
    CHECK(got.value == acc);
  }
}

TEST_CASE("stabilized local factors from unit roots") {
  PadicRing R(5, 20);
  BalancedWeights kk(0, 0, 0);
  // three ordinary weight-zero systems: alphas are arbitrary units here
  std::array<PadicApprox, 3> al{PadicApprox(R.reduce(1), 20),
                                PadicApprox(R.reduce(2), 20),
                                PadicApprox(R.reduce(3), 20)};
  auto E = euler_E13(R, kk, al);
  for (int i = 0; i < 3; ++i) {
    int j = (i + 1) % 3, m = (i + 2) % 3;
    // E1 directly
    uint64_t e1 = R.sub(1, R.mul(al[i].value,
                                 R.inv(R.mul(al[j].value, al[m].value))));
    CHECK(E[i].E1.value == e1);
    // E2 via the product form: weight zero keeps every argument a unit
    std::array<uint64_t, 3> a, X;
    for (int t = 0; t < 3; ++t)
      a[t] = R.add(al[t].value, R.mul(5, R.inv(al[t].value)));
    X[i] = R.inv(al[i].value);
    X[j] = al[j].value;
    X[m] = al[m].value;
    uint64_t x123 = R.mul(R.mul(X[0], X[1]), X[2]);
    uint64_t e2 = R.neg(R.mul(
        R.mul(euler_Ep(R, kk, a, X).value, x123),
        R.inv(R.mul(al[j].value, al[m].value))));
    CHECK(E[i].E2.value == e2);
  }
}
