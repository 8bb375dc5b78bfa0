#include <doctest.h>

#include <algorithm>

#include "qtp/classset.hpp"
#include "qtp/nt.hpp"

using namespace qtp;

TEST_CASE("one-class discriminants and their unit groups") {
  const std::pair<uint64_t, size_t> table[] = {
      {2, 24}, {3, 12}, {5, 6}, {7, 4}, {13, 2}};
  for (auto [D, units] : table) {
    ClassSet cs = build_class_set(D, 1);
    CHECK(cs.h() == 1);
    CHECK(cs.unit_count(0) == units);
    CHECK(cs.cls[0].nrd == 1);
    CHECK(cs.cls[0].ideal == cs.order);
    CHECK(cs.cls[0].left_order == cs.order);
    uint64_t phi = 1;
    for (auto& [q, e] : factorize(D)) phi *= q - 1;
    CHECK(class_mass(cs) == BigRat(BigInt(phi), BigInt(12)));
  }
}

TEST_CASE("two ideal classes at discriminant eleven") {
  ClassSet cs = build_class_set(11, 1);
  REQUIRE(cs.h() == 2);
  std::vector<size_t> units{cs.unit_count(0), cs.unit_count(1)};
  std::sort(units.begin(), units.end());
  CHECK(units == std::vector<size_t>{4, 6});
  CHECK(!equivalence_witness(cs.B, cs.cls[0].ideal, cs.cls[1].ideal).has_value());
  CHECK(!equivalence_witness(cs.B, cs.cls[1].ideal, cs.cls[0].ideal).has_value());
  for (const IdealClass& c : cs.cls) {
    for (const Quat& r : c.ideal.rows) CHECK(lattice_contains(cs.order, r));
    for (uint64_t q : cs.avoid) CHECK(c.nrd % BigInt(q) != 0);
    CHECK(is_order(cs.B, c.left_order));
  }
  // a nontrivial left translate of a representative stays in its class
  Quat g = cs.B.add(Quat::one(), cs.cls[1].ideal.rows[1]);
  Lattice moved = lattice_lmul(cs.B, g, cs.cls[1].ideal);
  Reduction red = reduce_ideal(cs.B, moved, cs.avoid);
  CHECK(equivalence_witness(cs.B, cs.cls[1].ideal, red.ideal).has_value());
  CHECK(!equivalence_witness(cs.B, cs.cls[0].ideal, red.ideal).has_value());
}

TEST_CASE("neighbors drop index ell^2 and scale the norm by ell") {
  ClassSet cs = build_class_set(2, 3);
  uint64_t ell = coprime_prime(2 * 3);
  CHECK(ell == 5);
  SplitData sp = split_order_at(cs.B, cs.order, ell, 1);
  const Lattice& I = cs.cls[0].ideal;
  std::vector<Lattice> nbs;
  for (uint64_t w = 0; w <= ell; ++w) {
    Lattice J = ideal_neighbor(cs.B, sp, I, w);
    CHECK(lattice_index(J, I) == BigRat(BigInt(ell * ell)));
    CHECK(ideal_nrd(cs.order, J) == BigInt(ell) * cs.cls[0].nrd);
    for (const Lattice& K : nbs) CHECK(!(K == J));
    nbs.push_back(J);
  }
  // two distinct neighbors span the whole ideal again
  CHECK(lattice_sum(nbs[0], nbs[1]) == I);
  CHECK(lattice_sum(nbs[2], nbs[(size_t)ell]) == I);
}

TEST_CASE("reduction lands on a prime-to-avoid norm in the same class") {
  ClassSet cs = build_class_set(11, 1);
  uint64_t ell = coprime_prime(11);
  SplitData sp = split_order_at(cs.B, cs.order, ell, 1);
  for (uint64_t w = 0; w <= ell; ++w) {
    Lattice J = ideal_neighbor(cs.B, sp, cs.cls[0].ideal, w);
    Reduction red = reduce_ideal(cs.B, J, cs.avoid);
    CHECK(red.ideal == lattice_lmul(cs.B, red.mult, J));
    BigInt n = ideal_nrd(cs.order, red.ideal);
    for (uint64_t q : cs.avoid) CHECK(n % BigInt(q) != 0);
    CHECK(equivalence_witness(cs.B, J, red.ideal).has_value());
    bool in0 = equivalence_witness(cs.B, cs.cls[0].ideal, red.ideal).has_value();
    bool in1 = equivalence_witness(cs.B, cs.cls[1].ideal, red.ideal).has_value();
    CHECK(in0 != in1);  // exactly one class matches
  }
}

TEST_CASE("mass identity certifies eichler class enumerations") {
  const std::pair<uint64_t, uint64_t> cases[] = {{2, 3}, {2, 5}, {3, 2},
                                                 {5, 2}, {7, 3}, {2, 15}};
  for (auto [D, N] : cases) {
    ClassSet cs = build_class_set(D, N);
    uint64_t phi = 1, psi = 1;
    for (auto& [q, e] : factorize(D)) phi *= q - 1;
    for (auto& [q, e] : factorize(N)) psi *= q + 1;
    CHECK(class_mass(cs) == BigRat(BigInt(phi) * BigInt(psi), BigInt(12)));
    CHECK(cs.h() >= 1);
    for (size_t i = 0; i < cs.h(); ++i)
      for (size_t j = i + 1; j < cs.h(); ++j)
        CHECK(!equivalence_witness(cs.B, cs.cls[i].ideal, cs.cls[j].ideal));
  }
}

TEST_CASE("class set construction is deterministic") {
  ClassSet a = build_class_set(2, 3);
  ClassSet b = build_class_set(2, 3);
  REQUIRE(a.h() == b.h());
  for (size_t i = 0; i < a.h(); ++i) {
    CHECK(a.cls[i].ideal == b.cls[i].ideal);
    CHECK(a.cls[i].units.size() == b.cls[i].units.size());
  }
}

TEST_CASE("class set input validation") {
  CHECK_THROWS_AS(build_class_set(2, 4), ValidationError);
  CHECK_THROWS_AS(build_class_set(3, 3), ValidationError);
  CHECK_THROWS_AS(build_class_set(6, 1), ValidationError);
  CHECK_THROWS_AS(build_class_set(2, 0), ValidationError);
}
