#include "qtp/classset.hpp"

#include <deque>
#include <numeric>

#include "qtp/nt.hpp"

namespace qtp {

namespace {

/* nrd(I) for an integral locally principal ideal, without its order: the gcd
 * of the values of the norm form on the lattice (the form divided by nrd(I)
 * is primitive at every prime). */
BigInt ideal_norm_content(const QuatAlgebra& B, const Lattice& I) {
  BigInt g = 0;
  auto feed = [&](const Quat& x) {
    BigRat n = B.nrd(x);
    if (denominator(n) != 1)
      throw ValidationError("norm content needs an integral lattice");
    g = gcd(g, numerator(n));
  };
  for (size_t s = 0; s < 4; ++s) {
    feed(I.rows[s]);
    for (size_t t = s + 1; t < 4; ++t) feed(B.add(I.rows[s], I.rows[t]));
  }
  return g;
}

}  // namespace

BigInt ideal_nrd(const Lattice& O, const Lattice& I) {
  BigRat idx = lattice_index(I, O);
  if (denominator(idx) != 1)
    throw ValidationError("ideal is not contained in the order");
  return exact_sqrt(numerator(idx));
}

uint64_t coprime_prime(uint64_t n) {
  for (uint64_t q = 2;; ++q)
    if (is_prime_u64(q) && n % q != 0) return q;
}

Lattice ideal_neighbor(const QuatAlgebra& B, const SplitData& sp, const Lattice& I,
                       uint64_t w) {
  uint64_t ell = sp.q;
  if (sp.modulus != ell) throw ValidationError("neighbor splitting needs m = 1");
  if (w > ell) throw ValidationError("projective label out of range");
  uint64_t w0 = w < ell ? 1 : 0, w1 = w < ell ? w : 1;

  // row covector w * iota(basis element), as a 2x4 system over F_ell
  uint64_t A[2][4];
  for (size_t t = 0; t < 4; ++t) {
    Mat2 M = split_apply(sp, I.rows[t]);
    A[0][t] = (mulmod_u64(w0, M[0], ell) + mulmod_u64(w1, M[2], ell)) % ell;
    A[1][t] = (mulmod_u64(w0, M[1], ell) + mulmod_u64(w1, M[3], ell)) % ell;
  }
  // kernel of c -> A c by elimination
  size_t piv_col[2] = {4, 4};
  size_t rank = 0;
  for (size_t col = 0; col < 4 && rank < 2; ++col) {
    size_t pr = rank;
    while (pr < 2 && A[pr][col] == 0) ++pr;
    if (pr == 2) continue;
    std::swap(A[pr], A[rank]);
    uint64_t inv = invmod_u64(A[rank][col], ell);
    for (size_t t = 0; t < 4; ++t) A[rank][t] = mulmod_u64(A[rank][t], inv, ell);
    for (size_t r = 0; r < 2; ++r) {
      if (r == rank || A[r][col] == 0) continue;
      uint64_t f = A[r][col];
      for (size_t t = 0; t < 4; ++t)
        A[r][t] = (A[r][t] + ell * ell - mulmod_u64(f, A[rank][t], ell)) % ell;
    }
    piv_col[rank++] = col;
  }
  if (rank != 2)
    throw ValidationError("neighbor congruence is degenerate at the prime");

  std::vector<Quat> rows;
  for (size_t t = 0; t < 4; ++t) {
    bool is_piv = t == piv_col[0] || t == piv_col[1];
    if (is_piv) continue;
    // free column t: kernel vector with c_t = 1, pivots balancing
    Quat x = I.rows[t];
    for (size_t r = 0; r < 2; ++r)
      x = B.sub(x, B.scal(BigRat(BigInt(A[r][t])), I.rows[piv_col[r]]));
    rows.push_back(x);
  }
  for (size_t t = 0; t < 4; ++t)
    rows.push_back(B.scal(BigRat(BigInt(ell)), I.rows[t]));
  Lattice J = lattice_from_rows(rows);
  if (lattice_index(J, I) != BigRat(BigInt(ell) * BigInt(ell)))
    throw ValidationError("neighbor has unexpected index");
  return J;
}

Reduction reduce_ideal(const QuatAlgebra& B, const Lattice& I,
                       const std::vector<uint64_t>& avoid) {
  BigInt n = ideal_norm_content(B, I);
  for (uint64_t m = 1; m <= 200; ++m) {
    bool ok = true;
    for (uint64_t q : avoid) ok = ok && m % q != 0;
    if (!ok) continue;
    auto v = lattice_vectors_with_norm(B, I, BigRat(n * m), false);
    if (v.empty()) continue;
    Quat mult = B.scal(BigRat(BigInt(1), n), B.conj(v[0]));
    Reduction red{lattice_lmul(B, mult, I), mult};
    return red;
  }
  throw ValidationError(
      "ideal reduction found no representative of prime-to-avoid norm below "
      "the search bound 200");
}

std::optional<Quat> equivalence_witness(const QuatAlgebra& B, const Lattice& I,
                                        const Lattice& J) {
  // If J = gamma I then gamma nrd(I) lies in J * conj(I) and has reduced norm
  // nrd(I) nrd(J); test every candidate of that norm exactly.
  BigInt ni = ideal_norm_content(B, I), nj = ideal_norm_content(B, J);
  Lattice M = lattice_mul(B, J, lattice_conj(B, I));
  auto cands = lattice_vectors_with_norm(B, M, BigRat(ni * nj), true);
  for (const Quat& x : cands) {
    Quat gamma = B.scal(BigRat(BigInt(1), ni), x);
    if (lattice_lmul(B, gamma, I) == J) return gamma;
  }
  return std::nullopt;
}

Lattice left_order(const QuatAlgebra& B, const Lattice& I) {
  BigInt n = ideal_norm_content(B, I);
  return lattice_scal(BigRat(BigInt(1), n), lattice_mul(B, I, lattice_conj(B, I)));
}

BigRat class_mass(const ClassSet& cs) {
  BigRat m(0);
  for (size_t x = 0; x < cs.h(); ++x)
    m += BigRat(BigInt(2), BigInt((uint64_t)cs.unit_count(x)));
  return m;
}

ClassSet build_class_set(uint64_t D, uint64_t N) {
  if (N == 0 || !is_squarefree(N) || (N > 1 && std::gcd(D, N) != 1))
    throw ValidationError("level must be squarefree and coprime to the discriminant");
  ClassSet cs;
  cs.B = build_algebra(D);
  cs.D = D;
  cs.N = N;
  Lattice Omax = maximal_order(cs.B);
  cs.order = eichler_order(cs.B, Omax, N);

  cs.avoid = {2, 3, 5, 7};
  for (auto& [q, e] : factorize(D * N))
    if (q > 7) cs.avoid.push_back(q);

  uint64_t ell = coprime_prime(D * N);
  SplitData sp = split_order_at(cs.B, cs.order, ell, 1);

  auto close_class = [&](const Lattice& ideal) {
    IdealClass c;
    c.ideal = ideal;
    c.nrd = ideal_nrd(cs.order, ideal);
    c.left_order = left_order(cs.B, ideal);
    c.units = lattice_vectors_with_norm(cs.B, c.left_order, BigRat(1), true);
    return c;
  };

  cs.cls.push_back(close_class(cs.order));
  std::deque<size_t> queue{0};
  while (!queue.empty()) {
    size_t x = queue.front();
    queue.pop_front();
    for (uint64_t w = 0; w <= ell; ++w) {
      Lattice J = ideal_neighbor(cs.B, sp, cs.cls[x].ideal, w);
      Reduction red = reduce_ideal(cs.B, J, cs.avoid);
      bool known = false;
      for (const IdealClass& c : cs.cls)
        if (equivalence_witness(cs.B, c.ideal, red.ideal)) {
          known = true;
          break;
        }
      if (!known) {
        cs.cls.push_back(close_class(red.ideal));
        queue.push_back(cs.cls.size() - 1);
        if (cs.cls.size() > 256)
          throw ValidationError("class set larger than the desk-scale bound");
      }
    }
  }

  // the exact mass identity certifies the walk saw every class
  uint64_t phi = 1, psi = 1;
  for (auto& [q, e] : factorize(D)) phi *= q - 1;
  for (auto& [q, e] : factorize(N)) psi *= q + 1;
  if (class_mass(cs) != BigRat(BigInt(phi) * BigInt(psi), BigInt(12)))
    throw ValidationError("class enumeration failed the mass identity");
  return cs;
}

}  // namespace qtp
