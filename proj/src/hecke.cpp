#include "qtp/hecke.hpp"

#include "qtp/nt.hpp"

namespace qtp {

std::vector<std::vector<CosetEntry>> hecke_coset_reps(const ClassSet& cs,
                                                      uint64_t ell) {
  if (!is_prime_u64(ell) || (cs.D * cs.N) % ell == 0)
    throw ValidationError("hecke prime must be prime to the level and discriminant");
  SplitData sp = split_order_at(cs.B, cs.order, ell, 1);
  std::vector<std::vector<CosetEntry>> out(cs.h());
  for (size_t x = 0; x < cs.h(); ++x) {
    for (uint64_t w = 0; w <= ell; ++w) {
      Lattice J = ideal_neighbor(cs.B, sp, cs.cls[x].ideal, w);
      Reduction red = reduce_ideal(cs.B, J, cs.avoid);
      CosetEntry e;
      e.w = w;
      bool resolved = false;
      for (size_t y = 0; y < cs.h() && !resolved; ++y) {
        auto eps = equivalence_witness(cs.B, cs.cls[y].ideal, red.ideal);
        if (!eps) continue;
        e.target = y;
        e.gamma = cs.B.mul(cs.B.inv(red.mult), *eps);
        resolved = true;
      }
      if (!resolved)
        throw ValidationError("neighbor does not reduce into the class list");
      if (!(lattice_lmul(cs.B, e.gamma, cs.cls[e.target].ideal) == J))
        throw ValidationError("coset witness failed exact verification");
      out[x].push_back(e);
    }
  }
  return out;
}

std::vector<std::vector<int64_t>> brandt_matrix(const ClassSet& cs, uint64_t ell) {
  auto reps = hecke_coset_reps(cs, ell);
  std::vector<std::vector<int64_t>> M(cs.h(), std::vector<int64_t>(cs.h(), 0));
  for (size_t x = 0; x < cs.h(); ++x)
    for (const CosetEntry& e : reps[x]) ++M[x][e.target];
  return M;
}

Mat2 coset_pi(uint64_t w, uint64_t ell, uint64_t modulus) {
  if (w > ell) throw ValidationError("projective label out of range");
  if (w < ell) return Mat2{ell % modulus, (modulus - w % modulus) % modulus, 0, 1};
  return Mat2{1, 0, 0, ell % modulus};
}

Mat2 mat2_reduce(const Mat2& x, uint64_t modulus) {
  return {x[0] % modulus, x[1] % modulus, x[2] % modulus, x[3] % modulus};
}

LocalUnit up_local_matrix(const PadicRing& R, const SplitData& sp,
                          const QuatAlgebra& B, const Quat& gamma, uint64_t w) {
  uint64_t p = R.p();
  if (sp.modulus != R.mod())
    throw ValidationError("p-neighbor splitting must use the working modulus");
  BigRat n = B.nrd(gamma);
  if (denominator(n) % BigInt(p) == 0 || numerator(n) % BigInt(p) != 0 ||
      numerator(n) % BigInt(p * p) == 0)
    throw ValidationError("p-neighbor step needs nrd(gamma) of valuation one");
  uint64_t small = R.ppow(R.W() - 1);
  BigInt num = (numerator(n) / BigInt(p)) % BigInt(small);
  if (num < 0) num += BigInt(small);
  BigInt den = denominator(n) % BigInt(small);
  uint64_t unit_inv = mulmod_u64(invmod_u64((uint64_t)num, small),
                                 (uint64_t)den, small);

  Mat2 X = mat2_mul(mat2_adj(split_apply(sp, gamma), R.mod()),
                    coset_pi(w, p, R.mod()), R.mod());
  LocalUnit out;
  out.prec = R.W() - 1;
  for (size_t t = 0; t < 4; ++t) {
    if (X[t] % p != 0)
      throw ValidationError("local quotient not integral: coset convention broken");
    out.m[t] = mulmod_u64((X[t] / p) % small, unit_inv, small);
  }
  return out;
}

LocalUnit unit_local_matrix(const PadicRing& R, const SplitData& sp,
                            const QuatAlgebra& B, const Quat& gamma) {
  if (sp.modulus != R.mod())
    throw ValidationError("transport splitting must use the working modulus");
  BigRat n = B.nrd(gamma);
  if (denominator(n) % BigInt(R.p()) == 0 || numerator(n) % BigInt(R.p()) == 0)
    throw ValidationError("transport element must have p-unit norm");
  LocalUnit out;
  out.prec = R.W();
  out.m = mat2_inv(split_apply(sp, gamma), R.mod(), R.p());
  return out;
}

LocalUnit neighbor_transport_matrix(const PadicRing& R, const SplitData& sp,
                                    const QuatAlgebra& B, const Quat& gamma,
                                    uint64_t ell) {
  uint64_t p = R.p();
  if (sp.modulus != R.mod())
    throw ValidationError("ell-neighbor splitting must use the working modulus");
  BigRat q = B.nrd(gamma) / BigRat(static_cast<int64_t>(ell));
  if (denominator(q) % BigInt(p) == 0 || numerator(q) % BigInt(p) == 0)
    throw ValidationError(
        "ell-neighbor step needs nrd(gamma) = ell times a p-unit");
  // ell * iota(gamma)^{-1} = adj(iota(gamma)) / (nrd(gamma)/ell)
  BigInt num = numerator(q) % BigInt(R.mod());
  if (num < 0) num += BigInt(R.mod());
  BigInt den = denominator(q) % BigInt(R.mod());
  uint64_t unit_inv = R.mul(R.inv((uint64_t)num), (uint64_t)den);
  LocalUnit out;
  out.prec = R.W();
  out.m = mat2_adj(split_apply(sp, gamma), R.mod());
  for (auto& c : out.m) c = R.mul(c, unit_inv);
  return out;
}

}  // namespace qtp
