#include "qtp/psplit.hpp"

#include <stdexcept>

#include "qtp/nt.hpp"

namespace qtp {

Mat2 mat2_mul(const Mat2& x, const Mat2& y, uint64_t mod) {
  auto mm = [mod](uint64_t a, uint64_t b) { return mulmod_u64(a, b, mod); };
  return {(mm(x[0], y[0]) + mm(x[1], y[2])) % mod,
          (mm(x[0], y[1]) + mm(x[1], y[3])) % mod,
          (mm(x[2], y[0]) + mm(x[3], y[2])) % mod,
          (mm(x[2], y[1]) + mm(x[3], y[3])) % mod};
}

Mat2 mat2_add(const Mat2& x, const Mat2& y, uint64_t mod) {
  return {(x[0] + y[0]) % mod, (x[1] + y[1]) % mod, (x[2] + y[2]) % mod,
          (x[3] + y[3]) % mod};
}

uint64_t mat2_det(const Mat2& x, uint64_t mod) {
  uint64_t ad = mulmod_u64(x[0], x[3], mod);
  uint64_t bc = mulmod_u64(x[1], x[2], mod);
  return (ad + mod - bc) % mod;
}

uint64_t mat2_tr(const Mat2& x, uint64_t mod) { return (x[0] + x[3]) % mod; }

Mat2 mat2_scal(uint64_t c, const Mat2& x, uint64_t mod) {
  return {mulmod_u64(c, x[0], mod), mulmod_u64(c, x[1], mod),
          mulmod_u64(c, x[2], mod), mulmod_u64(c, x[3], mod)};
}

Mat2 mat2_adj(const Mat2& x, uint64_t mod) {
  return {x[3], (mod - x[1]) % mod, (mod - x[2]) % mod, x[0]};
}

Mat2 mat2_inv(const Mat2& x, uint64_t mod, uint64_t q) {
  uint64_t d = mat2_det(x, mod);
  if (d % q == 0) throw ValidationError("matrix not invertible at q");
  return mat2_scal(invmod_u64(d, mod), mat2_adj(x, mod), mod);
}

namespace {

using Vec4 = std::array<uint64_t, 4>;

uint64_t rat_mod(const BigRat& r, uint64_t mod, uint64_t q) {
  BigInt n = numerator(r) % BigInt(mod), d = denominator(r) % BigInt(mod);
  if (n < 0) n += BigInt(mod);
  uint64_t nu = (uint64_t)n, du = (uint64_t)d;
  if (du % q == 0) throw ValidationError("denominator not prime to q");
  return mulmod_u64(nu, invmod_u64(du, mod), mod);
}

struct LocalRing {
  uint64_t mod;
  uint64_t q;
  // structure constants: basis_s * basis_t = sum_u S[s][t][u] basis_u
  uint64_t S[4][4][4];
  Vec4 one;
  Vec4 trd_b;

  Vec4 mul(const Vec4& a, const Vec4& b) const {
    Vec4 r{0, 0, 0, 0};
    for (size_t s = 0; s < 4; ++s) {
      if (a[s] == 0) continue;
      for (size_t t = 0; t < 4; ++t) {
        if (b[t] == 0) continue;
        uint64_t c = mulmod_u64(a[s], b[t], mod);
        for (size_t u = 0; u < 4; ++u)
          r[u] = (r[u] + mulmod_u64(c, S[s][t][u], mod)) % mod;
      }
    }
    return r;
  }
  Vec4 scal(uint64_t c, const Vec4& a) const {
    return {mulmod_u64(c, a[0], mod), mulmod_u64(c, a[1], mod),
            mulmod_u64(c, a[2], mod), mulmod_u64(c, a[3], mod)};
  }
  Vec4 add(const Vec4& a, const Vec4& b) const {
    return {(a[0] + b[0]) % mod, (a[1] + b[1]) % mod, (a[2] + b[2]) % mod,
            (a[3] + b[3]) % mod};
  }
  Vec4 sub(const Vec4& a, const Vec4& b) const {
    return {(a[0] + mod - b[0]) % mod, (a[1] + mod - b[1]) % mod,
            (a[2] + mod - b[2]) % mod, (a[3] + mod - b[3]) % mod};
  }
  uint64_t trd(const Vec4& a) const {
    uint64_t s = 0;
    for (size_t t = 0; t < 4; ++t) s = (s + mulmod_u64(a[t], trd_b[t], mod)) % mod;
    return s;
  }
};

bool vec_eq_mod(const Vec4& a, const Vec4& b, uint64_t m) {
  for (size_t t = 0; t < 4; ++t)
    if (a[t] % m != b[t] % m) return false;
  return true;
}

}  // namespace

SplitData split_order_at(const QuatAlgebra& B, const Lattice& O, uint64_t q,
                         int m) {
  if (m < 1) throw ValidationError("splitting precision must be positive");
  if (B.disc % q == 0)
    throw ValidationError("algebra is ramified at the splitting prime");
  uint64_t mod = 1;
  for (int i = 0; i < m; ++i) {
    if (mod > (uint64_t(1) << 62) / q)
      throw ValidationError("splitting modulus exceeds 62 bits");
    mod *= q;
  }

  LocalRing R;
  R.mod = mod;
  R.q = q;
  for (size_t s = 0; s < 4; ++s) {
    BigRat tr = B.trd(O.rows[s]);
    if (denominator(tr) != 1) throw ValidationError("basis trace not integral");
    R.trd_b[s] = rat_mod(tr, mod, q);
    for (size_t t = 0; t < 4; ++t) {
      auto co = lattice_coords(O, B.mul(O.rows[s], O.rows[t]));
      for (size_t u = 0; u < 4; ++u) {
        if (denominator(co[u]) != 1)
          throw ValidationError("lattice is not a ring");
        R.S[s][t][u] = rat_mod(co[u], mod, q);
      }
    }
  }
  {
    auto co = lattice_coords(O, Quat::one());
    for (size_t u = 0; u < 4; ++u) R.one[u] = rat_mod(co[u], mod, q);
  }

  // nontrivial idempotent mod q, first in lexicographic order
  Vec4 e{0, 0, 0, 0};
  bool found = false;
  for (uint64_t c3 = 0; c3 < q && !found; ++c3)
    for (uint64_t c2 = 0; c2 < q && !found; ++c2)
      for (uint64_t c1 = 0; c1 < q && !found; ++c1)
        for (uint64_t c0 = 0; c0 < q && !found; ++c0) {
          Vec4 cand{c0, c1, c2, c3};
          if (vec_eq_mod(cand, Vec4{0, 0, 0, 0}, q)) continue;
          if (vec_eq_mod(cand, R.one, q)) continue;
          if (R.trd(cand) % q != 1 % q) continue;
          if (!vec_eq_mod(R.mul(cand, cand), cand, q)) continue;
          e = cand;
          found = true;
        }
  if (!found) throw ValidationError("no idempotent found: order not split at q");

  // Hensel: e <- 3e^2 - 2e^3 doubles the precision each pass
  for (int guard = 0; !vec_eq_mod(R.mul(e, e), e, mod); ++guard) {
    if (guard > 64) throw ValidationError("idempotent lift did not converge");
    Vec4 e2 = R.mul(e, e);
    Vec4 e3 = R.mul(e2, e);
    e = R.sub(R.scal(3 % mod, e2), R.scal(2 % mod, e3));
  }

  // basis (e, z*e) of the left ideal R*e, z picked so the pair has rank 2 mod q
  Vec4 ze{0, 0, 0, 0};
  size_t r1 = 4, r2 = 4;
  for (size_t zi = 0; zi < 4 && r1 == 4; ++zi) {
    Vec4 z{0, 0, 0, 0};
    z[zi] = 1;
    Vec4 cand = R.mul(z, e);
    for (size_t a = 0; a < 4 && r1 == 4; ++a)
      for (size_t b = a + 1; b < 4 && r1 == 4; ++b) {
        uint64_t det = (mulmod_u64(e[a], cand[b], mod) + mod -
                        mulmod_u64(e[b], cand[a], mod)) %
                       mod;
        if (det % q != 0) {
          r1 = a;
          r2 = b;
          ze = cand;
        }
      }
  }
  if (r1 == 4) throw ValidationError("left ideal basis search failed");

  Mat2 A{e[r1], ze[r1], e[r2], ze[r2]};
  Mat2 Ainv = mat2_inv(A, mod, q);

  SplitData sp;
  sp.q = q;
  sp.m = m;
  sp.modulus = mod;
  sp.order = O;
  for (size_t t = 0; t < 4; ++t) {
    Vec4 x{0, 0, 0, 0};
    x[t] = 1;
    Vec4 xe = R.mul(x, e);
    Vec4 xze = R.mul(x, ze);
    // solve columns of the matrix of left multiplication on (e, ze)
    auto solve_col = [&](const Vec4& rhs) {
      uint64_t u1 = (mulmod_u64(Ainv[0], rhs[r1], mod) +
                     mulmod_u64(Ainv[1], rhs[r2], mod)) %
                    mod;
      uint64_t u2 = (mulmod_u64(Ainv[2], rhs[r1], mod) +
                     mulmod_u64(Ainv[3], rhs[r2], mod)) %
                    mod;
      for (size_t r = 0; r < 4; ++r) {
        uint64_t lhs =
            (mulmod_u64(e[r], u1, mod) + mulmod_u64(ze[r], u2, mod)) % mod;
        if (lhs != rhs[r] % mod)
          throw ValidationError("left ideal is not free of rank 2");
      }
      return std::pair<uint64_t, uint64_t>(u1, u2);
    };
    auto [m11, m21] = solve_col(xe);
    auto [m12, m22] = solve_col(xze);
    sp.img[t] = Mat2{m11, m12, m21, m22};
  }

  // unit must map to the identity
  Mat2 id{0, 0, 0, 0};
  for (size_t t = 0; t < 4; ++t)
    id = mat2_add(id, mat2_scal(R.one[t], sp.img[t], mod), mod);
  if (!(id[0] == 1 % mod && id[1] == 0 && id[2] == 0 && id[3] == 1 % mod))
    throw ValidationError("splitting does not send 1 to the identity");
  return sp;
}

Mat2 split_apply(const SplitData& sp, const Quat& x) {
  auto co = lattice_coords(sp.order, x);
  Mat2 r{0, 0, 0, 0};
  for (size_t t = 0; t < 4; ++t) {
    uint64_t c = rat_mod(co[t], sp.modulus, sp.q);
    r = mat2_add(r, mat2_scal(c, sp.img[t], sp.modulus), sp.modulus);
  }
  return r;
}

}  // namespace qtp
