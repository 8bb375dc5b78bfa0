#include "qtp/order.hpp"

#include <algorithm>
#include <cmath>

#include "qtp/nt.hpp"
#include "qtp/psplit.hpp"

namespace qtp {

namespace {

BigInt fdiv(const BigInt& a, const BigInt& b) {
  BigInt q = a / b, r = a % b;
  if (r != 0 && ((r < 0) != (b < 0))) --q;
  return q;
}

using IRow = std::array<BigInt, 4>;

void row_sub(IRow& x, const IRow& y, const BigInt& q) {
  for (size_t t = 0; t < 4; ++t) x[t] -= q * y[t];
}

// Row HNF; input rows spanning a rank-4 sublattice of Z^4.
std::array<IRow, 4> hnf4(std::vector<IRow> M) {
  size_t r = 0;
  for (size_t col = 0; col < 4 && r < M.size(); ++col) {
    while (true) {
      size_t best = M.size();
      for (size_t s = r; s < M.size(); ++s) {
        if (M[s][col] == 0) continue;
        if (best == M.size() || abs(M[s][col]) < abs(M[best][col])) best = s;
      }
      if (best == M.size()) break;  // column is zero below r
      std::swap(M[r], M[best]);
      bool cleared = true;
      for (size_t s = r + 1; s < M.size(); ++s) {
        if (M[s][col] == 0) continue;
        row_sub(M[s], M[r], fdiv(M[s][col], M[r][col]));
        if (M[s][col] != 0) cleared = false;
      }
      if (cleared) break;
    }
    if (r < M.size() && M[r][col] != 0) {
      if (M[r][col] < 0)
        for (auto& v : M[r]) v = -v;
      for (size_t s = 0; s < r; ++s)
        row_sub(M[s], M[r], fdiv(M[s][col], M[r][col]));
      ++r;
    }
  }
  if (r != 4) throw ValidationError("lattice span has rank < 4");
  return {M[0], M[1], M[2], M[3]};
}

BigInt lcm_bi(const BigInt& a, const BigInt& b) { return a / gcd(a, b) * b; }

}  // namespace

Lattice lattice_from_rows(const std::vector<Quat>& rows) {
  BigInt den = 1;
  for (const Quat& q : rows)
    for (const BigRat& v : q.c) den = lcm_bi(den, denominator(v));
  std::vector<IRow> M;
  M.reserve(rows.size());
  for (const Quat& q : rows) {
    IRow r;
    for (size_t t = 0; t < 4; ++t)
      r[t] = numerator(q.c[t]) * (den / denominator(q.c[t]));
    M.push_back(r);
  }
  auto H = hnf4(std::move(M));
  Lattice L;
  for (size_t s = 0; s < 4; ++s)
    for (size_t t = 0; t < 4; ++t) L.rows[s].c[t] = BigRat(H[s][t], den);
  return L;
}

Lattice lattice_sum(const Lattice& a, const Lattice& b) {
  std::vector<Quat> rows(a.rows.begin(), a.rows.end());
  rows.insert(rows.end(), b.rows.begin(), b.rows.end());
  return lattice_from_rows(rows);
}

Lattice lattice_mul(const QuatAlgebra& B, const Lattice& a, const Lattice& b) {
  std::vector<Quat> rows;
  rows.reserve(16);
  for (const Quat& x : a.rows)
    for (const Quat& y : b.rows) rows.push_back(B.mul(x, y));
  return lattice_from_rows(rows);
}

Lattice lattice_scal(const BigRat& c, const Lattice& a) {
  if (c == 0) throw ValidationError("lattice scaled by zero");
  std::vector<Quat> rows;
  for (const Quat& x : a.rows) {
    Quat y;
    for (size_t t = 0; t < 4; ++t) y.c[t] = c * x.c[t];
    rows.push_back(y);
  }
  return lattice_from_rows(rows);
}

Lattice lattice_lmul(const QuatAlgebra& B, const Quat& g, const Lattice& a) {
  std::vector<Quat> rows;
  for (const Quat& x : a.rows) rows.push_back(B.mul(g, x));
  return lattice_from_rows(rows);
}

Lattice lattice_rmul(const QuatAlgebra& B, const Lattice& a, const Quat& g) {
  std::vector<Quat> rows;
  for (const Quat& x : a.rows) rows.push_back(B.mul(x, g));
  return lattice_from_rows(rows);
}

Lattice lattice_conj(const QuatAlgebra& B, const Lattice& a) {
  std::vector<Quat> rows;
  for (const Quat& x : a.rows) rows.push_back(B.conj(x));
  return lattice_from_rows(rows);
}

BigRat lattice_det(const Lattice& a) {
  // Gaussian elimination on a copy.
  std::array<std::array<BigRat, 4>, 4> m;
  for (size_t s = 0; s < 4; ++s)
    for (size_t t = 0; t < 4; ++t) m[s][t] = a.rows[s].c[t];
  BigRat det(1);
  for (size_t col = 0; col < 4; ++col) {
    size_t piv = col;
    while (piv < 4 && m[piv][col] == 0) ++piv;
    if (piv == 4) return BigRat(0);
    if (piv != col) {
      std::swap(m[piv], m[col]);
      det = -det;
    }
    det *= m[col][col];
    for (size_t s = col + 1; s < 4; ++s) {
      if (m[s][col] == 0) continue;
      BigRat f = m[s][col] / m[col][col];
      for (size_t t = col; t < 4; ++t) m[s][t] -= f * m[col][t];
    }
  }
  return det < 0 ? BigRat(-det) : det;
}

std::array<BigRat, 4> lattice_coords(const Lattice& a, const Quat& x) {
  // Solve c * basis = x by elimination on the transposed system.
  std::array<std::array<BigRat, 5>, 4> m;
  for (size_t t = 0; t < 4; ++t) {
    for (size_t s = 0; s < 4; ++s) m[t][s] = a.rows[s].c[t];
    m[t][4] = x.c[t];
  }
  for (size_t col = 0; col < 4; ++col) {
    size_t piv = col;
    while (piv < 4 && m[piv][col] == 0) ++piv;
    if (piv == 4) throw ValidationError("lattice basis singular");
    std::swap(m[piv], m[col]);
    for (size_t s = 0; s < 4; ++s) {
      if (s == col || m[s][col] == 0) continue;
      BigRat f = m[s][col] / m[col][col];
      for (size_t t = col; t < 5; ++t) m[s][t] -= f * m[col][t];
    }
  }
  std::array<BigRat, 4> c;
  for (size_t s = 0; s < 4; ++s) c[s] = m[s][4] / m[s][s];
  return c;
}

bool lattice_contains(const Lattice& a, const Quat& x) {
  for (const BigRat& c : lattice_coords(a, x))
    if (denominator(c) != 1) return false;
  return true;
}

BigRat lattice_index(const Lattice& sub, const Lattice& sup) {
  return lattice_det(sub) / lattice_det(sup);
}

BigInt exact_sqrt(const BigInt& n) {
  if (n < 0) throw ValidationError("square root of negative integer");
  BigInt s = sqrt(n);
  if (s * s != n) throw ValidationError("integer is not a perfect square");
  return s;
}

BigRat reduced_discriminant(const QuatAlgebra& B, const Lattice& L) {
  Lattice g;  // reuse det machinery on the Gram matrix rows
  for (size_t s = 0; s < 4; ++s)
    for (size_t t = 0; t < 4; ++t)
      g.rows[s].c[t] = B.trd(B.mul(L.rows[s], L.rows[t]));
  BigRat d = lattice_det(g);
  return BigRat(exact_sqrt(numerator(d)), exact_sqrt(denominator(d)));
}

bool is_order(const QuatAlgebra& B, const Lattice& L) {
  if (!lattice_contains(L, Quat::one())) return false;
  for (const Quat& x : L.rows) {
    if (denominator(B.trd(x)) != 1 || denominator(B.nrd(x)) != 1) return false;
    for (const Quat& y : L.rows)
      if (!lattice_contains(L, B.mul(x, y))) return false;
  }
  return true;
}

namespace {

// Multiplicative closure of a lattice containing the rows of L.
Lattice close_under_mul(const QuatAlgebra& B, Lattice L) {
  for (int iter = 0; iter < 12; ++iter) {
    Lattice P = lattice_mul(B, L, L);
    Lattice next = lattice_sum(L, P);
    if (next == L) return L;
    L = next;
  }
  throw ValidationError("multiplicative closure did not stabilize");
}

}  // namespace

Lattice maximal_order(const QuatAlgebra& B) {
  std::vector<Quat> std_rows(4);
  for (size_t t = 0; t < 4; ++t) std_rows[t].c[t] = 1;
  Lattice O = lattice_from_rows(std_rows);
  BigRat D(BigInt(B.disc));

  while (true) {
    BigRat d = reduced_discriminant(B, O);
    if (d == D) break;
    BigRat f = d / D;
    if (denominator(f) != 1)
      throw ValidationError("order discriminant not a multiple of disc(B)");
    uint64_t q = (uint64_t)factorize((uint64_t)numerator(f)).front().first;
    if (q > 50) throw ValidationError("saturation prime out of desk range");

    bool improved = false;
    std::array<uint64_t, 4> c{0, 0, 0, 0};
    while (!improved) {
      // next candidate vector over [0,q)^4, skipping zero
      size_t t = 0;
      while (t < 4 && c[t] == q - 1) c[t++] = 0;
      if (t == 4) break;
      ++c[t];
      Quat x;
      for (size_t s = 0; s < 4; ++s)
        x = B.add(x, B.scal(BigRat(BigInt(c[s]), BigInt(q)), O.rows[s]));
      if (denominator(B.trd(x)) != 1 || denominator(B.nrd(x)) != 1) continue;
      Lattice M;
      try {
        M = close_under_mul(B, lattice_sum(O, lattice_from_rows(
                                                  {x, O.rows[0], O.rows[1],
                                                   O.rows[2], O.rows[3]})));
      } catch (const ValidationError&) {
        continue;
      }
      bool integral = true;
      for (const Quat& y : M.rows)
        if (denominator(B.trd(y)) != 1 || denominator(B.nrd(y)) != 1) {
          integral = false;
          break;
        }
      if (!integral) continue;
      if (reduced_discriminant(B, M) < d) {
        O = M;
        improved = true;
      }
    }
    if (!improved)
      throw ValidationError("saturation found no enlargement at a bad prime");
  }
  if (!is_order(B, O)) throw ValidationError("maximal order construction failed");
  return O;
}

Lattice eichler_order(const QuatAlgebra& B, const Lattice& Omax, uint64_t N) {
  if (N == 0) throw ValidationError("level must be positive");
  if (gcd(BigInt(N), BigInt(B.disc)) != 1)
    throw ValidationError("level must be coprime to the discriminant");
  if (!is_squarefree(N)) throw ValidationError("level must be squarefree");
  Lattice O = Omax;
  for (auto& [q, e] : factorize(N)) {
    SplitData sp = split_order_at(B, Omax, q, 1);
    // Linear form: lower-left entry of the local image, on O-coordinates.
    std::array<uint64_t, 4> f;
    for (size_t t = 0; t < 4; ++t)
      f[t] = split_apply(sp, O.rows[t])[2];
    size_t t0 = 4;
    for (size_t t = 0; t < 4; ++t)
      if (f[t] % q != 0) t0 = t;
    if (t0 == 4) throw ValidationError("local splitting degenerate at level prime");
    uint64_t inv = invmod_u64(f[t0] % q, q);
    std::vector<Quat> rows;
    for (size_t t = 0; t < 4; ++t) {
      if (t == t0) {
        rows.push_back(B.scal(BigRat(BigInt(q)), O.rows[t]));
      } else {
        uint64_t m = mulmod_u64(f[t] % q, inv, q);
        rows.push_back(B.sub(O.rows[t], B.scal(BigRat(BigInt(m)), O.rows[t0])));
      }
    }
    O = lattice_from_rows(rows);
  }
  if (lattice_index(O, Omax) != BigRat(BigInt(N)))
    throw ValidationError("eichler order has wrong index");
  if (!is_order(B, O)) throw ValidationError("eichler construction not an order");
  return O;
}

namespace {

BigInt round_rat(const BigRat& x) {
  // nearest integer, ties toward +infinity
  BigInt n = numerator(x), d = denominator(x);
  return fdiv(2 * n + d, 2 * d);
}

struct GS {
  std::array<std::array<BigRat, 4>, 4> mu;  // mu[i][j], j < i
  std::array<BigRat, 4> Bstar;              // squared GS norms
};

GS gram_schmidt(const std::array<std::array<BigRat, 4>, 4>& G) {
  GS gs;
  for (size_t i = 0; i < 4; ++i) {
    for (size_t j = 0; j < i; ++j) {
      BigRat s = G[i][j];
      for (size_t l = 0; l < j; ++l) s -= gs.mu[i][l] * gs.mu[j][l] * gs.Bstar[l];
      gs.mu[i][j] = s / gs.Bstar[j];
    }
    BigRat b = G[i][i];
    for (size_t l = 0; l < i; ++l) b -= gs.mu[i][l] * gs.mu[i][l] * gs.Bstar[l];
    gs.Bstar[i] = b;
    if (b <= 0) throw ValidationError("norm form not positive definite");
  }
  return gs;
}

std::array<std::array<BigRat, 4>, 4> gram_of(const QuatAlgebra& B,
                                             const std::array<Quat, 4>& rows) {
  std::array<std::array<BigRat, 4>, 4> G;
  for (size_t s = 0; s < 4; ++s)
    for (size_t t = 0; t < 4; ++t)
      G[s][t] = B.trd(B.mul(rows[s], B.conj(rows[t]))) / 2;
  return G;
}

// Textbook LLL (delta = 3/4) on the quaternion rows under the norm form.
void lll_reduce(const QuatAlgebra& B, std::array<Quat, 4>& rows) {
  auto G = gram_of(B, rows);
  GS gs = gram_schmidt(G);
  size_t k = 1;
  int guard = 0;
  while (k < 4) {
    if (++guard > 10000) throw ValidationError("LLL did not terminate");
    for (size_t j = k; j-- > 0;) {
      BigInt r = round_rat(gs.mu[k][j]);
      if (r != 0) {
        rows[k] = B.sub(rows[k], B.scal(BigRat(r), rows[j]));
        G = gram_of(B, rows);
        gs = gram_schmidt(G);
      }
    }
    BigRat lhs = gs.Bstar[k];
    BigRat rhs = (BigRat(3, 4) - gs.mu[k][k - 1] * gs.mu[k][k - 1]) * gs.Bstar[k - 1];
    if (lhs >= rhs) {
      ++k;
    } else {
      std::swap(rows[k], rows[k - 1]);
      G = gram_of(B, rows);
      gs = gram_schmidt(G);
      k = k > 1 ? k - 1 : 1;
    }
  }
}

void enumerate_rec(const GS& gs, int level, std::array<BigInt, 4>& x,
                   const BigRat& remaining, std::vector<std::array<BigInt, 4>>& out,
                   size_t cap, bool collect_all) {
  if (level < 0) {
    if (remaining == 0) {
      bool nonzero = false;
      for (const BigInt& v : x) nonzero = nonzero || v != 0;
      if (nonzero) out.push_back(x);
    }
    return;
  }
  // center depends on the already-fixed outer coordinates
  BigRat c(0);
  for (int j = level + 1; j < 4; ++j)
    c -= gs.mu[(size_t)j][(size_t)level] * BigRat(x[(size_t)j]);
  double bound = std::sqrt(std::max(
      0.0, BigRat(remaining / gs.Bstar[(size_t)level]).convert_to<double>()));
  double cd = c.convert_to<double>();
  BigInt lo((long long)std::floor(cd - bound - 1.0));
  BigInt hi((long long)std::ceil(cd + bound + 1.0));
  for (BigInt v = lo; v <= hi; ++v) {
    BigRat diff = BigRat(v) - c;
    BigRat used = gs.Bstar[(size_t)level] * diff * diff;
    if (used > remaining) continue;
    x[(size_t)level] = v;
    enumerate_rec(gs, level - 1, x, remaining - used, out, cap, collect_all);
    if (!collect_all && !out.empty()) return;
    if (out.size() >= cap) throw ValidationError("short-vector enumeration cap hit");
  }
  x[(size_t)level] = 0;
}

}  // namespace

std::vector<Quat> lattice_vectors_with_norm(const QuatAlgebra& B, const Lattice& L,
                                            const BigRat& target, bool collect_all,
                                            size_t cap) {
  if (target <= 0) throw ValidationError("norm target must be positive");
  std::array<Quat, 4> rows = L.rows;
  lll_reduce(B, rows);
  GS gs = gram_schmidt(gram_of(B, rows));
  std::vector<std::array<BigInt, 4>> sols;
  std::array<BigInt, 4> x{};
  enumerate_rec(gs, 3, x, target, sols, cap, collect_all);
  std::vector<Quat> out;
  for (auto s : sols) {
    // keep one of each +-pair: highest nonzero coordinate positive
    int top = 3;
    while (top >= 0 && s[(size_t)top] == 0) --top;
    if (top >= 0 && s[(size_t)top] < 0) {
      if (collect_all) continue;       // the mirror copy is also enumerated
      for (auto& v : s) v = -v;        // single-witness mode: normalise sign
    }
    Quat v;
    for (size_t t = 0; t < 4; ++t) v = B.add(v, B.scal(BigRat(s[t]), rows[t]));
    if (B.nrd(v) != target) throw ValidationError("enumeration produced wrong norm");
    out.push_back(v);
  }
  return out;
}

}  // namespace qtp
