#include "qtp/forms.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <sstream>

#include "qtp/nt.hpp"

namespace qtp {

namespace {

uint64_t bigint_mod_u64(const BigInt& n, uint64_t mod) {
  BigInt r = n % BigInt(mod);
  if (r < 0) r += mod;
  return r.convert_to<uint64_t>();
}

void require(bool ok, const char* msg) {
  if (!ok) throw ValidationError(msg);
}

}  // namespace

HeckeContext::HeckeContext(const PadicRing& R, const ClassSet& cs)
    : R_(&R), cs_(&cs) {
  require(cs.D % R.p() != 0 && cs.N % R.p() != 0,
          "p must not divide the discriminant or the level");
  sp_ = split_order_at(cs.B, cs.order, R.p(), R.W());
  stab_.resize(cs.h());
  nrd_units_.resize(cs.h());
  for (size_t x = 0; x < cs.h(); ++x) {
    for (const Quat& u : cs.cls[x].units)
      stab_[x].push_back(unit_local_matrix(R, sp_, cs.B, u));
    nrd_units_[x] = bigint_mod_u64(cs.cls[x].nrd, R.mod());
    require(nrd_units_[x] % R.p() != 0, "class representative norm not a p-unit");
  }
}

namespace {

// true when every entry of a*b is divisible by p: the two-step composite is
// p times a unit matrix exactly when the second step reverses the first
bool composite_drops(const Mat2& a, const Mat2& b, uint64_t p) {
  Mat2 am, bm;
  for (int i = 0; i < 4; ++i) {
    am[i] = a[i] % p;
    bm[i] = b[i] % p;
  }
  Mat2 ab{am[0] * bm[0] + am[1] * bm[2], am[0] * bm[1] + am[1] * bm[3],
          am[2] * bm[0] + am[3] * bm[2], am[2] * bm[1] + am[3] * bm[3]};
  for (uint64_t c : ab)
    if (c % p != 0) return false;
  return true;
}

}  // namespace

const HeckeLocal& HeckeContext::local(uint64_t ell) {
  auto it = tables_.find(ell);
  if (it != tables_.end()) return it->second;
  HeckeLocal tab;
  tab.ell = ell;
  tab.cosets = hecke_coset_reps(*cs_, ell);
  tab.locals.resize(cs_->h());
  for (size_t x = 0; x < cs_->h(); ++x)
    for (const CosetEntry& e : tab.cosets[x])
      tab.locals[x].push_back(
          neighbor_transport_matrix(*R_, sp_, cs_->B, e.gamma, ell));
  if (ell == R_->p()) {
    // edge reversal: the unique step back whose composite transport is
    // divisible by p (then the product of the two witnesses is p times a
    // stabilizer unit of the starting class)
    tab.back.resize(cs_->h());
    for (size_t x = 0; x < cs_->h(); ++x) {
      for (size_t L = 0; L < tab.cosets[x].size(); ++L) {
        size_t y = tab.cosets[x][L].target;
        size_t found = tab.cosets[y].size();
        for (size_t L2 = 0; L2 < tab.cosets[y].size(); ++L2) {
          if (tab.cosets[y][L2].target != x) continue;
          // second-step transport times first-step transport: the order in
          // which the dual action composes along the path
          if (!composite_drops(tab.locals[y][L2].m, tab.locals[x][L].m,
                               R_->p()))
            continue;
          if (found != tab.cosets[y].size())
            throw ValidationError("p-neighbor reversal is not unique");
          found = L2;
        }
        if (found == tab.cosets[y].size())
          throw ValidationError("p-neighbor step has no reversal");
        tab.back[x].push_back(found);
      }
    }
  }
  return tables_.emplace(ell, std::move(tab)).first->second;
}

QuatModFormV form_zero(const PadicRing& R, const ClassSet& cs, int k,
                       bool level_p) {
  QuatModFormV f;
  f.k = k;
  f.level_p = level_p;
  size_t n = level_p ? cs.h() * (R.p() + 1) : cs.h();
  f.vals.assign(n, SymVec::zero(R, k));
  return f;
}

// storage slot of the (class, label) pair at level p
static size_t fiber_at(const PadicRing& R, size_t x, size_t L) {
  return x * (R.p() + 1) + L;
}

QuatModFormV form_add(const PadicRing& R, const QuatModFormV& f,
                      const QuatModFormV& g) {
  require(f.k == g.k && f.level_p == g.level_p && f.vals.size() == g.vals.size(),
          "form shape mismatch");
  QuatModFormV out = f;
  for (size_t x = 0; x < f.vals.size(); ++x)
    out.vals[x] = sym_add(R, f.vals[x], g.vals[x]);
  return out;
}

QuatModFormV form_sub(const PadicRing& R, const QuatModFormV& f,
                      const QuatModFormV& g) {
  require(f.k == g.k && f.level_p == g.level_p && f.vals.size() == g.vals.size(),
          "form shape mismatch");
  QuatModFormV out = f;
  for (size_t x = 0; x < f.vals.size(); ++x)
    out.vals[x] = sym_sub(R, f.vals[x], g.vals[x]);
  return out;
}

QuatModFormV form_scal(const PadicRing& R, uint64_t c, const QuatModFormV& f) {
  QuatModFormV out = f;
  for (auto& v : out.vals) v = sym_scal(R, c, v);
  return out;
}

bool form_is_zero(const PadicRing& R, const QuatModFormV& f) {
  for (const auto& v : f.vals)
    if (!sym_is_zero(R, v)) return false;
  return true;
}

int form_residual_valuation(const PadicRing& R, const QuatModFormV& f,
                            const QuatModFormV& g) {
  require(f.k == g.k && f.vals.size() == g.vals.size(), "form shape mismatch");
  int best = 1 << 20;
  for (size_t x = 0; x < f.vals.size(); ++x)
    best = std::min(best, sym_residual_valuation(R, f.vals[x], g.vals[x]));
  return best;
}

QuatModFormV project_invariant(HeckeContext& ctx, const QuatModFormV& f) {
  const PadicRing& R = ctx.ring();
  const ClassSet& cs = ctx.classes();
  require(!f.level_p, "stabilizer averaging applies to the prime-to-p level");
  QuatModFormV out = f;
  if (f.k % 2 != 0) {
    // -1 acts by (-1)^k, so the full average vanishes in odd weight
    for (auto& v : out.vals) v = SymVec::zero(R, f.k);
    return out;
  }
  for (size_t x = 0; x < cs.h(); ++x) {
    const auto& units = ctx.stabilizer(x);
    SymVec acc = SymVec::zero(R, f.k);
    acc.prec = f.vals[x].prec;
    for (const LocalUnit& u : units)
      acc = sym_add(R, acc, act_dual(R, f.vals[x], u));
    uint64_t inv_m = R.inv(R.reduce(static_cast<int64_t>(units.size())));
    out.vals[x] = sym_scal(R, inv_m, acc);
  }
  return out;
}

int invariance_defect(HeckeContext& ctx, const QuatModFormV& f) {
  const PadicRing& R = ctx.ring();
  require(!f.level_p, "stabilizer defects apply to the prime-to-p level");
  int worst = 1 << 20;
  for (size_t x = 0; x < f.vals.size(); ++x)
    for (const LocalUnit& u : ctx.stabilizer(x))
      worst = std::min(
          worst, sym_residual_valuation(R, act_dual(R, f.vals[x], u), f.vals[x]));
  return worst;
}

QuatModFormV random_invariant_form(HeckeContext& ctx, int k, uint64_t seed) {
  const PadicRing& R = ctx.ring();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<uint64_t> pick(0, R.mod() - 1);
  QuatModFormV raw = form_zero(R, ctx.classes(), k, false);
  for (auto& v : raw.vals) {
    for (auto& c : v.c) c = pick(rng);
    v.prec = R.N();
  }
  return project_invariant(ctx, raw);
}

namespace {

// full neighbor sum at one prime on the prime-to-p level
QuatModFormV apply_labels(HeckeContext& ctx, const QuatModFormV& f,
                          uint64_t ell) {
  const PadicRing& R = ctx.ring();
  const HeckeLocal& tab = ctx.local(ell);
  QuatModFormV out = form_zero(R, ctx.classes(), f.k, false);
  for (size_t x = 0; x < f.vals.size(); ++x) {
    SymVec acc = SymVec::zero(R, f.k);
    bool first = true;
    for (size_t i = 0; i < tab.cosets[x].size(); ++i) {
      const CosetEntry& e = tab.cosets[x][i];
      SymVec term = act_dual(R, f.vals[e.target], tab.locals[x][i]);
      acc = first ? term : sym_add(R, acc, term);
      first = false;
    }
    if (!first) out.vals[x] = acc;
  }
  return out;
}

}  // namespace

QuatModFormV hecke_apply(HeckeContext& ctx, const QuatModFormV& f, uint64_t ell) {
  const ClassSet& cs = ctx.classes();
  require(!f.level_p, "T_ell acts on the prime-to-p level here");
  require(ell > 1 && is_prime_u64(ell), "Hecke prime must be prime");
  require(cs.D % ell != 0 && cs.N % ell != 0 && ell != ctx.ring().p(),
          "Hecke prime must be coprime to D, N and p");
  return apply_labels(ctx, f, ell);
}

QuatModFormV tp_apply(HeckeContext& ctx, const QuatModFormV& f) {
  require(!f.level_p, "T_p acts on the prime-to-p level");
  return apply_labels(ctx, f, ctx.ring().p());
}

QuatModFormV degeneracy_twist(HeckeContext& ctx, const QuatModFormV& f) {
  require(!f.level_p, "degeneracy starts from the prime-to-p level");
  const PadicRing& R = ctx.ring();
  const HeckeLocal& tab = ctx.local(R.p());
  QuatModFormV out = form_zero(R, ctx.classes(), f.k, true);
  for (size_t x = 0; x < ctx.classes().h(); ++x)
    for (size_t L = 0; L < tab.cosets[x].size(); ++L)
      out.vals[fiber_at(R, x, L)] =
          act_dual(R, f.vals[tab.cosets[x][L].target], tab.locals[x][L]);
  return out;
}

QuatModFormV degeneracy_include(HeckeContext& ctx, const QuatModFormV& f) {
  require(!f.level_p, "degeneracy starts from the prime-to-p level");
  const PadicRing& R = ctx.ring();
  QuatModFormV out = form_zero(R, ctx.classes(), f.k, true);
  for (size_t x = 0; x < ctx.classes().h(); ++x)
    for (size_t L = 0; L <= R.p(); ++L)
      out.vals[fiber_at(R, x, L)] = f.vals[x];
  return out;
}

QuatModFormV degeneracy(HeckeContext& ctx, const QuatModFormV& f,
                        uint64_t which) {
  if (which == 1) return degeneracy_include(ctx, f);
  if (which == ctx.ring().p()) return degeneracy_twist(ctx, f);
  throw ValidationError("degeneracy direction must be 1 or p");
}

QuatModFormV up_apply(HeckeContext& ctx, const QuatModFormV& f) {
  require(f.level_p, "U_p acts on the level-p space");
  const PadicRing& R = ctx.ring();
  const HeckeLocal& tab = ctx.local(R.p());
  QuatModFormV out = form_zero(R, ctx.classes(), f.k, true);
  for (size_t x = 0; x < ctx.classes().h(); ++x) {
    for (size_t L = 0; L < tab.cosets[x].size(); ++L) {
      SymVec acc = SymVec::zero(R, f.k);
      bool first = true;
      for (size_t L2 = 0; L2 < tab.cosets[x].size(); ++L2) {
        if (L2 == L) continue;  // the excluded direction: the pair's own edge
        size_t y = tab.cosets[x][L2].target;
        const SymVec& v = f.vals[fiber_at(R, y, tab.back[x][L2])];
        SymVec term = act_dual(R, v, tab.locals[x][L2]);
        acc = first ? term : sym_add(R, acc, term);
        first = false;
      }
      out.vals[fiber_at(R, x, L)] = acc;
    }
  }
  return out;
}

QuatModFormV wp_apply(HeckeContext& ctx, const QuatModFormV& f) {
  require(f.level_p, "W_p acts on the level-p space");
  const PadicRing& R = ctx.ring();
  const HeckeLocal& tab = ctx.local(R.p());
  QuatModFormV out = form_zero(R, ctx.classes(), f.k, true);
  for (size_t x = 0; x < ctx.classes().h(); ++x)
    for (size_t L = 0; L < tab.cosets[x].size(); ++L) {
      size_t y = tab.cosets[x][L].target;
      const SymVec& v = f.vals[fiber_at(R, y, tab.back[x][L])];
      out.vals[fiber_at(R, x, L)] = act_dual(R, v, tab.locals[x][L]);
    }
  return out;
}

PadicApprox form_pairing(HeckeContext& ctx, const QuatModFormV& f,
                         const QuatModFormV& g) {
  const PadicRing& R = ctx.ring();
  const ClassSet& cs = ctx.classes();
  require(f.k == g.k, "pairing requires equal weights");
  require(f.level_p == g.level_p, "pairing requires equal levels");
  size_t fiber = f.level_p ? R.p() + 1 : 1;
  PadicApprox sum(0, R.N());
  for (size_t x = 0; x < cs.h(); ++x) {
    // weight n_x^k / |Gamma_x|: the norm power compensates the det^k
    // multiplier under change of class representative
    uint64_t w = R.mul(R.pow(ctx.class_norm_unit(x), f.k),
                       R.inv(R.reduce(static_cast<int64_t>(cs.unit_count(x)))));
    for (size_t L = 0; L < fiber; ++L) {
      size_t i = x * fiber + L;
      PadicApprox term = pairing_k(R, f.vals[i], g.vals[i]);
      term.value = R.mul(term.value, w);
      sum = padic_add(R, sum, term);
    }
  }
  return sum;
}

PadicApprox global_T(HeckeContext& ctx, const QuatModFormV& f) {
  const PadicRing& R = ctx.ring();
  require(f.k == 0, "the average period is defined in weight 0");
  require(!f.level_p, "the average period is defined on the prime-to-p level");
  PadicApprox sum(0, R.N());
  for (size_t x = 0; x < f.vals.size(); ++x) {
    uint64_t inv_u =
        R.inv(R.reduce(static_cast<int64_t>(ctx.classes().unit_count(x))));
    PadicApprox term(R.mul(f.vals[x].c[0], inv_u),
                     std::min(f.vals[x].prec, R.N()));
    sum = padic_add(R, sum, term);
  }
  return sum;
}

BigRat global_T_exact(const ClassSet& cs, const std::vector<BigRat>& vals) {
  if (vals.size() != cs.h())
    throw ValidationError("value list does not match the class count");
  BigRat sum(0);
  for (size_t x = 0; x < cs.h(); ++x)
    sum += vals[x] / BigRat(static_cast<int64_t>(cs.unit_count(x)));
  return sum;
}

PadicApprox classical_t_k(HeckeContext& ctx, const BalancedWeights& kk,
                          const QuatModFormV& f1, const QuatModFormV& f2,
                          const QuatModFormV& f3) {
  const PadicRing& R = ctx.ring();
  const ClassSet& cs = ctx.classes();
  require(f1.k == kk.k1 && f2.k == kk.k2 && f3.k == kk.k3,
          "weights do not match the balanced triple");
  require(f1.level_p == f2.level_p && f2.level_p == f3.level_p,
          "trilinear period requires one common level");
  size_t fiber = f1.level_p ? R.p() + 1 : 1;
  PadicApprox sum(0, R.N());
  for (size_t x = 0; x < cs.h(); ++x) {
    uint64_t w =
        R.mul(R.pow(ctx.class_norm_unit(x), kk.kstar()),
              R.inv(R.reduce(static_cast<int64_t>(cs.unit_count(x)))));
    for (size_t L = 0; L < fiber; ++L) {
      size_t i = x * fiber + L;
      PadicApprox term =
          lambda_balanced(R, kk, f1.vals[i], f2.vals[i], f3.vals[i]);
      term.value = R.mul(term.value, w);
      sum = padic_add(R, sum, term);
    }
  }
  return sum;
}

/* ---------------- eigenform machinery ---------------- */

namespace {

using Vec = std::vector<uint64_t>;
using Mat = std::vector<Vec>;

// Reduced echelon basis over Z/p^W with unit pivots.  Vectors whose
// remainder is p-divisible are divided down and reinserted: the spaces we
// insert into are direct summands, so this recovers the full basis.  Each
// division by p^t leaves the stored residues certain only modulo p^(W-t);
// `lost` records the worst such depth so later span checks and integer
// lifts can cap themselves at the attainable precision W - lost.
struct Rref {
  std::vector<Vec> vecs;
  std::vector<size_t> piv;
  int lost = 0;
  size_t dim() const { return vecs.size(); }
};

void rref_reduce(const PadicRing& R, const Rref& B, Vec& v) {
  for (size_t i = 0; i < B.vecs.size(); ++i) {
    uint64_t c = v[B.piv[i]];
    if (c == 0) continue;
    for (size_t j = 0; j < v.size(); ++j)
      v[j] = R.sub(v[j], R.mul(c, B.vecs[i][j]));
  }
}

// normalise a remainder with a unit coordinate and splice it into B
void rref_splice(const PadicRing& R, Rref& B, Vec v, size_t unit_at) {
  uint64_t inv = R.inv(v[unit_at]);
  for (auto& c : v) c = R.mul(c, inv);
  for (size_t i = 0; i < B.vecs.size(); ++i) {
    uint64_t c = B.vecs[i][unit_at];
    if (c == 0) continue;
    for (size_t j = 0; j < v.size(); ++j)
      B.vecs[i][j] = R.sub(B.vecs[i][j], R.mul(c, v[j]));
  }
  size_t pos = 0;
  while (pos < B.piv.size() && B.piv[pos] < unit_at) ++pos;
  B.vecs.insert(B.vecs.begin() + pos, std::move(v));
  B.piv.insert(B.piv.begin() + pos, unit_at);
}

// insert only when the remainder already has a unit coordinate; never
// divides, so the stored residues stay exact modulo p^W
bool rref_insert_exact(const PadicRing& R, Rref& B, Vec v) {
  rref_reduce(R, B, v);
  for (size_t j = 0; j < v.size(); ++j)
    if (R.val(v[j]) == 0) {
      rref_splice(R, B, std::move(v), j);
      return true;
    }
  return false;
}

bool rref_insert(const PadicRing& R, Rref& B, Vec v) {
  int depth = 0;
  for (int pass = 0; pass < R.W(); ++pass) {
    rref_reduce(R, B, v);
    size_t unit_at = v.size();
    int minval = R.W();
    for (size_t j = 0; j < v.size(); ++j) {
      int t = R.val(v[j]);
      if (t < minval) minval = t;
      if (t == 0) {
        unit_at = j;
        break;
      }
    }
    if (minval >= R.W()) return false;  // zero remainder
    if (unit_at == v.size()) {
      for (auto& c : v) c = R.div_pk(c, minval);
      depth += minval;
      continue;
    }
    rref_splice(R, B, std::move(v), unit_at);
    B.lost = std::max(B.lost, depth);
    return true;
  }
  return false;
}

// coordinates w.r.t. the rref basis; returns the valuation of the remainder
int rref_coords(const PadicRing& R, const Rref& B, Vec v, Vec& coords) {
  coords.assign(B.vecs.size(), 0);
  for (size_t i = 0; i < B.vecs.size(); ++i) {
    uint64_t c = v[B.piv[i]];
    coords[i] = c;
    if (c == 0) continue;
    for (size_t j = 0; j < v.size(); ++j)
      v[j] = R.sub(v[j], R.mul(c, B.vecs[i][j]));
  }
  int worst = R.W();
  for (uint64_t c : v) worst = std::min(worst, R.val(c));
  return worst;
}

Vec flatten(const QuatModFormV& f) {
  Vec out;
  for (const auto& v : f.vals) out.insert(out.end(), v.c.begin(), v.c.end());
  return out;
}

QuatModFormV unflatten(const PadicRing& R, const ClassSet& cs, int k,
                       const Vec& v, int prec) {
  QuatModFormV f = form_zero(R, cs, k, false);
  size_t at = 0;
  for (auto& s : f.vals) {
    for (auto& c : s.c) c = v[at++];
    s.prec = prec;
  }
  return f;
}

Rref invariant_basis(HeckeContext& ctx, int k) {
  const PadicRing& R = ctx.ring();
  const ClassSet& cs = ctx.classes();
  Rref B;
  if (k % 2 != 0) return B;
  size_t n0 = cs.h() * static_cast<size_t>(k + 1);
  std::vector<Vec> cols;
  for (size_t x = 0; x < cs.h(); ++x) {
    for (int j = 0; j <= k; ++j) {
      SymVec delta = SymVec::zero(R, k);
      delta.c[j] = 1;
      delta.prec = R.N();
      SymVec acc = SymVec::zero(R, k);
      for (const LocalUnit& u : ctx.stabilizer(x))
        acc = sym_add(R, acc, act_dual(R, delta, u));
      uint64_t inv_m =
          R.inv(R.reduce(static_cast<int64_t>(ctx.stabilizer(x).size())));
      acc = sym_scal(R, inv_m, acc);
      Vec col(n0, 0);
      for (int t = 0; t <= k; ++t) col[x * (k + 1) + t] = acc.c[t];
      cols.push_back(std::move(col));
    }
  }
  // The columns are the images of an idempotent, so they generate a direct
  // summand.  Multi-pass insertion with unit remainders only: once a full
  // pass stalls, every generator lies in span + p * image, and Nakayama
  // gives span = image.  No divisions, hence no precision loss.
  bool progress = true;
  while (progress) {
    progress = false;
    for (const Vec& col : cols)
      if (rref_insert_exact(R, B, col)) progress = true;
  }
  return B;
}

Mat operator_matrix(HeckeContext& ctx, const Rref& B, int k,
                    const std::function<QuatModFormV(const QuatModFormV&)>& op) {
  const PadicRing& R = ctx.ring();
  size_t n = B.dim();
  int need = std::min(R.N(), R.W() - B.lost);
  Mat M(n, Vec(n, 0));
  for (size_t j = 0; j < n; ++j) {
    QuatModFormV fj = unflatten(R, ctx.classes(), k, B.vecs[j], R.N());
    Vec img = flatten(op(fj));
    Vec coords;
    int rem = rref_coords(R, B, img, coords);
    if (rem < need)
      throw PrecisionError("operator image leaves the invariant span");
    for (size_t i = 0; i < n; ++i) M[i][j] = coords[i];
  }
  return M;
}

Mat mat_mul(const PadicRing& R, const Mat& A, const Mat& B) {
  size_t n = A.size();
  Mat C(n, Vec(n, 0));
  for (size_t i = 0; i < n; ++i)
    for (size_t l = 0; l < n; ++l) {
      uint64_t a = A[i][l];
      if (a == 0) continue;
      for (size_t j = 0; j < n; ++j)
        C[i][j] = R.add(C[i][j], R.mul(a, B[l][j]));
    }
  return C;
}

Vec mat_vec(const PadicRing& R, const Mat& A, const Vec& v) {
  size_t n = A.size();
  Vec out(n, 0);
  for (size_t i = 0; i < n; ++i) {
    uint64_t acc = 0;
    for (size_t j = 0; j < n; ++j) acc = R.add(acc, R.mul(A[i][j], v[j]));
    out[i] = acc;
  }
  return out;
}

/* Characteristic polynomial of the leading principal blocks by the
 * division-free adjugate recursion
 *   chi_i(X) = (X - d) chi'(X) - sum_s (R M'^s C) * sum_{t>s} c'_t X^(t-1-s).
 * Coefficients ascending, monic. */
Vec charpoly_mod(const PadicRing& R, const Mat& A) {
  size_t n = A.size();
  Vec chi{1};
  for (size_t i = 1; i <= n; ++i) {
    size_t q = i - 1;
    Vec next(i + 1, 0);
    uint64_t d = A[q][q];
    for (size_t u = 0; u + 1 <= i; ++u)
      next[u + 1] = R.add(next[u + 1], chi[u]);
    for (size_t u = 0; u < chi.size(); ++u)
      next[u] = R.sub(next[u], R.mul(d, chi[u]));
    if (q > 0) {
      Vec y(q);
      for (size_t t = 0; t < q; ++t) y[t] = A[t][q];
      for (size_t s = 0; s < q; ++s) {
        uint64_t w = 0;
        for (size_t t = 0; t < q; ++t) w = R.add(w, R.mul(A[q][t], y[t]));
        for (size_t t = s + 1; t < chi.size(); ++t)
          next[t - 1 - s] = R.sub(next[t - 1 - s], R.mul(w, chi[t]));
        if (s + 1 < q) {
          Vec ny(q, 0);
          for (size_t r = 0; r < q; ++r) {
            uint64_t acc = 0;
            for (size_t c = 0; c < q; ++c) acc = R.add(acc, R.mul(A[r][c], y[c]));
            ny[r] = acc;
          }
          y = std::move(ny);
        }
      }
    }
    chi = std::move(next);
  }
  return chi;
}

// symmetric lift of the residue modulo p^prec only; digits above prec may
// be noise once guard digits were spent
int64_t lift_symmetric_at(const PadicRing& R, uint64_t c, int prec) {
  uint64_t m = 1;
  for (int t = 0; t < prec; ++t) m *= R.p();
  c %= m;
  return c > m / 2 ? static_cast<int64_t>(c) - static_cast<int64_t>(m)
                   : static_cast<int64_t>(c);
}

BigInt binom_big(size_t n, size_t j) {
  BigInt b = 1;
  for (size_t t = 0; t < j; ++t) {
    b *= BigInt(static_cast<int64_t>(n - t));
    b /= BigInt(static_cast<int64_t>(t + 1));
  }
  return b;
}

// eigenvalue bound (ell+1) * ell^(k/2) for weight-k systems at ell
BigInt eigen_bound(uint64_t ell, int k) {
  BigInt b = BigInt(static_cast<int64_t>(ell + 1));
  for (int t = 0; t < (k + 1) / 2; ++t) b *= BigInt(static_cast<int64_t>(ell));
  return b;
}

// recognise the charpoly residues modulo p^aprec as an integer polynomial;
// empty on failure
std::vector<BigInt> charpoly_integer(const PadicRing& R, const Vec& chi,
                                     uint64_t ell, int k, int aprec) {
  size_t n = chi.size() - 1;
  BigInt lam = eigen_bound(ell, k);
  BigInt modulus = 1;
  for (int t = 0; t < aprec; ++t) modulus *= BigInt(static_cast<int64_t>(R.p()));
  std::vector<BigInt> out(chi.size());
  for (size_t j = 0; j <= n; ++j) {
    // coefficient of X^(n-j) is an elementary symmetric sum of j eigenvalues
    BigInt bound = binom_big(n, j);
    for (size_t t = 0; t < j; ++t) bound *= lam;
    if (2 * bound >= modulus) return {};
    BigInt v(lift_symmetric_at(R, chi[n - j], aprec));
    if (abs(v) > bound) return {};
    out[n - j] = v;
  }
  return out;
}

BigInt poly_eval_big(const std::vector<BigInt>& c, const BigInt& x) {
  BigInt acc = 0;
  for (size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
  return acc;
}

// exact deflation by (X - r); caller guarantees r is a root
std::vector<BigInt> poly_deflate(const std::vector<BigInt>& c, const BigInt& r) {
  std::vector<BigInt> q(c.size() - 1);
  BigInt carry = 0;
  for (size_t i = c.size(); i-- > 1;) {
    carry = c[i] + carry * r;
    q[i - 1] = carry;
  }
  return q;
}

struct RootSplit {
  std::vector<std::pair<int64_t, int>> roots;  // (root, multiplicity)
  std::vector<BigInt> rest;                    // rootless integer factor
};

RootSplit integer_roots(const std::vector<BigInt>& chi, const BigInt& bound) {
  RootSplit out;
  out.rest = chi;
  for (BigInt r = -bound; r <= bound; ++r) {
    int mult = 0;
    while (out.rest.size() > 1 && poly_eval_big(out.rest, r) == 0) {
      out.rest = poly_deflate(out.rest, r);
      ++mult;
    }
    if (mult > 0) out.roots.push_back({r.convert_to<int64_t>(), mult});
  }
  return out;
}

Mat poly_at_matrix(const PadicRing& R, const std::vector<BigInt>& c,
                   const Mat& M) {
  size_t n = M.size();
  Mat acc(n, Vec(n, 0));
  for (size_t i = 0; i < n; ++i)
    acc[i][i] = bigint_mod_u64(c.back(), R.mod());
  for (size_t t = c.size() - 1; t-- > 0;) {
    acc = mat_mul(R, acc, M);
    uint64_t cc = bigint_mod_u64(c[t], R.mod());
    for (size_t i = 0; i < n; ++i) acc[i][i] = R.add(acc[i][i], cc);
  }
  return acc;
}

/* Recursive simultaneous diagonalisation.  `space` is an rref basis of the
 * current invariant subspace in top-level coordinates; `mats` act on the
 * top-level space.  Emits coordinate vectors of certified one-dimensional
 * simultaneous eigensystems. */
void split_space(HeckeContext& ctx, const std::vector<uint64_t>& sample,
                 const std::map<uint64_t, Mat>& mats, int k, const Rref& space,
                 size_t next, std::vector<std::pair<Vec, int>>& out,
                 std::vector<std::string>& skipped) {
  const PadicRing& R = ctx.ring();
  if (space.dim() == 0) return;
  if (space.dim() == 1) {
    out.push_back({space.vecs[0], space.lost});
    return;
  }
  if (next >= sample.size()) {
    std::ostringstream os;
    os << "unresolved simultaneous system of dimension " << space.dim();
    skipped.push_back(os.str());
    return;
  }
  uint64_t ell = sample[next];
  const Mat& M = mats.at(ell);
  size_t d = space.dim();
  int aprec = R.W() - space.lost;
  // restriction of M to the subspace
  Mat Ms(d, Vec(d, 0));
  for (size_t j = 0; j < d; ++j) {
    Vec img = mat_vec(R, M, space.vecs[j]);
    Vec coords;
    int rem = rref_coords(R, space, img, coords);
    if (rem < std::min(R.N(), aprec))
      throw PrecisionError("Hecke operator does not preserve the subspace");
    for (size_t i = 0; i < d; ++i) Ms[i][j] = coords[i];
  }
  Vec chi = charpoly_mod(R, Ms);
  std::vector<BigInt> chi_z = charpoly_integer(R, chi, ell, k, aprec);
  if (chi_z.empty()) {
    std::ostringstream os;
    os << "characteristic polynomial at ell=" << ell
       << " not certifiably integral (dimension " << d << ")";
    skipped.push_back(os.str());
    return;
  }
  RootSplit rs = integer_roots(chi_z, eigen_bound(ell, k));
  if (rs.rest.size() > 1) {
    std::ostringstream os;
    os << "irrational eigenvalue factor of degree " << rs.rest.size() - 1
       << " at ell=" << ell;
    skipped.push_back(os.str());
  }
  for (const auto& [r, mult] : rs.roots) {
    // projector numerator: product of the other factors of chi
    std::vector<BigInt> proj{1};
    for (const auto& [s, m2] : rs.roots) {
      if (s == r) continue;
      for (int t = 0; t < m2; ++t) {
        std::vector<BigInt> nxt(proj.size() + 1, BigInt(0));
        for (size_t i = 0; i < proj.size(); ++i) {
          nxt[i + 1] += proj[i];
          nxt[i] -= BigInt(s) * proj[i];
        }
        proj = std::move(nxt);
      }
    }
    if (rs.rest.size() > 1) {
      std::vector<BigInt> nxt(proj.size() + rs.rest.size() - 1, BigInt(0));
      for (size_t i = 0; i < proj.size(); ++i)
        for (size_t j = 0; j < rs.rest.size(); ++j) nxt[i + j] += proj[i] * rs.rest[j];
      proj = std::move(nxt);
    }
    Mat P = poly_at_matrix(R, proj, Ms);
    Rref sub;
    sub.lost = space.lost;
    for (size_t j = 0; j < d; ++j) {
      Vec col(d);
      for (size_t i = 0; i < d; ++i) col[i] = P[i][j];
      // lift the subspace-coordinate column back to top-level coordinates
      Vec top(space.vecs[0].size(), 0);
      for (size_t i = 0; i < d; ++i) {
        if (col[i] == 0) continue;
        for (size_t t = 0; t < top.size(); ++t)
          top[t] = R.add(top[t], R.mul(col[i], space.vecs[i][t]));
      }
      rref_insert(R, sub, std::move(top));
    }
    if (sub.dim() != static_cast<size_t>(mult)) {
      std::ostringstream os;
      os << "eigenspace extraction at ell=" << ell << ", a=" << r
         << " found dimension " << sub.dim() << " (expected " << mult << ")";
      skipped.push_back(os.str());
      continue;
    }
    split_space(ctx, sample, mats, k, sub, next + 1, out, skipped);
  }
}

std::optional<int64_t> read_eigenvalue(const PadicRing& R, const QuatModFormV& f,
                                       const QuatModFormV& img,
                                       const BigInt& bound, int prec) {
  BigInt modulus = 1;
  for (int t = 0; t < prec; ++t) modulus *= BigInt(static_cast<int64_t>(R.p()));
  if (2 * bound >= modulus) return std::nullopt;
  // locate a unit coordinate of f
  for (size_t x = 0; x < f.vals.size(); ++x)
    for (size_t j = 0; j < f.vals[x].c.size(); ++j)
      if (R.is_unit(f.vals[x].c[j])) {
        uint64_t a = R.mul(img.vals[x].c[j], R.inv(f.vals[x].c[j]));
        int64_t v = lift_symmetric_at(R, a, prec);
        if (abs(BigInt(v)) > bound) return std::nullopt;
        return v;
      }
  return std::nullopt;
}

}  // namespace

uint64_t hensel_root(const PadicRing& R, const std::vector<int64_t>& coeffs,
                     uint64_t r0) {
  auto eval = [&](const std::vector<int64_t>& c, uint64_t x) {
    uint64_t acc = 0;
    for (size_t i = c.size(); i-- > 0;)
      acc = R.add(R.mul(acc, x), R.reduce(c[i]));
    return acc;
  };
  std::vector<int64_t> der;
  for (size_t i = 1; i < coeffs.size(); ++i)
    der.push_back(coeffs[i] * static_cast<int64_t>(i));
  uint64_t r = r0 % R.mod();
  require(eval(coeffs, r) % R.p() == 0, "not a root mod p");
  require(R.is_unit(eval(der, r)), "root is not simple mod p");
  for (int it = 0; it < 2 * R.W() && eval(coeffs, r) != 0; ++it)
    r = R.sub(r, R.mul(eval(coeffs, r), R.inv(eval(der, r))));
  return r;
}

EigenSearch eigenforms(HeckeContext& ctx, int k, std::vector<uint64_t> sample) {
  const PadicRing& R = ctx.ring();
  const ClassSet& cs = ctx.classes();
  EigenSearch out;
  require(k >= 0, "negative weight");
  if (k % 2 != 0) return out;  // no forms with trivial central character

  if (sample.empty()) {
    uint64_t avoid = cs.D * cs.N * R.p();
    for (uint64_t q = 2; sample.size() < 3; ++q)
      if (is_prime_u64(q) && avoid % q != 0) sample.push_back(q);
  }
  for (uint64_t ell : sample)
    require(is_prime_u64(ell) && cs.D % ell != 0 && cs.N % ell != 0 &&
                ell != R.p(),
            "sample primes must be coprime to D, N and p");

  Rref basis = invariant_basis(ctx, k);
  if (basis.dim() == 0) return out;

  std::map<uint64_t, Mat> mats;
  for (uint64_t ell : sample)
    mats[ell] = operator_matrix(ctx, basis, k, [&](const QuatModFormV& f) {
      return hecke_apply(ctx, f, ell);
    });

  Rref whole;
  for (size_t i = 0; i < basis.dim(); ++i) {
    Vec e(basis.dim(), 0);
    e[i] = 1;
    rref_insert(R, whole, std::move(e));
  }
  std::vector<std::pair<Vec, int>> systems;
  split_space(ctx, sample, mats, k, whole, 0, systems, out.skipped);

  for (const auto& [c, lost0] : systems) {
    // realise in the ambient space and normalise the first unit entry
    Vec flat(cs.h() * static_cast<size_t>(k + 1), 0);
    for (size_t i = 0; i < basis.dim(); ++i) {
      if (c[i] == 0) continue;
      for (size_t t = 0; t < flat.size(); ++t)
        flat[t] = R.add(flat[t], R.mul(c[i], basis.vecs[i][t]));
    }
    int minv = R.W();
    for (uint64_t v : flat) minv = std::min(minv, R.val(v));
    if (minv >= R.W()) continue;
    for (auto& v : flat) v = R.div_pk(v, minv);
    for (uint64_t v : flat)
      if (R.is_unit(v)) {
        uint64_t inv = R.inv(v);
        for (auto& t : flat) t = R.mul(t, inv);
        break;
      }
    // the eigenvector is certified only below the guard digits spent on it
    int fprec = std::min(R.N(), R.W() - lost0 - minv);
    if (fprec <= 0) {
      out.skipped.push_back("eigenvector extraction exhausted the precision");
      continue;
    }
    EigenPacket pk;
    pk.k = k;
    pk.form = unflatten(R, cs, k, flat, fprec);

    bool ok = true;
    for (uint64_t ell : sample) {
      QuatModFormV img = hecke_apply(ctx, pk.form, ell);
      auto a = read_eigenvalue(R, pk.form, img, eigen_bound(ell, k), fprec);
      if (!a) {
        out.skipped.push_back("eigenvalue not integral at sampled prime");
        ok = false;
        break;
      }
      QuatModFormV scaled = form_scal(R, R.reduce(*a), pk.form);
      if (form_residual_valuation(R, img, scaled) < fprec) {
        out.skipped.push_back("eigen equation fails at sampled prime");
        ok = false;
        break;
      }
      pk.a[ell] = *a;
    }
    if (!ok) continue;

    QuatModFormV imgp = tp_apply(ctx, pk.form);
    auto ap = read_eigenvalue(R, pk.form, imgp, eigen_bound(R.p(), k), fprec);
    if (!ap) {
      out.skipped.push_back("T_p eigenvalue not integral");
      continue;
    }
    {
      QuatModFormV scaled = form_scal(R, R.reduce(*ap), pk.form);
      if (form_residual_valuation(R, imgp, scaled) < fprec) {
        out.skipped.push_back("T_p eigen equation fails");
        continue;
      }
    }
    pk.ap = *ap;
    pk.a[R.p()] = *ap;

    pk.eisenstein = (k == 0);
    for (const auto& [ell, a] : pk.a)
      if (a != static_cast<int64_t>(ell) + 1) pk.eisenstein = false;

    // roots of the Hecke polynomial X^2 - ap X + p^(k+1)
    uint64_t cpk = R.ppow(k + 1);
    if (*ap % static_cast<int64_t>(R.p()) != 0) {
      // Newton on f(X) = X^2 - ap X + p^(k+1); the ordinary root is the one
      // congruent to ap mod p, where f' = 2X - ap is a unit
      uint64_t r = R.reduce(*ap) % R.p();
      uint64_t apr = R.reduce(*ap);
      for (int it = 0; it < 2 * R.W(); ++it) {
        uint64_t fv = R.add(R.sub(R.mul(r, r), R.mul(apr, r)), cpk);
        if (fv == 0) break;
        uint64_t dv = R.sub(R.mul(2, r), apr);
        r = R.sub(r, R.mul(fv, R.inv(dv)));
      }
      pk.alpha = PadicApprox(r, R.N());
      pk.beta = PadicApprox(R.mul(cpk, R.inv(r)), R.N());
    } else {
      uint64_t disc = R.sub(R.mul(R.reduce(*ap), R.reduce(*ap)), R.mul(4, cpk));
      int v = R.val(disc);
      if (v >= R.W()) {
        uint64_t half = R.mul(R.reduce(*ap), R.inv(2));
        pk.alpha = PadicApprox(half, R.N());
        pk.beta = PadicApprox(half, R.N());
        pk.note = "supersingular: double root";
      } else if (v % 2 != 0 ||
                 legendre_i64(static_cast<int64_t>(R.div_pk(disc, v) % R.p()),
                              R.p()) != 1) {
        pk.note = "stabilization roots irrational over Z_p";
      } else {
        uint64_t u = R.div_pk(disc, v);
        uint64_t s0 = 0;
        for (uint64_t t = 1; t < R.p(); ++t)
          if (R.mul(t, t) % R.p() == u % R.p()) {
            s0 = t;
            break;
          }
        uint64_t s = s0;
        for (int it = 0; it < 2 * R.W(); ++it) {
          uint64_t fv = R.sub(R.mul(s, s), u);
          if (fv == 0) break;
          s = R.sub(s, R.mul(fv, R.inv(R.mul(2, s))));
        }
        uint64_t sq = R.mul(s, R.ppow(v / 2));
        uint64_t a1 = R.mul(R.add(R.reduce(*ap), sq), R.inv(2));
        uint64_t a2 = R.mul(R.sub(R.reduce(*ap), sq), R.inv(2));
        if (R.val(a2) < R.val(a1)) std::swap(a1, a2);
        int prec = std::max(1, R.N() - v / 2);
        pk.alpha = PadicApprox(a1, prec);
        pk.beta = PadicApprox(a2, prec);
        pk.note = "non-ordinary stabilization roots";
      }
    }
    out.packets.push_back(std::move(pk));
  }

  std::sort(out.packets.begin(), out.packets.end(),
            [&](const EigenPacket& A, const EigenPacket& B) {
              for (uint64_t ell : sample) {
                int64_t a = A.a.at(ell), b = B.a.at(ell);
                if (a != b) return a > b;
              }
              return false;
            });
  return out;
}

/* ---------------- old-space calculus at p ---------------- */

OldCoords up_old(const PadicRing& R, const EigenPacket& f, const OldCoords& v) {
  PadicApprox ap(R.reduce(f.ap), R.N());
  PadicApprox pk1(R.ppow(f.k + 1), R.N());
  OldCoords out;
  out.a = padic_add(R, padic_mul(R, v.a, ap), padic_mul(R, v.b, pk1));
  out.b = PadicApprox(R.neg(v.a.value), v.a.known_prec);
  return out;
}

OldCoords wp_old(const PadicRing& R, const EigenPacket& f, const OldCoords& v) {
  OldCoords out;
  out.a = padic_mul(R, v.b, PadicApprox(R.ppow(f.k), R.N()));
  out.b = v.a;
  return out;
}

OldCoords stabilize_cleared(const PadicRing& R, const EigenPacket&,
                            const PadicApprox& root) {
  OldCoords out;
  out.a = root;
  out.b = PadicApprox(R.neg(1), R.N());
  return out;
}

OldCoords p_stabilize(const PadicRing& R, const EigenPacket& f,
                      const PadicApprox& root) {
  require(R.is_unit(root.value), "stabilization requires a unit root");
  if (f.alpha && f.beta &&
      residual_valuation(R, *f.alpha, *f.beta) >= R.N())
    throw ValidationError("supersingular packet: the two roots coincide");
  OldCoords out;
  out.a = PadicApprox(1, root.known_prec);
  out.b = PadicApprox(R.neg(R.inv(root.value)), root.known_prec);
  return out;
}

QuatModFormV old_values(HeckeContext& ctx, const EigenPacket& f,
                        const OldCoords& v) {
  const PadicRing& R = ctx.ring();
  QuatModFormV incl = degeneracy_include(ctx, f.form);
  QuatModFormV twist = degeneracy_twist(ctx, f.form);
  QuatModFormV out = form_zero(R, ctx.classes(), f.k, true);
  for (size_t i = 0; i < out.vals.size(); ++i) {
    SymVec t1 = sym_scal(R, v.a.value, incl.vals[i]);
    t1.prec = std::min(t1.prec, v.a.known_prec);
    SymVec t2 = sym_scal(R, v.b.value, twist.vals[i]);
    t2.prec = std::min(t2.prec, v.b.known_prec);
    out.vals[i] = sym_add(R, t1, t2);
  }
  return out;
}

AdjointReport adjoint_check(HeckeContext& ctx, const QuatModFormV& f,
                            const QuatModFormV& g, uint64_t ell) {
  const PadicRing& R = ctx.ring();
  AdjointReport rep;
  rep.factor = 1;  // trivial character
  auto apply = [&](const QuatModFormV& h) {
    if (ell == 1) return h;
    if (ell == R.p()) return tp_apply(ctx, h);
    return hecke_apply(ctx, h, ell);
  };
  PadicApprox lhs = form_pairing(ctx, apply(f), g);
  PadicApprox rhs = form_pairing(ctx, f, apply(g));
  rhs.value = R.mul(rhs.value, rep.factor);
  rep.defect = residual_valuation(R, lhs, rhs);
  rep.ok = rep.defect >= std::min(lhs.known_prec, rhs.known_prec);
  return rep;
}

PadicApprox generic_sign_local(const PadicRing& R, int64_t a1, int64_t a2,
                               int64_t a3, const BalancedWeights& kk,
                               uint64_t ell) {
  uint64_t prod = R.mul(R.mul(R.reduce(a1), R.reduce(a2)), R.reduce(a3));
  uint64_t lpow = R.reduce(1);
  for (int t = 0; t < kk.kstar(); ++t)
    lpow = R.mul(lpow, R.reduce(static_cast<int64_t>(ell)));
  uint64_t val = R.neg(R.mul(prod, R.inv(lpow)));
  if (!R.is_unit(val))
    throw ValidationError("local sign is not a p-unit");
  return PadicApprox(val, R.N());
}

}  // namespace qtp
