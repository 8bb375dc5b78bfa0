#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qtp {

/* Error taxonomy shared by the whole library.  The CLI maps these to
 * process exit codes: ValidationError -> 2, PrecisionError -> 3,
 * NonOrdinaryError -> 4.  Anything else is a bug. */
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PrecisionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonOrdinaryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/* Global run parameters for the p-adic side.
 * Invariants: p >= 5 prime, N >= M_mom + 4, M_w >= 2, M_mom >= 2,
 * and p^(N+2) must fit in 62 bits so products can use __int128. */
struct PadicParams {
  uint64_t p = 5;
  int N = 20;      // residue precision: arithmetic is reported mod p^N
  int M_w = 4;     // truncation order of each nilpotent disc variable
  int M_mom = 8;   // number of retained moments / kernel truncation degree
  void validate() const;
};

/* Residue ring Z/p^W with W = N + guard.  Values are uint64_t in [0, p^W).
 *
 * Convention: the working modulus p^W carries `guard` digits beyond the
 * semantic precision N.  Exact integer inputs are reduced mod p^W, so unit
 * pipelines (Teichmuller, logarithm) can lose a couple of digits to exact
 * division without dropping below N.  known_prec values in PadicApprox are
 * always capped at N.
 */
class PadicRing {
 public:
  PadicRing(uint64_t p, int N);
  explicit PadicRing(const PadicParams& par) : PadicRing(par.p, par.N) {}

  uint64_t p() const { return p_; }
  int N() const { return N_; }
  int guard() const { return G_; }
  int W() const { return N_ + G_; }          // working digit count
  uint64_t mod() const { return mod_; }       // p^W
  uint64_t modN() const { return ppow_[N_]; } // p^N
  uint64_t ppow(int k) const;                 // p^k, 0 <= k <= W

  uint64_t reduce(int64_t a) const;
  uint64_t add(uint64_t a, uint64_t b) const;
  uint64_t sub(uint64_t a, uint64_t b) const;
  uint64_t neg(uint64_t a) const;
  uint64_t mul(uint64_t a, uint64_t b) const;
  uint64_t pow(uint64_t a, uint64_t e) const;
  // a^e for signed e; e < 0 requires a to be a unit.
  uint64_t pow_signed(uint64_t a, int64_t e) const;
  bool is_unit(uint64_t a) const { return a % p_ != 0; }
  // Multiplicative inverse of a unit (error on non-units).
  uint64_t inv(uint64_t a) const;
  // p-adic valuation of the residue; returns W for 0.
  int val(uint64_t a) const;
  // Exact division by p^k; requires p^k | a.
  uint64_t div_pk(uint64_t a, int k) const;
  // Division with transparent valuation handling: a/b where v(b) <= v(a).
  // Returns the residue of the quotient; the caller is responsible for
  // charging v(b) digits of precision to the ledger.
  uint64_t div(uint64_t a, uint64_t b) const;

  // Teichmuller lift of the unit t: the (p-1)-st root of unity congruent
  // to t mod p, computed by iterating t -> t^p to the working modulus.
  uint64_t teichmuller(uint64_t t) const;
  // one-unit part <t> = t / teichmuller(t) for a unit t.
  uint64_t unit_one_part(uint64_t t) const;
  // Iwasawa logarithm of a one-unit x (x = 1 mod p).  Known mod p^(W-2).
  uint64_t log_one_unit(uint64_t x) const;
  // ell(t) = log<t> / log(1+p) for a unit t.  Known mod p^(W-2); the ring
  // validates W - 2 >= N at construction so ell is good to full precision.
  uint64_t ell(uint64_t t) const;

  bool operator==(const PadicRing& o) const {
    return o.p_ == p_ && o.N_ == N_;
  }

 private:
  uint64_t p_;
  int N_;
  int G_;
  uint64_t mod_;
  std::vector<uint64_t> ppow_;
};

/* A residue together with the number of p-adic digits actually known.
 * value is stored mod the ring's working modulus; known_prec <= N.
 * Division by p decrements known_prec; it never increases. */
struct PadicApprox {
  uint64_t value = 0;
  int known_prec = 0;

  PadicApprox() = default;
  PadicApprox(uint64_t v, int prec) : value(v), known_prec(prec) {}
};

PadicApprox padic_add(const PadicRing& R, const PadicApprox& a, const PadicApprox& b);
PadicApprox padic_sub(const PadicRing& R, const PadicApprox& a, const PadicApprox& b);
PadicApprox padic_mul(const PadicRing& R, const PadicApprox& a, const PadicApprox& b);
// Division by p^k (exact on the stored residue): costs k digits of ledger.
PadicApprox padic_div_pk(const PadicRing& R, const PadicApprox& a, int k);
// Equality mod p^min(known_prec): the only meaningful comparison.
bool padic_eq(const PadicRing& R, const PadicApprox& a, const PadicApprox& b);
// Valuation of the difference, clamped to min(known_prec) when they agree
// to full known precision.
int residual_valuation(const PadicRing& R, const PadicApprox& a, const PadicApprox& b);

std::string padic_to_string(const PadicRing& R, const PadicApprox& a);

}  // namespace qtp
