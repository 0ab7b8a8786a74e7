#pragma once

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "chr/multipoly.hpp"
#include "chr/rational.hpp"

namespace chr {

// ---- F_p scalar helpers (p < 2^40, products fit in __int128) ----
namespace fp {

std::uint64_t add(std::uint64_t a, std::uint64_t b, std::uint64_t p);
std::uint64_t sub(std::uint64_t a, std::uint64_t b, std::uint64_t p);
std::uint64_t mul(std::uint64_t a, std::uint64_t b, std::uint64_t p);
std::uint64_t pow(std::uint64_t a, std::uint64_t e, std::uint64_t p);
std::uint64_t inv(std::uint64_t a, std::uint64_t p);
bool is_prime(std::uint64_t n);

}  // namespace fp

// F_{p^d} as F_p[x]/(m); m monic irreducible of degree d, found by seeded
// search and certified by Rabin's irreducibility test before use.
struct FqContext {
  std::uint64_t p = 0;
  int d = 0;
  std::vector<std::uint64_t> modulus;  // coefficients, modulus[d] == 1
  std::uint64_t seed = 0;

  mpz_class order() const;  // p^d
  std::string modulus_str() const;
};

// Throws std::invalid_argument unless p is prime, p < 2^40 and 1 <= d <= 64.
FqContext fq_build(std::uint64_t p, int d, std::uint64_t seed);

// Element of F_{p^d}. A default-constructed element is an untyped zero that
// combines with any field (needed so MultiPoly<FqElement> has a usable K()).
class FqElement {
 public:
  FqElement() = default;
  FqElement(const FqContext* ctx, std::uint64_t scalar);
  FqElement(const FqContext* ctx, std::vector<std::uint64_t> coeffs);

  static FqElement zero(const FqContext* ctx) { return FqElement(ctx, 0); }
  static FqElement one(const FqContext* ctx) { return FqElement(ctx, 1); }

  const FqContext* ctx() const { return ctx_; }
  std::vector<std::uint64_t> coeffs() const;
  // coefficient of x^i in the polynomial representative, 0 past the end
  std::uint64_t rep(int i) const {
    return (ctx_ && i >= 0 && i < dim_) ? data()[static_cast<std::size_t>(i)] : 0;
  }

  bool is_zero() const;
  bool is_scalar() const;  // lies in the prime field
  std::string str() const;

  FqElement operator-() const;
  friend FqElement operator+(const FqElement& a, const FqElement& b);
  friend FqElement operator-(const FqElement& a, const FqElement& b);
  friend FqElement operator*(const FqElement& a, const FqElement& b);
  friend bool operator==(const FqElement& a, const FqElement& b);
  friend bool operator!=(const FqElement& a, const FqElement& b) { return !(a == b); }

  FqElement inverse() const;
  FqElement pow(const mpz_class& e) const;
  FqElement pow(std::uint64_t e) const;
  FqElement frobenius_inverse() const;  // a^(p^(d-1)), the p-th root

  // total order used for deterministic factor sorting
  static int compare(const FqElement& a, const FqElement& b);

 private:
  // Coefficients live inline for small extension degrees; only d > kInline
  // (rare, large fq_build requests) spills to the heap. dim_ == ctx_->d.
  static constexpr int kInline = 12;

  const FqContext* ctx_ = nullptr;
  int dim_ = 0;
  std::array<std::uint64_t, kInline> a_{};
  std::vector<std::uint64_t> v_;

  std::uint64_t* data() { return dim_ <= kInline ? a_.data() : v_.data(); }
  const std::uint64_t* data() const { return dim_ <= kInline ? a_.data() : v_.data(); }
};

FqElement fq_random(const FqContext* ctx, std::mt19937_64& rng);

// Dense univariate polynomial over F_q. Coefficient 0 is the constant term;
// leading zeros are stripped so degree() == -1 exactly for the zero poly.
class FqPoly {
 public:
  FqPoly() = default;
  explicit FqPoly(const FqContext* ctx) : ctx_(ctx) {}
  FqPoly(const FqContext* ctx, std::vector<FqElement> coeffs);

  static FqPoly x(const FqContext* ctx);
  static FqPoly constant(const FqContext* ctx, const FqElement& c);

  const FqContext* ctx() const { return ctx_; }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const FqElement& coeff(int i) const;
  const std::vector<FqElement>& coeffs() const { return c_; }
  FqElement lc() const;
  bool is_monic() const;
  FqPoly monic() const;

  friend FqPoly operator+(const FqPoly& a, const FqPoly& b);
  friend FqPoly operator-(const FqPoly& a, const FqPoly& b);
  friend FqPoly operator*(const FqPoly& a, const FqPoly& b);
  FqPoly operator-() const;
  friend bool operator==(const FqPoly& a, const FqPoly& b) { return a.c_ == b.c_; }
  friend bool operator!=(const FqPoly& a, const FqPoly& b) { return !(a.c_ == b.c_); }

  FqPoly scaled(const FqElement& k) const;
  FqPoly shifted(int k) const;  // multiply by x^k

  // division with remainder; divisor must be nonzero
  static std::pair<FqPoly, FqPoly> divmod(const FqPoly& a, const FqPoly& b);
  static FqPoly gcd(FqPoly a, FqPoly b);  // monic
  // s*a + t*b = g (g monic); returns {g, s, t}
  static std::array<FqPoly, 3> xgcd(const FqPoly& a, const FqPoly& b);

  FqPoly derivative() const;
  FqElement eval(const FqElement& at) const;
  static FqPoly powmod(const FqPoly& base, const mpz_class& e, const FqPoly& mod);

  std::string str(const std::string& var = "x") const;
  static int compare(const FqPoly& a, const FqPoly& b);  // deterministic total order

 private:
  const FqContext* ctx_ = nullptr;
  std::vector<FqElement> c_;

  void strip();
};

struct UniFactorization {
  FqElement unit;                              // leading coefficient of the input
  std::vector<std::pair<FqPoly, int>> factors;  // monic irreducible, multiplicity;
                                                // sorted by degree then coefficients
};

// Squarefree split + distinct-degree + Cantor-Zassenhaus equal-degree
// (trace construction in characteristic 2). Deterministic for a fixed seed.
UniFactorization uni_factor(const FqPoly& f, std::uint64_t seed);

// Rabin's test; independent of uni_factor (used to cross-check it in tests).
bool uni_is_irreducible(const FqPoly& f);

enum class BiVerdict { Irreducible, Reducible, Inconclusive };

struct BiResult {
  BiVerdict verdict = BiVerdict::Inconclusive;
  // exact factor pair with factors[0]*factors[1] == input, set when Reducible
  std::optional<std::pair<MultiPoly<FqElement>, MultiPoly<FqElement>>> factors;
  std::string note;         // route taken / reason for Inconclusive
  int specializations = 0;  // y0 values tried
};

// Full irreducibility decision for bivariate f over F_q, total degree <= 12:
// squarefree specialization, Hensel lift to (y-y0)^(deg_y+1), factor-subset
// recombination with exact trial division. Inconclusive only when no usable
// specialization or shear exists in this field (caller enlarges the field).
BiResult bi_is_irreducible(const MultiPoly<FqElement>& f, int budget, std::uint64_t seed);

// Coefficient-wise reduction: num * den^-1 mod p, embedded as scalars of
// F_{p^d}. Throws std::domain_error if p divides any denominator.
MultiPoly<FqElement> reduce_mod(const MultiPoly<BigRational>& f, const FqContext* ctx);

}  // namespace chr
