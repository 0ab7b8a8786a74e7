#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chr/finitefield.hpp"
#include "chr/multipoly.hpp"
#include "chr/rational.hpp"

namespace chr {

// Certification of absolute irreducibility for homogeneous integer
// polynomials by reduction modulo a prime p and irreducibility testing over
// the extension F_{p^d}, d the total degree. Throughout, the FIRST variable
// of the input plays the role of the homogenizing variable: inputs must
// carry it to the full degree with coefficient +-1 (true of every
// homogenized slowness polynomial).

enum class CertVerdict { CertifiedIrreducible, ReducibleWitness, Inconclusive };

std::string verdict_name(CertVerdict v);

// One specialization step of the degree-pattern sieve.
struct SieveStep {
  std::uint64_t subseed = 0;
  std::vector<std::string> point;  // values assigned to the trailing variables
  std::vector<int> degrees;        // univariate factor degrees, ascending, with multiplicity
  std::vector<int> splits_after;   // split sizes still admissible after this step
};

struct SieveOutcome {
  bool empty_intersection = false;
  std::vector<SieveStep> steps;
  std::vector<int> surviving;  // admissible split sizes left when the sieve stopped
};

// Specialize the trailing variables of `fbar` at up to `budget` random points
// of the coefficient field, factor the univariate left in the first variable,
// and intersect the achievable two-part degree splits (a, d-a), recorded by
// their canonical size min(a, d-a), across steps. An empty intersection
// proves `fbar` irreducible over its coefficient field. The input must be
// homogeneous with unit leading coefficient in the first variable, so every
// specialization keeps full degree. Throws std::invalid_argument on
// malformed input or budget < 1.
SieveOutcome degree_pattern_sieve(const MultiPoly<FqElement>& fbar, int budget,
                                  std::uint64_t seed);

struct SectionTry {
  std::uint64_t subseed = 0;
  std::vector<std::string> images;  // linear forms substituted for the variables
  std::string outcome;              // irreducible / reducible / degenerate... / inconclusive
  int bi_specializations = 0;
};

struct SectionOutcome {
  bool irreducible = false;
  std::vector<SectionTry> tries;
};

// Restrict a homogeneous 4-variable polynomial to random planes: substitute
// the variables by independent random linear forms in three fresh variables,
// dehomogenize, and decide the resulting bivariate with bi_is_irreducible.
// An irreducible full-degree section proves irreducibility of the input over
// its coefficient field; the converse fails (a product restricts to a
// product on every plane), so non-irreducible sections are retried up to
// `tries` times and the outcome is one-sided. Throws std::invalid_argument
// on malformed input, tries < 1 or bi_budget < 1.
SectionOutcome plane_section_certify(const MultiPoly<FqElement>& fbar, int tries,
                                     int bi_budget, std::uint64_t seed);

struct CertifyOptions {
  int budget = 64;       // sieve specializations; also the bivariate budget
  int plane_tries = 8;   // plane sections attempted for 4-variable inputs
  std::uint64_t seed = 1;
};

struct IrreducibilityCertificate {
  CertVerdict verdict = CertVerdict::Inconclusive;
  std::uint64_t prime = 0;
  int ext_degree = 0;   // d: the certificate field is F_{p^d}
  std::string modulus;  // defining polynomial of F_{p^d} over F_p
  std::string input;    // the certified polynomial, canonical term order
  std::uint64_t seed = 0;
  int budget = 0;  // requested sieve budget
  int specializations_used = 0;
  int plane_tries_used = 0;
  SieveOutcome sieve;
  std::vector<SectionTry> sections;  // plane-section evidence (4-variable route)
  std::string route_note;            // what decided the verdict after the sieve
  int bivariate_specializations = 0;
  // Verified factorization over the rationals: factors multiply back to the
  // input exactly. Set only when verdict == ReducibleWitness.
  std::optional<std::pair<MultiPoly<BigRational>, MultiPoly<BigRational>>> q_factors;
  // Factor pair of the reduction over F_{p^d}, recorded as a diagnostic when
  // the input splits modulo p but no rational factorization was verified.
  std::optional<std::pair<std::string, std::string>> modular_factors;
  std::string note;
};

// Reduce `f` modulo p, then certify: (1) trivial checks, (2) degree-pattern
// sieve over F_{p^d}, (3) for 3-variable inputs dehomogenize and decide with
// bi_is_irreducible (complete), (4) for 4-variable inputs try plane sections
// (one-sided). Verdict semantics:
//   CertifiedIrreducible  f is irreducible over the complex numbers;
//   ReducibleWitness      f splits over the rationals, verified pair attached;
//   Inconclusive          nothing was proved at this prime (the reduction may
//                         split modulo p while f does not; the modular factor
//                         pair is attached as a diagnostic when available).
// Identical (input, p, seed, budget) produce identical certificates.
// Throws DomainError for non-homogeneous or non-integer input, a unit check
// failure on the leading variable, composite p, or p >= 2^40;
// UnsupportedError for arity outside 2..4 or total degree above 12.
IrreducibilityCertificate certify(const MultiPoly<BigRational>& f, std::uint64_t p,
                                  const CertifyOptions& opt = {});

// Run certify over the first `max_primes` primes (2, 3, 5, ...) and return
// the first conclusive certificate, or the last inconclusive one.
IrreducibilityCertificate certify_scan(const MultiPoly<BigRational>& f, int max_primes,
                                       const CertifyOptions& opt = {});

// Canonical plain-text rendering; byte-identical for identical certificates.
std::string certificate_text(const IrreducibilityCertificate& c);

}  // namespace chr
