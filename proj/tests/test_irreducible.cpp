#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "chr/elastic.hpp"
#include "chr/errors.hpp"
#include "chr/irreducible.hpp"
#include "doctest.h"

using namespace chr;

namespace {

StiffnessTensor make(int dim, const std::string& cls, const std::vector<std::string>& keys,
                     const std::vector<long>& vals) {
  std::map<std::string, BigRational> p;
  for (std::size_t i = 0; i < keys.size(); ++i) p[keys[i]] = BigRational(vals[i]);
  return StiffnessTensor(dim, symmetry_class_from_string(cls), p);
}

MultiPoly<BigRational> quartic_fixture() {
  StiffnessTensor t = make(2, "full2d", {"b11", "b12", "b13", "b22", "b23", "b33"},
                           {20, 39, -65, -16, -87, 30});
  return forward(t, true).to_poly();
}

MultiPoly<BigRational> olivine_fixture() {
  StiffnessTensor t = make(3, "orthorhombic",
                           {"b11", "b12", "b13", "b22", "b23", "b33", "b44", "b55", "b66"},
                           {321, 68, 72, 197, 77, 234, 64, 77, 79});
  return forward(t, true).to_poly();
}

// random homogeneous form with unit leading coefficient on the first variable
// and the other coefficients in [-9, 9]
MultiPoly<BigRational> random_monic_form(int nv, int d, std::mt19937_64& rng) {
  std::vector<std::string> vars;
  for (int i = 0; i < nv; ++i) vars.push_back("p" + std::to_string(i));
  MultiPoly<BigRational> f(vars);
  Monomial lead(static_cast<std::size_t>(nv));
  lead.e[0] = d;
  f.add_term(lead, BigRational(rng() % 2 ? 1 : -1));
  std::vector<int> e(static_cast<std::size_t>(nv), 0);
  std::uniform_int_distribution<int> coef(-9, 9);
  std::uniform_int_distribution<int> keep(0, 2);
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == nv - 1) {
      e[static_cast<std::size_t>(pos)] = left;
      if (e[0] != d && keep(rng) == 0) {
        int c = coef(rng);
        if (c) f.add_term(Monomial(e), BigRational(c));
      }
      return;
    }
    for (int k = 0; k <= left; ++k) {
      e[static_cast<std::size_t>(pos)] = k;
      self(self, pos + 1, left - k);
    }
  };
  rec(rec, 0, d);
  return f;
}

}  // namespace

TEST_CASE("quartic example certifies at p = 7 through the sieve") {
  MultiPoly<BigRational> f = quartic_fixture();
  IrreducibilityCertificate c = certify(f, 7, {});
  CHECK(c.verdict == CertVerdict::CertifiedIrreducible);
  CHECK(c.prime == 7);
  CHECK(c.ext_degree == 4);
  CHECK(!c.modulus.empty());
  CHECK(c.sieve.empty_intersection);
  CHECK(c.sieve.surviving.empty());
  CHECK(c.specializations_used >= 1);
  CHECK(c.specializations_used <= 64);
  // split sets shrink monotonically
  std::size_t prev = 2;  // quartic: proper splits {1, 2}
  for (const SieveStep& st : c.sieve.steps) {
    CHECK(st.splits_after.size() <= prev);
    prev = st.splits_after.size();
    CHECK(!st.degrees.empty());
    int sum = 0;
    for (int d : st.degrees) sum += d;
    CHECK(sum == 4);
  }
  CHECK(c.sieve.steps.back().splits_after.empty());
}

TEST_CASE("olivine sextic certifies at p = 5") {
  MultiPoly<BigRational> f = olivine_fixture();
  IrreducibilityCertificate c = certify(f, 5, {});
  CHECK(c.verdict == CertVerdict::CertifiedIrreducible);
  CHECK(c.prime == 5);
  CHECK(c.ext_degree == 6);
  CHECK(c.sieve.empty_intersection);
}

TEST_CASE("isotropic tensor yields a verified rational witness") {
  StiffnessTensor t = make(2, "isotropic", {"cP2", "cS2"}, {4, 1});
  MultiPoly<BigRational> f = forward(t, true).to_poly();
  IrreducibilityCertificate c = certify(f, 7, {});
  CHECK(c.verdict == CertVerdict::ReducibleWitness);
  REQUIRE(c.q_factors.has_value());
  CHECK(c.q_factors->first * c.q_factors->second == f);
  CHECK(c.q_factors->first.degree() == 2);
  CHECK(c.q_factors->second.degree() == 2);
  std::set<std::string> got{c.q_factors->first.str(), c.q_factors->second.str()};
  std::set<std::string> want{"1/1*p0^2 + -1/1*p1^2 + -1/1*p2^2",
                             "1/1*p0^2 + -4/1*p1^2 + -4/1*p2^2"};
  CHECK(got == want);
  // the modular pair that triggered the lift is kept as evidence
  CHECK(c.modular_factors.has_value());
}

TEST_CASE("certificates are byte-deterministic for fixed input, prime, seed, budget") {
  MultiPoly<BigRational> f = quartic_fixture();
  IrreducibilityCertificate a = certify(f, 7, {});
  IrreducibilityCertificate b = certify(f, 7, {});
  CHECK(certificate_text(a) == certificate_text(b));
  CertifyOptions other;
  other.seed = 99;
  IrreducibilityCertificate d = certify(f, 7, other);
  CHECK(d.verdict == CertVerdict::CertifiedIrreducible);  // conclusion is seed-independent
}

TEST_CASE("plane sections decide the olivine reduction directly") {
  MultiPoly<BigRational> f = olivine_fixture();
  FqContext ctx = fq_build(5, 6, 1);
  MultiPoly<FqElement> fbar = reduce_mod(f, &ctx);
  SectionOutcome sec = plane_section_certify(fbar, 8, 64, 1);
  CHECK(sec.irreducible);
  CHECK(sec.tries.size() <= 8);
  CHECK(sec.tries.back().outcome == "irreducible");
  CHECK(sec.tries.back().images.size() == 4);
}

TEST_CASE("plane sections never certify a product") {
  std::mt19937_64 rng(7);
  MultiPoly<BigRational> g = random_monic_form(4, 1, rng);
  MultiPoly<BigRational> h = random_monic_form(4, 5, rng);
  FqContext ctx = fq_build(5, 6, 1);
  MultiPoly<FqElement> fbar = reduce_mod(g * h, &ctx);
  SectionOutcome sec = plane_section_certify(fbar, 8, 64, 1);
  CHECK(!sec.irreducible);
  CHECK(sec.tries.size() == 8);
  for (const SectionTry& st : sec.tries) CHECK(st.outcome != "irreducible");
}

TEST_CASE("sieve argument validation") {
  MultiPoly<BigRational> f = quartic_fixture();
  FqContext ctx = fq_build(7, 4, 1);
  MultiPoly<FqElement> fbar = reduce_mod(f, &ctx);
  CHECK_THROWS_AS(degree_pattern_sieve(fbar, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(degree_pattern_sieve(fbar.dehomogenize(0), 8, 1), std::invalid_argument);
  SieveOutcome s = degree_pattern_sieve(fbar, 64, 1);
  CHECK(s.empty_intersection);
  CHECK(s.surviving.empty());

  MultiPoly<FqElement> z;
  CHECK_THROWS_AS(degree_pattern_sieve(z, 8, 1), std::invalid_argument);
  CHECK_THROWS_AS(plane_section_certify(fbar, 8, 64, 1), std::invalid_argument);  // 3 vars
  MultiPoly<FqElement> fol = reduce_mod(olivine_fixture(), &ctx);
  CHECK_THROWS_AS(plane_section_certify(fol, 0, 64, 1), std::invalid_argument);
  CHECK_THROWS_AS(plane_section_certify(fol, 8, 0, 1), std::invalid_argument);
}

TEST_CASE("certify rejects malformed input") {
  MultiPoly<BigRational> f = quartic_fixture();
  CHECK_THROWS_AS(certify(f, 6, {}), DomainError);   // composite
  CHECK_THROWS_AS(certify(f, 1, {}), DomainError);   // not prime
  CHECK_THROWS_AS(certify(f, (1ull << 41) + 1, {}), DomainError);  // too large

  std::vector<std::string> v3{"p0", "p1", "p2"};
  MultiPoly<BigRational> g(v3);
  g.add_term(Monomial(std::vector<int>{2, 0, 0}), BigRational(1));
  g.add_term(Monomial(std::vector<int>{0, 1, 0}), BigRational(1));
  CHECK_THROWS_AS(certify(g, 7, {}), DomainError);  // not homogeneous

  MultiPoly<BigRational> h(v3);
  h.add_term(Monomial(std::vector<int>{2, 0, 0}), BigRational(1, 2));
  h.add_term(Monomial(std::vector<int>{0, 2, 0}), BigRational(1));
  CHECK_THROWS_AS(certify(h, 7, {}), DomainError);  // fractional coefficient

  MultiPoly<BigRational> k(v3);
  k.add_term(Monomial(std::vector<int>{2, 0, 0}), BigRational(2));
  k.add_term(Monomial(std::vector<int>{0, 2, 0}), BigRational(1));
  CHECK_THROWS_AS(certify(k, 7, {}), DomainError);  // leading coefficient not a unit

  MultiPoly<BigRational> m(v3);
  m.add_term(Monomial(std::vector<int>{0, 2, 0}), BigRational(1));
  CHECK_THROWS_AS(certify(m, 7, {}), DomainError);  // first variable absent from the top

  std::vector<std::string> v5{"p0", "p1", "p2", "p3", "p4"};
  MultiPoly<BigRational> w(v5);
  w.add_term(Monomial(std::vector<int>{2, 0, 0, 0, 0}), BigRational(1));
  w.add_term(Monomial(std::vector<int>{0, 0, 0, 0, 2}), BigRational(1));
  CHECK_THROWS_AS(certify(w, 7, {}), UnsupportedError);  // five variables

  MultiPoly<BigRational> deep(v3);
  deep.add_term(Monomial(std::vector<int>{13, 0, 0}), BigRational(1));
  deep.add_term(Monomial(std::vector<int>{0, 13, 0}), BigRational(1));
  CHECK_THROWS_AS(certify(deep, 7, {}), UnsupportedError);  // degree 13

  CertifyOptions bad;
  bad.budget = 0;
  CHECK_THROWS_AS(certify(f, 7, bad), std::invalid_argument);
  bad.budget = 64;
  bad.plane_tries = 0;
  CHECK_THROWS_AS(certify(f, 7, bad), std::invalid_argument);
  CHECK_THROWS_AS(certify(MultiPoly<BigRational>(v3), 7, {}), DomainError);  // zero
}

TEST_CASE("leading-variable content is a genuine rational witness") {
  std::vector<std::string> v3{"p0", "p1", "p2"};
  MultiPoly<BigRational> f(v3);
  f.add_term(Monomial(std::vector<int>{3, 0, 0}), BigRational(1));
  f.add_term(Monomial(std::vector<int>{1, 2, 0}), BigRational(1));
  f.add_term(Monomial(std::vector<int>{1, 0, 2}), BigRational(1));
  IrreducibilityCertificate c = certify(f, 7, {});
  CHECK(c.verdict == CertVerdict::ReducibleWitness);
  REQUIRE(c.q_factors.has_value());
  CHECK(c.q_factors->first.str() == "1/1*p0");
  CHECK(c.q_factors->first * c.q_factors->second == f);
}

TEST_CASE("prime dividing every non-leading coefficient is rejected as inconclusive") {
  std::vector<std::string> v3{"p0", "p1", "p2"};
  MultiPoly<BigRational> f(v3);
  f.add_term(Monomial(std::vector<int>{4, 0, 0}), BigRational(1));
  f.add_term(Monomial(std::vector<int>{0, 4, 0}), BigRational(7));
  f.add_term(Monomial(std::vector<int>{0, 0, 4}), BigRational(7));
  IrreducibilityCertificate c = certify(f, 7, {});
  CHECK(c.verdict == CertVerdict::Inconclusive);
  CHECK(c.note.find("divisible") != std::string::npos);
  REQUIRE(c.modular_factors.has_value());
  CHECK(c.modular_factors->first == "p0");
  // at a good prime the same polynomial certifies
  IrreducibilityCertificate ok = certify(f, 3, {});
  CHECK(ok.verdict == CertVerdict::CertifiedIrreducible);
}

TEST_CASE("split modulo p without a rational factorization stays inconclusive") {
  // p0^2 + p1^2 is irreducible over the rationals but splits at p = 13
  std::vector<std::string> v3{"p0", "p1", "p2"};
  MultiPoly<BigRational> f(v3);
  f.add_term(Monomial(std::vector<int>{2, 0, 0}), BigRational(1));
  f.add_term(Monomial(std::vector<int>{0, 2, 0}), BigRational(1));
  IrreducibilityCertificate c = certify(f, 13, {});
  CHECK(c.verdict == CertVerdict::Inconclusive);
  CHECK(!c.q_factors.has_value());
  REQUIRE(c.modular_factors.has_value());
  CHECK(c.note.find("no rational factorization") != std::string::npos);
}

TEST_CASE("binary forms run through the univariate route") {
  std::vector<std::string> v2{"p0", "p1"};
  MultiPoly<BigRational> f(v2);
  f.add_term(Monomial(std::vector<int>{3, 0}), BigRational(1));
  f.add_term(Monomial(std::vector<int>{0, 3}), BigRational(1));
  IrreducibilityCertificate c = certify(f, 2, {});
  // p0^3 + p1^3 splits off p0 + p1 modulo every prime
  CHECK(c.verdict == CertVerdict::Inconclusive);
  REQUIRE(c.modular_factors.has_value());
  CHECK(!c.modular_factors->first.empty());
  CHECK(!c.modular_factors->second.empty());

  MultiPoly<BigRational> lin(v2);
  lin.add_term(Monomial(std::vector<int>{1, 0}), BigRational(1));
  lin.add_term(Monomial(std::vector<int>{0, 1}), BigRational(2));
  IrreducibilityCertificate cl = certify(lin, 7, {});
  CHECK(cl.verdict == CertVerdict::CertifiedIrreducible);
}

TEST_CASE("prime scan stops at the first conclusive certificate") {
  StiffnessTensor t = make(2, "isotropic", {"cP2", "cS2"}, {4, 1});
  MultiPoly<BigRational> f = forward(t, true).to_poly();
  IrreducibilityCertificate c = certify_scan(f, 5, {});
  CHECK(c.verdict == CertVerdict::ReducibleWitness);
  REQUIRE(c.q_factors.has_value());
  CHECK(c.q_factors->first * c.q_factors->second == f);
  CHECK(c.prime <= 11);
  CHECK_THROWS_AS(certify_scan(f, 0, {}), std::invalid_argument);

  IrreducibilityCertificate q = certify_scan(quartic_fixture(), 5, {});
  CHECK(q.verdict == CertVerdict::CertifiedIrreducible);
}

TEST_CASE("random reducible products are never certified irreducible") {
  std::mt19937_64 rng(20240817);
  const std::uint64_t primes[5] = {2, 3, 5, 7, 13};
  int witnessed = 0;
  for (int it = 0; it < 200; ++it) {
    int nv = 3 + static_cast<int>(rng() % 2);
    int dg = 1 + static_cast<int>(rng() % 3);
    int dh = 1 + static_cast<int>(rng() % 3);
    MultiPoly<BigRational> a = random_monic_form(nv, dg, rng);
    MultiPoly<BigRational> b = random_monic_form(nv, dh, rng);
    MultiPoly<BigRational> f = a * b;
    CertifyOptions opt;
    opt.seed = rng();
    IrreducibilityCertificate c = certify(f, primes[it % 5], opt);
    REQUIRE(c.verdict != CertVerdict::CertifiedIrreducible);
    if (c.verdict == CertVerdict::ReducibleWitness) {
      REQUIRE(c.q_factors.has_value());
      REQUIRE(c.q_factors->first * c.q_factors->second == f);
      ++witnessed;
    }
  }
  CHECK(witnessed > 0);  // the rational lift fires on a healthy share
}
