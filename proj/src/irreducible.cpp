#include "chr/irreducible.hpp"

#include <algorithm>
#include <array>
#include <random>
#include <sstream>
#include <stdexcept>

#include "chr/errors.hpp"

namespace chr {

namespace {

constexpr std::uint64_t kSieveSalt = 0xa24baed4963ee407ull;
constexpr std::uint64_t kFactorSalt = 0x9fb21c651e98df25ull;
constexpr std::uint64_t kPlaneSalt = 0x285bbcdcc01fb71full;
constexpr std::uint64_t kBiSalt = 0x71c846b21144d064ull;
constexpr std::uint64_t kLiftSalt = 0x8e9c3f0b52d7a1c9ull;

// Large prime kept well under the field-builder's 2^40 bound; used as a
// d = 1 context when attempting to recognize rational factor pairs.
constexpr std::uint64_t kLiftPrime = 1099511627689ull;

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::uint64_t subseed(std::uint64_t seed, std::uint64_t salt, std::uint64_t i) {
  return mix64(seed ^ mix64(salt + 0x9e3779b97f4a7c15ull * (i + 1)));
}

const FqContext* context_of(const MultiPoly<FqElement>& f) {
  for (const auto& [m, c] : f.terms())
    if (c.ctx()) return c.ctx();
  throw std::invalid_argument("expected coefficients carrying a field context");
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ",";
    os << v[i];
  }
  return os.str();
}

// Row rank of a 4x3 matrix by elimination.
int rank_of(std::array<std::array<FqElement, 3>, 4> m) {
  int rank = 0;
  for (int col = 0; col < 3 && rank < 4; ++col) {
    int piv = -1;
    for (int r = rank; r < 4; ++r)
      if (!m[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)].is_zero()) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    std::swap(m[static_cast<std::size_t>(rank)], m[static_cast<std::size_t>(piv)]);
    FqElement inv = m[static_cast<std::size_t>(rank)][static_cast<std::size_t>(col)].inverse();
    for (int r = rank + 1; r < 4; ++r) {
      auto& row = m[static_cast<std::size_t>(r)];
      if (row[static_cast<std::size_t>(col)].is_zero()) continue;
      FqElement f = row[static_cast<std::size_t>(col)] * inv;
      for (int c = col; c < 3; ++c)
        row[static_cast<std::size_t>(c)] =
            row[static_cast<std::size_t>(c)] -
            f * m[static_cast<std::size_t>(rank)][static_cast<std::size_t>(c)];
    }
    ++rank;
  }
  return rank;
}

template <class K>
bool leading_var_divides(const MultiPoly<K>& f) {
  for (const auto& [m, c] : f.terms())
    if (m.e[0] == 0) return false;
  return true;
}

// Rebuild a univariate factor of the dehomogenized binary form as a
// homogeneous binary polynomial of its own degree.
MultiPoly<FqElement> binary_from_univariate(const FqPoly& u, const std::vector<std::string>& vars) {
  MultiPoly<FqElement> r(vars);
  int d = u.degree();
  for (int k = 0; k <= d; ++k) {
    FqElement c = u.coeff(k);
    if (c.is_zero()) continue;
    Monomial m(std::vector<int>{k, d - k});
    r.add_term(m, c);
  }
  return r;
}

// Factor the dehomogenization modulo one large prime, normalize the pair by
// the constant term, lift coefficients centered, rehomogenize and verify by
// exact multiplication. Returns nothing unless the product reproduces f.
std::optional<std::pair<MultiPoly<BigRational>, MultiPoly<BigRational>>> lift_rational_pair(
    const MultiPoly<BigRational>& f, const CertifyOptions& opt) {
  FqContext ctx = fq_build(kLiftPrime, 1, 1);
  MultiPoly<BigRational> dehq = f.dehomogenize(0);
  MultiPoly<FqElement> fl = reduce_mod(dehq, &ctx);
  if (fl.degree() != dehq.degree()) return std::nullopt;
  BiResult bi = bi_is_irreducible(fl, opt.budget, mix64(opt.seed ^ kLiftSalt));
  if (bi.verdict != BiVerdict::Reducible || !bi.factors) return std::nullopt;
  MultiPoly<FqElement> g = bi.factors->first;
  MultiPoly<FqElement> h = bi.factors->second;
  // g(0,0) * h(0,0) equals the dehomogenized leading unit, so both constants
  // are nonzero; normalizing g to constant term 1 aligns the pair with a
  // sign-consistent integer factorization whenever one exists.
  FqElement c0 = g.coefficient(Monomial(std::size_t{2}));
  if (c0.is_zero()) return std::nullopt;
  g = g.scaled(c0.inverse());
  h = h.scaled(c0);
  auto lift_one = [](const MultiPoly<FqElement>& a) {
    MultiPoly<BigRational> out(a.vars(), a.order());
    for (const auto& [m, c] : a.terms()) {
      std::uint64_t z = c.rep(0);
      long s = z > kLiftPrime / 2 ? static_cast<long>(z) - static_cast<long>(kLiftPrime)
                                  : static_cast<long>(z);
      out.add_term(m, BigRational(s));
    }
    return out;
  };
  MultiPoly<BigRational> g1 = lift_one(g);
  MultiPoly<BigRational> h1 = lift_one(h);
  if (g1.degree() < 1 || h1.degree() < 1) return std::nullopt;
  MultiPoly<BigRational> gh = g1.homogenize(f.vars()[0], 0);
  MultiPoly<BigRational> hh = h1.homogenize(f.vars()[0], 0);
  if (gh.degree() + hh.degree() != f.degree()) return std::nullopt;
  if (!(gh * hh == f)) return std::nullopt;
  return std::make_pair(gh, hh);
}

}  // namespace

std::string verdict_name(CertVerdict v) {
  switch (v) {
    case CertVerdict::CertifiedIrreducible:
      return "certified-irreducible";
    case CertVerdict::ReducibleWitness:
      return "reducible-witness";
    case CertVerdict::Inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

SieveOutcome degree_pattern_sieve(const MultiPoly<FqElement>& fbar, int budget,
                                  std::uint64_t seed) {
  if (budget < 1) throw std::invalid_argument("degree_pattern_sieve: budget must be positive");
  if (fbar.is_zero()) throw std::invalid_argument("degree_pattern_sieve: zero input");
  if (!fbar.is_homogeneous())
    throw std::invalid_argument("degree_pattern_sieve: input must be homogeneous");
  const std::size_t nv = fbar.nvars();
  if (nv < 2) throw std::invalid_argument("degree_pattern_sieve: need at least two variables");
  const int d = fbar.degree();
  if (d < 1) throw std::invalid_argument("degree_pattern_sieve: constant input");
  if (fbar.degree_in(0) != d)
    throw std::invalid_argument(
        "degree_pattern_sieve: the first variable must carry the full degree");
  const FqContext* ctx = context_of(fbar);

  SieveOutcome out;
  // canonical split sizes a with 1 <= a <= d - a
  std::vector<char> alive(static_cast<std::size_t>(d) / 2 + 1, 1);
  int alive_count = d / 2;
  auto surviving = [&]() {
    std::vector<int> v;
    for (int a = 1; a <= d / 2; ++a)
      if (alive[static_cast<std::size_t>(a)]) v.push_back(a);
    return v;
  };
  out.surviving = surviving();
  if (alive_count == 0) {  // linear forms admit no proper split
    out.empty_intersection = true;
    return out;
  }

  const std::vector<std::string> tv{"t"};
  for (int i = 0; i < budget; ++i) {
    SieveStep st;
    st.subseed = subseed(seed, kSieveSalt, static_cast<std::uint64_t>(i));
    std::mt19937_64 rng(st.subseed);
    std::vector<MultiPoly<FqElement>> images;
    images.push_back(MultiPoly<FqElement>::variable(tv, 0, FqElement::one(ctx)));
    for (std::size_t j = 1; j < nv; ++j) {
      FqElement v = fq_random(ctx, rng);
      st.point.push_back(v.str());
      images.push_back(MultiPoly<FqElement>::constant(tv, v));
    }
    MultiPoly<FqElement> u = fbar.substitute_all(images);
    std::vector<FqElement> uc(static_cast<std::size_t>(d) + 1, FqElement::zero(ctx));
    for (const auto& [m, c] : u.terms()) uc[static_cast<std::size_t>(m.e[0])] = c;
    FqPoly up(ctx, uc);
    // the unit leading coefficient keeps every specialization at full degree
    if (up.degree() != d) throw std::logic_error("degree_pattern_sieve: specialization lost degree");
    UniFactorization fac = uni_factor(up, mix64(st.subseed ^ kFactorSalt));
    for (const auto& [gf, e] : fac.factors)
      for (int k = 0; k < e; ++k) st.degrees.push_back(gf.degree());
    std::sort(st.degrees.begin(), st.degrees.end());

    std::vector<char> dp(static_cast<std::size_t>(d) + 1, 0);
    dp[0] = 1;
    for (int dg : st.degrees)
      for (int s = d; s >= dg; --s)
        if (dp[static_cast<std::size_t>(s - dg)]) dp[static_cast<std::size_t>(s)] = 1;
    int before = alive_count;
    for (int a = 1; a <= d / 2; ++a)
      if (alive[static_cast<std::size_t>(a)] && !dp[static_cast<std::size_t>(a)]) {
        alive[static_cast<std::size_t>(a)] = 0;
        --alive_count;
      }
    if (alive_count > before) throw std::logic_error("degree_pattern_sieve: split set grew");
    st.splits_after = surviving();
    out.steps.push_back(std::move(st));
    if (alive_count == 0) {
      out.empty_intersection = true;
      break;
    }
  }
  out.surviving = surviving();
  return out;
}

SectionOutcome plane_section_certify(const MultiPoly<FqElement>& fbar, int tries, int bi_budget,
                                     std::uint64_t seed) {
  if (tries < 1) throw std::invalid_argument("plane_section_certify: tries must be positive");
  if (bi_budget < 1) throw std::invalid_argument("plane_section_certify: budget must be positive");
  if (fbar.is_zero() || !fbar.is_homogeneous())
    throw std::invalid_argument("plane_section_certify: input must be homogeneous and nonzero");
  if (fbar.nvars() != 4)
    throw std::invalid_argument("plane_section_certify: expected four variables");
  const int d = fbar.degree();
  if (d < 1) throw std::invalid_argument("plane_section_certify: constant input");
  const FqContext* ctx = context_of(fbar);
  const std::vector<std::string> uv{"u0", "u1", "u2"};

  SectionOutcome out;
  for (int t = 0; t < tries; ++t) {
    SectionTry st;
    st.subseed = subseed(seed, kPlaneSalt, static_cast<std::uint64_t>(t));
    std::mt19937_64 rng(st.subseed);
    std::array<std::array<FqElement, 3>, 4> a;
    std::vector<MultiPoly<FqElement>> images;
    for (std::size_t i = 0; i < 4; ++i) {
      MultiPoly<FqElement> im(uv);
      for (std::size_t j = 0; j < 3; ++j) {
        a[i][j] = fq_random(ctx, rng);
        if (a[i][j].is_zero()) continue;
        Monomial m(3);
        m.e[j] = 1;
        im.add_term(m, a[i][j]);
      }
      st.images.push_back(im.str());
      images.push_back(std::move(im));
    }
    if (rank_of(a) < 3) {
      st.outcome = "degenerate: dependent linear forms";
      out.tries.push_back(std::move(st));
      continue;
    }
    MultiPoly<FqElement> g = fbar.substitute_all(images);
    if (g.degree() != d) {
      st.outcome = "degenerate: degree drop";
      out.tries.push_back(std::move(st));
      continue;
    }
    MultiPoly<FqElement> deh = g.dehomogenize(0);
    if (deh.degree() != d) {
      st.outcome = "degenerate: u0 divides the section";
      out.tries.push_back(std::move(st));
      continue;
    }
    BiResult bi = bi_is_irreducible(deh, bi_budget, mix64(st.subseed ^ kBiSalt));
    st.bi_specializations = bi.specializations;
    bool done = bi.verdict == BiVerdict::Irreducible;
    if (done)
      st.outcome = "irreducible";
    else if (bi.verdict == BiVerdict::Reducible)
      st.outcome = "reducible";
    else
      st.outcome = "inconclusive: " + bi.note;
    out.tries.push_back(std::move(st));
    if (done) {
      out.irreducible = true;
      break;
    }
  }
  return out;
}

IrreducibilityCertificate certify(const MultiPoly<BigRational>& f, std::uint64_t p,
                                  const CertifyOptions& opt) {
  if (opt.budget < 1) throw std::invalid_argument("certify: budget must be positive");
  if (opt.plane_tries < 1) throw std::invalid_argument("certify: plane_tries must be positive");
  if (f.is_zero() || f.degree() < 1)
    throw DomainError("certify: input must be a nonconstant polynomial");
  if (!f.is_homogeneous()) throw DomainError("certify: input is not homogeneous");
  const std::size_t nv = f.nvars();
  if (nv < 2 || nv > 4)
    throw UnsupportedError("certify: expected 2 to 4 variables, got " + std::to_string(nv));
  const int dtot = f.degree();
  if (dtot > 12)
    throw UnsupportedError("certify: total degree " + std::to_string(dtot) +
                           " is above the supported bound 12");
  for (const auto& [m, c] : f.terms())
    if (!c.is_integer()) throw DomainError("certify: coefficients must be integers");
  if (!fp::is_prime(p))
    throw DomainError("certify: modulus " + std::to_string(p) + " is not prime");
  if (p >= (1ull << 40))
    throw DomainError("certify: prime too large, needs p < 2^40");

  const std::string v0 = f.vars()[0];
  Monomial lead(nv);
  lead.e[0] = dtot;
  BigRational c0 = f.coefficient(lead);
  if (!(c0 == BigRational(1) || c0 == BigRational(-1)))
    throw DomainError("certify: coefficient of " + v0 + "^" + std::to_string(dtot) +
                      " must be +1 or -1");

  IrreducibilityCertificate cert;
  cert.prime = p;
  cert.ext_degree = dtot;
  cert.input = f.str();
  cert.seed = opt.seed;
  cert.budget = opt.budget;

  if (dtot == 1) {
    cert.verdict = CertVerdict::CertifiedIrreducible;
    cert.route_note = "trivial: linear form";
    cert.note = "linear forms are irreducible";
    return cert;
  }

  if (leading_var_divides(f)) {
    MultiPoly<BigRational> lin =
        MultiPoly<BigRational>::variable(f.vars(), 0, BigRational(1), f.order());
    MultiPoly<BigRational> q(f.vars(), f.order());
    for (const auto& [m, c] : f.terms()) {
      Monomial mm(m);
      mm.e[0] -= 1;
      q.add_term(mm, c);
    }
    cert.verdict = CertVerdict::ReducibleWitness;
    cert.q_factors = std::make_pair(lin, q);
    cert.route_note = "rational content in the leading variable";
    cert.note = v0 + " divides the input";
    return cert;
  }

  FqContext ctx = fq_build(p, dtot, opt.seed);
  cert.modulus = ctx.modulus_str();
  MultiPoly<FqElement> fbar = reduce_mod(f, &ctx);
  if (fbar.degree() != dtot)
    throw DomainError("certify: reduction modulo " + std::to_string(p) +
                      " drops the degree; choose another prime");

  if (leading_var_divides(fbar)) {
    MultiPoly<FqElement> q(fbar.vars(), fbar.order());
    for (const auto& [m, c] : fbar.terms()) {
      Monomial mm(m);
      mm.e[0] -= 1;
      q.add_term(mm, c);
    }
    cert.verdict = CertVerdict::Inconclusive;
    cert.modular_factors = std::make_pair(v0, q.str());
    cert.route_note = "degenerate reduction";
    cert.note = "reduction is divisible by " + v0 + " modulo " + std::to_string(p) +
                "; criterion inconclusive at this prime";
    return cert;
  }

  cert.sieve = degree_pattern_sieve(fbar, opt.budget, opt.seed);
  cert.specializations_used = static_cast<int>(cert.sieve.steps.size());
  if (cert.sieve.empty_intersection) {
    cert.verdict = CertVerdict::CertifiedIrreducible;
    cert.route_note = "degree-pattern sieve: empty split intersection";
    cert.note = "irreducible over the extension field; absolute irreducibility follows";
    return cert;
  }

  if (nv == 2) {
    // binary form: the dehomogenization is univariate, so factor it outright
    MultiPoly<FqElement> deh = fbar.dehomogenize(1);
    std::vector<FqElement> uc(static_cast<std::size_t>(dtot) + 1, FqElement::zero(&ctx));
    for (const auto& [m, c] : deh.terms()) uc[static_cast<std::size_t>(m.e[0])] = c;
    FqPoly up(&ctx, uc);
    UniFactorization fac = uni_factor(up, subseed(opt.seed, kFactorSalt, 0));
    cert.route_note = "univariate decision on the dehomogenized binary form";
    if (fac.factors.size() == 1 && fac.factors[0].second == 1) {
      cert.verdict = CertVerdict::CertifiedIrreducible;
      cert.note = "irreducible over the extension field; absolute irreducibility follows";
      return cert;
    }
    FqPoly g0 = fac.factors[0].first;
    FqPoly rest = FqPoly::constant(&ctx, fac.unit);
    for (std::size_t fi = 0; fi < fac.factors.size(); ++fi) {
      int e = fac.factors[fi].second - (fi == 0 ? 1 : 0);
      for (int k = 0; k < e; ++k) rest = rest * fac.factors[fi].first;
    }
    MultiPoly<FqElement> gb = binary_from_univariate(g0, fbar.vars());
    MultiPoly<FqElement> hb = binary_from_univariate(rest, fbar.vars());
    cert.verdict = CertVerdict::Inconclusive;
    cert.modular_factors = std::make_pair(gb.str(), hb.str());
    cert.note = "reduction splits modulo " + std::to_string(p) +
                "; criterion inconclusive at this prime";
    return cert;
  }

  if (nv == 3) {
    MultiPoly<FqElement> deh = fbar.dehomogenize(0);
    BiResult bi = bi_is_irreducible(deh, opt.budget, subseed(opt.seed, kBiSalt, 0));
    cert.bivariate_specializations = bi.specializations;
    cert.route_note = "bivariate decision: " + bi.note;
    if (bi.verdict == BiVerdict::Irreducible) {
      cert.verdict = CertVerdict::CertifiedIrreducible;
      cert.note = "irreducible over the extension field; absolute irreducibility follows";
      return cert;
    }
    if (bi.verdict == BiVerdict::Reducible && bi.factors) {
      MultiPoly<FqElement> gh = bi.factors->first.homogenize(v0, 0);
      MultiPoly<FqElement> hh = bi.factors->second.homogenize(v0, 0);
      cert.modular_factors = std::make_pair(gh.str(), hh.str());
      auto lifted = lift_rational_pair(f, opt);
      if (lifted) {
        cert.verdict = CertVerdict::ReducibleWitness;
        cert.q_factors = lifted;
        cert.note = "splits over the rationals; factor pair verified by exact multiplication";
      } else {
        cert.verdict = CertVerdict::Inconclusive;
        cert.note = "reduction splits modulo " + std::to_string(p) +
                    " and no rational factorization was verified; criterion inconclusive "
                    "at this prime";
      }
      return cert;
    }
    cert.verdict = CertVerdict::Inconclusive;
    cert.note = "bivariate decision exhausted its budget";
    return cert;
  }

  SectionOutcome sec =
      plane_section_certify(fbar, opt.plane_tries, opt.budget, subseed(opt.seed, kPlaneSalt, 0));
  cert.sections = sec.tries;
  cert.plane_tries_used = static_cast<int>(sec.tries.size());
  if (sec.irreducible) {
    cert.verdict = CertVerdict::CertifiedIrreducible;
    cert.route_note = "plane section: irreducible full-degree restriction";
    cert.note = "irreducible over the extension field; absolute irreducibility follows";
    return cert;
  }
  cert.verdict = CertVerdict::Inconclusive;
  cert.route_note = "plane sections exhausted";
  cert.note = "no plane section certified irreducibility within the try budget; surviving "
              "splits: [" +
              join(cert.sieve.surviving) + "]";
  return cert;
}

IrreducibilityCertificate certify_scan(const MultiPoly<BigRational>& f, int max_primes,
                                       const CertifyOptions& opt) {
  if (max_primes < 1) throw std::invalid_argument("certify_scan: max_primes must be positive");
  IrreducibilityCertificate last;
  std::uint64_t p = 2;
  for (int i = 0; i < max_primes; ++i) {
    last = certify(f, p, opt);
    if (last.verdict != CertVerdict::Inconclusive) return last;
    do {
      ++p;
    } while (!fp::is_prime(p));
  }
  return last;
}

std::string certificate_text(const IrreducibilityCertificate& c) {
  std::ostringstream os;
  os << "verdict: " << verdict_name(c.verdict) << "\n";
  os << "prime: " << c.prime << "\n";
  os << "extension-degree: " << c.ext_degree << "\n";
  os << "modulus: " << (c.modulus.empty() ? "-" : c.modulus) << "\n";
  os << "input: " << c.input << "\n";
  os << "seed: " << c.seed << "\n";
  os << "budget: " << c.budget << "\n";
  os << "specializations-used: " << c.specializations_used << "\n";
  os << "plane-tries-used: " << c.plane_tries_used << "\n";
  for (std::size_t i = 0; i < c.sieve.steps.size(); ++i) {
    const SieveStep& st = c.sieve.steps[i];
    os << "sieve-step " << i << ": seed=" << st.subseed << " point=(" << join(st.point)
       << ") degrees=[" << join(st.degrees) << "] splits=[" << join(st.splits_after) << "]\n";
  }
  os << "surviving-splits: [" << join(c.sieve.surviving) << "]\n";
  for (std::size_t i = 0; i < c.sections.size(); ++i) {
    const SectionTry& st = c.sections[i];
    os << "section-try " << i << ": seed=" << st.subseed << " outcome=" << st.outcome
       << " specializations=" << st.bi_specializations << " images=(" << join(st.images)
       << ")\n";
  }
  if (!c.route_note.empty()) os << "route: " << c.route_note << "\n";
  if (c.bivariate_specializations)
    os << "bivariate-specializations: " << c.bivariate_specializations << "\n";
  if (c.q_factors) {
    os << "q-factor-0: " << c.q_factors->first.str() << "\n";
    os << "q-factor-1: " << c.q_factors->second.str() << "\n";
  }
  if (c.modular_factors) {
    os << "modular-factor-0: " << c.modular_factors->first << "\n";
    os << "modular-factor-1: " << c.modular_factors->second << "\n";
  }
  os << "note: " << c.note << "\n";
  return os.str();
}

}  // namespace chr
