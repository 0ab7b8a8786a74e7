#include "chr/reconstruct.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "chr/errors.hpp"

namespace chr {

namespace {

using Q = BigRational;
using Poly = MultiPoly<Q>;

constexpr std::size_t kMaxUnknowns = 16;
constexpr int kMaxGeneratorDegree = 4;
constexpr int kMaxPairReductions = 50000;
constexpr std::size_t kMaxBasisSize = 512;
constexpr long kMaxQuotientBox = 1 << 21;

Poly monic(const Poly& f) {
  return f.scaled(f.leading_coefficient().inverse());
}

// integer-coefficient polynomial over the given variables; terms are
// separated by + or -, factors inside a term by '*', powers by '^'
Poly parse_poly(const std::string& s, const std::vector<std::string>& vars, TermOrder ord) {
  Poly out(vars, ord);
  std::size_t i = 0;
  const std::size_t n = s.size();
  auto skip = [&] {
    while (i < n && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  };
  skip();
  while (i < n) {
    long sign = 1;
    if (s[i] == '+') {
      ++i;
    } else if (s[i] == '-') {
      sign = -1;
      ++i;
    }
    skip();
    Q coef(sign);
    Monomial m(vars.size());
    bool more = true;
    while (more) {
      skip();
      if (i < n && std::isdigit(static_cast<unsigned char>(s[i]))) {
        long v = 0;
        while (i < n && std::isdigit(static_cast<unsigned char>(s[i]))) {
          v = v * 10 + (s[i] - '0');
          ++i;
        }
        coef *= Q(v);
      } else {
        std::size_t j = i;
        while (j < n && std::isalnum(static_cast<unsigned char>(s[j]))) ++j;
        if (j == i) throw std::invalid_argument("parse_poly: bad factor in '" + s + "'");
        const std::string name = s.substr(i, j - i);
        auto it = std::find(vars.begin(), vars.end(), name);
        if (it == vars.end()) throw std::invalid_argument("parse_poly: unknown variable " + name);
        i = j;
        int e = 1;
        if (i < n && s[i] == '^') {
          ++i;
          e = 0;
          while (i < n && std::isdigit(static_cast<unsigned char>(s[i]))) {
            e = e * 10 + (s[i] - '0');
            ++i;
          }
        }
        m.e[static_cast<std::size_t>(it - vars.begin())] += e;
      }
      skip();
      if (i < n && s[i] == '*') {
        ++i;
      } else {
        more = false;
      }
    }
    out.add_term(m, coef);
    skip();
  }
  return out;
}

// Buchberger core without the public envelope check; the extraction
// recursion feeds it basis elements whose degree may exceed the envelope.
GroebnerBasis buchberger_core(std::vector<Poly> gens) {
  GroebnerBasis out;
  gens.erase(std::remove_if(gens.begin(), gens.end(), [](const Poly& g) { return g.is_zero(); }),
             gens.end());
  if (gens.empty()) {
    out.reduced = true;
    return out;
  }
  const TermOrder ord = gens.front().order();
  const auto& vars = gens.front().vars();
  for (const auto& g : gens)
    if (g.vars() != vars || g.order() != ord)
      throw std::invalid_argument("buchberger: generators disagree on variables or order");
  out.order = ord;
  MonoLess less{ord};

  std::vector<Poly> G;
  G.reserve(gens.size());
  for (const auto& g : gens) G.push_back(monic(g));

  struct Pair {
    std::size_t i, j;
    Monomial lcm;
  };
  std::vector<Pair> pending;
  auto push_pairs = [&](std::size_t j) {
    for (std::size_t i = 0; i < j; ++i)
      pending.push_back({i, j, G[i].leading_monomial().lcm(G[j].leading_monomial())});
  };
  for (std::size_t j = 1; j < G.size(); ++j) push_pairs(j);

  int reductions = 0;
  while (!pending.empty()) {
    // normal strategy: smallest lcm wins, ties by pair index
    std::size_t best = 0;
    for (std::size_t k = 1; k < pending.size(); ++k) {
      const Pair &a = pending[k], &b = pending[best];
      if (less(a.lcm, b.lcm) ||
          (a.lcm == b.lcm && (a.i < b.i || (a.i == b.i && a.j < b.j))))
        best = k;
    }
    Pair pr = pending[best];
    pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(best));
    // coprime leading terms: S-polynomial reduces to zero
    if (pr.lcm == G[pr.i].leading_monomial().mul(G[pr.j].leading_monomial())) continue;
    if (++reductions > kMaxPairReductions)
      throw ResourceError("buchberger: pair reduction budget exhausted");
    Poly h = normal_form(s_polynomial(G[pr.i], G[pr.j]), G);
    if (h.is_zero()) continue;
    G.push_back(monic(h));
    if (G.size() > kMaxBasisSize) throw ResourceError("buchberger: basis size limit exceeded");
    push_pairs(G.size() - 1);
  }

  // minimalize: drop elements whose leading term another's divides
  std::vector<Poly> minimal;
  for (std::size_t i = 0; i < G.size(); ++i) {
    bool redundant = false;
    for (std::size_t j = 0; j < G.size() && !redundant; ++j) {
      if (i == j) continue;
      const Monomial &mi = G[i].leading_monomial(), &mj = G[j].leading_monomial();
      if (mj.divides(mi) && (mi != mj || j < i)) redundant = true;
    }
    if (!redundant) minimal.push_back(G[i]);
  }
  // tail-reduce each element against the others
  std::vector<Poly> reduced(minimal);
  for (std::size_t i = 0; i < reduced.size(); ++i) {
    std::vector<Poly> others;
    for (std::size_t j = 0; j < reduced.size(); ++j)
      if (j != i) others.push_back(reduced[j]);
    reduced[i] = monic(normal_form(reduced[i], others));
  }
  std::sort(reduced.begin(), reduced.end(), [&](const Poly& a, const Poly& b) {
    return less(b.leading_monomial(), a.leading_monomial());
  });
  out.basis = std::move(reduced);
  out.reduced = true;
  return out;
}

bool is_unit_basis(const GroebnerBasis& gb) {
  return gb.basis.size() == 1 && gb.basis.front().degree() == 0;
}

// ---- univariate rational root extraction ----------------------------------

// dense ascending coefficients of a univariate polynomial over Q
using UniQ = std::vector<Q>;

UniQ uni_trim(UniQ a) {
  while (!a.empty() && a.back().is_zero()) a.pop_back();
  return a;
}

UniQ uni_derivative(const UniQ& a) {
  UniQ d;
  for (std::size_t k = 1; k < a.size(); ++k) d.push_back(a[k] * Q(static_cast<long>(k)));
  return uni_trim(std::move(d));
}

// remainder of a by b; b nonzero
UniQ uni_rem(UniQ a, const UniQ& b) {
  a = uni_trim(std::move(a));
  while (a.size() >= b.size() && !a.empty()) {
    Q f = a.back() / b.back();
    std::size_t off = a.size() - b.size();
    for (std::size_t k = 0; k < b.size(); ++k) a[off + k] -= f * b[k];
    a = uni_trim(std::move(a));
  }
  return a;
}

// exact quotient a / b (remainder known to vanish)
UniQ uni_quot(UniQ a, const UniQ& b) {
  a = uni_trim(std::move(a));
  UniQ q(a.size() >= b.size() ? a.size() - b.size() + 1 : 0, Q(0));
  while (a.size() >= b.size() && !a.empty()) {
    Q f = a.back() / b.back();
    std::size_t off = a.size() - b.size();
    q[off] = f;
    for (std::size_t k = 0; k < b.size(); ++k) a[off + k] -= f * b[k];
    a = uni_trim(std::move(a));
  }
  return uni_trim(std::move(q));
}

UniQ uni_gcd(UniQ a, UniQ b) {
  a = uni_trim(std::move(a));
  b = uni_trim(std::move(b));
  while (!b.empty()) {
    UniQ r = uni_rem(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty()) {
    Q inv = a.back().inverse();
    for (auto& c : a) c *= inv;
  }
  return a;
}

Q uni_eval(const UniQ& a, const Q& x) {
  Q acc(0);
  for (std::size_t k = a.size(); k-- > 0;) acc = acc * x + a[k];
  return acc;
}

mpf_class uni_eval_mpf(const std::vector<mpz_class>& w, const mpf_class& x) {
  mpf_class acc(0, 256);
  for (std::size_t k = w.size(); k-- > 0;) acc = acc * x + mpf_class(w[k], 256);
  return acc;
}

mpz_class round_to_mpz(const mpf_class& x) {
  mpf_class r(0, 256);
  if (x >= 0)
    r = floor(x + 0.5);
  else
    r = ceil(x - 0.5);
  mpz_class z;
  mpz_set_f(z.get_mpz_t(), r.get_mpf_t());
  return z;
}

std::vector<unsigned long> small_divisors(const mpz_class& m) {
  std::vector<unsigned long> out{1};
  mpz_class a = abs(m);
  if (a <= 1 || !a.fits_ulong_p() || a.get_ui() > 1000000UL) return out;
  unsigned long v = a.get_ui();
  for (unsigned long d = 2; d * d <= v; ++d) {
    if (v % d == 0) {
      out.push_back(d);
      if (d != v / d) out.push_back(v / d);
    }
  }
  out.push_back(v);
  std::sort(out.begin(), out.end());
  return out;
}

// Distinct rational roots. Degrees 1 and 2 are decided exactly; from degree
// 3 on, real roots of the square-free part are located numerically and each
// candidate p/q (q dividing the leading coefficient) is verified by exact
// evaluation, so a reported root is always exact while a missed one merely
// undercounts the rational part of the fiber.
std::vector<Q> rational_roots(UniQ a) {
  std::vector<Q> roots;
  a = uni_trim(std::move(a));
  if (a.empty()) throw std::invalid_argument("rational_roots: zero polynomial");
  std::size_t shift = 0;
  while (shift < a.size() && a[shift].is_zero()) ++shift;
  if (shift > 0) {
    roots.push_back(Q(0));
    a.erase(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(shift));
  }
  if (a.size() <= 1) return roots;

  // clear denominators, strip content
  mpz_class den(1);
  for (const auto& c : a) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.den().get_mpz_t());
  std::vector<mpz_class> z(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) z[k] = a[k].num() * (den / a[k].den());
  mpz_class content(0);
  for (const auto& v : z) mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), v.get_mpz_t());
  for (auto& v : z) v /= content;

  const std::size_t d = z.size() - 1;
  if (d == 1) {
    roots.push_back(Q(mpq_class(-z[0], z[1])));
    return roots;
  }
  if (d == 2) {
    mpz_class disc = z[1] * z[1] - 4 * z[2] * z[0];
    if (sgn(disc) < 0) return roots;
    if (!mpz_perfect_square_p(disc.get_mpz_t())) return roots;
    mpz_class s;
    mpz_sqrt(s.get_mpz_t(), disc.get_mpz_t());
    roots.push_back(Q(mpq_class(-z[1] + s, 2 * z[2])));
    Q r2 = Q(mpq_class(-z[1] - s, 2 * z[2]));
    if (std::find(roots.begin(), roots.end(), r2) == roots.end()) roots.push_back(r2);
    return roots;
  }

  // square-free part, then numeric localization with exact confirmation
  UniQ aq(z.size());
  for (std::size_t k = 0; k < z.size(); ++k) aq[k] = Q(mpq_class(z[k]));
  UniQ g = uni_gcd(aq, uni_derivative(aq));
  UniQ sf = g.size() <= 1 ? aq : uni_quot(aq, g);
  mpz_class sden(1);
  for (const auto& c : sf) mpz_lcm(sden.get_mpz_t(), sden.get_mpz_t(), c.den().get_mpz_t());
  std::vector<mpz_class> w(sf.size());
  for (std::size_t k = 0; k < sf.size(); ++k) w[k] = sf[k].num() * (sden / sf[k].den());

  mpf_class bound(1, 256);
  for (std::size_t k = 0; k + 1 < w.size(); ++k) {
    mpf_class t = mpf_class(abs(w[k]), 256) / mpf_class(abs(w.back()), 256);
    if (t > bound) bound = t;
  }
  bound += 1;
  const int grid = 8192;
  mpf_class lo = -bound, step = (bound * 2) / grid;
  std::vector<unsigned long> dens = small_divisors(w.back());
  auto try_candidate = [&](const Q& cand) {
    if (uni_eval(aq, cand).is_zero() &&
        std::find(roots.begin(), roots.end(), cand) == roots.end())
      roots.push_back(cand);
  };
  mpf_class x0 = lo, f0 = uni_eval_mpf(w, x0);
  for (int k = 1; k <= grid; ++k) {
    mpf_class x1 = lo + step * k, f1 = uni_eval_mpf(w, x1);
    if (sgn(f0) == 0) {
      for (unsigned long q : dens) try_candidate(Q(mpq_class(round_to_mpz(x0 * q), q)));
    } else if (sgn(f0) * sgn(f1) < 0) {
      mpf_class a0 = x0, b0 = x1, fa = f0;
      for (int it = 0; it < 300; ++it) {
        mpf_class mid = (a0 + b0) / 2, fm = uni_eval_mpf(w, mid);
        if (sgn(fm) == 0) {
          a0 = b0 = mid;
          break;
        }
        if (sgn(fm) == sgn(fa)) {
          a0 = mid;
          fa = fm;
        } else {
          b0 = mid;
        }
      }
      for (unsigned long q : dens) try_candidate(Q(mpq_class(round_to_mpz(a0 * q), q)));
    }
    x0 = x1;
    f0 = f1;
  }
  if (sgn(f0) == 0)
    for (unsigned long q : dens) try_candidate(Q(mpq_class(round_to_mpz(x0 * q), q)));
  return roots;
}

// ---- zero-dimensional solving ----------------------------------------------

// all rational points of a zero-dimensional non-unit reduced Lex basis,
// coordinates aligned with the basis variable list
std::vector<std::vector<Q>> solve_zero_dim(const GroebnerBasis& gb) {
  const auto& vars = gb.basis.front().vars();
  const std::size_t n = vars.size();
  const std::size_t last = n - 1;
  const Poly* elim = nullptr;
  for (const auto& g : gb.basis) {
    bool only_last = true;
    for (const auto& [m, c] : g.terms())
      for (std::size_t i = 0; i < last && only_last; ++i)
        if (m.e[i] != 0) only_last = false;
    if (only_last) {
      elim = &g;
      break;
    }
  }
  if (!elim) throw std::logic_error("solve_zero_dim: no elimination polynomial");
  UniQ eco(static_cast<std::size_t>(elim->degree_in(last)) + 1, Q(0));
  for (const auto& [m, c] : elim->terms()) eco[static_cast<std::size_t>(m.e[last])] = c;

  std::vector<std::vector<Q>> out;
  if (n == 1) {
    for (const auto& r : rational_roots(eco)) out.push_back({r});
    return out;
  }
  std::vector<std::string> redvars(vars.begin(), vars.end() - 1);
  for (const auto& r : rational_roots(eco)) {
    std::vector<Poly> images;
    for (std::size_t i = 0; i < last; ++i)
      images.push_back(Poly::variable(redvars, i, Q(1), TermOrder::Lex));
    images.push_back(Poly::constant(redvars, r, TermOrder::Lex));
    std::vector<Poly> sub;
    bool contradiction = false;
    for (const auto& g : gb.basis) {
      Poly s = g.substitute_all(images);
      if (s.is_zero()) continue;
      if (s.degree() == 0) {
        contradiction = true;
        break;
      }
      sub.push_back(std::move(s));
    }
    if (contradiction) continue;
    if (sub.empty()) throw std::logic_error("solve_zero_dim: free variable after substitution");
    GroebnerBasis sgb = buchberger_core(std::move(sub));
    if (is_unit_basis(sgb)) continue;
    for (auto& sol : solve_zero_dim(sgb)) {
      sol.push_back(r);
      out.push_back(std::move(sol));
    }
  }
  return out;
}

std::string multiplicity_tag(int count) {
  switch (count) {
    case 1:
      return "unique";
    case 2:
      return "two_companions";
    case 4:
      return "four_companions";
    default:
      return "finite";
  }
}

const std::vector<std::string>& cvars() {
  static const std::vector<std::string> v = {"c1", "c2", "c3", "c4", "c5", "c6", "c7", "c8"};
  return v;
}

std::vector<Poly> parse_all(const std::vector<std::string>& texts) {
  std::vector<Poly> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(parse_poly(t, cvars(), TermOrder::GrLex));
  return out;
}

void require_canon2d(const std::vector<Q>& c) {
  if (c.size() != 9)
    throw DomainError("canon2d coefficient vector must have 9 entries, got " +
                      std::to_string(c.size()));
  if (c[8] != Q(1))
    throw DomainError("canon2d constant slot must equal 1, got " + c[8].str());
}

StiffnessTensor tensor_from_assignment(const std::vector<Q>& b) {
  const auto& ks = StiffnessTensor::keys(SymmetryClass::Full2d);
  std::map<std::string, Q> params;
  for (std::size_t i = 0; i < ks.size(); ++i) params[ks[i]] = b[i];
  return StiffnessTensor(2, SymmetryClass::Full2d, std::move(params));
}

// shared tail of the companion builders: verify the forward images agree,
// attach positivity, optionally cross-check against the reduced Groebner
// system in the free off-diagonal unknowns
ReconstructionResult finish_companions(const StiffnessTensor& t,
                                       std::vector<StiffnessTensor> tensors,
                                       const std::vector<std::string>& unknowns,
                                       bool groebner_crosscheck, std::string tag) {
  ReconstructionResult res;
  SlownessPoly base = forward(t, false);
  for (const auto& s : tensors) {
    SlownessPoly img = forward(s, false);
    if (img.coeffs != base.coeffs)
      throw std::logic_error("companions: forward images disagree");
  }
  for (const auto& s : tensors) res.positivity.push_back(positivity(s));
  res.multiplicity = std::move(tag);
  bool all_same = true;
  for (const auto& s : tensors)
    if (s.params() != tensors.front().params()) all_same = false;
  if (all_same && tensors.size() > 1) res.note = "all companions coincide (fixed point)";

  if (groebner_crosscheck) {
    const auto& ks = StiffnessTensor::keys(t.symmetry());
    auto formulas = coefficient_formulas(t.symmetry());
    std::vector<Poly> images;
    for (const auto& k : ks) {
      auto it = std::find(unknowns.begin(), unknowns.end(), k);
      if (it != unknowns.end())
        images.push_back(Poly::variable(unknowns,
                                        static_cast<std::size_t>(it - unknowns.begin()), Q(1),
                                        TermOrder::Lex));
      else
        images.push_back(Poly::constant(unknowns, t.param(k), TermOrder::Lex));
    }
    PolyIdeal ideal;
    for (std::size_t i = 0; i < formulas.size(); ++i) {
      Poly g = Poly::constant(unknowns, base.coeffs[i], TermOrder::Lex) -
               formulas[i].substitute_all(images);
      if (!g.is_zero()) ideal.generators.push_back(std::move(g));
    }
    GroebnerBasis gb = buchberger(ideal);
    if (!is_zero_dimensional(gb))
      throw std::logic_error("companions: cross-check system is not zero-dimensional");
    for (const auto& s : tensors) {
      std::vector<Q> point;
      for (const auto& u : unknowns) point.push_back(s.param(u));
      for (const auto& g : gb.basis)
        if (!g.eval(point).is_zero())
          throw std::logic_error("companions: cross-check rejects a companion");
    }
    std::ostringstream os;
    os << (res.note.empty() ? "" : res.note + "; ")
       << "groebner cross-check passed: quotient dimension " << quotient_dimension(gb);
    res.note = os.str();
    res.groebner = std::move(gb);
  }
  res.solutions = std::move(tensors);
  return res;
}

}  // namespace

Poly normal_form(const Poly& f, const std::vector<Poly>& basis) {
  Poly r(f.vars(), f.order());
  Poly p = f;
  while (!p.is_zero()) {
    const Monomial lm = p.leading_monomial();
    const Q lc = p.leading_coefficient();
    bool divided = false;
    for (const auto& g : basis) {
      if (g.is_zero()) continue;
      const Monomial& gm = g.leading_monomial();
      if (gm.divides(lm)) {
        p = p - g.term_multiplied(gm.quotient_of(lm), lc / g.leading_coefficient());
        divided = true;
        break;
      }
    }
    if (!divided) {
      r.add_term(lm, lc);
      p.add_term(lm, -lc);
    }
  }
  return r;
}

Poly s_polynomial(const Poly& f, const Poly& g) {
  const Monomial l = f.leading_monomial().lcm(g.leading_monomial());
  return f.term_multiplied(f.leading_monomial().quotient_of(l),
                           f.leading_coefficient().inverse()) -
         g.term_multiplied(g.leading_monomial().quotient_of(l),
                           g.leading_coefficient().inverse());
}

GroebnerBasis buchberger(const PolyIdeal& ideal) {
  for (const auto& g : ideal.generators) {
    if (g.is_zero()) continue;
    if (g.nvars() > kMaxUnknowns)
      throw ResourceError("buchberger envelope: more than " + std::to_string(kMaxUnknowns) +
                          " unknowns");
    if (g.degree() > kMaxGeneratorDegree)
      throw ResourceError("buchberger envelope: generator degree " +
                          std::to_string(g.degree()) + " exceeds " +
                          std::to_string(kMaxGeneratorDegree));
  }
  return buchberger_core(ideal.generators);
}

bool is_zero_dimensional(const GroebnerBasis& gb) {
  if (gb.basis.empty()) return false;
  if (is_unit_basis(gb)) return true;
  const std::size_t n = gb.basis.front().nvars();
  for (std::size_t v = 0; v < n; ++v) {
    bool found = false;
    for (const auto& g : gb.basis) {
      const Monomial& m = g.leading_monomial();
      bool pure = m.e[v] > 0;
      for (std::size_t i = 0; i < n && pure; ++i)
        if (i != v && m.e[i] != 0) pure = false;
      if (pure) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

int quotient_dimension(const GroebnerBasis& gb) {
  if (!is_zero_dimensional(gb)) throw std::invalid_argument("quotient_dimension: not zero-dimensional");
  if (is_unit_basis(gb)) return 0;
  const std::size_t n = gb.basis.front().nvars();
  std::vector<int> cap(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    int best = -1;
    for (const auto& g : gb.basis) {
      const Monomial& m = g.leading_monomial();
      bool pure = m.e[v] > 0;
      for (std::size_t i = 0; i < n && pure; ++i)
        if (i != v && m.e[i] != 0) pure = false;
      if (pure && (best < 0 || m.e[v] < best)) best = m.e[v];
    }
    cap[v] = best;
  }
  long box = 1;
  for (std::size_t v = 0; v < n; ++v) {
    box *= cap[v];
    if (box > kMaxQuotientBox)
      throw ResourceError("quotient_dimension: monomial box too large");
  }
  std::vector<Monomial> lms;
  for (const auto& g : gb.basis) lms.push_back(g.leading_monomial());
  int count = 0;
  Monomial e(n);
  for (long idx = 0; idx < box; ++idx) {
    long t = idx;
    for (std::size_t v = 0; v < n; ++v) {
      e.e[v] = static_cast<int>(t % cap[v]);
      t /= cap[v];
    }
    bool standard = true;
    for (const auto& m : lms)
      if (m.divides(e)) {
        standard = false;
        break;
      }
    if (standard) ++count;
  }
  return count;
}

PolyIdeal build_reconstruction_ideal_2d(const std::vector<Q>& c) {
  require_canon2d(c);
  const auto& ks = StiffnessTensor::keys(SymmetryClass::Full2d);
  auto formulas = coefficient_formulas(SymmetryClass::Full2d);
  PolyIdeal ideal;
  for (std::size_t i = 0; i + 1 < formulas.size(); ++i) {
    Poly g = Poly::constant(ks, c[i], TermOrder::Lex) - formulas[i].with_order(TermOrder::Lex);
    ideal.generators.push_back(std::move(g));
  }
  return ideal;
}

ReconstructionResult reconstruct_2d(const std::vector<Q>& c) {
  PolyIdeal ideal = build_reconstruction_ideal_2d(c);
  GroebnerBasis gb = buchberger(ideal);
  ReconstructionResult res;
  if (is_unit_basis(gb)) {
    res.multiplicity = "empty";
    res.note = "inconsistent system: basis is the unit ideal";
    res.groebner = std::move(gb);
    return res;
  }
  if (!is_zero_dimensional(gb)) {
    const auto& vars = gb.basis.front().vars();
    std::string missing;
    for (std::size_t v = 0; v < vars.size(); ++v) {
      bool found = false;
      for (const auto& g : gb.basis) {
        const Monomial& m = g.leading_monomial();
        bool pure = m.e[v] > 0;
        for (std::size_t i = 0; i < vars.size() && pure; ++i)
          if (i != v && m.e[i] != 0) pure = false;
        if (pure) found = true;
      }
      if (!found) missing += (missing.empty() ? "" : ", ") + vars[v];
    }
    res.multiplicity = "nonfinite";
    res.note = "positive-dimensional solution set: no pure power of " + missing +
               " among the leading terms";
    res.groebner = std::move(gb);
    return res;
  }
  const int count = quotient_dimension(gb);
  res.multiplicity = multiplicity_tag(count);
  std::vector<std::vector<Q>> points = solve_zero_dim(gb);
  for (const auto& b : points) {
    StiffnessTensor t = tensor_from_assignment(b);
    SlownessPoly img = forward(t, false);
    if (img.coeffs != c) throw std::logic_error("reconstruct_2d: solution fails forward check");
    res.positivity.push_back(positivity(t));
    res.solutions.push_back(std::move(t));
  }
  std::ostringstream os;
  os << count << " solution(s) counted with multiplicity; " << res.solutions.size()
     << " rational point(s) extracted";
  if (static_cast<int>(res.solutions.size()) < count)
    os << "; remaining solutions are irrational or multiple (finite, non-rational)";
  res.note = os.str();
  res.groebner = std::move(gb);
  return res;
}

ReconstructionResult companions_orthorhombic(const StiffnessTensor& t, bool groebner_crosscheck) {
  if (t.symmetry() != SymmetryClass::Orthorhombic)
    throw UnsupportedError("companions_orthorhombic requires an orthorhombic tensor");
  const Q b12 = t.param("b12"), b13 = t.param("b13"), b23 = t.param("b23");
  const Q s12 = -t.param("b66") * Q(2) - b12;
  const Q s13 = -t.param("b55") * Q(2) - b13;
  const Q s23 = -t.param("b44") * Q(2) - b23;
  const std::vector<std::array<Q, 3>> triples = {
      {b12, b13, b23}, {b12, s13, s23}, {s12, s13, b23}, {s12, b13, s23}};
  std::vector<StiffnessTensor> tensors;
  for (const auto& tr : triples) {
    std::map<std::string, Q> params = t.params();
    params["b12"] = tr[0];
    params["b13"] = tr[1];
    params["b23"] = tr[2];
    tensors.emplace_back(3, SymmetryClass::Orthorhombic, std::move(params));
  }
  return finish_companions(t, std::move(tensors), {"b12", "b13", "b23"}, groebner_crosscheck,
                           "four_companions");
}

ReconstructionResult companions_monoclinic(const StiffnessTensor& t, bool groebner_crosscheck) {
  if (t.symmetry() != SymmetryClass::Monoclinic)
    throw UnsupportedError("companions_monoclinic requires a monoclinic tensor");
  std::map<std::string, Q> params = t.params();
  params["b12"] = -t.param("b12") - t.param("b66") * Q(2);
  params["b23"] = -t.param("b23") - t.param("b44") * Q(2);
  params["b25"] = -t.param("b25") - t.param("b46") * Q(2);
  std::vector<StiffnessTensor> tensors;
  tensors.push_back(t);
  tensors.emplace_back(3, SymmetryClass::Monoclinic, std::move(params));
  return finish_companions(t, std::move(tensors), {"b12", "b23", "b25"}, groebner_crosscheck,
                           "two_companions");
}

const std::vector<Poly>& admissibility_ideal() {
  static const std::vector<Poly> gens = parse_all({
      "-16*c1^2*c3 + 4*c1*c2^2 - 8*c1*c2*c5 + 16*c1*c3*c4*c8 - 4*c1*c3*c6^2 + 32*c1*c3*c7"
      " - 16*c1*c3*c8^2 - 12*c1*c5^2 + 16*c1*c5*c6*c8 - 16*c1*c6^2*c7 - 4*c2^2*c4*c8"
      " + c2^2*c6^2 - 12*c2^2*c7 + 4*c2^2*c8^2 + 16*c2*c4*c6*c7 - 2*c2*c5*c6^2 - 8*c2*c5*c7"
      " - 16*c3*c4^2*c7 + 16*c3*c4*c7*c8 - 4*c3*c6^2*c7 - 16*c3*c7^2 + 4*c4^2*c5^2 - 4*c4*c5^2*c8"
      " + c5^2*c6^2 + 4*c5^2*c7",
      "-4*c1^2 + 4*c1*c4*c8 - c1*c6^2 + 8*c1*c7 - 4*c1*c8^2 - c2^2 - 2*c2*c5 + 2*c2*c6*c8"
      " - c3*c6^2 - 4*c4^2*c7 + 2*c4*c5*c6 + 4*c4*c7*c8 - c5^2 - c6^2*c7 - 4*c7^2",
  });
  return gens;
}

const std::vector<ImagePiece>& image_decomposition() {
  static const std::vector<ImagePiece> pieces = [] {
    std::vector<ImagePiece> out(3);
    out[0].inside = admissibility_ideal();
    out[0].excluded = parse_all({
        "c4^2 - 2*c4*c8 + c6^2 + c8^2",
        "-c2*c6 + 2*c3*c4 - 2*c3*c8 - 4*c4*c7 + 3*c5*c6 + 4*c7*c8",
        "c2^2 - 6*c2*c5 + 4*c3^2 - 16*c3*c7 + 9*c5^2 + 16*c7^2",
        "-3*c1*c6 + 2*c2*c4 - 2*c2*c8 + c3*c6 + c6*c7",
        "-c1*c6 - c3*c6 + 2*c4*c5 - 2*c5*c8 + 3*c6*c7",
        "2*c1*c4 - 2*c1*c8 + c2*c6 - 2*c4*c7 + c5*c6 + 2*c7*c8",
        "c1*c3 - 2*c1*c7 - c2*c5 + c3^2 - 5*c3*c7 + 3*c5^2 + 6*c7^2",
        "c1*c2 - 3*c1*c5 + c2*c3 - 3*c2*c7 + c3*c5 + c5*c7",
        "c1^2 - 2*c1*c7 + 2*c2*c5 - c3^2 + 4*c3*c7 - 2*c5^2 - 3*c7^2",
    });
    out[1].inside = parse_all({
        "c4^2 - 2*c4*c8 + c6^2 + c8^2",
        "-c1*c6 - c3*c6 + 2*c4*c5 - 2*c5*c8 + 3*c6*c7",
        "-c2*c6 + 2*c3*c4 - 2*c3*c8 - 4*c4*c7 + 3*c5*c6 + 4*c7*c8",
        "-3*c1*c6 + 2*c2*c4 - 2*c2*c8 + c3*c6 + c6*c7",
        "2*c1*c4 - 2*c1*c8 + c2*c6 - 2*c4*c7 + c5*c6 + 2*c7*c8",
        "c1*c6^2 - 16*c2*c5 + 4*c2*c6*c8 + 8*c3^2 - c3*c6^2 - 32*c3*c7 + 16*c5^2"
        " + 4*c5*c6*c8 - 7*c6^2*c7 + 32*c7^2",
        "16*c1*c5 - 8*c1*c6*c8 - 4*c2*c3 + c2*c6^2 + 8*c2*c7 - 4*c3*c5 + 8*c4*c6*c7"
        " - c5*c6^2 - 8*c5*c7",
        "c1*c3 - 2*c1*c7 - c2*c5 + c3^2 - 5*c3*c7 + 3*c5^2 + 6*c7^2",
        "c2^2 - 6*c2*c5 + 4*c3^2 - 16*c3*c7 + 9*c5^2 + 16*c7^2",
        "c1*c2 - 3*c1*c5 + c2*c3 - 3*c2*c7 + c3*c5 + c5*c7",
        "c1^2 - 2*c1*c7 + 2*c2*c5 - c3^2 + 4*c3*c7 - 2*c5^2 - 3*c7^2",
    });
    out[1].excluded = parse_all({
        "c4^2 - 2*c4*c8 + c6^2 + c8^2",
        "4*c3 - 2*c4*c8 - c6^2 + 24*c7 - 6*c8^2",
        "2*c2 - c4*c6 + 2*c5 - c6*c8",
        "4*c1 - 2*c4*c8 + c6^2 - 4*c7 + 2*c8^2",
        "8*c4*c7 - 2*c4*c8^2 - 2*c5*c6 + c6^2*c8 - 8*c7*c8 + 2*c8^3",
        "2*c4*c5 - c4*c6*c8 - 2*c5*c8 + 8*c6*c7 - c6*c8^2",
        "4*c5^2 - 4*c5*c6*c8 + c6^2*c8^2 + 64*c7^2 - 32*c7*c8^2 + 4*c8^4",
    });
    out[2].inside = parse_all({
        "c8^2 - 4*c7",
        "c6*c8 - 2*c5",
        "c4*c8 - c1 - c3 - c7",
        "2*c6*c7 - c5*c8",
        "c6^2 + 2*c1 - 2*c3 + 2*c7",
        "c4*c6 - 2*c2",
        "c4^2 - 4*c1",
    });
    out[2].excluded = parse_all({"1"});
    return out;
  }();
  return pieces;
}

Admissibility admissibility_2d(const std::vector<Q>& c) {
  require_canon2d(c);
  std::vector<Q> point(c.begin(), c.begin() + 8);
  Admissibility adm;
  adm.admissible = true;
  for (const auto& g : admissibility_ideal()) {
    Q v = g.eval(point);
    if (!v.is_zero()) adm.admissible = false;
    adm.j_values.push_back(std::move(v));
  }
  const auto& pieces = image_decomposition();
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    bool inside = true;
    for (const auto& g : pieces[i].inside)
      if (!g.eval(point).is_zero()) {
        inside = false;
        break;
      }
    if (!inside) continue;
    bool excluded = true;
    for (const auto& g : pieces[i].excluded)
      if (!g.eval(point).is_zero()) {
        excluded = false;
        break;
      }
    if (!excluded) {
      adm.piece = static_cast<int>(i) + 1;
      break;
    }
  }
  return adm;
}

}  // namespace chr
