#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace chr {

enum class TermOrder { GrLex, Lex };

// Exponent vector. Length is fixed by the owning polynomial's variable list.
struct Monomial {
  std::vector<int> e;

  Monomial() = default;
  explicit Monomial(std::size_t nvars) : e(nvars, 0) {}
  explicit Monomial(std::vector<int> exps) : e(std::move(exps)) {}

  int degree() const { return std::accumulate(e.begin(), e.end(), 0); }
  bool is_unit() const {
    return std::all_of(e.begin(), e.end(), [](int x) { return x == 0; });
  }
  Monomial mul(const Monomial& o) const {
    Monomial r(*this);
    for (std::size_t i = 0; i < e.size(); ++i) r.e[i] += o.e[i];
    return r;
  }
  bool divides(const Monomial& o) const {
    for (std::size_t i = 0; i < e.size(); ++i)
      if (e[i] > o.e[i]) return false;
    return true;
  }
  // quotient o / this; caller guarantees divisibility
  Monomial quotient_of(const Monomial& o) const {
    Monomial r(o);
    for (std::size_t i = 0; i < e.size(); ++i) r.e[i] -= e[i];
    return r;
  }
  Monomial lcm(const Monomial& o) const {
    Monomial r(*this);
    for (std::size_t i = 0; i < e.size(); ++i) r.e[i] = std::max(e[i], o.e[i]);
    return r;
  }
  friend bool operator==(const Monomial& a, const Monomial& b) { return a.e == b.e; }
  friend bool operator!=(const Monomial& a, const Monomial& b) { return a.e != b.e; }
};

// Strict weak order on monomials. Lex compares exponent vectors left to
// right (earlier variable = higher precedence); GrLex compares total degree
// first and breaks ties lexicographically.
struct MonoLess {
  TermOrder ord = TermOrder::GrLex;
  bool operator()(const Monomial& a, const Monomial& b) const {
    if (ord == TermOrder::GrLex) {
      int da = a.degree(), db = b.degree();
      if (da != db) return da < db;
    }
    // lex tail: a < b iff at the first differing position a has the smaller
    // exponent
    for (std::size_t i = 0; i < a.e.size(); ++i)
      if (a.e[i] != b.e[i]) return a.e[i] < b.e[i];
    return false;
  }
};

// Sparse multivariate polynomial over a field K. K must provide value
// semantics, default construction = 0, operators + - * and unary -, ==,
// is_zero(), and str(). Zero coefficients are never stored; the zero
// polynomial has an empty term map and degree() == -1.
template <class K>
class MultiPoly {
 public:
  using TermMap = std::map<Monomial, K, MonoLess>;

  MultiPoly() : terms_(MonoLess{TermOrder::GrLex}) {}
  explicit MultiPoly(std::vector<std::string> vars, TermOrder ord = TermOrder::GrLex)
      : vars_(std::move(vars)), ord_(ord), terms_(MonoLess{ord}) {}

  static MultiPoly constant(std::vector<std::string> vars, const K& c,
                            TermOrder ord = TermOrder::GrLex) {
    MultiPoly p(std::move(vars), ord);
    if (!c.is_zero()) p.terms_.emplace(Monomial(p.vars_.size()), c);
    return p;
  }
  static MultiPoly variable(std::vector<std::string> vars, std::size_t idx, const K& one,
                            TermOrder ord = TermOrder::GrLex) {
    MultiPoly p(std::move(vars), ord);
    if (idx >= p.vars_.size()) throw std::out_of_range("MultiPoly::variable index");
    Monomial m(p.vars_.size());
    m.e[idx] = 1;
    p.terms_.emplace(m, one);
    return p;
  }

  const std::vector<std::string>& vars() const { return vars_; }
  TermOrder order() const { return ord_; }
  std::size_t nvars() const { return vars_.size(); }
  const TermMap& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  int degree() const {
    int d = -1;
    for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
    return d;
  }
  int degree_in(std::size_t var) const {
    int d = -1;
    for (const auto& [m, c] : terms_) d = std::max(d, m.e[var]);
    return terms_.empty() ? -1 : d;
  }
  bool is_homogeneous() const {
    if (terms_.empty()) return true;
    int d = terms_.begin()->first.degree();
    for (const auto& [m, c] : terms_)
      if (m.degree() != d) return false;
    return true;
  }

  // leading term in the polynomial's own storage order
  const Monomial& leading_monomial() const {
    if (terms_.empty()) throw std::domain_error("leading_monomial of zero");
    return terms_.rbegin()->first;
  }
  const K& leading_coefficient() const {
    if (terms_.empty()) throw std::domain_error("leading_coefficient of zero");
    return terms_.rbegin()->second;
  }

  K coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? K() : it->second;
  }

  void add_term(const Monomial& m, const K& c) {
    if (m.e.size() != vars_.size()) throw std::invalid_argument("add_term: arity mismatch");
    if (c.is_zero()) return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
      terms_.emplace(m, c);
    } else {
      it->second = it->second + c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  MultiPoly with_order(TermOrder ord) const {
    if (ord == ord_) return *this;
    MultiPoly r(vars_, ord);
    for (const auto& [m, c] : terms_) r.terms_.emplace(m, c);
    return r;
  }

  MultiPoly operator-() const {
    MultiPoly r(vars_, ord_);
    for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
    return r;
  }
  friend MultiPoly operator+(const MultiPoly& a, const MultiPoly& b) {
    a.check_compatible(b);
    MultiPoly r(a);
    for (const auto& [m, c] : b.terms_) r.add_term(m, c);
    return r;
  }
  friend MultiPoly operator-(const MultiPoly& a, const MultiPoly& b) {
    a.check_compatible(b);
    MultiPoly r(a);
    for (const auto& [m, c] : b.terms_) r.add_term(m, -c);
    return r;
  }
  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
    a.check_compatible(b);
    MultiPoly r(a.vars_, a.ord_);
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) r.add_term(ma.mul(mb), ca * cb);
    return r;
  }
  MultiPoly scaled(const K& c) const {
    MultiPoly r(vars_, ord_);
    if (c.is_zero()) return r;
    for (const auto& [m, k] : terms_) {
      K v = k * c;
      if (!v.is_zero()) r.terms_.emplace(m, v);
    }
    return r;
  }
  MultiPoly term_multiplied(const Monomial& m, const K& c) const {
    MultiPoly r(vars_, ord_);
    if (c.is_zero()) return r;
    for (const auto& [mm, k] : terms_) {
      K v = k * c;
      if (!v.is_zero()) r.terms_.emplace(mm.mul(m), v);
    }
    return r;
  }
  MultiPoly pow(int n) const {
    if (n < 0) throw std::invalid_argument("MultiPoly::pow negative");
    MultiPoly r;
    bool first = true;
    MultiPoly base(*this);
    while (n > 0) {
      if (n & 1) r = first ? (first = false, base) : r * base;
      n >>= 1;
      if (n) base = base * base;
    }
    if (first) {
      // x^0: need a one; take it from any coefficient's field via caller
      throw std::domain_error("MultiPoly::pow(0) unsupported, use constant()");
    }
    return r;
  }

  friend bool operator==(const MultiPoly& a, const MultiPoly& b) {
    if (a.vars_ != b.vars_) return false;
    if (a.terms_.size() != b.terms_.size()) return false;
    for (const auto& [m, c] : b.terms_) {
      auto it = a.terms_.find(m);
      if (it == a.terms_.end() || !(it->second == c)) return false;
    }
    return true;
  }
  friend bool operator!=(const MultiPoly& a, const MultiPoly& b) { return !(a == b); }

  K eval(const std::vector<K>& point) const {
    if (point.size() != vars_.size()) throw std::invalid_argument("eval: arity mismatch");
    K acc{};
    for (const auto& [m, c] : terms_) {
      K t = c;
      for (std::size_t i = 0; i < point.size(); ++i)
        for (int k = 0; k < m.e[i]; ++k) t = t * point[i];
      acc = acc + t;
    }
    return acc;
  }

  // Substitute every variable by the given image polynomial (all images share
  // one variable list). The result lives over the images' variables.
  MultiPoly substitute_all(const std::vector<MultiPoly>& images) const {
    if (images.size() != vars_.size())
      throw std::invalid_argument("substitute_all: arity mismatch");
    const std::vector<std::string>& tv = images.empty() ? vars_ : images[0].vars_;
    TermOrder to = images.empty() ? ord_ : images[0].ord_;
    MultiPoly acc(tv, to);
    for (const auto& [m, c] : terms_) {
      MultiPoly t = MultiPoly::constant(tv, c, to);
      for (std::size_t i = 0; i < images.size(); ++i)
        for (int k = 0; k < m.e[i]; ++k) t = t * images[i];
      acc = acc + t;
    }
    return acc;
  }

  // Set variable `var` to 1 and remove it from the variable list.
  MultiPoly dehomogenize(std::size_t var) const {
    if (var >= vars_.size()) throw std::out_of_range("dehomogenize index");
    std::vector<std::string> nv;
    for (std::size_t i = 0; i < vars_.size(); ++i)
      if (i != var) nv.push_back(vars_[i]);
    MultiPoly r(nv, ord_);
    for (const auto& [m, c] : terms_) {
      Monomial mm(nv.size());
      std::size_t j = 0;
      for (std::size_t i = 0; i < vars_.size(); ++i)
        if (i != var) mm.e[j++] = m.e[i];
      r.add_term(mm, c);
    }
    return r;
  }

  // Insert a fresh variable at `pos` carrying deg - (term degree) so the
  // result is homogeneous of degree max(deg, this->degree()).
  MultiPoly homogenize(const std::string& var_name, std::size_t pos) const {
    int d = degree();
    std::vector<std::string> nv = vars_;
    nv.insert(nv.begin() + pos, var_name);
    MultiPoly r(nv, ord_);
    for (const auto& [m, c] : terms_) {
      Monomial mm(nv.size());
      for (std::size_t i = 0, j = 0; i < vars_.size(); ++i, ++j) {
        if (j == pos) ++j;
        mm.e[j] = m.e[i];
      }
      mm.e[pos] = d - m.degree();
      r.terms_.emplace(mm, c);
    }
    return r;
  }

  // View as univariate in `var`: coefficient polynomials (over the same
  // variable list, with var's exponent zeroed) indexed by degree.
  std::vector<MultiPoly> univariate_in(std::size_t var) const {
    int d = std::max(0, degree_in(var));
    std::vector<MultiPoly> out(static_cast<std::size_t>(d) + 1, MultiPoly(vars_, ord_));
    for (const auto& [m, c] : terms_) {
      Monomial mm(m);
      int k = mm.e[var];
      mm.e[var] = 0;
      out[static_cast<std::size_t>(k)].add_term(mm, c);
    }
    return out;
  }
  static MultiPoly from_univariate(const std::vector<MultiPoly>& coeffs, std::size_t var) {
    if (coeffs.empty()) throw std::invalid_argument("from_univariate: empty");
    MultiPoly r(coeffs[0].vars_, coeffs[0].ord_);
    for (std::size_t k = 0; k < coeffs.size(); ++k)
      for (const auto& [m, c] : coeffs[k].terms_) {
        Monomial mm(m);
        mm.e[var] += static_cast<int>(k);
        r.add_term(mm, c);
      }
    return r;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      if (!first) os << " + ";
      first = false;
      os << it->second.str();
      for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (it->first.e[i] == 0) continue;
        os << "*" << vars_[i];
        if (it->first.e[i] > 1) os << "^" << it->first.e[i];
      }
    }
    return os.str();
  }

 private:
  void check_compatible(const MultiPoly& o) const {
    if (vars_ != o.vars_) throw std::invalid_argument("MultiPoly: variable lists differ");
  }

  std::vector<std::string> vars_;
  TermOrder ord_ = TermOrder::GrLex;
  TermMap terms_;
};

// Square matrix of polynomials sharing one variable list.
template <class K>
struct PolyMatrix {
  std::size_t n = 0;
  std::vector<MultiPoly<K>> a;  // row major, n*n entries

  PolyMatrix() = default;
  PolyMatrix(std::size_t dim, const MultiPoly<K>& zero) : n(dim), a(dim * dim, zero) {}
  MultiPoly<K>& at(std::size_t i, std::size_t j) { return a[i * n + j]; }
  const MultiPoly<K>& at(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

namespace detail {

template <class K>
MultiPoly<K> det_recursive(const PolyMatrix<K>& m, std::vector<std::size_t> rows,
                           std::vector<std::size_t> cols) {
  const std::size_t k = rows.size();
  if (k == 1) return m.at(rows[0], cols[0]);
  // expand along the row with the fewest stored terms to keep intermediates
  // small (cofactor expansion; dimensions here are <= 3 in practice)
  std::size_t best = 0, best_terms = SIZE_MAX;
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t t = 0;
    for (std::size_t j = 0; j < k; ++j) t += m.at(rows[i], cols[j]).term_count();
    if (t < best_terms) { best_terms = t; best = i; }
  }
  std::vector<std::size_t> sub_rows;
  for (std::size_t i = 0; i < k; ++i)
    if (i != best) sub_rows.push_back(rows[i]);
  MultiPoly<K> acc(m.a[0].vars(), m.a[0].order());
  for (std::size_t j = 0; j < k; ++j) {
    const MultiPoly<K>& piv = m.at(rows[best], cols[j]);
    if (piv.is_zero()) continue;
    std::vector<std::size_t> sub_cols;
    for (std::size_t jj = 0; jj < k; ++jj)
      if (jj != j) sub_cols.push_back(cols[jj]);
    MultiPoly<K> minor = det_recursive(m, sub_rows, sub_cols);
    MultiPoly<K> contrib = piv * minor;
    if ((best + j) % 2 == 0)
      acc = acc + contrib;
    else
      acc = acc - contrib;
  }
  return acc;
}

}  // namespace detail

template <class K>
MultiPoly<K> poly_det(const PolyMatrix<K>& m) {
  if (m.n == 0) throw std::invalid_argument("poly_det: empty matrix");
  std::vector<std::size_t> idx(m.n);
  for (std::size_t i = 0; i < m.n; ++i) idx[i] = i;
  return detail::det_recursive(m, idx, idx);
}

}  // namespace chr
