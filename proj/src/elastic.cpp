#include "chr/elastic.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>

#include "chr/errors.hpp"

namespace chr {

namespace {

using Poly = MultiPoly<BigRational>;

const std::vector<std::string> kFull2dKeys = {"b11", "b12", "b13", "b22", "b23", "b33"};
const std::vector<std::string> kOrthoKeys = {"b11", "b12", "b13", "b22", "b23",
                                             "b33", "b44", "b55", "b66"};
const std::vector<std::string> kMonoKeys = {"b11", "b12", "b13", "b15", "b22", "b23", "b25",
                                            "b33", "b35", "b44", "b46", "b55", "b66"};
const std::vector<std::string> kIsoKeys = {"cP2", "cS2"};

std::vector<std::string> triclinic_keys() {
  std::vector<std::string> ks;
  for (int r = 1; r <= 6; ++r)
    for (int s = r; s <= 6; ++s) {
      std::ostringstream os;
      os << "b" << r << s;
      ks.push_back(os.str());
    }
  return ks;
}

int class_dim(SymmetryClass cls, int requested) {
  switch (cls) {
    case SymmetryClass::Full2d:
      return 2;
    case SymmetryClass::Isotropic:
      return requested;  // caller picks 2 or 3
    default:
      return 3;
  }
}

// Christoffel matrix from a psi x psi Voigt matrix whose entries already live
// over `vars`; pidx[j] is the variable index of p_{j+1}. Works for numeric
// (constant entries) and symbolic (variable entries) tensors alike.
PolyMatrix<BigRational> christoffel_from(int n, const std::vector<Poly>& W,
                                         const std::vector<std::string>& vars,
                                         const std::vector<std::size_t>& pidx) {
  const int psi = voigt_size(n);
  PolyMatrix<BigRational> G(static_cast<std::size_t>(n), Poly(vars));
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < n; ++l) {
      Poly acc(vars);
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          const Poly& c = W[static_cast<std::size_t>(voigt_index(n, i, j) * psi +
                                                     voigt_index(n, k, l))];
          if (c.is_zero()) continue;
          Monomial m(vars.size());
          m.e[pidx[static_cast<std::size_t>(j)]] += 1;
          m.e[pidx[static_cast<std::size_t>(k)]] += 1;
          acc = acc + c.term_multiplied(m, BigRational(1));
        }
      G.at(static_cast<std::size_t>(i), static_cast<std::size_t>(l)) = acc;
    }
  return G;
}

SlownessBasis basis_of(const StiffnessTensor& t) {
  switch (t.symmetry()) {
    case SymmetryClass::Full2d:
      return SlownessBasis::Canon2d;
    case SymmetryClass::Orthorhombic:
      return SlownessBasis::Ortho3d;
    case SymmetryClass::Monoclinic:
      return SlownessBasis::Mono3d;
    case SymmetryClass::Isotropic:
      return t.dim() == 2 ? SlownessBasis::Canon2d : SlownessBasis::Ortho3d;
    default:
      return SlownessBasis::Generic;
  }
}

// exact determinant by Gaussian elimination over the rationals
BigRational rat_det(std::vector<std::vector<BigRational>> m) {
  const std::size_t k = m.size();
  BigRational det(1);
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t piv = col;
    while (piv < k && m[piv][col].is_zero()) ++piv;
    if (piv == k) return BigRational(0);
    if (piv != col) {
      std::swap(m[piv], m[col]);
      det = -det;
    }
    det *= m[col][col];
    for (std::size_t r = col + 1; r < k; ++r) {
      if (m[r][col].is_zero()) continue;
      BigRational f = m[r][col] / m[col][col];
      for (std::size_t c = col; c < k; ++c) m[r][c] -= f * m[col][c];
    }
  }
  return det;
}

std::string cayley_impl(const StiffnessTensor& t, std::optional<std::array<double, 3>>* point) {
  const BigRational& b11 = t.param("b11");
  const BigRational& b22 = t.param("b22");
  const BigRational& b33 = t.param("b33");
  const BigRational& b12 = t.param("b12");
  const BigRational& b13 = t.param("b13");
  const BigRational& b23 = t.param("b23");
  if (!(b11.sign() > 0 && b22.sign() > 0 && b33.sign() > 0)) return "outside";
  if (point) {
    double x = b12.to_double() / std::sqrt(b11.to_double() * b22.to_double());
    double y = b13.to_double() / std::sqrt(b11.to_double() * b33.to_double());
    double z = b23.to_double() / std::sqrt(b22.to_double() * b33.to_double());
    *point = std::array<double, 3>{x, y, z};
  }
  // cleared denominators: |x| < 1 becomes b12^2 < b11 b22 and the Cayley
  // cubic 1 + 2xyz - x^2 - y^2 - z^2 becomes det of the leading 3x3 block
  int s12 = (b11 * b22 - b12 * b12).sign();
  int s13 = (b11 * b33 - b13 * b13).sign();
  int s23 = (b22 * b33 - b23 * b23).sign();
  BigRational det3 = b11 * b22 * b33 + BigRational(2) * b12 * b13 * b23 - b11 * b23 * b23 -
                     b22 * b13 * b13 - b33 * b12 * b12;
  int s3 = det3.sign();
  if (s12 > 0 && s13 > 0 && s23 > 0 && s3 > 0) return "inside-tetrahedron";
  if (s12 < 0 || s13 < 0 || s23 < 0 || s3 < 0) return "outside";
  return "boundary";
}

}  // namespace

SymmetryClass symmetry_class_from_string(const std::string& s) {
  if (s == "full2d") return SymmetryClass::Full2d;
  if (s == "triclinic3d") return SymmetryClass::Triclinic3d;
  if (s == "orthorhombic") return SymmetryClass::Orthorhombic;
  if (s == "monoclinic") return SymmetryClass::Monoclinic;
  if (s == "isotropic") return SymmetryClass::Isotropic;
  throw DomainError("unknown symmetry class: " + s);
}

std::string to_string(SymmetryClass cls) {
  switch (cls) {
    case SymmetryClass::Full2d:
      return "full2d";
    case SymmetryClass::Triclinic3d:
      return "triclinic3d";
    case SymmetryClass::Orthorhombic:
      return "orthorhombic";
    case SymmetryClass::Monoclinic:
      return "monoclinic";
    case SymmetryClass::Isotropic:
      return "isotropic";
  }
  return "?";
}

int voigt_size(int dim) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("voigt_size: dim must be 2 or 3");
  return dim * (dim + 1) / 2;
}

int voigt_index(int dim, int i, int j) {
  if (i > j) std::swap(i, j);
  if (i == j) return i;
  if (dim == 2) return 2;  // (0,1)
  // 3D off-diagonal: (1,2)->3, (0,2)->4, (0,1)->5
  return 6 - i - j;
}

const std::vector<std::string>& StiffnessTensor::keys(SymmetryClass cls) {
  static const std::vector<std::string> tri = triclinic_keys();
  switch (cls) {
    case SymmetryClass::Full2d:
      return kFull2dKeys;
    case SymmetryClass::Triclinic3d:
      return tri;
    case SymmetryClass::Orthorhombic:
      return kOrthoKeys;
    case SymmetryClass::Monoclinic:
      return kMonoKeys;
    case SymmetryClass::Isotropic:
      return kIsoKeys;
  }
  throw std::logic_error("StiffnessTensor::keys");
}

StiffnessTensor::StiffnessTensor(int dim, SymmetryClass cls,
                                 std::map<std::string, BigRational> params)
    : dim_(dim), cls_(cls), params_(std::move(params)) {
  if (dim_ != 2 && dim_ != 3) throw DomainError("tensor dim must be 2 or 3");
  if (class_dim(cls_, dim_) != dim_)
    throw DomainError("class " + to_string(cls_) + " requires dim " +
                      std::to_string(class_dim(cls_, dim_)));
  const auto& ks = keys(cls_);
  for (const auto& [k, v] : params_) {
    (void)v;
    if (std::find(ks.begin(), ks.end(), k) == ks.end())
      throw DomainError("unknown Voigt key for " + to_string(cls_) + ": " + k);
  }
  for (const auto& k : ks)
    if (params_.find(k) == params_.end())
      throw DomainError("missing Voigt key for " + to_string(cls_) + ": " + k);
}

const BigRational& StiffnessTensor::param(const std::string& key) const {
  auto it = params_.find(key);
  if (it == params_.end()) throw std::out_of_range("StiffnessTensor::param: " + key);
  return it->second;
}

std::vector<std::vector<BigRational>> StiffnessTensor::voigt_matrix() const {
  const int psi = voigt_size(dim_);
  std::vector<std::vector<BigRational>> W(static_cast<std::size_t>(psi),
                                          std::vector<BigRational>(static_cast<std::size_t>(psi)));
  if (cls_ == SymmetryClass::Isotropic) {
    BigRational mu = param("cS2");
    BigRational lam = param("cP2") - BigRational(2) * mu;
    BigRational dia = lam + BigRational(2) * mu;
    for (int r = 0; r < dim_; ++r)
      for (int s = 0; s < dim_; ++s) W[static_cast<std::size_t>(r)][static_cast<std::size_t>(s)] = (r == s) ? dia : lam;
    for (int r = dim_; r < psi; ++r) W[static_cast<std::size_t>(r)][static_cast<std::size_t>(r)] = mu;
    return W;
  }
  for (const auto& [k, v] : params_) {
    int r = k[1] - '1', s = k[2] - '1';
    W[static_cast<std::size_t>(r)][static_cast<std::size_t>(s)] = v;
    W[static_cast<std::size_t>(s)][static_cast<std::size_t>(r)] = v;
  }
  return W;
}

FullTensor voigt_expand(const StiffnessTensor& t) {
  const int n = t.dim();
  auto W = t.voigt_matrix();
  FullTensor full;
  full.n = n;
  full.a.resize(static_cast<std::size_t>(n * n * n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          full.a[static_cast<std::size_t>(((i * n + j) * n + k) * n + l)] =
              W[static_cast<std::size_t>(voigt_index(n, i, j))]
               [static_cast<std::size_t>(voigt_index(n, k, l))];
  return full;
}

PolyMatrix<BigRational> christoffel(const StiffnessTensor& t) {
  const int n = t.dim();
  std::vector<std::string> vars = slowness_vars(n, false);
  std::vector<std::size_t> pidx(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) pidx[static_cast<std::size_t>(j)] = static_cast<std::size_t>(j);
  auto W = t.voigt_matrix();
  const int psi = voigt_size(n);
  std::vector<Poly> Wc;
  Wc.reserve(static_cast<std::size_t>(psi * psi));
  for (int r = 0; r < psi; ++r)
    for (int s = 0; s < psi; ++s)
      Wc.push_back(Poly::constant(vars, W[static_cast<std::size_t>(r)][static_cast<std::size_t>(s)]));
  return christoffel_from(n, Wc, vars, pidx);
}

std::string to_string(SlownessBasis b) {
  switch (b) {
    case SlownessBasis::Canon2d:
      return "canon2d";
    case SlownessBasis::Ortho3d:
      return "ortho3d";
    case SlownessBasis::Mono3d:
      return "mono3d";
    case SlownessBasis::Generic:
      return "generic";
  }
  return "?";
}

const std::vector<std::vector<int>>& basis_monomials(SlownessBasis b, bool homogeneous) {
  // exponent rows over (p0, p1, p2[, p3]); slot order is frozen, it is the
  // coefficient order everything downstream (JSON, reconstruction) speaks
  static const std::vector<std::vector<int>> canon2d_h = {
      {0, 4, 0}, {0, 3, 1}, {0, 2, 2}, {2, 2, 0}, {0, 1, 3},
      {2, 1, 1}, {0, 0, 4}, {2, 0, 2}, {4, 0, 0}};
  static const std::vector<std::vector<int>> ortho3d_h = {
      {0, 6, 0, 0}, {0, 4, 2, 0}, {0, 4, 0, 2}, {2, 4, 0, 0}, {0, 2, 4, 0},
      {0, 2, 2, 2}, {2, 2, 2, 0}, {0, 2, 0, 4}, {2, 2, 0, 2}, {4, 2, 0, 0},
      {0, 0, 6, 0}, {0, 0, 4, 2}, {2, 0, 4, 0}, {0, 0, 2, 4}, {2, 0, 2, 2},
      {4, 0, 2, 0}, {0, 0, 0, 6}, {2, 0, 0, 4}, {4, 0, 0, 2}, {6, 0, 0, 0}};
  static const std::vector<std::vector<int>> mono3d_h = {
      {0, 6, 0, 0}, {0, 5, 0, 1}, {0, 4, 2, 0}, {0, 4, 0, 2}, {2, 4, 0, 0},
      {0, 3, 2, 1}, {0, 3, 0, 3}, {2, 3, 0, 1}, {0, 2, 4, 0}, {0, 2, 2, 2},
      {2, 2, 2, 0}, {0, 2, 0, 4}, {2, 2, 0, 2}, {4, 2, 0, 0}, {0, 1, 4, 1},
      {0, 1, 2, 3}, {2, 1, 2, 1}, {0, 1, 0, 5}, {2, 1, 0, 3}, {4, 1, 0, 1},
      {0, 0, 6, 0}, {0, 0, 4, 2}, {2, 0, 4, 0}, {0, 0, 2, 4}, {2, 0, 2, 2},
      {4, 0, 2, 0}, {0, 0, 0, 6}, {2, 0, 0, 4}, {4, 0, 0, 2}, {6, 0, 0, 0}};
  auto drop_p0 = [](const std::vector<std::vector<int>>& rows) {
    std::vector<std::vector<int>> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.emplace_back(r.begin() + 1, r.end());
    return out;
  };
  static const std::vector<std::vector<int>> canon2d_d = drop_p0(canon2d_h);
  static const std::vector<std::vector<int>> ortho3d_d = drop_p0(ortho3d_h);
  static const std::vector<std::vector<int>> mono3d_d = drop_p0(mono3d_h);
  switch (b) {
    case SlownessBasis::Canon2d:
      return homogeneous ? canon2d_h : canon2d_d;
    case SlownessBasis::Ortho3d:
      return homogeneous ? ortho3d_h : ortho3d_d;
    case SlownessBasis::Mono3d:
      return homogeneous ? mono3d_h : mono3d_d;
    case SlownessBasis::Generic:
      break;
  }
  throw std::invalid_argument("basis_monomials: generic basis has no slot table");
}

std::vector<std::string> slowness_vars(int dim, bool homogeneous) {
  std::vector<std::string> v;
  if (homogeneous) v.push_back("p0");
  for (int j = 1; j <= dim; ++j) v.push_back("p" + std::to_string(j));
  return v;
}

MultiPoly<BigRational> SlownessPoly::to_poly() const {
  if (basis == SlownessBasis::Generic) return generic;
  const auto& slots = basis_monomials(basis, homogeneous);
  Poly f(slowness_vars(dim, homogeneous));
  for (std::size_t s = 0; s < slots.size(); ++s)
    f.add_term(Monomial(slots[s]), coeffs[s]);
  return f;
}

SlownessPoly SlownessPoly::from_poly(const MultiPoly<BigRational>& f, int dim, SlownessBasis basis,
                                     bool homogeneous) {
  if (f.vars() != slowness_vars(dim, homogeneous))
    throw std::invalid_argument("SlownessPoly::from_poly: unexpected variable list");
  SlownessPoly sp;
  sp.dim = dim;
  sp.basis = basis;
  sp.homogeneous = homogeneous;
  if (basis == SlownessBasis::Generic) {
    sp.generic = f;
    return sp;
  }
  const auto& slots = basis_monomials(basis, homogeneous);
  sp.coeffs.assign(slots.size(), BigRational(0));
  for (const auto& [m, c] : f.terms()) {
    auto it = std::find(slots.begin(), slots.end(), m.e);
    if (it == slots.end())
      throw std::invalid_argument("SlownessPoly::from_poly: term outside " + to_string(basis) +
                                  " basis");
    sp.coeffs[static_cast<std::size_t>(it - slots.begin())] = c;
  }
  return sp;
}

SlownessPoly forward(const StiffnessTensor& t, bool homogeneous) {
  const int n = t.dim();
  std::vector<std::string> vars = slowness_vars(n, true);
  std::vector<std::size_t> pidx(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) pidx[static_cast<std::size_t>(j)] = static_cast<std::size_t>(j + 1);
  auto W = t.voigt_matrix();
  const int psi = voigt_size(n);
  std::vector<Poly> Wc;
  Wc.reserve(static_cast<std::size_t>(psi * psi));
  for (int r = 0; r < psi; ++r)
    for (int s = 0; s < psi; ++s)
      Wc.push_back(Poly::constant(vars, W[static_cast<std::size_t>(r)][static_cast<std::size_t>(s)]));
  PolyMatrix<BigRational> M = christoffel_from(n, Wc, vars, pidx);
  Monomial p0sq(vars.size());
  p0sq.e[0] = 2;
  for (int i = 0; i < n; ++i)
    M.at(static_cast<std::size_t>(i), static_cast<std::size_t>(i)).add_term(p0sq, BigRational(-1));
  Poly det = poly_det(M);
  if (!homogeneous) det = det.dehomogenize(0);
  return SlownessPoly::from_poly(det, n, basis_of(t), homogeneous);
}

std::vector<MultiPoly<BigRational>> coefficient_formulas(SymmetryClass cls) {
  SlownessBasis basis;
  switch (cls) {
    case SymmetryClass::Full2d:
      basis = SlownessBasis::Canon2d;
      break;
    case SymmetryClass::Orthorhombic:
      basis = SlownessBasis::Ortho3d;
      break;
    case SymmetryClass::Monoclinic:
      basis = SlownessBasis::Mono3d;
      break;
    default:
      throw UnsupportedError("coefficient formulas cover full2d, orthorhombic, monoclinic");
  }
  const auto& ks = StiffnessTensor::keys(cls);
  const int n = (cls == SymmetryClass::Full2d) ? 2 : 3;
  std::vector<std::string> vars = ks;
  for (const auto& pv : slowness_vars(n, true)) vars.push_back(pv);
  const std::size_t pb = ks.size();  // index of p0
  std::vector<std::size_t> pidx(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) pidx[static_cast<std::size_t>(j)] = pb + 1 + static_cast<std::size_t>(j);

  const int psi = voigt_size(n);
  std::vector<Poly> W(static_cast<std::size_t>(psi * psi), Poly(vars));
  for (std::size_t ki = 0; ki < ks.size(); ++ki) {
    int r = ks[ki][1] - '1', s = ks[ki][2] - '1';
    Poly v = Poly::variable(vars, ki, BigRational(1));
    W[static_cast<std::size_t>(r * psi + s)] = v;
    W[static_cast<std::size_t>(s * psi + r)] = v;
  }
  PolyMatrix<BigRational> M = christoffel_from(n, W, vars, pidx);
  Monomial p0sq(vars.size());
  p0sq.e[pb] = 2;
  for (int i = 0; i < n; ++i)
    M.at(static_cast<std::size_t>(i), static_cast<std::size_t>(i)).add_term(p0sq, BigRational(-1));
  Poly det = poly_det(M);

  const auto& slots = basis_monomials(basis, true);
  std::vector<Poly> out(slots.size(), Poly(ks));
  for (const auto& [m, c] : det.terms()) {
    std::vector<int> pe(m.e.begin() + static_cast<std::ptrdiff_t>(pb), m.e.end());
    auto it = std::find(slots.begin(), slots.end(), pe);
    if (it == slots.end()) throw std::logic_error("coefficient_formulas: term outside basis");
    Monomial bm(ks.size());
    std::copy(m.e.begin(), m.e.begin() + static_cast<std::ptrdiff_t>(pb), bm.e.begin());
    out[static_cast<std::size_t>(it - slots.begin())].add_term(bm, c);
  }
  return out;
}

PositivityReport positivity(const StiffnessTensor& t) {
  auto W = t.voigt_matrix();
  const int psi = voigt_size(t.dim());
  PositivityReport rep;
  rep.positive_definite = true;
  for (int k = 1; k <= psi; ++k) {
    std::vector<std::vector<BigRational>> sub(static_cast<std::size_t>(k));
    for (int r = 0; r < k; ++r)
      sub[static_cast<std::size_t>(r)].assign(W[static_cast<std::size_t>(r)].begin(),
                                              W[static_cast<std::size_t>(r)].begin() + k);
    BigRational d = rat_det(std::move(sub));
    rep.leading_minors.push_back(d);
    if (d.sign() <= 0 && rep.first_failure == 0) {
      rep.first_failure = k;
      rep.positive_definite = false;
    }
  }
  if (t.symmetry() == SymmetryClass::Orthorhombic) {
    std::optional<std::array<double, 3>> pt;
    rep.cayley = cayley_impl(t, &pt);
    rep.cayley_point = pt;
  }
  return rep;
}

std::string cayley_classify(const StiffnessTensor& t) {
  if (t.symmetry() != SymmetryClass::Orthorhombic)
    throw UnsupportedError("Cayley classification needs an orthorhombic tensor");
  return cayley_impl(t, nullptr);
}

}  // namespace chr
