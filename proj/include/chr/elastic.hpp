#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chr/multipoly.hpp"
#include "chr/rational.hpp"

namespace chr {

// Symmetry classes handled by the pipeline. full2d is the generic planar
// tensor; the three 3D classes are told apart by their Voigt zero patterns.
enum class SymmetryClass { Full2d, Triclinic3d, Orthorhombic, Monoclinic, Isotropic };

SymmetryClass symmetry_class_from_string(const std::string& s);
std::string to_string(SymmetryClass cls);

// psi(n) = n(n+1)/2, the Voigt index range for dimension n
int voigt_size(int dim);

// 0-based Voigt contraction of the symmetric index pair (i, j).
// 2D: 00->0, 11->1, 01->2.  3D: 00->0, 11->1, 22->2, 12->3, 02->4, 01->5.
int voigt_index(int dim, int i, int j);

// Density-normalized stiffness tensor, stored by its independent Voigt
// parameters b_rs (keys "b11".."b66", 1-based row <= column). Isotropic
// tensors carry the squared wavespeeds {"cP2", "cS2"} instead.
class StiffnessTensor {
 public:
  StiffnessTensor(int dim, SymmetryClass cls, std::map<std::string, BigRational> params);

  int dim() const { return dim_; }
  SymmetryClass symmetry() const { return cls_; }
  const std::map<std::string, BigRational>& params() const { return params_; }
  const BigRational& param(const std::string& key) const;

  // full Voigt matrix, voigt_size(dim) square, zeros filled in
  std::vector<std::vector<BigRational>> voigt_matrix() const;

  // the independent parameter keys for a class, in canonical order
  static const std::vector<std::string>& keys(SymmetryClass cls);

 private:
  int dim_;
  SymmetryClass cls_;
  std::map<std::string, BigRational> params_;
};

// Rank-4 tensor a_{ijkl} as a dense n^4 array (0-based indices).
struct FullTensor {
  int n = 0;
  std::vector<BigRational> a;

  const BigRational& at(int i, int j, int k, int l) const {
    return a[static_cast<std::size_t>(((i * n + j) * n + k) * n + l)];
  }
};

// Expand Voigt parameters to the full a_{ijkl}; both minor symmetries and the
// major symmetry hold by construction.
FullTensor voigt_expand(const StiffnessTensor& t);

// Christoffel matrix Gamma(p)_{il} = sum_{jk} a_{ijkl} p_j p_k over the
// variables p1..pn; entries are homogeneous quadratics.
PolyMatrix<BigRational> christoffel(const StiffnessTensor& t);

// Coefficient bases for slowness polynomials. The tagged bases fix a slot
// order so coefficient vectors are comparable across runs; Generic keeps the
// raw polynomial (triclinic 3D).
enum class SlownessBasis { Canon2d, Ortho3d, Mono3d, Generic };

std::string to_string(SlownessBasis b);

// slot monomials as exponent rows over (p0, p1, .., pn); the dehomogenized
// variant drops the p0 column
const std::vector<std::vector<int>>& basis_monomials(SlownessBasis b, bool homogeneous);

// canonical variable names: {"p0", "p1", ..} homogenized, {"p1", ..} not
std::vector<std::string> slowness_vars(int dim, bool homogeneous);

// Slowness polynomial det(Gamma(p) - I_n), or det(Gamma(p) - p0^2 I_n) when
// homogenized, held as exact coefficients over a tagged basis.
struct SlownessPoly {
  int dim = 2;
  SlownessBasis basis = SlownessBasis::Generic;
  bool homogeneous = false;
  std::vector<BigRational> coeffs;  // tagged bases: one entry per slot
  MultiPoly<BigRational> generic;   // Generic only: the polynomial itself

  MultiPoly<BigRational> to_poly() const;

  // Inverse of to_poly. Requires the canonical variable list for (dim,
  // homogeneous) and every term to land on a basis slot; throws
  // std::invalid_argument otherwise.
  static SlownessPoly from_poly(const MultiPoly<BigRational>& f, int dim, SlownessBasis basis,
                                bool homogeneous);
};

// Forward map: stiffness tensor -> slowness polynomial. Basis follows the
// class (full2d/isotropic-2D -> canon2d, orthorhombic/isotropic-3D ->
// ortho3d, monoclinic -> mono3d, triclinic3d -> generic).
SlownessPoly forward(const StiffnessTensor& t, bool homogeneous);

// The slot coefficients of forward() as polynomials in the class's Voigt
// parameters, computed by running the forward map on an indeterminate
// tensor. Supported for Full2d, Orthorhombic and Monoclinic; the returned
// polynomials live over StiffnessTensor::keys(cls).
std::vector<MultiPoly<BigRational>> coefficient_formulas(SymmetryClass cls);

// Exact positivity data for the Voigt matrix.
struct PositivityReport {
  bool positive_definite = false;
  std::vector<BigRational> leading_minors;  // sizes 1..voigt_size(dim)
  int first_failure = 0;                    // 1-based size of first minor <= 0, 0 if none

  // Orthorhombic only: location of (b12, b13, b23) scaled by the diagonal
  // against the Cayley cubic 1 + 2xyz - x^2 - y^2 - z^2 = 0. Values are
  // "inside-tetrahedron", "boundary" or "outside"; the point is the double
  // approximation (x, y, z) when the diagonal is positive.
  std::optional<std::string> cayley;
  std::optional<std::array<double, 3>> cayley_point;
};

PositivityReport positivity(const StiffnessTensor& t);

// Cayley classification alone; throws UnsupportedError unless the tensor is
// orthorhombic.
std::string cayley_classify(const StiffnessTensor& t);

}  // namespace chr
