#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chr/elastic.hpp"
#include "chr/multipoly.hpp"
#include "chr/rational.hpp"

namespace chr {

// Ideal presented by explicit generators. All generators share one variable
// list and term order; under Lex the variable list is the precedence,
// leftmost highest. Zero generators are not stored.
struct PolyIdeal {
  std::vector<MultiPoly<BigRational>> generators;
};

// Reduced Groebner basis: monic elements, no term of any element divisible
// by another element's leading term, sorted by leading monomial with the
// largest first. Unique for (ideal, order), hence independent of generator
// input order.
struct GroebnerBasis {
  std::vector<MultiPoly<BigRational>> basis;
  TermOrder order = TermOrder::Lex;
  bool reduced = false;
};

// Remainder of f under multivariate division by the given polynomials
// (first divisor whose leading term divides wins each step).
MultiPoly<BigRational> normal_form(const MultiPoly<BigRational>& f,
                                   const std::vector<MultiPoly<BigRational>>& basis);

// S-polynomial of the pair (f, g).
MultiPoly<BigRational> s_polynomial(const MultiPoly<BigRational>& f,
                                    const MultiPoly<BigRational>& g);

// Buchberger's algorithm with the normal selection strategy (smallest lcm in
// the term order, ties by lexicographic pair index) and the coprime-leading-
// term criterion, followed by interreduction to the reduced basis.
// Envelope: at most 16 unknowns and generator total degree at most 4;
// exceeding either throws ResourceError before any work is done, as does
// exhausting the internal reduction budget.
GroebnerBasis buchberger(const PolyIdeal& ideal);

// true iff every variable has a pure power among the basis leading terms
// (the standard finiteness test; a unit ideal counts as zero-dimensional)
bool is_zero_dimensional(const GroebnerBasis& gb);

// Dimension of the quotient ring as a vector space: the number of monomials
// divisible by no basis leading term. Equals the solution count over the
// algebraic closure counted with multiplicity. Requires zero-dimensionality.
int quotient_dimension(const GroebnerBasis& gb);

// The reconstruction system for a dehomogenized canon2d coefficient vector
// (9 entries, constant slot last): eight generators c_i - formula_i over the
// unknowns b11 > b12 > b13 > b22 > b23 > b33 in Lex order. The constant slot
// must equal 1 (DomainError otherwise).
PolyIdeal build_reconstruction_ideal_2d(const std::vector<BigRational>& c);

// Outcome of a fiber computation. multiplicity is one of
//   unique | two_companions | four_companions | nonfinite | empty | finite
// where "finite" covers zero-dimensional fibers whose solution count (with
// multiplicity) is not 1, 2 or 4. solutions holds the rational points only;
// positivity is parallel to solutions. Every solution is verified against
// the forward map before it is returned.
struct ReconstructionResult {
  std::vector<StiffnessTensor> solutions;
  std::string multiplicity;
  std::vector<PositivityReport> positivity;
  std::optional<GroebnerBasis> groebner;  // the basis the classification used
  std::string note;
};

// Invert the 2D forward map on a dehomogenized canon2d coefficient vector
// with constant slot 1. Generic inputs give one rational tensor; degenerate
// inputs are classified by the Groebner basis shape and any non-rational
// part of a finite fiber is reported in the note without coordinates.
ReconstructionResult reconstruct_2d(const std::vector<BigRational>& c);

// The four orthorhombic tensors sharing t's slowness polynomial: off-
// diagonal triples (b12,b13,b23), (b12,b13*,b23*), (b12*,b13*,b23),
// (b12*,b13,b23*) with x* = -2(paired diagonal) - x and pairs b12/b66,
// b13/b55, b23/b44. The first entry is t itself. groebner_crosscheck
// additionally solves the reduced system in (b12,b13,b23) and checks the
// companions against it.
ReconstructionResult companions_orthorhombic(const StiffnessTensor& t,
                                             bool groebner_crosscheck = false);

// The two monoclinic tensors sharing t's slowness polynomial: t and the
// companion with (b12*,b23*,b25*) = (-b12-2b66, -b23-2b44, -b25-2b46).
ReconstructionResult companions_monoclinic(const StiffnessTensor& t,
                                           bool groebner_crosscheck = false);

// Membership data for a candidate coefficient vector against the closure of
// the image of the 2D forward map. admissible means both generators of the
// elimination ideal vanish (necessary conditions). piece, when set, locates
// c in the constructible image decomposition
//   (V(I1)\V(J1)) u (V(I2)\V(J2)) u (V(I3)\V(J3))
// and is the smallest such index; a vector can satisfy the closure equations
// yet lie in no piece.
struct Admissibility {
  bool admissible = false;
  std::vector<BigRational> j_values;  // the two generator values at c
  std::optional<int> piece;
};

// Exact admissibility test for a dehomogenized canon2d coefficient vector
// with constant slot 1 (DomainError otherwise).
Admissibility admissibility_2d(const std::vector<BigRational>& c);

// The two generators of the elimination ideal cutting out the closure of
// the image, over variables c1..c8.
const std::vector<MultiPoly<BigRational>>& admissibility_ideal();

// One piece V(inside)\V(excluded) of the image decomposition.
struct ImagePiece {
  std::vector<MultiPoly<BigRational>> inside;
  std::vector<MultiPoly<BigRational>> excluded;
};

// The three pieces, index 0 = piece 1. Piece 1's inside ideal is
// admissibility_ideal(); piece 3's excluded ideal is the unit ideal.
const std::vector<ImagePiece>& image_decomposition();

}  // namespace chr
