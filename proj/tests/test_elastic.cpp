#include "doctest.h"

#include <map>
#include <string>
#include <vector>

#include "chr/elastic.hpp"
#include "chr/errors.hpp"
#include "chr/rational.hpp"

using namespace chr;

namespace {

StiffnessTensor make(int dim, SymmetryClass cls, const std::vector<long>& vals) {
  const auto& ks = StiffnessTensor::keys(cls);
  REQUIRE(ks.size() == vals.size());
  std::map<std::string, BigRational> m;
  for (std::size_t i = 0; i < ks.size(); ++i) m[ks[i]] = BigRational(vals[i]);
  return StiffnessTensor(dim, cls, m);
}

void expect_coeffs(const SlownessPoly& sp, const std::vector<long>& want) {
  REQUIRE(sp.coeffs.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    INFO("slot c" << i + 1);
    CHECK(sp.coeffs[i] == BigRational(want[i]));
  }
}

// fixtures used across cases
const std::vector<long> kFig1 = {10, 2, 3, 12, 5, 20};
const std::vector<long> kSec25 = {20, 39, -65, -16, -87, 30};
const std::vector<long> kOlivine = {321, 68, 72, 197, 77, 234, 64, 77, 79};
const std::vector<long> kOlivineForward = {1952643, 5308889, 6230406, -56159, 4261967,
                                           9884047,  -94721, 5189310, -108883, 477,
                                           996032,  3365543, -33227,  3517205, -73952,
                                           340,     1153152, -37922,  375,     -1};

}  // namespace

TEST_CASE("voigt bookkeeping") {
  CHECK(voigt_size(2) == 3);
  CHECK(voigt_size(3) == 6);
  CHECK(voigt_index(2, 0, 0) == 0);
  CHECK(voigt_index(2, 1, 0) == 2);
  CHECK(voigt_index(3, 2, 2) == 2);
  CHECK(voigt_index(3, 1, 2) == 3);
  CHECK(voigt_index(3, 0, 2) == 4);
  CHECK(voigt_index(3, 0, 1) == 5);

  CHECK(StiffnessTensor::keys(SymmetryClass::Full2d).size() == 6);
  CHECK(StiffnessTensor::keys(SymmetryClass::Orthorhombic).size() == 9);
  CHECK(StiffnessTensor::keys(SymmetryClass::Monoclinic).size() == 13);
  CHECK(StiffnessTensor::keys(SymmetryClass::Triclinic3d).size() == 21);
}

TEST_CASE("tensor construction rejects bad input") {
  std::map<std::string, BigRational> m;
  for (const auto& k : StiffnessTensor::keys(SymmetryClass::Full2d)) m[k] = BigRational(1);

  CHECK_THROWS_AS(StiffnessTensor(3, SymmetryClass::Full2d, m), DomainError);

  auto extra = m;
  extra["b44"] = BigRational(1);
  CHECK_THROWS_AS(StiffnessTensor(2, SymmetryClass::Full2d, extra), DomainError);

  auto missing = m;
  missing.erase("b23");
  CHECK_THROWS_AS(StiffnessTensor(2, SymmetryClass::Full2d, missing), DomainError);

  CHECK_THROWS_AS(symmetry_class_from_string("hexagonal"), DomainError);
  CHECK(symmetry_class_from_string("orthorhombic") == SymmetryClass::Orthorhombic);
}

TEST_CASE("voigt_expand satisfies all tensor symmetries") {
  StiffnessTensor t = make(3, SymmetryClass::Monoclinic,
                           {236, 42, 25, 7, 180, 40, 2, 68, 9, 16, 12, 14, 54});
  FullTensor a = voigt_expand(t);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          CHECK(a.at(i, j, k, l) == a.at(j, i, k, l));
          CHECK(a.at(i, j, k, l) == a.at(i, j, l, k));
          CHECK(a.at(i, j, k, l) == a.at(k, l, i, j));
        }
  // monoclinic zero pattern: b14 = a_1123 = 0, b56 = a_1312 = 0
  CHECK(a.at(0, 0, 1, 2).is_zero());
  CHECK(a.at(0, 2, 0, 1).is_zero());
  // b15 = a_1113 = 7
  CHECK(a.at(0, 0, 0, 2) == BigRational(7));
}

TEST_CASE("christoffel matrix entries") {
  StiffnessTensor t = make(2, SymmetryClass::Full2d, kFig1);
  auto G = christoffel(t);
  // G11 = b11 p1^2 + 2 b13 p1p2 + b33 p2^2, G12 = b13 p1^2 + (b12+b33) p1p2 + b23 p2^2
  CHECK(G.at(0, 0).str() == "10/1*p1^2 + 6/1*p1*p2 + 20/1*p2^2");
  CHECK(G.at(0, 1).str() == "3/1*p1^2 + 22/1*p1*p2 + 5/1*p2^2");
  CHECK(G.at(1, 0) == G.at(0, 1));
  CHECK(G.at(1, 1).str() == "20/1*p1^2 + 10/1*p1*p2 + 12/1*p2^2");
}

TEST_CASE("forward golden vectors are exact") {
  expect_coeffs(forward(make(2, SymmetryClass::Full2d, kFig1), false),
                {191, 88, 66, -30, 52, -16, 215, -32, 1});
  expect_coeffs(forward(make(2, SymmetryClass::Full2d, kFig1), true),
                {191, 88, 66, -30, 52, -16, 215, -32, 1});
  expect_coeffs(forward(make(2, SymmetryClass::Full2d, kSec25), false),
                {-3625, 1590, 7129, -50, 8866, 304, -8049, -14, 1});
  expect_coeffs(forward(make(3, SymmetryClass::Orthorhombic, kOlivine), true), kOlivineForward);
}

TEST_CASE("isotropic slowness polynomial factors through wavespeeds") {
  std::map<std::string, BigRational> m{{"cP2", BigRational(4)}, {"cS2", BigRational(1)}};
  StiffnessTensor iso2(2, SymmetryClass::Isotropic, m);
  // (4r - 1)(r - 1) with r = p1^2 + p2^2
  expect_coeffs(forward(iso2, false), {4, 0, 8, -5, 0, 0, 4, -5, 1});

  StiffnessTensor iso3(3, SymmetryClass::Isotropic, m);
  SlownessPoly sp3 = forward(iso3, false);
  CHECK(sp3.basis == SlownessBasis::Ortho3d);
  // (4r - 1)(r - 1)^2 with r = |p|^2 expands to 4r^3 - 9r^2 + 6r - 1; the
  // p1^6 slot reads off 4, the constant slot -1
  CHECK(sp3.coeffs[0] == BigRational(4));
  CHECK(sp3.coeffs[19] == BigRational(-1));
  // round trip through the polynomial form
  SlownessPoly back =
      SlownessPoly::from_poly(sp3.to_poly(), sp3.dim, sp3.basis, sp3.homogeneous);
  CHECK(back.coeffs == sp3.coeffs);
}

TEST_CASE("slowness basis slot tables are consistent") {
  CHECK(basis_monomials(SlownessBasis::Canon2d, true).size() == 9);
  CHECK(basis_monomials(SlownessBasis::Ortho3d, true).size() == 20);
  CHECK(basis_monomials(SlownessBasis::Mono3d, true).size() == 30);
  // dehomog tables drop the p0 column but keep slot count and order
  const auto& h = basis_monomials(SlownessBasis::Mono3d, true);
  const auto& d = basis_monomials(SlownessBasis::Mono3d, false);
  REQUIRE(h.size() == d.size());
  for (std::size_t i = 0; i < h.size(); ++i)
    CHECK(std::vector<int>(h[i].begin() + 1, h[i].end()) == d[i]);

  StiffnessTensor t = make(2, SymmetryClass::Full2d, kFig1);
  MultiPoly<BigRational> f = forward(t, true).to_poly();
  CHECK(f.vars() == std::vector<std::string>{"p0", "p1", "p2"});
  CHECK(f.is_homogeneous());
  CHECK(f.degree() == 4);
  CHECK_THROWS_AS(SlownessPoly::from_poly(f, 2, SlownessBasis::Canon2d, false),
                  std::invalid_argument);
}

TEST_CASE("coefficient formulas match numeric forward") {
  struct Case {
    SymmetryClass cls;
    int dim;
    std::vector<long> vals;
  };
  for (const auto& cs : {Case{SymmetryClass::Full2d, 2, kFig1},
                         Case{SymmetryClass::Orthorhombic, 3, kOlivine},
                         Case{SymmetryClass::Monoclinic, 3,
                              {236, 42, 25, 7, 180, 40, 2, 68, 9, 16, 12, 14, 54}}}) {
    auto fs = coefficient_formulas(cs.cls);
    StiffnessTensor t = make(cs.dim, cs.cls, cs.vals);
    SlownessPoly sp = forward(t, true);
    REQUIRE(fs.size() == sp.coeffs.size());
    std::vector<BigRational> pt;
    for (long v : cs.vals) pt.emplace_back(v);
    for (std::size_t i = 0; i < fs.size(); ++i) {
      INFO(to_string(cs.cls) << " slot " << i + 1);
      CHECK(fs[i].eval(pt) == sp.coeffs[i]);
    }
  }
  CHECK_THROWS_AS(coefficient_formulas(SymmetryClass::Isotropic), UnsupportedError);
  CHECK_THROWS_AS(coefficient_formulas(SymmetryClass::Triclinic3d), UnsupportedError);
}

TEST_CASE("printed coefficient formulas") {
  // orthorhombic c7 and c10 as published; keys order
  // b11 b12 b13 b22 b23 b33 b44 b55 b66
  auto fs = coefficient_formulas(SymmetryClass::Orthorhombic);
  CHECK(fs[9].str() == "1/1*b11 + 1/1*b55 + 1/1*b66");
  CHECK(fs[6].str() ==
        "-1/1*b11*b22 + -1/1*b11*b44 + 1/1*b12^2 + 2/1*b12*b66 + -1/1*b22*b55 + "
        "-1/1*b44*b66 + -1/1*b55*b66");

  auto fm = coefficient_formulas(SymmetryClass::Monoclinic);
  CHECK(fm[7].str() ==
        "-2/1*b11*b35 + -2/1*b11*b46 + 2/1*b13*b15 + -2/1*b15*b66 + -2/1*b35*b66 + "
        "-2/1*b46*b55");
}

TEST_CASE("monoclinic trace relations") {
  // c14, c26, c29 pick up the diagonal of the Christoffel trace; the p1p3
  // cross slot carries the factor 2
  StiffnessTensor t = make(3, SymmetryClass::Monoclinic,
                           {236, 42, 25, 7, 180, 40, 2, 68, 9, 16, 12, 14, 54});
  SlownessPoly sp = forward(t, true);
  CHECK(sp.coeffs[13] == BigRational(236 + 14 + 54));      // b11 + b55 + b66
  CHECK(sp.coeffs[19] == BigRational(2 * (7 + 9 + 12)));   // 2(b15 + b35 + b46)
  CHECK(sp.coeffs[25] == BigRational(180 + 16 + 54));      // b22 + b44 + b66
  CHECK(sp.coeffs[28] == BigRational(68 + 16 + 14));       // b33 + b44 + b55
  CHECK(sp.coeffs[29] == BigRational(-1));
}

TEST_CASE("positivity via exact leading minors") {
  StiffnessTensor oliv = make(3, SymmetryClass::Orthorhombic, kOlivine);
  PositivityReport r = positivity(oliv);
  CHECK(r.positive_definite);
  CHECK(r.first_failure == 0);
  CHECK(r.leading_minors.size() == 6);
  CHECK(r.leading_minors[0] == BigRational(321));
  REQUIRE(r.cayley.has_value());
  CHECK(*r.cayley == "inside-tetrahedron");

  // anomalous companion triple (b13, b23 flipped): fails at the 3x3 minor and
  // its normalized point leaves the tetrahedral region
  StiffnessTensor comp =
      make(3, SymmetryClass::Orthorhombic, {321, 68, -226, 197, -205, 234, 64, 77, 79});
  PositivityReport rc = positivity(comp);
  CHECK_FALSE(rc.positive_definite);
  CHECK(rc.first_failure == 3);
  CHECK(rc.leading_minors[2] == BigRational(-3535675));
  REQUIRE(rc.cayley.has_value());
  CHECK(*rc.cayley == "outside");
  REQUIRE(rc.cayley_point.has_value());
  CHECK((*rc.cayley_point)[1] < -0.8);

  CHECK(cayley_classify(comp) == "outside");
  StiffnessTensor flat = make(2, SymmetryClass::Full2d, kFig1);
  CHECK_THROWS_AS(cayley_classify(flat), UnsupportedError);

  PositivityReport rf = positivity(flat);
  CHECK(rf.positive_definite);
  CHECK_FALSE(rf.cayley.has_value());

  // boundary: b12^2 == b11 b22 with the rest comfortable
  StiffnessTensor edge =
      make(3, SymmetryClass::Orthorhombic, {4, 6, 0, 9, 0, 5, 1, 1, 1});
  PositivityReport re = positivity(edge);
  REQUIRE(re.cayley.has_value());
  CHECK(*re.cayley == "boundary");
  CHECK_FALSE(re.positive_definite);
}
