#include <array>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "chr/elastic.hpp"
#include "chr/errors.hpp"
#include "chr/geometry.hpp"
#include "chr/reconstruct.hpp"
#include "doctest.h"

using namespace chr;

namespace {

using Q = BigRational;

StiffnessTensor make(int dim, const std::string& cls, std::map<std::string, Q> p) {
  return StiffnessTensor(dim, symmetry_class_from_string(cls), std::move(p));
}

StiffnessTensor plotting_tensor() {
  return make(2, "full2d",
              {{"b11", Q(10)}, {"b12", Q(2)}, {"b13", Q(3)},
               {"b22", Q(12)}, {"b23", Q(5)}, {"b33", Q(20)}});
}

StiffnessTensor iso_tensor() {
  return make(2, "isotropic", {{"cP2", Q(4)}, {"cS2", Q(1)}});
}

StiffnessTensor olivine_tensor() {
  return make(3, "orthorhombic",
              {{"b11", Q(321)}, {"b12", Q(68)}, {"b13", Q(72)},
               {"b22", Q(197)}, {"b23", Q(77)}, {"b33", Q(234)},
               {"b44", Q(64)}, {"b55", Q(77)}, {"b66", Q(79)}});
}

double eval_slowness(const SlownessPoly& sp, const std::vector<double>& p) {
  const auto& monos = basis_monomials(sp.basis, sp.homogeneous);
  double acc = 0.0;
  for (std::size_t j = 0; j < monos.size(); ++j) {
    double v = sp.coeffs[j].to_double();
    for (std::size_t vi = 0; vi < monos[j].size(); ++vi)
      for (int r = 0; r < monos[j][vi]; ++r) v *= p[vi];
    acc += v;
  }
  return acc;
}

std::vector<std::vector<double>> fibonacci_sphere(int count) {
  const double ga = M_PI * (3.0 - std::sqrt(5.0));
  std::vector<std::vector<double>> out;
  for (int k = 0; k < count; ++k) {
    double z = 1.0 - 2.0 * (k + 0.5) / count;
    double rho = std::sqrt(1.0 - z * z);
    out.push_back({rho * std::cos(ga * k), rho * std::sin(ga * k), z});
  }
  return out;
}

// 12 directions inside a 40 degree aperture, golden-ratio spaced
std::vector<std::vector<double>> aperture_directions() {
  const double phi = 0.6180339887498949;
  const double aperture = 40.0 * M_PI / 180.0;
  std::vector<std::vector<double>> dirs;
  for (int j = 0; j < 12; ++j) {
    double frac = j * phi - std::floor(j * phi);
    double th = 0.2 + aperture * frac;
    dirs.push_back({std::cos(th), std::sin(th)});
  }
  return dirs;
}

}  // namespace

TEST_CASE("christoffel eigenvalues at axis directions") {
  SUBCASE("isotropic plane") {
    auto e = eigen_branches(iso_tensor(), {1, 0});
    REQUIRE(e.values.size() == 2);
    CHECK(e.values[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(e.values[1] == doctest::Approx(4.0).epsilon(1e-14));
    // eigenvectors are the axes (up to sign)
    CHECK(std::abs(e.vectors[0][1]) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(e.vectors[1][0]) == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("plotting tensor: 15 -+ sqrt(34)") {
    auto e = eigen_branches(plotting_tensor(), {1, 0});
    CHECK(e.values[0] == doctest::Approx(15.0 - std::sqrt(34.0)).epsilon(1e-14));
    CHECK(e.values[1] == doctest::Approx(15.0 + std::sqrt(34.0)).epsilon(1e-14));
  }
  SUBCASE("olivine x-axis: shear moduli and b11") {
    auto e = eigen_branches(olivine_tensor(), {1, 0, 0});
    REQUIRE(e.values.size() == 3);
    CHECK(e.values[0] == doctest::Approx(77.0).epsilon(1e-13));
    CHECK(e.values[1] == doctest::Approx(79.0).epsilon(1e-13));
    CHECK(e.values[2] == doctest::Approx(321.0).epsilon(1e-13));
  }
  SUBCASE("eigenvectors are orthonormal off-axis") {
    double n = std::sqrt(14.0);
    auto e = eigen_branches(olivine_tensor(), {1 / n, 2 / n, 3 / n});
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        double dot = 0;
        for (int i = 0; i < 3; ++i) dot += e.vectors[a][i] * e.vectors[b][i];
        CHECK(dot == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-12));
      }
  }
}

TEST_CASE("eigenvalues satisfy the exact characteristic equation") {
  // det(Gamma(p) - p0^2 I) vanishes at p0 = sqrt(lambda_b(u)); evaluate the
  // exact homogeneous slowness polynomial there and scale by the term mass
  auto t = olivine_tensor();
  SlownessPoly hom = forward(t, true);
  auto poly = hom.to_poly();
  double worst = 0.0;
  for (const auto& u : fibonacci_sphere(200)) {
    auto e = eigen_branches(t, u);
    for (int b = 0; b < 3; ++b) {
      double s = std::sqrt(e.values[b]);
      double pt[4] = {s, u[0], u[1], u[2]};
      double acc = 0.0, scale = 0.0;
      for (const auto& term : poly.terms()) {
        double v = term.second.to_double();
        for (std::size_t vi = 0; vi < term.first.e.size(); ++vi)
          for (int r = 0; r < term.first.e[vi]; ++r) v *= pt[vi];
        acc += v;
        scale += std::abs(v);
      }
      worst = std::max(worst, std::abs(acc) / scale);
    }
  }
  CHECK(worst <= 1e-14);
}

TEST_CASE("branch samples land on the slowness curve") {
  SUBCASE("isotropic qP radius is 1/2") {
    auto s = sample_branch(iso_tensor(), 2, {{1, 0}});
    REQUIRE(s.size() == 1);
    CHECK(s[0].p[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(s[0].p[1] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(s[0].eigenvalue == doctest::Approx(4.0).epsilon(1e-14));
  }
  SUBCASE("plotting tensor qP radius at the x-axis") {
    auto s = sample_branch(plotting_tensor(), 2, {{1, 0}});
    double r = std::hypot(s[0].p[0], s[0].p[1]);
    CHECK(r == doctest::Approx(1.0 / std::sqrt(15.0 + std::sqrt(34.0))).epsilon(1e-14));
  }
  SUBCASE("dehomogenized slowness polynomial vanishes at every sample") {
    SlownessPoly sp = forward(plotting_tensor(), false);
    auto dirs = circle_directions(64);
    for (int b = 1; b <= 2; ++b)
      for (const auto& smp : sample_branch(plotting_tensor(), b, dirs))
        CHECK(std::abs(eval_slowness(sp, smp.p)) <= 1e-12);
  }
  SUBCASE("direction count and normalization") {
    auto dirs = circle_directions(8);
    REQUIRE(dirs.size() == 8);
    CHECK(dirs[0][0] == doctest::Approx(1.0));
    CHECK(dirs[2][1] == doctest::Approx(1.0));  // quarter turn
    auto s = sample_branch(iso_tensor(), 2, {{3, 0}});  // non-unit input
    CHECK(s[0].direction[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s[0].p[0] == doctest::Approx(0.5).epsilon(1e-15));
  }
}

TEST_CASE("group velocities and the Euler identity") {
  SUBCASE("isotropic speed is the sound speed") {
    auto s = sample_branch(iso_tensor(), 2, {{1, 0}});
    auto gv = group_velocity(iso_tensor(), s[0]);
    CHECK(gv.v[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(gv.v[1] == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("<v, p> = 1 on both planar branches") {
    auto t = plotting_tensor();
    for (int b = 1; b <= 2; ++b)
      for (const auto& smp : sample_branch(t, b, circle_directions(64))) {
        auto gv = group_velocity(t, smp);
        CHECK(std::abs(gv.v[0] * smp.p[0] + gv.v[1] * smp.p[1] - 1.0) <= 1e-10);
      }
  }
  SUBCASE("<v, p> = 1 on the three olivine sheets") {
    auto t = olivine_tensor();
    for (int b = 1; b <= 3; ++b)
      for (const auto& smp : sample_branch(t, b, fibonacci_sphere(60))) {
        auto gv = group_velocity(t, smp);
        double dot = 0;
        for (int i = 0; i < 3; ++i) dot += gv.v[i] * smp.p[i];
        CHECK(std::abs(dot - 1.0) <= 1e-8);
      }
  }
  SUBCASE("finite differences confirm the analytic gradient") {
    auto t = plotting_tensor();
    for (const auto& smp : sample_branch(t, 2, circle_directions(32))) {
      auto a = eigenvalue_gradient(t, 2, smp.p, false);
      auto d = eigenvalue_gradient(t, 2, smp.p, true);
      CHECK(std::abs(a[0] - d[0]) <= 1e-8);
      CHECK(std::abs(a[1] - d[1]) <= 1e-8);
    }
    auto t3 = olivine_tensor();
    for (const auto& smp : sample_branch(t3, 3, fibonacci_sphere(40))) {
      auto a = eigenvalue_gradient(t3, 3, smp.p, false);
      auto d = eigenvalue_gradient(t3, 3, smp.p, true);
      for (int i = 0; i < 3; ++i) CHECK(std::abs(a[i] - d[i]) <= 1e-8);
    }
  }
  SUBCASE("near-degenerate branches are refused") {
    auto t = make(2, "isotropic",
                  {{"cP2", Q(4)}, {"cS2", Q(15999999999L, 4000000000L)}});
    auto s = sample_branch(t, 2, {{1, 0}});
    CHECK_THROWS_AS(group_velocity(t, s[0]), DomainError);
  }
}

TEST_CASE("qP gap probe") {
  CHECK(qp_gap_probe(iso_tensor()) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(qp_gap_probe(plotting_tensor()) == doctest::Approx(0.43824121073522371).epsilon(1e-12));
  CHECK(qp_gap_probe(olivine_tensor(), 2000) ==
        doctest::Approx(0.58870264412813034).epsilon(1e-12));
}

TEST_CASE("dual norm table is the travel-time norm") {
  SUBCASE("isotropic support is |v| / 2") {
    DualNormTable f(iso_tensor());
    CHECK(f(1, 0) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(f(3, 4) == doctest::Approx(2.5).epsilon(1e-13));
    CHECK(f(-1, 2) == doctest::Approx(0.5 * std::sqrt(5.0)).epsilon(1e-13));
    auto s = f.support(1, 0);
    CHECK(s.point[0] == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(std::abs(s.point[1]) <= 1e-12);
    CHECK(f.grid() == 720);
    CHECK(f.samples().size() == 720);
  }
  SUBCASE("positive 1-homogeneity and subadditivity") {
    DualNormTable f(plotting_tensor());
    CHECK(f(2, 0) / f(1, 0) == doctest::Approx(2.0).epsilon(1e-13));
    for (int i = 0; i < 12; ++i)
      for (int j = 0; j < 12; ++j) {
        double a1 = 2 * M_PI * i / 12, a2 = 2 * M_PI * j / 12;
        double lhs = f(std::cos(a1) + std::cos(a2), std::sin(a1) + std::sin(a2));
        double rhs = f(std::cos(a1), std::sin(a1)) + f(std::cos(a2), std::sin(a2));
        CHECK(lhs <= rhs + 1e-12);
      }
  }
  SUBCASE("the maximizer sits on the curve with group direction v") {
    auto t = plotting_tensor();
    DualNormTable f(t);
    SlownessPoly sp = forward(t, false);
    for (int i = 0; i < 32; ++i) {
      double th = 2 * M_PI * i / 32 + 0.01;
      auto s = f.support(std::cos(th), std::sin(th));
      CHECK(std::abs(eval_slowness(sp, {s.point[0], s.point[1]})) <= 1e-12);
      BranchSample bs;
      bs.direction = {std::cos(th), std::sin(th)};
      bs.branch = 2;
      bs.p = {s.point[0], s.point[1]};
      auto gv = group_velocity(t, bs);
      // v parallel to the query, speed = 1 / f*
      CHECK(std::abs(gv.v[0] * std::sin(th) - gv.v[1] * std::cos(th)) <= 1e-10);
      CHECK(std::hypot(gv.v[0], gv.v[1]) == doctest::Approx(1.0 / s.value).epsilon(1e-10));
    }
  }
  SUBCASE("the qP slowness loop is convex") {
    auto smp = sample_branch(plotting_tensor(), 2, circle_directions(720));
    for (std::size_t i = 0; i < smp.size(); ++i) {
      const auto& a = smp[i].p;
      const auto& b = smp[(i + 1) % smp.size()].p;
      const auto& c = smp[(i + 2) % smp.size()].p;
      double cr = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
      CHECK(cr > 0.0);
    }
  }
}

TEST_CASE("patch fitting recovers exact coefficients") {
  const std::vector<Q> expected = {Q(191), Q(88), Q(66),  Q(-30), Q(52),
                                   Q(-16), Q(215), Q(-32), Q(1)};
  SUBCASE("12 qP samples in a 40 degree aperture") {
    auto smp = sample_branch(plotting_tensor(), 2, aperture_directions());
    SlownessPoly sp = fit_patch(smp, SymmetryClass::Full2d);
    CHECK(sp.basis == SlownessBasis::Canon2d);
    CHECK(sp.coeffs == expected);
  }
  SUBCASE("12 qS samples give the same polynomial, then the tensor") {
    auto smp = sample_branch(plotting_tensor(), 1, aperture_directions());
    SlownessPoly sp = fit_patch(smp, SymmetryClass::Full2d);
    CHECK(sp.coeffs == expected);
    auto res = reconstruct_2d(sp.coeffs);
    REQUIRE(res.solutions.size() == 1);
    CHECK(res.note == "1 solution(s) counted with multiplicity; 1 rational point(s) extracted");
    CHECK(res.solutions[0].param("b11") == Q(10));
    CHECK(res.solutions[0].param("b33") == Q(20));
  }
  SUBCASE("an isotropic patch never determines the quartic") {
    auto smp = sample_branch(iso_tensor(), 2, aperture_directions());
    CHECK_THROWS_AS(fit_patch(smp, SymmetryClass::Isotropic), InsufficientDataError);
  }
  SUBCASE("fewer samples than unknowns") {
    auto smp = sample_branch(plotting_tensor(), 2, aperture_directions());
    smp.resize(7);
    CHECK_THROWS_AS(fit_patch(smp, SymmetryClass::Full2d), InsufficientDataError);
  }
  SUBCASE("off-curve samples fail rationalization") {
    auto smp = sample_branch(plotting_tensor(), 1, aperture_directions());
    for (std::size_t j = 0; j < smp.size(); ++j) {
      double f = 1.0 + (j % 2 ? 1e-2 : -1e-2);
      smp[j].p[0] *= f;
      smp[j].p[1] *= f;
    }
    CHECK_THROWS_AS(fit_patch(smp, SymmetryClass::Full2d), PrecisionError);
  }
  SUBCASE("random positive tensors round trip") {
    std::mt19937 rng(20240819);
    std::uniform_int_distribution<int> diag(20, 50), off(-10, 10);
    const double phi = 0.6180339887498949;
    std::vector<std::vector<double>> dirs;
    for (int j = 0; j < 16; ++j) {
      double frac = j * phi - std::floor(j * phi);
      dirs.push_back({std::cos(2 * M_PI * frac), std::sin(2 * M_PI * frac)});
    }
    int done = 0;
    while (done < 25) {
      StiffnessTensor t = make(2, "full2d",
                               {{"b11", Q(diag(rng))}, {"b22", Q(diag(rng))},
                                {"b33", Q(diag(rng))}, {"b12", Q(off(rng))},
                                {"b13", Q(off(rng))}, {"b23", Q(off(rng))}});
      if (!positivity(t).positive_definite) continue;
      if (qp_gap_probe(t, 128) < 1e-6) continue;
      SlownessPoly truth = forward(t, false);
      SlownessPoly fit = fit_patch(sample_branch(t, 2, dirs), SymmetryClass::Full2d);
      CHECK(fit.coeffs == truth.coeffs);
      ++done;
    }
  }
}

TEST_CASE("sample table and curve plot writers") {
  auto s = sample_branch(iso_tensor(), 2, {{1, 0}});
  auto gv = group_velocity(iso_tensor(), s[0]);
  CHECK(samples_csv({gv}) == "direction,branch,p_x,p_y,v_x,v_y\n0,2,0.5,0,2,0\n");

  std::vector<std::vector<std::array<double, 2>>> loops = {
      {{1, 0}, {0, 1}, {-1, 0}, {0, -1}}};
  std::string svg = curves_svg(loops);
  CHECK(svg.find("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\"") !=
        std::string::npos);
  CHECK(svg.find("<path d=\"M 760.000000 400.000000 L 400.000000 40.000000 "
                 "L 40.000000 400.000000 L 400.000000 760.000000 Z\" "
                 "fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\"/>") != std::string::npos);
  CHECK(svg.find("<line x1=\"0\" y1=\"400\" x2=\"800\" y2=\"400\"") != std::string::npos);
}

TEST_CASE("geometry input validation") {
  auto t = plotting_tensor();
  CHECK_THROWS_AS(eigen_branches(t, {0, 0}), DomainError);
  CHECK_THROWS_AS(eigen_branches(t, {1, 0, 0}), DomainError);
  auto indef = make(2, "full2d",
                    {{"b11", Q(1)}, {"b12", Q(0)}, {"b13", Q(0)},
                     {"b22", Q(-1)}, {"b23", Q(0)}, {"b33", Q(1)}});
  CHECK_THROWS_AS(eigen_branches(indef, {1, 0}), DomainError);
  CHECK_THROWS_AS(sample_branch(t, 3, {{1, 0}}), DomainError);
  CHECK_THROWS_AS(sample_branch(t, 0, {{1, 0}}), DomainError);
  auto t3 = olivine_tensor();
  CHECK_THROWS_AS(DualNormTable{t3}, UnsupportedError);
  CHECK_THROWS_AS(fit_patch({}, SymmetryClass::Orthorhombic), UnsupportedError);
  CHECK_THROWS_AS(circle_directions(0), DomainError);
}
