#pragma once

#include <array>
#include <string>
#include <vector>

#include "chr/elastic.hpp"

namespace chr {

// Eigenvalues of the numeric Christoffel matrix Gamma(u), ascending, with
// matching unit eigenvectors. Closed form for n = 2; analytic cubic with a
// Newton polish (characteristic-polynomial residual below 1e-14 relative)
// for n = 3.
struct EigenDecomposition {
  std::vector<double> values;
  std::vector<std::vector<double>> vectors;  // vectors[k] pairs with values[k]
};

// Requires a positive-definite tensor and u != 0 (DomainError otherwise).
EigenDecomposition eigen_branches(const StiffnessTensor& t, const std::vector<double>& u);

// Degeneracy probe for the qP branch: the minimum over a uniform direction
// grid of the gap between the two largest eigenvalues, normalized by the
// largest. Admissibility checks want this comfortably above 1e-8.
double qp_gap_probe(const StiffnessTensor& t, int grid = 720);

// One point of a slowness branch: p = direction / sqrt(lambda_i(direction)),
// so that lambda_i(Gamma(p)) = 1. Branch indices are 1-based, 1 = slowest
// eigenvalue, n = largest (qP).
struct BranchSample {
  std::vector<double> direction;
  int branch = 0;
  std::vector<double> p;
  double eigenvalue = 0.0;  // at the unit direction
};

std::vector<BranchSample> sample_branch(const StiffnessTensor& t, int branch,
                                        const std::vector<std::vector<double>>& directions);

// count unit covectors spread uniformly over the circle (n = 2)
std::vector<std::vector<double>> circle_directions(int count);

// Group velocity at a slowness point, v = grad lambda_i(p) / 2; the factor
// 1/2 makes isotropic media return the physical speed, and the Euler
// identity for the 2-homogeneous eigenvalue gives <v, p> = 1.
struct GroupVelocity {
  BranchSample base;
  std::vector<double> v;
};

// Refuses (DomainError) when the eigenvalue gap at the sample is below 1e-8
// relative: near such points the branch gradient is not trustworthy.
GroupVelocity group_velocity(const StiffnessTensor& t, const BranchSample& s);

// Gradient of the branch eigenvalue at p. Analytic = Hellmann-Feynman with
// the computed eigenvector; finite_difference switches to Richardson-
// extrapolated central differences with step 1e-6 (the default for n = 3).
std::vector<double> eigenvalue_gradient(const StiffnessTensor& t, int branch,
                                        const std::vector<double>& p,
                                        bool finite_difference = false);

// Dense sampling of the qP slowness curve (n = 2) with a support-function
// evaluator: f*(v) = max over the curve of <v, p>. f* is the travel-time
// norm: a straight qP ray traversing displacement w takes time f*(w). The
// evaluator refines the grid maximum by golden-section search on the exact
// curve, so values carry near machine precision.
class DualNormTable {
 public:
  DualNormTable(const StiffnessTensor& t, int grid = 720);

  struct Support {
    double value = 0.0;
    std::array<double, 2> point{0.0, 0.0};  // the maximizing slowness covector
  };

  // f*(v) and its maximizer; Q(v) = support(v).point is the qP slowness
  // covector whose group direction is v.
  Support support(double vx, double vy) const;
  double operator()(double vx, double vy) const { return support(vx, vy).value; }

  const std::vector<std::array<double, 2>>& samples() const { return samples_; }
  int grid() const { return grid_; }

 private:
  double radius(double theta) const;  // qP slowness radius at angle theta

  int grid_;
  std::vector<double> a_;  // dense a_{ijkl}, n = 2
  std::vector<std::array<double, 2>> samples_;
};

// Exact slowness-polynomial recovery from one branch patch: least squares
// over the canonical monomials (long double QR), then rational
// reconstruction of each coefficient through the denominator cascade
// {1, 10, 100, 1000, 10^6}, accepting the first exact polynomial whose
// scaled residual at every sample is <= 1e-6. Supported for the planar
// classes (canon2d basis). Rank-deficient sample matrices raise
// InsufficientDataError; failed rationalization raises PrecisionError.
SlownessPoly fit_patch(const std::vector<BranchSample>& samples, SymmetryClass cls);

// CSV rows "direction,branch,p_x,p_y,v_x,v_y" (direction = atan2) for n = 2.
std::string samples_csv(const std::vector<GroupVelocity>& rows);

// Minimal 800x800 SVG: one closed path per branch loop, fixed palette,
// centered axes, auto-scaled to the largest radius.
std::string curves_svg(const std::vector<std::vector<std::array<double, 2>>>& branch_loops);

}  // namespace chr
