#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "chr/elastic.hpp"
#include "chr/geometry.hpp"

namespace chr {

struct Circle {
  std::array<double, 2> center{0.0, 0.0};
  double radius = 0.0;
};

// Planar two-layer medium: tensor A outside the inner circle (within the
// outer one), tensor a inside. Both circles are known to the simulator but
// only the outer one to the recovery side.
struct TwoLayerModel {
  Circle outer;
  Circle inner;
  StiffnessTensor A;
  StiffnessTensor a;
};

// DomainError unless the model is admissible: the closed inner disk lies
// strictly inside the outer circle; both tensors are planar, positive
// definite, with a qP eigenvalue gap above 1e-8 over a grid-point direction
// probe; and the inner qP slowness radius is at least the outer one in every
// probed direction (1e-9 relative slack, so a == A is admitted while any
// direction where the inner medium is genuinely faster is rejected).
void check_model(const TwoLayerModel& m, int grid = 720);

// One straight qP leg of a broken ray. momentum is the slowness covector of
// the carrying medium at the leg direction, oriented along propagation.
struct RayLeg {
  std::array<double, 2> from{0.0, 0.0};
  std::array<double, 2> to{0.0, 0.0};
  std::array<double, 2> momentum{0.0, 0.0};
};

struct RayPath {
  std::vector<RayLeg> legs;
  double time = 0.0;
};

// One boundary observation. The endpoint covectors are present exactly when
// the ray refracted through the inner disk: p leaves x, q arrives at y, both
// along propagation. Direct (miss) observations carry the time alone.
struct TravelDatum {
  double t = 0.0;
  std::array<double, 2> x{0.0, 0.0};
  std::array<double, 2> y{0.0, 0.0};
  std::optional<std::array<double, 2>> p;
  std::optional<std::array<double, 2>> q;
};

// paths[i] realizes data[i]; direct paths have one leg, refracted ones three.
struct Dataset {
  std::vector<TravelDatum> data;
  std::vector<RayPath> paths;
};

// Time of the explicit broken path x -> u -> w -> y, the outer legs priced
// by A's qP travel-time norm and the middle leg by a's. Pure evaluation at
// the given interface points: no admissibility gate, no optimization.
double three_leg_time(const StiffnessTensor& A, const StiffnessTensor& a,
                      const std::array<double, 2>& x, const std::array<double, 2>& u,
                      const std::array<double, 2>& w, const std::array<double, 2>& y);

// Synthesize boundary data for an admissible model. boundary_points uniform
// emitters/receivers sit on the outer circle; each unordered pair is solved
// once and emitted in both orders (the reversed path carries negated
// momenta). Chords missing the closed inner disk give direct data with time
// f*_A(y - x); chords within 1e-9 R of tangency are skipped; crossing chords
// give the transversal qP->qP->qP refraction, found by a Newton solve of the
// two-point Snell stationarity system seeded from the straight chord (with a
// direction_grid x direction_grid fallback lattice), and are emitted only
// when the interface-tangential slowness mismatch at both vertices is below
// 1e-8 and no leg is tangent to a circle it touches.
Dataset simulate(const TwoLayerModel& m, int boundary_points = 360, int direction_grid = 48);

// qP speed along the oriented chord direction d, measured from the data:
// chords parallel to d within angle_tol are sorted by length and the longest
// prefix with speeds consistent to 1e-6 relative (the family missing the
// inner disk) is averaged. InsufficientDataError when no chord matches or no
// two chords agree.
double v_of_d(const Dataset& ds, const std::array<double, 2>& d, double angle_tol = 1e-9);

// Recover the outer tensor from direct travel times alone: per-direction
// speeds via v_of_d, the slowness curve by dualizing the sampled velocity
// curve, then exact patch fitting and inversion of the forward map.
StiffnessTensor recover_outer(const Dataset& ds);

// Occupancy estimate of the inner disk over the outer bounding square.
// mask is row-major grid x grid, 1 on cells inside the outer circle that no
// fast chord passes near (within 1.5 cells); fitted is the circle refined
// from per-family tangency offsets, support_rms its residual against the
// refined support lines. empty flags datasets with no slow chord at all
// (a == A): the mask is all zero and fitted degenerates to radius 0.
struct InterfaceEstimate {
  int grid = 0;
  std::array<double, 2> origin{0.0, 0.0};  // lower-left corner of the raster
  double cell = 0.0;
  std::vector<std::uint8_t> mask;
  Circle fitted;
  double support_rms = 0.0;
  bool empty = true;
};

InterfaceEstimate recover_interface(const Dataset& ds, const StiffnessTensor& A, int grid = 512);

// Recover the inner tensor from the refracted (momentum-tagged) data: outer
// legs are rebuilt from the endpoint covectors via their group directions,
// intersected with the fitted interface circle, and the middle-leg time
// t - f*_A(leg in) - f*_A(leg out) turns each datum into a sample of a's
// velocity curve; dualizing and fitting as in recover_outer pins a. When the
// interface estimate is empty the outer tensor is returned unchanged.
StiffnessTensor recover_inner(const Dataset& ds, const StiffnessTensor& A,
                              const InterfaceEstimate& iface);

}  // namespace chr
