#include "chr/twolayer.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

#include "chr/errors.hpp"
#include "chr/reconstruct.hpp"

namespace chr {

namespace {

constexpr double kPi = 3.14159265358979323846;

using Vec2 = std::array<double, 2>;

Vec2 sub(const Vec2& a, const Vec2& b) { return {a[0] - b[0], a[1] - b[1]}; }
Vec2 add(const Vec2& a, const Vec2& b) { return {a[0] + b[0], a[1] + b[1]}; }
Vec2 mul(double s, const Vec2& a) { return {s * a[0], s * a[1]}; }
Vec2 neg(const Vec2& a) { return {-a[0], -a[1]}; }
double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }
double len(const Vec2& a) { return std::hypot(a[0], a[1]); }

// signed angular difference folded to [-pi, pi]
double wrap_angle(double x) { return std::remainder(x, 2.0 * kPi); }

double qp_slowness_radius(const StiffnessTensor& t, double theta) {
  auto eg = eigen_branches(t, {std::cos(theta), std::sin(theta)});
  return 1.0 / std::sqrt(eg.values.back());
}

// distance from c to the segment [x, y]
double dist_segment(const Vec2& c, const Vec2& x, const Vec2& y) {
  Vec2 d = sub(y, x);
  double l2 = dot(d, d);
  double s = l2 > 0.0 ? dot(sub(c, x), d) / l2 : 0.0;
  s = std::min(1.0, std::max(0.0, s));
  return len(sub(c, add(x, mul(s, d))));
}

// first intersection of the ray o + s d (d unit, s > 0) with a circle
bool ray_circle_first(const Vec2& o, const Vec2& d, const Circle& c, double& s) {
  Vec2 oc = sub(o, c.center);
  double b = dot(d, oc);
  double cc = dot(oc, oc) - c.radius * c.radius;
  double disc = b * b - cc;
  if (disc <= 0.0) return false;
  double rt = std::sqrt(disc);
  double s1 = -b - rt;
  double s2 = -b + rt;
  if (s1 > 1e-12) { s = s1; return true; }
  if (s2 > 1e-12) { s = s2; return true; }
  return false;
}

// ---------------------------------------------------------------- refraction

// Stationarity residual of the three-leg time over two interface angles:
// G1 = <tangent at u, Q_A(u - x) - Q_a(w - u)>, G2 the same at w. By the
// envelope theorem grad f*(z) is the maximizing covector, so G is the exact
// gradient of the three-leg time (up to the factor r), and G = 0 is Snell at
// both vertices. Newton on G finds refracted rays that are saddles of the
// time functional, which coordinate descent cannot reach.
struct SnellContext {
  const DualNormTable& fA;
  const DualNormTable& fa;
  Vec2 x, y;
  Vec2 c;
  double r;
};

struct GEval {
  bool ok = false;
  double g1 = 0.0, g2 = 0.0;
  Vec2 u{0.0, 0.0}, w{0.0, 0.0};
  Vec2 q1{0.0, 0.0}, qm{0.0, 0.0}, q2{0.0, 0.0};
  double scale = 1.0;
};

GEval snell_residual(const SnellContext& sc, double al, double be) {
  GEval e;
  e.u = add(sc.c, mul(sc.r, Vec2{std::cos(al), std::sin(al)}));
  e.w = add(sc.c, mul(sc.r, Vec2{std::cos(be), std::sin(be)}));
  Vec2 d1 = sub(e.u, sc.x);
  Vec2 dm = sub(e.w, e.u);
  Vec2 d2 = sub(sc.y, e.w);
  double guard = 1e-9 * sc.r;
  if (len(d1) < guard || len(dm) < guard || len(d2) < guard) return e;
  e.q1 = sc.fA.support(d1[0], d1[1]).point;
  e.qm = sc.fa.support(dm[0], dm[1]).point;
  e.q2 = sc.fA.support(d2[0], d2[1]).point;
  Vec2 tu{-std::sin(al), std::cos(al)};
  Vec2 tw{-std::sin(be), std::cos(be)};
  e.g1 = dot(tu, sub(e.q1, e.qm));
  e.g2 = dot(tw, sub(e.qm, e.q2));
  e.scale = std::max({len(e.q1), len(e.qm), len(e.q2)});
  e.ok = true;
  return e;
}

bool snell_newton(const SnellContext& sc, double& al, double& be, GEval& out) {
  const double fd = 1e-7;
  GEval g = snell_residual(sc, al, be);
  if (!g.ok) return false;
  const double tol = 1e-12 * (1.0 + g.scale);
  for (int iter = 0; iter < 25; ++iter) {
    double gn = std::max(std::abs(g.g1), std::abs(g.g2));
    if (gn <= tol) { out = g; return true; }
    GEval ap = snell_residual(sc, al + fd, be);
    GEval am = snell_residual(sc, al - fd, be);
    GEval bp = snell_residual(sc, al, be + fd);
    GEval bm = snell_residual(sc, al, be - fd);
    if (!ap.ok || !am.ok || !bp.ok || !bm.ok) return false;
    double j11 = (ap.g1 - am.g1) / (2.0 * fd);
    double j21 = (ap.g2 - am.g2) / (2.0 * fd);
    double j12 = (bp.g1 - bm.g1) / (2.0 * fd);
    double j22 = (bp.g2 - bm.g2) / (2.0 * fd);
    double det = j11 * j22 - j12 * j21;
    if (std::abs(det) < 1e-30) return false;
    double sa = (j22 * g.g1 - j12 * g.g2) / det;
    double sb = (j11 * g.g2 - j21 * g.g1) / det;
    bool stepped = false;
    for (double lam = 1.0; lam >= 1.0 / 1048576.0; lam *= 0.5) {
      GEval trial = snell_residual(sc, al - lam * sa, be - lam * sb);
      if (!trial.ok) continue;
      double tn = std::max(std::abs(trial.g1), std::abs(trial.g2));
      if (tn <= tol || tn <= gn * (1.0 - 1e-4 * lam)) {
        al -= lam * sa;
        be -= lam * sb;
        g = trial;
        stepped = true;
        break;
      }
    }
    if (!stepped) return false;
  }
  double gn = std::max(std::abs(g.g1), std::abs(g.g2));
  if (gn <= 1e-10 * (1.0 + g.scale)) { out = g; return true; }
  return false;
}

// entry/exit angles of the straight chord, the Newton seed
bool chord_circle_init(const Vec2& x, const Vec2& y, const Vec2& c, double r,
                       double& al, double& be) {
  Vec2 d = sub(y, x);
  double l = len(d);
  if (l == 0.0) return false;
  Vec2 dh = mul(1.0 / l, d);
  Vec2 oc = sub(x, c);
  double b = dot(dh, oc);
  double cc = dot(oc, oc) - r * r;
  double disc = b * b - cc;
  if (disc <= 0.0) return false;
  double rt = std::sqrt(disc);
  Vec2 u = add(x, mul(-b - rt, dh));
  Vec2 w = add(x, mul(-b + rt, dh));
  al = std::atan2(u[1] - c[1], u[0] - c[0]);
  be = std::atan2(w[1] - c[1], w[0] - c[0]);
  return true;
}

bool transversal(const Vec2& leg, const Vec2& n) {
  double l = len(leg);
  return l > 0.0 && std::abs(dot(leg, n)) / l >= 1e-6;
}

// ------------------------------------------------------- sampled-curve dual

// polar samples of a curve, angles ascending in (-pi, pi]
struct CurveSamples {
  std::vector<double> th;
  std::vector<double> rad;
};

CurveSamples build_curve(std::vector<std::pair<double, double>> raw) {
  std::sort(raw.begin(), raw.end());
  CurveSamples cs;
  std::size_t i = 0;
  while (i < raw.size()) {
    double th = raw[i].first, v = raw[i].second;
    std::size_t k = 1;
    while (i + k < raw.size() && raw[i + k].first - raw[i].first <= 1e-6) {
      th += raw[i + k].first;
      v += raw[i + k].second;
      ++k;
    }
    cs.th.push_back(th / static_cast<double>(k));
    cs.rad.push_back(v / static_cast<double>(k));
    i += k;
  }
  return cs;
}

// support of the sampled curve at direction e: grid argmax, then golden
// section on a local quartic (Neville through the 5 nearest samples)
double curve_support(const CurveSamples& cs, const Vec2& e) {
  const std::size_t n = cs.th.size();
  std::size_t best = 0;
  double bestv = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    double v = cs.rad[k] * (e[0] * std::cos(cs.th[k]) + e[1] * std::sin(cs.th[k]));
    if (v > bestv) { bestv = v; best = k; }
  }
  double xs[5], ys[5];
  for (int t = -2; t <= 2; ++t) {
    std::size_t idx = (best + n + static_cast<std::size_t>(t + 2) - 2) % n;
    double rel = cs.th[idx] - cs.th[best];
    if (rel > kPi) rel -= 2.0 * kPi;
    if (rel < -kPi) rel += 2.0 * kPi;
    xs[t + 2] = rel;
    ys[t + 2] = cs.rad[idx];
  }
  if (xs[4] - xs[0] > 1.0) {
    std::ostringstream os;
    os << "curve samples too sparse near angle " << cs.th[best]
       << " (5-point window spans " << xs[4] - xs[0] << " rad)";
    throw InsufficientDataError(os.str());
  }
  auto val = [&](double x) {
    double p[5] = {ys[0], ys[1], ys[2], ys[3], ys[4]};
    for (int j = 1; j < 5; ++j)
      for (int i = 0; i + j < 5; ++i)
        p[i] = ((x - xs[i + j]) * p[i] + (xs[i] - x) * p[i + 1]) / (xs[i] - xs[i + j]);
    double th = cs.th[best] + x;
    return p[0] * (e[0] * std::cos(th) + e[1] * std::sin(th));
  };
  const double gr = 0.6180339887498949;
  double a = xs[1], b = xs[3];
  double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
  double f1 = val(c1), f2 = val(c2);
  for (int it = 0; it < 70; ++it) {
    if (f1 < f2) {
      a = c1; c1 = c2; f1 = f2; c2 = a + gr * (b - a); f2 = val(c2);
    } else {
      b = c2; c2 = c1; f2 = f1; c1 = b - gr * (b - a); f1 = val(c1);
    }
  }
  return std::max({bestv, f1, f2});
}

// slowness points from a sampled velocity curve: the slowness radius along e
// is 1 / sup_{v in V} <e, v> (bipolar duality of the travel-time norm)
std::vector<BranchSample> dual_slowness_points(const CurveSamples& vel, int count) {
  std::vector<BranchSample> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int m = 0; m < count; ++m) {
    double phi = 2.0 * kPi * m / count;
    Vec2 e{std::cos(phi), std::sin(phi)};
    double h = curve_support(vel, e);
    if (!(h > 0.0)) throw PrecisionError("sampled velocity curve has a non-positive support value");
    double rho = 1.0 / h;
    BranchSample s;
    s.direction = {e[0], e[1]};
    s.branch = 2;
    s.p = {rho * e[0], rho * e[1]};
    s.eigenvalue = h * h;
    out.push_back(std::move(s));
  }
  return out;
}

StiffnessTensor reconstruct_unique(const SlownessPoly& sp, const char* who) {
  auto rec = reconstruct_2d(sp.coeffs);
  if (rec.solutions.size() != 1) {
    std::ostringstream os;
    os << who << " did not pin a unique tensor (fiber is " << rec.multiplicity << ")";
    throw PrecisionError(os.str());
  }
  return rec.solutions.front();
}

// ----------------------------------------------------------- dataset shared

Vec2 group_direction(const StiffnessTensor& t, const Vec2& p) {
  auto g = eigenvalue_gradient(t, 2, {p[0], p[1]});
  double l = std::hypot(g[0], g[1]);
  return {g[0] / l, g[1] / l};
}

std::vector<Vec2> distinct_endpoints(const Dataset& ds) {
  std::set<std::pair<double, double>> seen;
  std::vector<Vec2> out;
  for (const auto& d : ds.data) {
    for (const Vec2* z : {&d.x, &d.y}) {
      if (seen.insert({(*z)[0], (*z)[1]}).second) out.push_back(*z);
    }
  }
  return out;
}

// algebraic least-squares circle through noisy boundary points
bool fit_circle(const std::vector<Vec2>& pts, Circle& out) {
  if (pts.size() < 3) return false;
  double m[3][4] = {{0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}};
  for (const auto& z : pts) {
    double row[3] = {z[0], z[1], 1.0};
    double rhs = -(z[0] * z[0] + z[1] * z[1]);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) m[i][j] += row[i] * row[j];
      m[i][3] += row[i] * rhs;
    }
  }
  for (int k = 0; k < 3; ++k) {
    int piv = k;
    for (int i = k + 1; i < 3; ++i)
      if (std::abs(m[i][k]) > std::abs(m[piv][k])) piv = i;
    if (std::abs(m[piv][k]) < 1e-12) return false;
    std::swap(m[k], m[piv]);
    for (int i = k + 1; i < 3; ++i) {
      double f = m[i][k] / m[k][k];
      for (int j = k; j < 4; ++j) m[i][j] -= f * m[k][j];
    }
  }
  double sol[3];
  for (int i = 2; i >= 0; --i) {
    double s = m[i][3];
    for (int j = i + 1; j < 3; ++j) s -= m[i][j] * sol[j];
    sol[i] = s / m[i][i];
  }
  out.center = {-sol[0] / 2.0, -sol[1] / 2.0};
  double r2 = dot(out.center, out.center) - sol[2];
  if (!(r2 > 0.0)) return false;
  out.radius = std::sqrt(r2);
  return true;
}

struct ChordRow {
  Vec2 x, y;
  double t = 0.0;
  double excess = 0.0;
  bool fast = false;
};

// one row per unordered chord, classified against the outer norm
std::vector<ChordRow> classified_chords(const Dataset& ds, const DualNormTable& fA) {
  std::map<std::array<double, 4>, ChordRow> uniq;
  for (const auto& d : ds.data) {
    Vec2 a = d.x, b = d.y;
    if (std::make_pair(b[0], b[1]) < std::make_pair(a[0], a[1])) std::swap(a, b);
    std::array<double, 4> key{a[0], a[1], b[0], b[1]};
    auto it = uniq.find(key);
    if (it != uniq.end()) {
      it->second.t = std::min(it->second.t, d.t);
      continue;
    }
    ChordRow row;
    row.x = a;
    row.y = b;
    row.t = d.t;
    uniq.emplace(key, row);
  }
  std::vector<ChordRow> out;
  out.reserve(uniq.size());
  for (auto& kv : uniq) {
    ChordRow& row = kv.second;
    Vec2 ch = sub(row.y, row.x);
    double f = fA(ch[0], ch[1]);
    row.excess = row.t - f;
    row.fast = row.t <= f * (1.0 + 1e-9);
    out.push_back(row);
  }
  return out;
}

}  // namespace

// ----------------------------------------------------------------- checking

void check_model(const TwoLayerModel& m, int grid) {
  if (m.A.dim() != 2 || m.a.dim() != 2)
    throw UnsupportedError("two-layer models are planar: both tensors need dim 2");
  if (grid < 8) throw DomainError("check_model needs a direction grid of at least 8");
  if (!(m.outer.radius > 0.0) || !(m.inner.radius > 0.0))
    throw DomainError("two-layer model needs positive circle radii");
  double sep = len(sub(m.inner.center, m.outer.center)) + m.inner.radius;
  if (!(sep < m.outer.radius))
    throw DomainError("inner disk is not strictly inside the outer circle");
  if (!(qp_gap_probe(m.A, grid) > 1e-8))
    throw DomainError("outer tensor fails the qP gap probe (degenerate branch)");
  if (!(qp_gap_probe(m.a, grid) > 1e-8))
    throw DomainError("inner tensor fails the qP gap probe (degenerate branch)");
  for (int k = 0; k < grid; ++k) {
    double th = 2.0 * kPi * k / grid;
    double rho_out = qp_slowness_radius(m.A, th);
    double rho_in = qp_slowness_radius(m.a, th);
    if (rho_in < rho_out * (1.0 - 1e-9)) {
      std::ostringstream os;
      os << "inner medium is faster than the outer one along angle " << th;
      throw DomainError(os.str());
    }
  }
}

double three_leg_time(const StiffnessTensor& A, const StiffnessTensor& a,
                      const std::array<double, 2>& x, const std::array<double, 2>& u,
                      const std::array<double, 2>& w, const std::array<double, 2>& y) {
  DualNormTable fA(A);
  DualNormTable fa(a);
  auto leg = [](const DualNormTable& f, const Vec2& d) {
    return len(d) == 0.0 ? 0.0 : f(d[0], d[1]);
  };
  return leg(fA, sub(u, x)) + leg(fa, sub(w, u)) + leg(fA, sub(y, w));
}

// --------------------------------------------------------------- simulation

Dataset simulate(const TwoLayerModel& m, int boundary_points, int direction_grid) {
  check_model(m);
  if (boundary_points < 4) throw DomainError("simulate needs at least 4 boundary points");
  if (direction_grid < 4) throw DomainError("simulate needs a direction grid of at least 4");
  DualNormTable fA(m.A);
  DualNormTable fa(m.a);
  const double R = m.outer.radius;
  const Vec2 ic = m.inner.center;
  const double ir = m.inner.radius;

  std::vector<Vec2> bp(static_cast<std::size_t>(boundary_points));
  for (int i = 0; i < boundary_points; ++i) {
    double th = 2.0 * kPi * i / boundary_points;
    bp[static_cast<std::size_t>(i)] =
        add(m.outer.center, mul(R, Vec2{std::cos(th), std::sin(th)}));
  }

  Dataset ds;
  auto emit = [&ds](const TravelDatum& d, RayPath path) {
    ds.data.push_back(d);
    ds.paths.push_back(std::move(path));
  };

  for (int i = 0; i < boundary_points; ++i) {
    for (int j = i + 1; j < boundary_points; ++j) {
      const Vec2& x = bp[static_cast<std::size_t>(i)];
      const Vec2& y = bp[static_cast<std::size_t>(j)];
      double d = dist_segment(ic, x, y);
      if (std::abs(d - ir) <= 1e-9 * R) continue;  // grazing chord, skipped
      if (d > ir) {
        Vec2 ch = sub(y, x);
        auto sp = fA.support(ch[0], ch[1]);
        double t = sp.value;
        emit({t, x, y, std::nullopt, std::nullopt}, {{{x, y, sp.point}}, t});
        emit({t, y, x, std::nullopt, std::nullopt}, {{{y, x, neg(sp.point)}}, t});
        continue;
      }

      SnellContext sc{fA, fa, x, y, ic, ir};
      double al0, be0;
      if (!chord_circle_init(x, y, ic, ir, al0, be0)) continue;
      const double offs[9][2] = {{0, 0},           {0.15, 0},   {-0.15, 0},
                                 {0, 0.15},        {0, -0.15},  {0.15, 0.15},
                                 {-0.15, -0.15},   {0.15, -0.15}, {-0.15, 0.15}};
      GEval sol;
      bool solved = false;
      for (const auto& off : offs) {
        double al = al0 + off[0], be = be0 + off[1];
        if (snell_newton(sc, al, be, sol)) { solved = true; break; }
      }
      if (!solved) {
        double bestg = std::numeric_limits<double>::infinity();
        double ba = 0.0, bb = 0.0;
        for (int ia = 0; ia < direction_grid; ++ia) {
          for (int ib = 0; ib < direction_grid; ++ib) {
            double al = 2.0 * kPi * ia / direction_grid;
            double be = 2.0 * kPi * ib / direction_grid;
            GEval g = snell_residual(sc, al, be);
            if (!g.ok) continue;
            double gn = std::max(std::abs(g.g1), std::abs(g.g2));
            if (gn < bestg) { bestg = gn; ba = al; bb = be; }
          }
        }
        if (std::isfinite(bestg)) solved = snell_newton(sc, ba, bb, sol);
      }
      if (!solved) continue;

      Vec2 u = sol.u, w = sol.w;
      Vec2 d1 = sub(u, x), dm = sub(w, u), d2 = sub(y, w);
      if (len(dm) < 1e-7 * ir) continue;  // pinched: no genuine middle leg
      double resid = std::max(std::abs(sol.g1), std::abs(sol.g2));
      if (resid > 1e-8 * (1.0 + sol.scale)) continue;
      Vec2 nu = mul(1.0 / ir, sub(u, ic));
      Vec2 nw = mul(1.0 / ir, sub(w, ic));
      if (!transversal(d1, nu) || !transversal(dm, nu) || !transversal(dm, nw) ||
          !transversal(d2, nw))
        continue;
      double t = fA(d1[0], d1[1]) + fa(dm[0], dm[1]) + fA(d2[0], d2[1]);
      emit({t, x, y, sol.q1, sol.q2},
           {{{x, u, sol.q1}, {u, w, sol.qm}, {w, y, sol.q2}}, t});
      emit({t, y, x, neg(sol.q2), neg(sol.q1)},
           {{{y, w, neg(sol.q2)}, {w, u, neg(sol.qm)}, {u, x, neg(sol.q1)}}, t});
    }
  }
  return ds;
}

// ----------------------------------------------------------------- recovery

double v_of_d(const Dataset& ds, const std::array<double, 2>& d, double angle_tol) {
  if (len(d) == 0.0) throw DomainError("v_of_d needs a nonzero direction");
  if (!(angle_tol > 0.0)) throw DomainError("v_of_d needs a positive angular tolerance");
  double target = std::atan2(d[1], d[0]);
  std::vector<std::pair<double, double>> rows;  // (length, speed)
  for (const auto& td : ds.data) {
    Vec2 ch = sub(td.y, td.x);
    double l = len(ch);
    if (l == 0.0 || !(td.t > 0.0)) continue;
    if (std::abs(wrap_angle(std::atan2(ch[1], ch[0]) - target)) > angle_tol) continue;
    rows.emplace_back(l, l / td.t);
  }
  if (rows.empty())
    throw InsufficientDataError("no chord in the dataset runs along the requested direction");
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second > b.second;
  });
  // the short chords miss the inner disk and share one speed; the first
  // inconsistent entry marks the crossing band
  std::size_t k = 1;
  while (k < rows.size() &&
         std::abs(rows[k].second - rows[0].second) <= 1e-6 * rows[0].second)
    ++k;
  if (k < 2)
    throw InsufficientDataError("near-tangent chords along the requested direction disagree");
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += rows[i].second;
  return sum / static_cast<double>(k);
}

StiffnessTensor recover_outer(const Dataset& ds) {
  if (ds.data.empty()) throw InsufficientDataError("recover_outer needs a nonempty dataset");
  std::vector<double> angs;
  angs.reserve(ds.data.size());
  for (const auto& td : ds.data) {
    Vec2 ch = sub(td.y, td.x);
    if (len(ch) > 0.0) angs.push_back(std::atan2(ch[1], ch[0]));
  }
  std::sort(angs.begin(), angs.end());
  std::vector<std::pair<double, double>> vsamp;  // (angle, speed)
  std::size_t i = 0;
  while (i < angs.size()) {
    std::size_t j = i + 1;
    while (j < angs.size() && angs[j] - angs[j - 1] <= 1e-9) ++j;
    double th = angs[i + (j - i) / 2];
    try {
      double v = v_of_d(ds, {std::cos(th), std::sin(th)});
      vsamp.emplace_back(th, v);
    } catch (const InsufficientDataError&) {
      // direction class without a verified near-tangent family; skip
    }
    i = j;
  }
  if (vsamp.size() < 16) {
    std::ostringstream os;
    os << "only " << vsamp.size()
       << " chord directions carry a consistent near-tangent speed (need 16)";
    throw InsufficientDataError(os.str());
  }
  CurveSamples vel = build_curve(std::move(vsamp));
  auto pts = dual_slowness_points(vel, 720);
  SlownessPoly sp = fit_patch(pts, SymmetryClass::Full2d);
  return reconstruct_unique(sp, "outer recovery");
}

InterfaceEstimate recover_interface(const Dataset& ds, const StiffnessTensor& A, int grid) {
  if (grid < 16) throw DomainError("recover_interface needs a raster of at least 16 cells");
  InterfaceEstimate est;
  est.grid = grid;
  est.mask.assign(static_cast<std::size_t>(grid) * static_cast<std::size_t>(grid), 0);
  if (ds.data.empty()) return est;

  Circle outer;
  if (!fit_circle(distinct_endpoints(ds), outer)) return est;
  est.origin = {outer.center[0] - outer.radius, outer.center[1] - outer.radius};
  est.cell = 2.0 * outer.radius / grid;

  DualNormTable fA(A);
  auto chords = classified_chords(ds, fA);
  bool any_slow = false;
  for (const auto& c : chords) any_slow = any_slow || !c.fast;
  if (!any_slow) {
    est.fitted = {outer.center, 0.0};
    est.empty = true;
    return est;
  }
  est.empty = false;

  // raster: interior cells not witnessed by a fast chord
  for (int row = 0; row < grid; ++row) {
    for (int col = 0; col < grid; ++col) {
      Vec2 cc{est.origin[0] + (col + 0.5) * est.cell, est.origin[1] + (row + 0.5) * est.cell};
      if (len(sub(cc, outer.center)) < outer.radius)
        est.mask[static_cast<std::size_t>(row) * grid + static_cast<std::size_t>(col)] = 1;
    }
  }
  const double reach = 1.5 * est.cell;
  for (const auto& c : chords) {
    if (!c.fast) continue;
    double x0 = std::min(c.x[0], c.y[0]) - reach, x1 = std::max(c.x[0], c.y[0]) + reach;
    double y0 = std::min(c.x[1], c.y[1]) - reach, y1 = std::max(c.x[1], c.y[1]) + reach;
    int c0 = std::max(0, static_cast<int>(std::floor((x0 - est.origin[0]) / est.cell)));
    int c1 = std::min(grid - 1, static_cast<int>(std::ceil((x1 - est.origin[0]) / est.cell)));
    int r0 = std::max(0, static_cast<int>(std::floor((y0 - est.origin[1]) / est.cell)));
    int r1 = std::min(grid - 1, static_cast<int>(std::ceil((y1 - est.origin[1]) / est.cell)));
    for (int row = r0; row <= r1; ++row) {
      for (int col = c0; col <= c1; ++col) {
        std::size_t idx = static_cast<std::size_t>(row) * grid + static_cast<std::size_t>(col);
        if (!est.mask[idx]) continue;
        Vec2 cc{est.origin[0] + (col + 0.5) * est.cell, est.origin[1] + (row + 0.5) * est.cell};
        if (dist_segment(cc, c.x, c.y) <= reach) est.mask[idx] = 0;
      }
    }
  }

  // refine: per parallel family, solve the tangency offset from the two
  // shallowest crossing chords on each side (excess ~ c sqrt(h* - h) near a
  // tangency), then fit (center, radius) to the support lines
  struct Fam {
    double theta = 0.0;
    std::vector<std::pair<double, double>> slow;  // (offset, excess)
  };
  std::map<long long, Fam> fams;
  const double fam_quant = 1e-9;
  for (const auto& c : chords) {
    Vec2 ch = sub(c.y, c.x);
    double th = std::atan2(ch[1], ch[0]);
    if (th < 0.0) th += kPi;           // fold orientation
    if (th >= kPi - fam_quant) th = 0.0;  // seam
    long long key = static_cast<long long>(std::floor(th / fam_quant + 0.5));
    Fam& f = fams[key];
    f.theta = th;
    if (!c.fast) {
      Vec2 n{-std::sin(th), std::cos(th)};
      Vec2 mid = mul(0.5, add(c.x, c.y));
      f.slow.emplace_back(dot(sub(mid, outer.center), n), c.excess);
    }
  }
  std::vector<std::array<double, 4>> lsq;  // rows (nx, ny, 1 | rhs)
  auto side_offset = [](double h_sh, double e_sh, double h_dp, double e_dp, double& hstar) {
    if (!(e_sh > 0.0) || !(e_dp > e_sh * (1.0 + 1e-9))) return false;
    double rho = (e_sh / e_dp) * (e_sh / e_dp);
    hstar = (h_sh - rho * h_dp) / (1.0 - rho);
    return std::abs(hstar - h_sh) <= 4.0 * std::abs(h_sh - h_dp) + 1e-12;
  };
  for (auto& kv : fams) {
    Fam& f = kv.second;
    if (f.slow.size() < 4) continue;
    std::sort(f.slow.begin(), f.slow.end());
    Vec2 n{-std::sin(f.theta), std::cos(f.theta)};
    double hstar;
    std::size_t last = f.slow.size() - 1;
    if (side_offset(f.slow[last].first, f.slow[last].second, f.slow[last - 1].first,
                    f.slow[last - 1].second, hstar))
      lsq.push_back({n[0], n[1], 1.0, hstar});
    if (side_offset(f.slow[0].first, f.slow[0].second, f.slow[1].first, f.slow[1].second,
                    hstar))
      lsq.push_back({-n[0], -n[1], 1.0, -hstar});
  }

  auto solve_lsq = [](const std::vector<std::array<double, 4>>& rows, double sol[3]) {
    double m[3][4] = {{0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}};
    for (const auto& r : rows)
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) m[i][j] += r[static_cast<std::size_t>(i)] * r[static_cast<std::size_t>(j)];
        m[i][3] += r[static_cast<std::size_t>(i)] * r[3];
      }
    for (int k = 0; k < 3; ++k) {
      int piv = k;
      for (int i = k + 1; i < 3; ++i)
        if (std::abs(m[i][k]) > std::abs(m[piv][k])) piv = i;
      if (std::abs(m[piv][k]) < 1e-12) return false;
      std::swap(m[k], m[piv]);
      for (int i = k + 1; i < 3; ++i) {
        double fct = m[i][k] / m[k][k];
        for (int j = k; j < 4; ++j) m[i][j] -= fct * m[k][j];
      }
    }
    for (int i = 2; i >= 0; --i) {
      double s = m[i][3];
      for (int j = i + 1; j < 3; ++j) s -= m[i][j] * sol[j];
      sol[i] = s / m[i][i];
    }
    return true;
  };

  double sol[3] = {0.0, 0.0, 0.0};
  bool fitted = lsq.size() >= 6 && solve_lsq(lsq, sol) && sol[2] > 0.0;
  if (fitted) {
    // one robustness pass: drop support lines far off the first fit
    double ss = 0.0;
    for (const auto& r : lsq) {
      double res = r[0] * sol[0] + r[1] * sol[1] + r[2] * sol[2] - r[3];
      ss += res * res;
    }
    double rms = std::sqrt(ss / static_cast<double>(lsq.size()));
    std::vector<std::array<double, 4>> kept;
    for (const auto& r : lsq) {
      double res = r[0] * sol[0] + r[1] * sol[1] + r[2] * sol[2] - r[3];
      if (std::abs(res) <= std::max(5.0 * rms, 1e-13)) kept.push_back(r);
    }
    if (kept.size() >= 6 && solve_lsq(kept, sol) && sol[2] > 0.0) {
      ss = 0.0;
      for (const auto& r : kept) {
        double res = r[0] * sol[0] + r[1] * sol[1] + r[2] * sol[2] - r[3];
        ss += res * res;
      }
      est.support_rms = std::sqrt(ss / static_cast<double>(kept.size()));
    } else {
      fitted = false;
    }
  }
  if (fitted) {
    est.fitted = {{outer.center[0] + sol[0], outer.center[1] + sol[1]}, sol[2]};
  } else {
    // fall back to the raster: centroid and area radius of the mask
    double sx = 0.0, sy = 0.0;
    std::size_t cnt = 0;
    for (int row = 0; row < grid; ++row)
      for (int col = 0; col < grid; ++col)
        if (est.mask[static_cast<std::size_t>(row) * grid + static_cast<std::size_t>(col)]) {
          sx += est.origin[0] + (col + 0.5) * est.cell;
          sy += est.origin[1] + (row + 0.5) * est.cell;
          ++cnt;
        }
    if (cnt == 0) {
      est.fitted = {outer.center, 0.0};
      est.empty = true;
    } else {
      double area = static_cast<double>(cnt) * est.cell * est.cell;
      est.fitted = {{sx / static_cast<double>(cnt), sy / static_cast<double>(cnt)},
                    std::sqrt(area / kPi)};
      est.support_rms = est.cell;
    }
  }
  return est;
}

StiffnessTensor recover_inner(const Dataset& ds, const StiffnessTensor& A,
                              const InterfaceEstimate& iface) {
  if (iface.empty) return A;
  if (!(iface.fitted.radius > 0.0))
    throw DomainError("recover_inner needs a non-degenerate fitted interface circle");
  Circle outer;
  if (!fit_circle(distinct_endpoints(ds), outer))
    throw InsufficientDataError("too few distinct boundary points to place the outer circle");
  DualNormTable fA(A);
  double s_min = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 720; ++k) {
    double th = 2.0 * kPi * k / 720;
    s_min = std::min(s_min, fA(std::cos(th), std::sin(th)));
  }
  double gap =
      outer.radius - len(sub(iface.fitted.center, outer.center)) - iface.fitted.radius;
  if (!(gap > 0.0))
    throw PrecisionError("fitted interface circle is not strictly inside the outer circle");
  const double tau = gap * s_min;  // separation bound on middle-leg times

  std::vector<std::pair<double, double>> samp;  // (angle, speed)
  for (const auto& td : ds.data) {
    if (!td.p || !td.q) continue;
    Vec2 p = *td.p, q = *td.q;
    if (len(p) == 0.0 || len(q) == 0.0) continue;
    Vec2 d1 = group_direction(A, p);
    Vec2 d2 = group_direction(A, q);
    // momentum-consistency filter: the stored covectors must be Q_A of the
    // reconstructed leg directions
    if (len(sub(fA.support(d1[0], d1[1]).point, p)) > 1e-6 * len(p)) continue;
    if (len(sub(fA.support(d2[0], d2[1]).point, q)) > 1e-6 * len(q)) continue;
    double s_in, s_out;
    if (!ray_circle_first(td.x, d1, iface.fitted, s_in)) continue;
    if (!ray_circle_first(td.y, neg(d2), iface.fitted, s_out)) continue;
    Vec2 xh = add(td.x, mul(s_in, d1));
    Vec2 yh = sub(td.y, mul(s_out, d2));
    Vec2 leg_in = sub(xh, td.x), leg_out = sub(td.y, yh);
    double that = td.t - fA(leg_in[0], leg_in[1]) - fA(leg_out[0], leg_out[1]);
    Vec2 mid = sub(yh, xh);
    double l = len(mid);
    if (!(that > 1e-12) || l < 1e-3 * iface.fitted.radius) continue;
    if (that > tau) continue;
    samp.emplace_back(std::atan2(mid[1], mid[0]), l / that);
  }
  if (samp.size() < 16) {
    std::ostringstream os;
    os << "only " << samp.size() << " refracted middle-leg samples survive the filters (need 16)";
    throw InsufficientDataError(os.str());
  }
  CurveSamples vel = build_curve(std::move(samp));
  auto pts = dual_slowness_points(vel, 720);
  SlownessPoly sp = fit_patch(pts, SymmetryClass::Full2d);
  return reconstruct_unique(sp, "inner recovery");
}

}  // namespace chr
