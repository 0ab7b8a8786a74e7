#include "chr/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "chr/errors.hpp"
#include "chr/rational.hpp"

namespace chr {

namespace {

constexpr double kGapThreshold = 1e-8;

std::vector<double> dense_tensor(const StiffnessTensor& t) {
  FullTensor full = voigt_expand(t);
  std::vector<double> a(full.a.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = full.a[i].to_double();
  return a;
}

double at(const std::vector<double>& a, int n, int i, int j, int k, int l) {
  return a[static_cast<std::size_t>(((i * n + j) * n + k) * n + l)];
}

// Gamma(p)_{il} = sum_{jk} a_{ijkl} p_j p_k, row-major n x n
void christoffel_at(const std::vector<double>& a, int n, const double* p, double* g) {
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < n; ++l) {
      double s = 0.0;
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) s += at(a, n, i, j, k, l) * p[j] * p[k];
      g[i * n + l] = s;
    }
}

// d/dp_m Gamma_{il} = sum_k a_{imkl} p_k + sum_j a_{ijml} p_j
void christoffel_grad(const std::vector<double>& a, int n, const double* p, int m, double* g) {
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < n; ++l) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += at(a, n, i, m, k, l) * p[k];
      for (int j = 0; j < n; ++j) s += at(a, n, i, j, m, l) * p[j];
      g[i * n + l] = s;
    }
}

void eigen2(const double* g, double* val, double* vec) {
  double A = g[0], B = g[1], C = g[3];
  double mean = 0.5 * (A + C);
  double half = 0.5 * (A - C);
  double disc = std::hypot(half, B);
  val[0] = mean - disc;
  val[1] = mean + disc;
  for (int k = 0; k < 2; ++k) {
    double x, y;
    // (A - val)x + By = 0; pick the better-conditioned row
    if (std::abs(B) + std::abs(val[k] - A) >= std::abs(B) + std::abs(val[k] - C)) {
      x = B;
      y = val[k] - A;
    } else {
      x = val[k] - C;
      y = B;
    }
    double nrm = std::hypot(x, y);
    if (nrm < 1e-300) {
      x = k == 0 ? 1.0 : 0.0;
      y = k == 0 ? 0.0 : 1.0;
      nrm = 1.0;
    }
    vec[2 * k] = x / nrm;
    vec[2 * k + 1] = y / nrm;
  }
}

void cross3(const double* u, const double* v, double* w) {
  w[0] = u[1] * v[2] - u[2] * v[1];
  w[1] = u[2] * v[0] - u[0] * v[2];
  w[2] = u[0] * v[1] - u[1] * v[0];
}

// analytic symmetric 3x3 eigenvalues (trigonometric form), polished by
// Newton on the characteristic polynomial
void eigen3(const double* g, double* val, double* vec) {
  double a = g[0], b = g[4], c = g[8];
  double d = g[1], e = g[5], f = g[2];
  double p1 = d * d + f * f + e * e;
  if (p1 < 1e-300) {
    double diag[3] = {a, b, c};
    int idx[3] = {0, 1, 2};
    std::sort(idx, idx + 3, [&](int i, int j) { return diag[i] < diag[j]; });
    for (int k = 0; k < 3; ++k) {
      val[k] = diag[idx[k]];
      for (int j = 0; j < 3; ++j) vec[3 * k + j] = idx[k] == j ? 1.0 : 0.0;
    }
    return;
  }
  double q = (a + b + c) / 3.0;
  double p2 = (a - q) * (a - q) + (b - q) * (b - q) + (c - q) * (c - q) + 2.0 * p1;
  double p = std::sqrt(p2 / 6.0);
  double B[9];
  for (int i = 0; i < 9; ++i) B[i] = g[i] / p;
  B[0] -= q / p;
  B[4] -= q / p;
  B[8] -= q / p;
  double detB = B[0] * (B[4] * B[8] - B[5] * B[7]) - B[1] * (B[3] * B[8] - B[5] * B[6]) +
                B[2] * (B[3] * B[7] - B[4] * B[6]);
  double r = std::clamp(detB / 2.0, -1.0, 1.0);
  double phi = std::acos(r) / 3.0;
  double l2 = q + 2.0 * p * std::cos(phi);                      // largest
  double l0 = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);   // smallest
  double l1 = 3.0 * q - l0 - l2;
  val[0] = l0;
  val[1] = l1;
  val[2] = l2;

  // characteristic polynomial -x^3 + c2 x^2 + c1 x + c0 via invariants
  double tr = a + b + c;
  double m2 = a * b + b * c + c * a - d * d - e * e - f * f;  // sum of 2x2 principal minors
  double det = g[0] * (g[4] * g[8] - g[5] * g[7]) - g[1] * (g[3] * g[8] - g[5] * g[6]) +
               g[2] * (g[3] * g[7] - g[4] * g[6]);
  auto charpoly = [&](double x) { return ((-x + tr) * x - m2) * x + det; };
  auto charder = [&](double x) { return (-3.0 * x + 2.0 * tr) * x - m2; };
  for (int k = 0; k < 3; ++k) {
    double x = val[k];
    for (int it = 0; it < 8; ++it) {
      double fx = charpoly(x);
      double dx = charder(x);
      if (dx == 0.0) break;
      double step = fx / dx;
      x -= step;
      if (std::abs(step) <= 1e-17 * (1.0 + std::abs(x))) break;
    }
    val[k] = x;
  }
  std::sort(val, val + 3);

  for (int k = 0; k < 3; ++k) {
    double rows[3][3] = {{g[0] - val[k], g[1], g[2]},
                         {g[3], g[4] - val[k], g[5]},
                         {g[6], g[7], g[8] - val[k]}};
    double best[3] = {0, 0, 0};
    double best_norm = -1.0;
    int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    for (auto& pr : pairs) {
      double w[3];
      cross3(rows[pr[0]], rows[pr[1]], w);
      double nrm = std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]);
      if (nrm > best_norm) {
        best_norm = nrm;
        best[0] = w[0];
        best[1] = w[1];
        best[2] = w[2];
      }
    }
    if (best_norm < 1e-300) {
      best[k % 3] = 1.0;
      best_norm = 1.0;
    }
    for (int j = 0; j < 3; ++j) vec[3 * k + j] = best[j] / best_norm;
  }
}

void eigen_raw(const std::vector<double>& a, int n, const double* p, double* val, double* vec) {
  double g[9];
  christoffel_at(a, n, p, g);
  if (n == 2)
    eigen2(g, val, vec);
  else
    eigen3(g, val, vec);
}

void require_positive(const StiffnessTensor& t, const char* who) {
  PositivityReport rep = positivity(t);
  if (!rep.positive_definite) {
    std::ostringstream os;
    os << who << " needs a positive-definite tensor (leading minor " << rep.first_failure
       << " is not positive)";
    throw DomainError(os.str());
  }
}

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

}  // namespace

EigenDecomposition eigen_branches(const StiffnessTensor& t, const std::vector<double>& u) {
  int n = t.dim();
  if (static_cast<int>(u.size()) != n)
    throw DomainError("direction arity does not match the tensor dimension");
  if (norm(u) == 0.0) throw DomainError("direction must be nonzero");
  require_positive(t, "eigen_branches");
  std::vector<double> a = dense_tensor(t);
  double val[3], vec[9];
  eigen_raw(a, n, u.data(), val, vec);
  EigenDecomposition out;
  out.values.assign(val, val + n);
  for (int k = 0; k < n; ++k)
    out.vectors.push_back(std::vector<double>(vec + n * k, vec + n * k + n));
  return out;
}

double qp_gap_probe(const StiffnessTensor& t, int grid) {
  if (grid < 4) throw DomainError("qp_gap_probe needs a grid of at least 4 directions");
  require_positive(t, "qp_gap_probe");
  std::vector<double> a = dense_tensor(t);
  int n = t.dim();
  double worst = std::numeric_limits<double>::infinity();
  double val[3], vec[9];
  if (n == 2) {
    for (int k = 0; k < grid; ++k) {
      double th = 2.0 * M_PI * k / grid;
      double u[2] = {std::cos(th), std::sin(th)};
      eigen_raw(a, 2, u, val, vec);
      worst = std::min(worst, (val[1] - val[0]) / val[1]);
    }
  } else {
    // Fibonacci sphere
    const double ga = M_PI * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < grid; ++k) {
      double z = 1.0 - 2.0 * (k + 0.5) / grid;
      double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      double u[3] = {rho * std::cos(ga * k), rho * std::sin(ga * k), z};
      eigen_raw(a, 3, u, val, vec);
      worst = std::min(worst, (val[2] - val[1]) / val[2]);
    }
  }
  return worst;
}

std::vector<BranchSample> sample_branch(const StiffnessTensor& t, int branch,
                                        const std::vector<std::vector<double>>& directions) {
  int n = t.dim();
  if (branch < 1 || branch > n) throw DomainError("branch index out of range");
  require_positive(t, "sample_branch");
  std::vector<double> a = dense_tensor(t);
  std::vector<BranchSample> out;
  out.reserve(directions.size());
  double val[3], vec[9];
  for (const auto& u : directions) {
    if (static_cast<int>(u.size()) != n)
      throw DomainError("direction arity does not match the tensor dimension");
    double nrm = norm(u);
    if (nrm == 0.0) throw DomainError("direction must be nonzero");
    std::vector<double> unit(u);
    for (double& x : unit) x /= nrm;
    eigen_raw(a, n, unit.data(), val, vec);
    BranchSample s;
    s.direction = unit;
    s.branch = branch;
    s.eigenvalue = val[branch - 1];
    s.p = unit;
    double scale = 1.0 / std::sqrt(s.eigenvalue);
    for (double& x : s.p) x *= scale;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::vector<double>> circle_directions(int count) {
  if (count < 1) throw DomainError("direction count must be positive");
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    double th = 2.0 * M_PI * k / count;
    out.push_back({std::cos(th), std::sin(th)});
  }
  return out;
}

std::vector<double> eigenvalue_gradient(const StiffnessTensor& t, int branch,
                                        const std::vector<double>& p, bool finite_difference) {
  int n = t.dim();
  if (branch < 1 || branch > n) throw DomainError("branch index out of range");
  if (static_cast<int>(p.size()) != n)
    throw DomainError("point arity does not match the tensor dimension");
  require_positive(t, "eigenvalue_gradient");
  std::vector<double> a = dense_tensor(t);
  std::vector<double> grad(static_cast<std::size_t>(n));
  double val[3], vec[9];
  if (!finite_difference) {
    eigen_raw(a, n, p.data(), val, vec);
    const double* e = vec + n * (branch - 1);
    double dg[9];
    for (int m = 0; m < n; ++m) {
      christoffel_grad(a, n, p.data(), m, dg);
      double s = 0.0;
      for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l) s += e[i] * dg[i * n + l] * e[l];
      grad[static_cast<std::size_t>(m)] = s;
    }
    return grad;
  }
  const double h = 1e-6;
  std::vector<double> q(p);
  auto lam = [&](int m, double step) {
    q[static_cast<std::size_t>(m)] = p[static_cast<std::size_t>(m)] + step;
    eigen_raw(a, n, q.data(), val, vec);
    q[static_cast<std::size_t>(m)] = p[static_cast<std::size_t>(m)];
    return val[branch - 1];
  };
  for (int m = 0; m < n; ++m) {
    double d1 = (lam(m, h) - lam(m, -h)) / (2.0 * h);
    double d2 = (lam(m, h / 2.0) - lam(m, -h / 2.0)) / h;
    grad[static_cast<std::size_t>(m)] = (4.0 * d2 - d1) / 3.0;  // Richardson
  }
  return grad;
}

GroupVelocity group_velocity(const StiffnessTensor& t, const BranchSample& s) {
  int n = t.dim();
  if (s.branch < 1 || s.branch > n) throw DomainError("branch index out of range");
  require_positive(t, "group_velocity");
  std::vector<double> a = dense_tensor(t);
  double val[3], vec[9];
  eigen_raw(a, n, s.p.data(), val, vec);
  double gap = std::numeric_limits<double>::infinity();
  if (s.branch > 1) gap = std::min(gap, val[s.branch - 1] - val[s.branch - 2]);
  if (s.branch < n) gap = std::min(gap, val[s.branch] - val[s.branch - 1]);
  double rel = gap / std::abs(val[n - 1]);
  if (rel < kGapThreshold) {
    std::ostringstream os;
    os << "group velocity refused: eigenvalue gap " << rel << " at the sample is below 1e-08"
       << " (near a conical point)";
    throw DomainError(os.str());
  }
  std::vector<double> grad = eigenvalue_gradient(t, s.branch, s.p, n == 3);
  GroupVelocity gv;
  gv.base = s;
  gv.v = grad;
  for (double& x : gv.v) x *= 0.5;
  return gv;
}

DualNormTable::DualNormTable(const StiffnessTensor& t, int grid) : grid_(grid) {
  if (t.dim() != 2) throw UnsupportedError("DualNormTable is implemented for planar tensors");
  if (grid < 16) throw DomainError("DualNormTable needs a grid of at least 16 directions");
  require_positive(t, "DualNormTable");
  a_ = dense_tensor(t);
  samples_.reserve(static_cast<std::size_t>(grid));
  for (int k = 0; k < grid; ++k) {
    double th = 2.0 * M_PI * k / grid;
    double r = radius(th);
    samples_.push_back({r * std::cos(th), r * std::sin(th)});
  }
}

double DualNormTable::radius(double theta) const {
  double u[2] = {std::cos(theta), std::sin(theta)};
  double val[3], vec[9];
  eigen_raw(a_, 2, u, val, vec);
  return 1.0 / std::sqrt(val[1]);  // qP = largest eigenvalue
}

DualNormTable::Support DualNormTable::support(double vx, double vy) const {
  Support out;
  if (vx == 0.0 && vy == 0.0) return out;
  int best = 0;
  double best_dot = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < grid_; ++k) {
    double dot = vx * samples_[static_cast<std::size_t>(k)][0] +
                 vy * samples_[static_cast<std::size_t>(k)][1];
    if (dot > best_dot) {
      best_dot = dot;
      best = k;
    }
  }
  // At the maximizer the outward normal grad lambda is parallel to v
  // (Lagrange condition on the level curve lambda = 1), and the gradient
  // direction is invariant along rays, so the unit direction serves.
  // cross(v, grad) has a simple zero there; bisection pins it to machine
  // precision, which a direct maximization of <v, p> cannot (flat maximum).
  auto cross = [&](double th) {
    double u[2] = {std::cos(th), std::sin(th)};
    double val[3], vec[9];
    eigen_raw(a_, 2, u, val, vec);
    const double* e = vec + 2;  // qP eigenvector
    double g[2], dg[4];
    for (int m = 0; m < 2; ++m) {
      christoffel_grad(a_, 2, u, m, dg);
      g[m] = e[0] * dg[0] * e[0] + e[0] * dg[1] * e[1] + e[1] * dg[2] * e[0] +
             e[1] * dg[3] * e[1];
    }
    return vx * g[1] - vy * g[0];
  };
  const double step = 2.0 * M_PI / grid_;
  double lo = 2.0 * M_PI * best / grid_ - step;
  double hi = lo + 2.0 * step;
  double flo = cross(lo), fhi = cross(hi);
  double th;
  if (flo == 0.0) {
    th = lo;
  } else if (fhi == 0.0) {
    th = hi;
  } else if (flo * fhi < 0.0) {
    for (int it = 0; it < 64; ++it) {
      double mid = 0.5 * (lo + hi);
      double fm = cross(mid);
      if (fm == 0.0) {
        lo = hi = mid;
        break;
      }
      if (flo * fm < 0.0) {
        hi = mid;
        fhi = fm;
      } else {
        lo = mid;
        flo = fm;
      }
    }
    th = 0.5 * (lo + hi);
  } else {
    th = 2.0 * M_PI * best / grid_;  // grid point already the stationary angle
  }
  double r = radius(th);
  out.value = vx * r * std::cos(th) + vy * r * std::sin(th);
  out.point = {r * std::cos(th), r * std::sin(th)};
  return out;
}

SlownessPoly fit_patch(const std::vector<BranchSample>& samples, SymmetryClass cls) {
  if (cls != SymmetryClass::Full2d && cls != SymmetryClass::Isotropic)
    throw UnsupportedError("fit_patch is implemented for planar tensors");
  const auto& monos = basis_monomials(SlownessBasis::Canon2d, false);
  const std::size_t unknowns = monos.size() - 1;  // constant slot pinned to 1
  if (samples.size() < unknowns) {
    std::ostringstream os;
    os << "needs more samples: " << samples.size() << " given, " << unknowns << " unknowns";
    throw InsufficientDataError(os.str());
  }

  const std::size_t m = samples.size();
  // row-major m x unknowns, long double
  std::vector<long double> A(m * unknowns);
  std::vector<long double> rhs(m, -1.0L);
  for (std::size_t r = 0; r < m; ++r) {
    if (samples[r].p.size() != 2) throw DomainError("fit_patch expects planar samples");
    long double p1 = samples[r].p[0], p2 = samples[r].p[1];
    for (std::size_t j = 0; j < unknowns; ++j) {
      long double v = 1.0L;
      for (int k = 0; k < monos[j][0]; ++k) v *= p1;
      for (int k = 0; k < monos[j][1]; ++k) v *= p2;
      A[r * unknowns + j] = v;
    }
  }

  // Householder QR in place
  for (std::size_t col = 0; col < unknowns; ++col) {
    long double nrm = 0.0L;
    for (std::size_t r = col; r < m; ++r) nrm += A[r * unknowns + col] * A[r * unknowns + col];
    nrm = std::sqrt(nrm);
    if (nrm == 0.0L) continue;
    if (A[col * unknowns + col] > 0) nrm = -nrm;
    std::vector<long double> v(m, 0.0L);
    for (std::size_t r = col; r < m; ++r) v[r] = A[r * unknowns + col];
    v[col] -= nrm;
    long double vnorm2 = 0.0L;
    for (std::size_t r = col; r < m; ++r) vnorm2 += v[r] * v[r];
    if (vnorm2 == 0.0L) continue;
    for (std::size_t j = col; j < unknowns; ++j) {
      long double dot = 0.0L;
      for (std::size_t r = col; r < m; ++r) dot += v[r] * A[r * unknowns + j];
      long double f = 2.0L * dot / vnorm2;
      for (std::size_t r = col; r < m; ++r) A[r * unknowns + j] -= f * v[r];
    }
    long double dot = 0.0L;
    for (std::size_t r = col; r < m; ++r) dot += v[r] * rhs[r];
    long double f = 2.0L * dot / vnorm2;
    for (std::size_t r = col; r < m; ++r) rhs[r] -= f * v[r];
  }

  long double max_diag = 0.0L;
  for (std::size_t k = 0; k < unknowns; ++k)
    max_diag = std::max(max_diag, std::abs(A[k * unknowns + k]));
  std::size_t rank = 0;
  for (std::size_t k = 0; k < unknowns; ++k)
    if (std::abs(A[k * unknowns + k]) > 1e-9L * max_diag) ++rank;
  if (rank < unknowns) {
    std::ostringstream os;
    os << "needs more samples: interpolation matrix rank " << rank << " of " << unknowns;
    throw InsufficientDataError(os.str());
  }

  std::vector<long double> x(unknowns);
  for (std::size_t k = unknowns; k-- > 0;) {
    long double s = rhs[k];
    for (std::size_t j = k + 1; j < unknowns; ++j) s -= A[k * unknowns + j] * x[j];
    x[k] = s / A[k * unknowns + k];
  }

  const std::int64_t cascade[] = {1, 10, 100, 1000, 1000000};
  double best_residual = std::numeric_limits<double>::infinity();
  for (std::int64_t max_den : cascade) {
    std::vector<BigRational> c(unknowns + 1);
    for (std::size_t j = 0; j < unknowns; ++j)
      c[j] = rational_reconstruct(static_cast<double>(x[j]), max_den);
    c[unknowns] = BigRational(1);
    double worst = 0.0;
    for (const auto& s : samples) {
      double p1 = s.p[0], p2 = s.p[1];
      double acc = 0.0, scale = 0.0;
      for (std::size_t j = 0; j <= unknowns; ++j) {
        double v = c[j].to_double();
        for (int k = 0; k < monos[j][0]; ++k) v *= p1;
        for (int k = 0; k < monos[j][1]; ++k) v *= p2;
        acc += v;
        scale += std::abs(v);
      }
      if (scale == 0.0) scale = 1.0;
      worst = std::max(worst, std::abs(acc) / scale);
    }
    best_residual = std::min(best_residual, worst);
    if (worst <= 1e-6) {
      SlownessPoly out;
      out.dim = 2;
      out.basis = SlownessBasis::Canon2d;
      out.homogeneous = false;
      out.coeffs = std::move(c);
      return out;
    }
  }
  std::ostringstream os;
  os << "coefficient rationalization failed: best scaled residual " << best_residual
     << " exceeds 1e-06";
  throw PrecisionError(os.str());
}

std::string samples_csv(const std::vector<GroupVelocity>& rows) {
  std::ostringstream os;
  os << "direction,branch,p_x,p_y,v_x,v_y\n";
  for (const auto& r : rows) {
    if (r.base.direction.size() != 2) throw UnsupportedError("samples_csv covers planar data");
    char buf[160];
    std::snprintf(buf, sizeof buf, "%.12g,%d,%.12g,%.12g,%.12g,%.12g\n",
                  std::atan2(r.base.direction[1], r.base.direction[0]), r.base.branch,
                  r.base.p[0], r.base.p[1], r.v[0], r.v[1]);
    os << buf;
  }
  return os.str();
}

std::string curves_svg(const std::vector<std::vector<std::array<double, 2>>>& branch_loops) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  double maxr = 0.0;
  for (const auto& loop : branch_loops)
    for (const auto& pt : loop) maxr = std::max({maxr, std::abs(pt[0]), std::abs(pt[1])});
  if (maxr == 0.0) maxr = 1.0;
  const double scale = 360.0 / maxr;
  auto X = [&](double x) { return 400.0 + scale * x; };
  auto Y = [&](double y) { return 400.0 - scale * y; };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" "
        "viewBox=\"0 0 800 800\">\n";
  os << "<rect width=\"800\" height=\"800\" fill=\"white\"/>\n";
  os << "<line x1=\"0\" y1=\"400\" x2=\"800\" y2=\"400\" stroke=\"#cccccc\"/>\n";
  os << "<line x1=\"400\" y1=\"0\" x2=\"400\" y2=\"800\" stroke=\"#cccccc\"/>\n";
  for (std::size_t b = 0; b < branch_loops.size(); ++b) {
    const auto& loop = branch_loops[b];
    if (loop.empty()) continue;
    os << "<path d=\"M " << fmt(X(loop[0][0])) << " " << fmt(Y(loop[0][1]));
    for (std::size_t i = 1; i < loop.size(); ++i)
      os << " L " << fmt(X(loop[i][0])) << " " << fmt(Y(loop[i][1]));
    os << " Z\" fill=\"none\" stroke=\"" << palette[b % 4] << "\" stroke-width=\"2\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace chr
