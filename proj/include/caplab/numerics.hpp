#pragma once
// Shared numerical kernel: complex/symplectic linear algebra on R^4 = C^2,
// quadrature rules (interval, disk, T x disk, S^3 in Hopf product coordinates),
// adaptive and symplectic ODE integration, finite differences, scalar
// root-finding/minimization wrappers, and closed-orbit detection.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace caplab::num {

using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;
using C = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846264338327950288;

// R^4 is identified with C^2 via z1 = v0 + i v1, z2 = v2 + i v3.
struct C2 {
  C z1, z2;
};

inline C2 to_c2(const Vec4& v) { return {C(v[0], v[1]), C(v[2], v[3])}; }
inline Vec4 to_vec(const C2& z) {
  return Vec4(z.z1.real(), z.z1.imag(), z.z2.real(), z.z2.imag());
}
inline Vec4 to_vec(C z1, C z2) {
  return Vec4(z1.real(), z1.imag(), z2.real(), z2.imag());
}

// Multiplication by i on R^4 = C^2.
inline Vec4 jmul(const Vec4& v) { return Vec4(-v[1], v[0], -v[3], v[2]); }

// Standard symplectic form omega0(u,v) = <iu, v> and primitive
// lambda0|_z(v) = (1/2) <iz, v> (restricting to alpha0 on S^3).
inline double omega0(const Vec4& u, const Vec4& v) { return jmul(u).dot(v); }
inline double lambda0(const Vec4& z, const Vec4& v) {
  return 0.5 * jmul(z).dot(v);
}

// Disk-factor versions on C: omega_hat = dx ^ dy, lambda0_hat = (x dy - y dx)/2.
inline double lambda0_hat(C w, C wdot) {
  return 0.5 * std::imag(std::conj(w) * wdot);
}
inline double omega_hat(C u, C v) { return std::imag(std::conj(u) * v); }

// ---------------------------------------------------------------------------
// Smooth cutoffs (C-infinity, flat at the junctions)
// ---------------------------------------------------------------------------

// sigma: R -> [0,1], 0 for x <= 0, 1 for x >= 1, strictly increasing between.
inline double cinf_step(double x) {
  if (x <= 0) return 0;
  if (x >= 1) return 1;
  double u = std::exp(-1.0 / x), v = std::exp(-1.0 / (1.0 - x));
  return u / (u + v);
}
inline double cinf_step_prime(double x) {
  if (x <= 0 || x >= 1) return 0;
  double u = std::exp(-1.0 / x), v = std::exp(-1.0 / (1.0 - x));
  double up = u / (x * x), vp = -v / ((1.0 - x) * (1.0 - x));
  double den = u + v;
  return (up * v - u * vp) / (den * den);
}

// bump: 1 at 0, 0 for |x| >= 1, compactly supported.
inline double cinf_bump(double x) {
  if (std::abs(x) >= 1) return 0;
  return std::exp(1.0 - 1.0 / (1.0 - x * x));
}
inline double cinf_bump_prime(double x) {
  if (std::abs(x) >= 1) return 0;
  double q = 1.0 - x * x;
  return cinf_bump(x) * (-2.0 * x / (q * q));
}

// Plateau profile: 1 on [-a, a], 0 outside (-b, b), C-infinity ramps between.
inline double cinf_plateau(double x, double a, double b) {
  double ax = std::abs(x);
  if (ax <= a) return 1;
  if (ax >= b) return 0;
  return cinf_step((b - ax) / (b - a));
}

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

struct Rule1D {
  std::vector<double> x, w;
  double total() const {
    double s = 0;
    for (double wi : w) s += wi;
    return s;
  }
};

// Gauss-Legendre nodes/weights on [a,b] (Newton iteration on P_n).
Rule1D gauss_legendre(int n, double a, double b);

// Uniform nodes with equal weights: the trapezoid rule on a periodic interval
// [a,b) (spectrally accurate for smooth periodic integrands).
Rule1D uniform_periodic(int n, double a, double b);

// Disk |w| <= radius with Lebesgue measure dx dy: Gauss-Legendre radially
// (weight r folded into the node weight), uniform in angle.
struct DiskRule {
  std::vector<C> pts;
  std::vector<double> w;
  double total() const {
    double s = 0;
    for (double wi : w) s += wi;
    return s;
  }
};
DiskRule disk_rule(int n_r, int n_theta, double radius = 1.0);

// T x disk with measure dt (x) dx dy, t in [0,1).
struct TDiskRule {
  std::vector<double> t;
  std::vector<C> pts;
  std::vector<double> w;
  std::size_t size() const { return w.size(); }
};
TDiskRule tdisk_rule(int n_t, int n_r, int n_theta, double radius = 1.0);

// S^3 with measure alpha0 ^ d(alpha0), total pi^2, in Hopf product coordinates
//   z1 = cos(beta) e^{2is},  z2 = sin(beta) e^{i(2s+chi)},
//   beta in (0, pi/2), chi in [0, 2pi), s in [0, pi)  (s = fiber angle),
// where the measure is sin(beta)cos(beta) dbeta dchi ds.  The product layout
// (base point (beta, chi)) x (fiber s) makes S^1-fiber averaging exact on the
// grid.
struct S3Rule {
  int n_beta = 0, n_chi = 0, n_fiber = 0;
  std::vector<double> beta, wbeta;  // Gauss-Legendre on (0, pi/2)
  std::vector<double> chi;          // uniform on [0, 2pi)
  std::vector<double> s;            // uniform on [0, pi)
  std::vector<Vec4> pts;            // flattened, ((i*n_chi + j)*n_fiber + k)
  std::vector<double> w;
  std::size_t size() const { return pts.size(); }
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * n_chi + j) * n_fiber + k;
  }
  double total() const {
    double t = 0;
    for (double wi : w) t += wi;
    return t;
  }
};
S3Rule s3_rule(int n_beta, int n_chi, int n_fiber);

// Point of S^3 from Hopf product coordinates.
Vec4 hopf_point(double beta, double chi, double s);

template <typename F>
double integrate_s3(F&& f, const S3Rule& r) {
  double acc = 0;
  for (std::size_t i = 0; i < r.size(); ++i) acc += r.w[i] * f(r.pts[i]);
  return acc;
}

template <typename F>
double integrate_disk(F&& f, const DiskRule& r) {
  double acc = 0;
  for (std::size_t i = 0; i < r.pts.size(); ++i) acc += r.w[i] * f(r.pts[i]);
  return acc;
}

template <typename F>
double integrate_tdisk(F&& f, const TDiskRule& r) {
  double acc = 0;
  for (std::size_t i = 0; i < r.size(); ++i) acc += r.w[i] * f(r.t[i], r.pts[i]);
  return acc;
}

// ---------------------------------------------------------------------------
// ODE integration
// ---------------------------------------------------------------------------

struct IntegratorConfig {
  double rel_tol = 1e-11;
  double abs_tol = 1e-13;
  double max_step = 0.25;
  double init_step = 1e-3;
  long max_steps = 4'000'000;
};

struct IntegrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {
template <typename State>
double error_norm(const State& err, const State& y0, const State& y1,
                  double atol, double rtol) {
  double acc = 0;
  for (int i = 0; i < err.size(); ++i) {
    double sc = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    double e = err[i] / sc;
    acc += e * e;
  }
  return std::sqrt(acc / err.size());
}
}  // namespace detail

// Adaptive Dormand-Prince 5(4).  field(t, y) -> dy/dt.  project (optional) is
// applied to the state after each accepted step (e.g. renormalization to S^3).
// observer(t, y) is called at t0, after each accepted step, and at t1.
template <typename F, typename State, typename Proj, typename Obs>
State integrate_adaptive(F&& field, double t0, double t1, State y,
                         const IntegratorConfig& cfg, Proj&& project,
                         Obs&& observer) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                          c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                          e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  const double dir = (t1 >= t0) ? 1.0 : -1.0;
  double t = t0;
  double span = std::abs(t1 - t0);
  if (span == 0) return y;
  double h = std::min(cfg.init_step, std::max(span, 1e-16));
  h = std::min(h, cfg.max_step);
  State k1 = field(t, y);
  observer(t, y);
  long steps = 0;
  while (dir * (t1 - t) > 0) {
    if (++steps > cfg.max_steps)
      throw IntegrationError("integrator exceeded max step count");
    h = std::min(h, std::abs(t1 - t));
    double hd = dir * h;
    State k2 = field(t + c2 * hd, State(y + hd * (a21 * k1)));
    State k3 = field(t + c3 * hd, State(y + hd * (a31 * k1 + a32 * k2)));
    State k4 =
        field(t + c4 * hd, State(y + hd * (a41 * k1 + a42 * k2 + a43 * k3)));
    State k5 = field(t + c5 * hd, State(y + hd * (a51 * k1 + a52 * k2 +
                                                  a53 * k3 + a54 * k4)));
    State k6 = field(t + hd, State(y + hd * (a61 * k1 + a62 * k2 + a63 * k3 +
                                             a64 * k4 + a65 * k5)));
    State ynew =
        y + hd * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    State k7 = field(t + hd, ynew);
    State err = hd * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 +
                      e7 * k7);
    for (int i = 0; i < ynew.size(); ++i)
      if (!std::isfinite(ynew[i]))
        throw IntegrationError("domain escape: non-finite state in field");
    double en = detail::error_norm(err, y, ynew, cfg.abs_tol, cfg.rel_tol);
    if (en <= 1.0) {
      t += hd;
      y = ynew;
      project(y);
      k1 = field(t, y);  // no FSAL reuse: project may have moved the state
      observer(t, y);
    }
    double fac = (en > 0) ? 0.9 * std::pow(en, -0.2) : 5.0;
    fac = std::min(5.0, std::max(0.2, fac));
    h = std::min(h * fac, cfg.max_step);
    if (h < 1e-14 * std::max(1.0, std::abs(t)))
      throw IntegrationError("step-size underflow (stiff or blow-up)");
  }
  return y;
}

struct IdentityProj {
  template <typename State>
  void operator()(State&) const {}
};
struct NullObs {
  template <typename State>
  void operator()(double, const State&) const {}
};

template <typename F, typename State>
State integrate_adaptive(F&& field, double t0, double t1, State y,
                         const IntegratorConfig& cfg = {}) {
  return integrate_adaptive(std::forward<F>(field), t0, t1, std::move(y), cfg,
                            IdentityProj{}, NullObs{});
}

// Implicit midpoint rule (1-stage Gauss): symplectic for Hamiltonian fields,
// including non-autonomous ones (stage at t + h/2).  Fixed step count.
template <typename F, typename State>
State implicit_midpoint(F&& field, double t0, double t1, State y, int nsteps) {
  double h = (t1 - t0) / nsteps;
  for (int n = 0; n < nsteps; ++n) {
    double tm = t0 + (n + 0.5) * h;
    State k = field(tm, y);
    for (int it = 0; it < 100; ++it) {
      State k2 = field(tm, State(y + (h / 2) * k));
      double d = 0;
      for (int i = 0; i < k.size(); ++i) d = std::max(d, std::abs(k2[i] - k[i]));
      k = k2;
      if (d < 1e-15 * (1.0 + k.template lpNorm<Eigen::Infinity>())) break;
      if (it == 99)
        throw IntegrationError("implicit midpoint stage did not converge");
    }
    y = y + h * k;
  }
  return y;
}

// Sampled trajectory with action accumulators (units of area).
template <int N>
struct Trajectory {
  std::vector<double> t;
  std::vector<Eigen::Matrix<double, N, 1>> y;
  double action_lambda = 0;  // integral of lambda0_hat (resp. lambda0) along the curve
  double action_h = 0;       // integral of H(t, .) dt along the curve
};

// ---------------------------------------------------------------------------
// Finite differences
// ---------------------------------------------------------------------------

inline double fd_step(double scale = 1.0) {
  return std::cbrt(std::numeric_limits<double>::epsilon()) * scale;
}

template <typename F>
Vec4 fd_grad4(F&& f, const Vec4& z, double scale = 1.0) {
  double h = fd_step(scale);
  Vec4 g;
  for (int i = 0; i < 4; ++i) {
    Vec4 zp = z, zm = z;
    zp[i] += h;
    zm[i] -= h;
    g[i] = (f(zp) - f(zm)) / (2 * h);
  }
  return g;
}

template <typename F>
C fd_gradC(F&& f, C w, double scale = 1.0) {
  double h = fd_step(scale);
  double gx = (f(w + C(h, 0)) - f(w - C(h, 0))) / (2 * h);
  double gy = (f(w + C(0, h)) - f(w - C(0, h))) / (2 * h);
  return C(gx, gy);
}

template <typename F>
Mat4 fd_jacobian4(F&& f, const Vec4& z, double h) {
  Mat4 J;
  for (int i = 0; i < 4; ++i) {
    Vec4 zp = z, zm = z;
    zp[i] += h;
    zm[i] -= h;
    J.col(i) = (f(zp) - f(zm)) / (2 * h);
  }
  return J;
}

template <typename F>
Mat2 fd_jacobian2(F&& f, C w, double h) {
  auto col = [&](C dw) {
    C p = f(w + dw), m = f(w - dw);
    return Vec2((p.real() - m.real()) / (2 * h), (p.imag() - m.imag()) / (2 * h));
  };
  Mat2 J;
  J.col(0) = col(C(h, 0));
  J.col(1) = col(C(0, h));
  return J;
}

// ---------------------------------------------------------------------------
// Scalar solving
// ---------------------------------------------------------------------------

// Root of f on [a,b] with f(a), f(b) of opposite sign (TOMS 748 via Boost).
double find_root(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-12);

// Local minimum of f on [a,b] (Brent via Boost); returns (x, f(x)).
std::pair<double, double> minimize_scalar(const std::function<double(double)>& f,
                                          double a, double b);

// ---------------------------------------------------------------------------
// Closed-orbit detection
// ---------------------------------------------------------------------------

using FlowFn = std::function<Vec4(double, const Vec4&)>;

struct ClosedOrbitResult {
  Vec4 point;
  double period = 0;
  double residual = 0;
};

struct OrbitSearchConfig {
  int max_iter = 50;
  double min_period = 1e-3;   // below this a candidate counts as degenerate
  int max_division = 12;      // divisors tried by the minimal-period filter
  double fd_step = 2e-6;
  bool sphere = true;         // constrain the base point to S^3
};

// Gauss-Newton on (point, period) for flow(period, point) = point, with the
// point constrained to S^3 (tangent-space steps + renormalization).  Returns
// nullopt on non-convergence or degeneracy -- never a false positive: any
// result satisfies |flow(period, point) - point| < tol on re-evaluation.
std::optional<ClosedOrbitResult> find_closed_orbit(
    const FlowFn& flow, const Vec4& seed, double period_guess, double tol,
    const OrbitSearchConfig& cfg = {});

}  // namespace caplab::num
