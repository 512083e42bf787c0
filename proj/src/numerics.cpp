#include "caplab/numerics.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>

namespace caplab::num {

Rule1D gauss_legendre(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  Rule1D r;
  r.x.resize(n);
  r.w.resize(n);
  // Nodes of P_n on (-1,1) by Newton iteration from the Chebyshev guess.
  for (int i = 0; i < n; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double pp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      if (n == 1) p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double pn = (n == 1) ? x : p1;
      double pm = (n == 1) ? 1.0 : p0;
      pp = n * (x * pn - pm) / (x * x - 1.0);
      double dx = pn / pp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.x[i] = x;
    r.w[i] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
  // Map to [a,b].
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    r.x[i] = mid + half * r.x[i];
    r.w[i] *= half;
  }
  std::reverse(r.x.begin(), r.x.end());
  std::reverse(r.w.begin(), r.w.end());
  return r;
}

Rule1D uniform_periodic(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("uniform_periodic: n must be >= 1");
  Rule1D r;
  r.x.resize(n);
  r.w.assign(n, (b - a) / n);
  for (int i = 0; i < n; ++i) r.x[i] = a + (b - a) * i / n;
  return r;
}

DiskRule disk_rule(int n_r, int n_theta, double radius) {
  Rule1D rad = gauss_legendre(n_r, 0.0, radius);
  Rule1D ang = uniform_periodic(n_theta, 0.0, 2 * pi);
  DiskRule d;
  d.pts.reserve(static_cast<std::size_t>(n_r) * n_theta);
  d.w.reserve(d.pts.capacity());
  for (int i = 0; i < n_r; ++i)
    for (int j = 0; j < n_theta; ++j) {
      d.pts.push_back(std::polar(rad.x[i], ang.x[j]));
      d.w.push_back(rad.w[i] * rad.x[i] * ang.w[j]);
    }
  return d;
}

TDiskRule tdisk_rule(int n_t, int n_r, int n_theta, double radius) {
  Rule1D tt = uniform_periodic(n_t, 0.0, 1.0);
  DiskRule d = disk_rule(n_r, n_theta, radius);
  TDiskRule r;
  std::size_t total = static_cast<std::size_t>(n_t) * d.pts.size();
  r.t.reserve(total);
  r.pts.reserve(total);
  r.w.reserve(total);
  for (int k = 0; k < n_t; ++k)
    for (std::size_t i = 0; i < d.pts.size(); ++i) {
      r.t.push_back(tt.x[k]);
      r.pts.push_back(d.pts[i]);
      r.w.push_back(tt.w[k] * d.w[i]);
    }
  return r;
}

Vec4 hopf_point(double beta, double chi, double s) {
  C z1 = std::polar(std::cos(beta), 2 * s);
  C z2 = std::polar(std::sin(beta), 2 * s + chi);
  return to_vec(z1, z2);
}

S3Rule s3_rule(int n_beta, int n_chi, int n_fiber) {
  S3Rule r;
  r.n_beta = n_beta;
  r.n_chi = n_chi;
  r.n_fiber = n_fiber;
  Rule1D gb = gauss_legendre(n_beta, 0.0, pi / 2);
  Rule1D gc = uniform_periodic(n_chi, 0.0, 2 * pi);
  Rule1D gs = uniform_periodic(n_fiber, 0.0, pi);
  r.beta = gb.x;
  r.wbeta = gb.w;
  r.chi = gc.x;
  r.s = gs.x;
  std::size_t total =
      static_cast<std::size_t>(n_beta) * n_chi * n_fiber;
  r.pts.reserve(total);
  r.w.reserve(total);
  for (int i = 0; i < n_beta; ++i) {
    double jac = std::sin(gb.x[i]) * std::cos(gb.x[i]) * gb.w[i];
    for (int j = 0; j < n_chi; ++j)
      for (int k = 0; k < n_fiber; ++k) {
        r.pts.push_back(hopf_point(gb.x[i], gc.x[j], gs.x[k]));
        r.w.push_back(jac * gc.w[j] * gs.w[k]);
      }
  }
  return r;
}

double find_root(const std::function<double(double)>& f, double a, double b,
                 double tol) {
  boost::math::tools::eps_tolerance<double> until(52);
  std::uintmax_t iters = 200;
  auto res = boost::math::tools::toms748_solve(f, a, b, until, iters);
  double x = 0.5 * (res.first + res.second);
  (void)tol;
  return x;
}

std::pair<double, double> minimize_scalar(
    const std::function<double(double)>& f, double a, double b) {
  auto res = boost::math::tools::brent_find_minima(f, a, b, 40);
  return {res.first, res.second};
}

namespace {

// Orthonormal basis of the tangent space of S^3 at z (|z| = 1).
std::array<Vec4, 3> tangent_basis(const Vec4& z) {
  std::array<Vec4, 3> basis;
  int filled = 0;
  for (int i = 0; i < 4 && filled < 3; ++i) {
    Vec4 e = Vec4::Zero();
    e[i] = 1.0;
    Vec4 v = e - z.dot(e) * z;
    for (int k = 0; k < filled; ++k) v -= basis[k].dot(v) * basis[k];
    double n = v.norm();
    if (n > 1e-6) {
      basis[filled++] = v / n;
    }
  }
  if (filled < 3) throw std::runtime_error("tangent basis construction failed");
  return basis;
}

}  // namespace

std::optional<ClosedOrbitResult> find_closed_orbit(
    const FlowFn& flow, const Vec4& seed, double period_guess, double tol,
    const OrbitSearchConfig& cfg) {
  Vec4 z = seed;
  if (cfg.sphere) z.normalize();
  double T = period_guess;

  auto residual = [&](const Vec4& p, double period) -> Vec4 {
    return flow(period, p) - p;
  };

  Vec4 r = residual(z, T);
  for (int it = 0; it < cfg.max_iter; ++it) {
    if (r.norm() < tol) break;
    // Jacobian w.r.t. tangent directions (3 dof on the sphere) and period.
    std::array<Vec4, 3> basis = cfg.sphere ? tangent_basis(z)
                                           : std::array<Vec4, 3>{Vec4::Unit(0),
                                                                 Vec4::Unit(1),
                                                                 Vec4::Unit(2)};
    int ndir = cfg.sphere ? 3 : 4;
    Eigen::Matrix<double, 4, Eigen::Dynamic> J(4, ndir + 1);
    double h = cfg.fd_step;
    for (int d = 0; d < ndir; ++d) {
      Vec4 dirv = cfg.sphere ? basis[d] : Vec4::Unit(d);
      Vec4 zp = z + h * dirv, zm = z - h * dirv;
      if (cfg.sphere) {
        zp.normalize();
        zm.normalize();
      }
      J.col(d) = (residual(zp, T) - residual(zm, T)) / (2 * h);
    }
    J.col(ndir) = (residual(z, T + h) - residual(z, T - h)) / (2 * h);
    Eigen::VectorXd step =
        J.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(-r);
    // Damped update.
    double damp = 1.0;
    for (int half = 0; half < 10; ++half) {
      Vec4 zn = z;
      for (int d = 0; d < ndir; ++d)
        zn += damp * step[d] * (cfg.sphere ? basis[d] : Vec4::Unit(d));
      if (cfg.sphere) zn.normalize();
      double Tn = T + damp * step[ndir];
      Vec4 rn = residual(zn, Tn);
      if (rn.norm() < r.norm() || half == 9) {
        z = zn;
        T = Tn;
        r = rn;
        break;
      }
      damp *= 0.5;
    }
  }
  if (!(r.norm() < tol)) return std::nullopt;
  if (!(T > 0) || T < cfg.min_period) return std::nullopt;
  if (T < period_guess / 2 || T > 2 * period_guess) return std::nullopt;

  // Minimal-period filter: if the orbit already closes at T/m, report the
  // smaller period; a candidate collapsing below min_period is degenerate
  // (e.g. the identity flow) and is rejected.
  bool reduced = true;
  while (reduced) {
    reduced = false;
    for (int m = cfg.max_division; m >= 2; --m) {
      double Tm = T / m;
      if (residual(z, Tm).norm() < tol) {
        T = Tm;
        reduced = true;
        break;
      }
    }
    if (T < cfg.min_period) return std::nullopt;
  }
  ClosedOrbitResult out;
  out.point = z;
  out.period = T;
  out.residual = residual(z, T).norm();
  if (!(out.residual < tol)) return std::nullopt;
  return out;
}

}  // namespace caplab::num
