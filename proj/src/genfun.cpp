#include "caplab/genfun.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace caplab::gen {

using num::pi;

C GeneratingFunction::grad(C z) const {
  if (gradient) return gradient(z);
  return num::fd_gradC(value, z);
}

double measure_c2(const std::function<double(C)>& S, double radius, int n_r,
                  int n_theta) {
  double m = 0;
  double h = 1e-4 * radius;
  for (int i = 0; i < n_r; ++i)
    for (int j = 0; j < n_theta; ++j) {
      C z = std::polar(radius * (i + 0.5) / n_r, 2 * pi * j / n_theta);
      m = std::max(m, std::abs(S(z)));
      C g = num::fd_gradC(S, z, radius);
      m = std::max(m, std::abs(g));
      double sxx = (S(z + h) - 2 * S(z) + S(z - h)) / (h * h);
      double syy =
          (S(z + C(0, h)) - 2 * S(z) + S(z - C(0, h))) / (h * h);
      double sxy = (S(z + C(h, h)) - S(z + C(h, -h)) - S(z + C(-h, h)) +
                    S(z + C(-h, -h))) /
                   (4 * h * h);
      m = std::max({m, std::abs(sxx), std::abs(syy), std::abs(sxy)});
    }
  return m;
}

namespace {

// Invert the midpoint map z -> (z + phi(z))/2 at u by fixed-point iteration.
C invert_midpoint(const MapFn& map, C u) {
  C z = u;
  for (int it = 0; it < 100; ++it) {
    C m = 0.5 * (z + map(z));
    C d = u - m;
    z += d;
    if (std::abs(d) < 1e-14 * (1.0 + std::abs(u))) return z;
  }
  throw std::invalid_argument(
      "generating_function_of: midpoint map inversion failed (map is not "
      "near-identity)");
}

}  // namespace

GeneratingFunction generating_function_of(const MapFn& map,
                                          double support_radius, C basepoint) {
  if (basepoint == C(0, 0)) basepoint = C(support_radius + 0.35, 0);
  if (std::abs(basepoint) <= support_radius)
    throw std::invalid_argument("basepoint must lie outside the support");

  auto gradient = [map, support_radius](C u) -> C {
    if (std::abs(u) >= support_radius) return C(0, 0);
    C z = invert_midpoint(map, u);
    return C(0, 1) * (z - map(z));
  };
  C b = basepoint;
  auto value = [gradient, b](C u) {
    C d = u - b;
    double acc = 0;
    // S is constant (= 0) beyond the support, so the straight path from the
    // outside basepoint picks up the full value.
    static const num::Rule1D r = num::gauss_legendre(48, 0.0, 1.0);
    for (std::size_t i = 0; i < r.x.size(); ++i) {
      C g = gradient(b + r.x[i] * d);
      acc += r.w[i] * (g.real() * d.real() + g.imag() * d.imag());
    }
    return acc;
  };

  GeneratingFunction S;
  S.value = value;
  S.gradient = gradient;
  S.support_radius = support_radius;
  // C^2 norm via the (noise-free) gradient evaluator.
  double m = 0, h = 1e-5;
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 10; ++j) {
      C z = std::polar(support_radius * (i + 0.5) / 12, 2 * pi * j / 10);
      m = std::max(m, std::abs(value(z)));
      C g = gradient(z);
      m = std::max(m, std::abs(g));
      C gx = (gradient(z + h) - gradient(z - h)) / (2 * h);
      C gy = (gradient(z + C(0, h)) - gradient(z - C(0, h))) / (2 * h);
      m = std::max({m, std::abs(gx), std::abs(gy)});
    }
  S.c2_norm = m;
  return S;
}

MapFn map_of_generating_function(const GeneratingFunction& S) {
  GeneratingFunction Sc = S;
  return [Sc](C z) -> C {
    C p = z;
    for (int it = 0; it < 50; ++it) {
      C F = C(0, 1) * (z - p) - Sc.grad(0.5 * (z + p));
      if (std::abs(F) < 1e-13 * (1.0 + std::abs(z))) return p;
      double h = 1e-6;
      auto Ff = [&](C q) { return C(0, 1) * (z - q) - Sc.grad(0.5 * (z + q)); };
      C Fx = (Ff(p + h) - Ff(p - h)) / (2 * h);
      C Fy = (Ff(p + C(0, h)) - Ff(p - C(0, h))) / (2 * h);
      Eigen::Matrix2d J;
      J << Fx.real(), Fy.real(), Fx.imag(), Fy.imag();
      Eigen::Vector2d rhs(-F.real(), -F.imag());
      Eigen::Vector2d step = J.fullPivLu().solve(rhs);
      p += C(step[0], step[1]);
    }
    throw std::runtime_error(
        "map_of_generating_function: Newton did not converge (C^2 threshold "
        "exceeded)");
  };
}

double genfun_residual(const MapFn& map, const GeneratingFunction& S,
                       double radius, int n_r, int n_theta) {
  double m = 0;
  for (int i = 0; i < n_r; ++i)
    for (int j = 0; j < n_theta; ++j) {
      C z = std::polar(radius * (i + 0.5) / n_r, 2 * pi * j / n_theta);
      C f = map(z);
      m = std::max(m,
                   std::abs(C(0, 1) * (z - f) - S.grad(0.5 * (z + f))));
    }
  return m;
}

C isotopy_flow(const std::function<double(double, C)>& K, double t0, double t1,
               C z, const num::IntegratorConfig& cfg) {
  auto field = [&K](double t, const num::Vec2& y) {
    C u(y[0], y[1]);
    C udot = C(0, 1) * num::fd_gradC([&](C v) { return K(t, v); }, u);
    return num::Vec2(udot.real(), udot.imag());
  };
  num::Vec2 yf = num::integrate_adaptive(
      field, t0, t1, num::Vec2(z.real(), z.imag()), cfg);
  return C(yf[0], yf[1]);
}

double hj_residual(const std::function<GeneratingFunction(double)>& family,
                   const std::function<double(double, C)>& K, double radius,
                   int n_t, int n_r, int n_theta, double dt) {
  double m = 0;
  for (int i = 0; i < n_t; ++i) {
    double t = (i + 0.5) / n_t;
    GeneratingFunction Sm = family(t - dt), S0 = family(t), Sp = family(t + dt);
    for (int j = 0; j < n_r; ++j)
      for (int l = 0; l < n_theta; ++l) {
        C z = std::polar(radius * (j + 0.5) / n_r, 2 * pi * l / n_theta);
        double dS = (Sp.value(z) - Sm.value(z)) / (2 * dt);
        C arg = z + C(0, 0.5) * S0.grad(z);
        m = std::max(m, std::abs(dS - K(t, arg)));
      }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Flattening
// ---------------------------------------------------------------------------

namespace {

struct PolarGrid {
  int n_r = 0, n_th = 0;
  double R = 0;
  std::vector<double> r, wbary;  // radial nodes + barycentric weights
  std::vector<double> theta;
};

PolarGrid make_grid(int n_r, int n_th, double R) {
  PolarGrid g;
  g.n_r = n_r;
  g.n_th = n_th;
  g.R = R;
  auto gl = num::gauss_legendre(n_r, 0.0, R);
  g.r = gl.x;
  g.wbary.resize(n_r);
  for (int i = 0; i < n_r; ++i) {
    double w = 1.0;
    for (int k = 0; k < n_r; ++k)
      if (k != i) w *= (g.r[i] - g.r[k]);
    g.wbary[i] = 1.0 / w;
  }
  g.theta.resize(n_th);
  for (int j = 0; j < n_th; ++j) g.theta[j] = 2 * pi * j / n_th;
  return g;
}

// Data of one time slice, sampled on the source polar grid.
struct Slice {
  std::vector<C> P;       // midpoint map (z + phi(z))/2
  std::vector<C> D;       // i (z - phi(z)) = grad S at P(z)
  std::vector<double> W;  // S o P
};

struct SliceEval {
  C P, D;
  double W;
};

class FlattenCore {
 public:
  PolarGrid grid;
  std::vector<double> tnodes, tbary;
  std::vector<Slice> slices;
  lift::TimePeriodicHamiltonian H;
  double r = 0, eps = 0, t_margin = 0.04;

  double chi(double rho) const { return num::cinf_plateau(rho, r / 3, 2 * r / 3); }
  C dchi(C z) const {
    double rho = std::abs(z);
    double a = r / 3, b = 2 * r / 3;
    if (rho <= a || rho >= b || rho == 0) return C(0, 0);
    double d = -num::cinf_step_prime((b - rho) / (b - a)) / (b - a);
    return d * z / rho;
  }
  double eta(double t) const {
    return num::cinf_step((t - t_margin) / (1 - 2 * t_margin));
  }
  double eta_prime(double t) const {
    return num::cinf_step_prime((t - t_margin) / (1 - 2 * t_margin)) /
           (1 - 2 * t_margin);
  }

  // Interpolated slice at arbitrary t in [0,1] (cached for repeated t).
  const Slice& slice_at(double t) const {
    if (cached_valid_ && t == cached_t_) return cached_;
    int n = static_cast<int>(tnodes.size());
    for (int k = 0; k < n; ++k)
      if (t == tnodes[k]) {
        cached_ = slices[k];
        cached_t_ = t;
        cached_valid_ = true;
        return cached_;
      }
    std::vector<double> c(n);
    double den = 0;
    for (int k = 0; k < n; ++k) {
      c[k] = tbary[k] / (t - tnodes[k]);
      den += c[k];
    }
    std::size_t m = grid.r.size() * grid.theta.size();
    cached_.P.assign(m, C(0, 0));
    cached_.D.assign(m, C(0, 0));
    cached_.W.assign(m, 0.0);
    for (int k = 0; k < n; ++k) {
      double a = c[k] / den;
      const Slice& s = slices[k];
      for (std::size_t i = 0; i < m; ++i) {
        cached_.P[i] += a * s.P[i];
        cached_.D[i] += a * s.D[i];
        cached_.W[i] += a * s.W[i];
      }
    }
    cached_t_ = t;
    cached_valid_ = true;
    return cached_;
  }

  // Evaluate the slice grids at an arbitrary point (identity/zero beyond the
  // sampled radius: the isotopy is supported inside it).
  SliceEval eval(const Slice& s, C z) const {
    double rho = std::abs(z);
    if (rho >= grid.R) return {z, C(0, 0), 0.0};
    int n_r = grid.n_r, n_th = grid.n_th;
    double th = std::arg(z);
    // Radial barycentric interpolation per angular node.
    std::vector<double> vals(5 * n_th);
    int exact = -1;
    double den_r = 0;
    std::vector<double> cr(n_r);
    for (int i = 0; i < n_r; ++i) {
      double d = rho - grid.r[i];
      if (d == 0) {
        exact = i;
        break;
      }
      cr[i] = grid.wbary[i] / d;
      den_r += cr[i];
    }
    for (int j = 0; j < n_th; ++j) {
      double pr = 0, pi_ = 0, dr = 0, di = 0, wv = 0;
      if (exact >= 0) {
        std::size_t id = static_cast<std::size_t>(exact) * n_th + j;
        pr = s.P[id].real();
        pi_ = s.P[id].imag();
        dr = s.D[id].real();
        di = s.D[id].imag();
        wv = s.W[id];
      } else {
        for (int i = 0; i < n_r; ++i) {
          std::size_t id = static_cast<std::size_t>(i) * n_th + j;
          double a = cr[i];
          pr += a * s.P[id].real();
          pi_ += a * s.P[id].imag();
          dr += a * s.D[id].real();
          di += a * s.D[id].imag();
          wv += a * s.W[id];
        }
        pr /= den_r;
        pi_ /= den_r;
        dr /= den_r;
        di /= den_r;
        wv /= den_r;
      }
      vals[5 * j + 0] = pr;
      vals[5 * j + 1] = pi_;
      vals[5 * j + 2] = dr;
      vals[5 * j + 3] = di;
      vals[5 * j + 4] = wv;
    }
    // Trigonometric barycentric interpolation (odd node count).
    double out[5] = {0, 0, 0, 0, 0};
    double den_t = 0;
    for (int j = 0; j < n_th; ++j) {
      double d = 0.5 * (th - grid.theta[j]);
      double sn = std::sin(d);
      if (std::abs(sn) < 1e-15) {
        return {C(vals[5 * j + 0], vals[5 * j + 1]),
                C(vals[5 * j + 2], vals[5 * j + 3]), vals[5 * j + 4]};
      }
      double a = ((j % 2) ? -1.0 : 1.0) / sn;
      den_t += a;
      for (int q = 0; q < 5; ++q) out[q] += a * vals[5 * j + q];
    }
    for (int q = 0; q < 5; ++q) out[q] /= den_t;
    return {C(out[0], out[1]), C(out[2], out[3]), out[4]};
  }

  // Invert z -> P(z) at u.
  C invert_P(const Slice& s, C u) const {
    C z = u;
    for (int it = 0; it < 80; ++it) {
      C d = u - eval(s, z).P;
      z += d;
      if (std::abs(d) < 1e-14 * (1.0 + std::abs(u))) return z;
    }
    throw std::runtime_error("flatten: midpoint inversion did not converge");
  }

  struct SData {
    double S = 0;  // S_t(z)
    C g;           // grad S_t(z)
    C y;           // P_t^{-1}(z) (source point)
  };

  SData sdata(const Slice& s, C z) const {
    C y = invert_P(s, z);
    SliceEval e = eval(s, y);
    return {e.W, e.D, y};
  }

  C grad_S_lambda(const Slice& st, const Slice& s1, double lam, double et,
                  C z) const {
    SData a = sdata(st, z);
    if (lam == 0) return a.g;
    SData b = sdata(s1, z);
    double ch = chi(std::abs(z));
    C dch = dchi(z);
    return a.g + lam * (dch * (et * b.S - a.S) + ch * (et * b.g - a.g));
  }

  // The deformed Hamiltonian, disk-flow convention.
  double value(double lam, double t, C u) const {
    const Slice& st = slice_at(t);
    const Slice& s1 = slices.back();
    double et = eta(t);
    C z = u;
    for (int it = 0; it < 60; ++it) {
      C znew = u - C(0, 0.5) * grad_S_lambda(st, s1, lam, et, z);
      double d = std::abs(znew - z);
      z = znew;
      if (d < 1e-13 * (1.0 + std::abs(u))) break;
      if (it == 59)
        throw std::runtime_error("flatten: theta inversion did not converge");
    }
    double ch = chi(std::abs(z));
    SData a = sdata(st, z);
    C phi_img = 2.0 * z - a.y;  // theta^0_t(z) = phi^t(P_t^{-1}(z))
    double base = (1.0 - lam * ch) * H(t, phi_img);
    if (lam * ch == 0) return base;
    SData b = sdata(s1, z);
    return base - lam * ch * eta_prime(t) * b.S;
  }

 private:
  mutable bool cached_valid_ = false;
  mutable double cached_t_ = -1;
  mutable Slice cached_;
};

}  // namespace

FlattenFamily flatten_near_fixed_point(const lift::TimePeriodicHamiltonian& H,
                                       double r, double eps,
                                       const FlattenConfig& cfg) {
  // H must vanish for t near 0 and 1 (else reduce by time reparametrization).
  for (double t : {0.0, cfg.t_margin / 2, cfg.t_margin, 1 - cfg.t_margin,
                   1 - cfg.t_margin / 2, 1.0})
    for (int j = 0; j < 8; ++j)
      for (int l = 0; l < 8; ++l) {
        C w = std::polar(H.support_radius * (j + 0.5) / 8, 2 * pi * l / 8);
        if (std::abs(H(t, w)) > 1e-10)
          throw std::invalid_argument(
              "flatten_near_fixed_point: H must vanish for t near 0 and 1 "
              "(reduce with lift::reparametrize_in_time first)");
      }
  // 0 must be a fixed point with zero action (this module's convention).
  lift::DiskFlowResult d0 = lift::disk_flow(H, 1.0, C(0, 0));
  if (std::abs(d0.w) > cfg.fixed_point_tol ||
      std::abs(d0.action_lambda - d0.action_h) > cfg.fixed_point_tol)
    throw std::invalid_argument(
        "flatten_near_fixed_point: 0 is not a zero-action fixed point");

  auto core = std::make_shared<FlattenCore>();
  core->H = H;
  core->r = r;
  core->eps = eps;
  core->t_margin = cfg.t_margin;
  core->grid = make_grid(cfg.n_r, cfg.n_theta, H.support_radius + 0.1);

  int n_t = cfg.n_t;
  core->tnodes.resize(n_t);
  core->tbary.resize(n_t);
  for (int k = 0; k < n_t; ++k) {
    core->tnodes[k] = 0.5 * (1.0 - std::cos(pi * k / (n_t - 1)));
    core->tbary[k] = (k % 2 ? -1.0 : 1.0);
  }
  core->tbary.front() *= 0.5;
  core->tbary.back() *= 0.5;

  // Sample midpoint/deviation grids from trajectories through the time nodes.
  std::size_t m = core->grid.r.size() * core->grid.theta.size();
  core->slices.assign(n_t, Slice{});
  for (auto& s : core->slices) {
    s.P.assign(m, C(0, 0));
    s.D.assign(m, C(0, 0));
    s.W.assign(m, 0.0);
  }
  for (int i = 0; i < core->grid.n_r; ++i)
    for (int j = 0; j < core->grid.n_th; ++j) {
      C z = std::polar(core->grid.r[i], core->grid.theta[j]);
      std::size_t id = static_cast<std::size_t>(i) * core->grid.n_th + j;
      C y = z;
      for (int k = 0; k < n_t; ++k) {
        if (k > 0)
          y = lift::disk_flow_between(H, core->tnodes[k - 1], core->tnodes[k],
                                      y);
        core->slices[k].P[id] = 0.5 * (z + y);
        core->slices[k].D[id] = C(0, 1) * (z - y);
      }
    }

  // Values W = S o P per slice: radial line integrals from outside the
  // support, using d/drho [S(P(rho e))] = Re( conj(D) * dP/drho ).
  auto seg = num::gauss_legendre(6, 0.0, 1.0);
  for (int k = 0; k < n_t; ++k) {
    Slice& s = core->slices[k];
    for (int j = 0; j < core->grid.n_th; ++j) {
      auto component = [&](std::size_t id, int comp) {
        switch (comp) {
          case 0: return s.P[id].real();
          case 1: return s.P[id].imag();
          case 2: return s.D[id].real();
          default: return s.D[id].imag();
        }
      };
      auto radial = [&](double rho, int comp) {
        // interpolate along the ray at angle theta_j
        double den = 0, acc = 0;
        for (int i = 0; i < core->grid.n_r; ++i) {
          double d = rho - core->grid.r[i];
          std::size_t id = static_cast<std::size_t>(i) * core->grid.n_th + j;
          if (d == 0) return component(id, comp);
          double a = core->grid.wbary[i] / d;
          den += a;
          acc += a * component(id, comp);
        }
        return acc / den;
      };
      auto integrand = [&](double rho) {
        double h = 1e-4;
        C dP((radial(rho + h, 0) - radial(rho - h, 0)) / (2 * h),
             (radial(rho + h, 1) - radial(rho - h, 1)) / (2 * h));
        C D(radial(rho, 2), radial(rho, 3));
        return D.real() * dP.real() + D.imag() * dP.imag();
      };
      // cumulative from the outer edge (W = 0 there) inwards
      double acc = 0;
      double upper = core->grid.R - 2e-4;
      for (int i = core->grid.n_r - 1; i >= 0; --i) {
        double lower = core->grid.r[i];
        double len = upper - lower;
        double part = 0;
        for (std::size_t q = 0; q < seg.x.size(); ++q)
          part += seg.w[q] * integrand(lower + seg.x[q] * len);
        acc -= part * len;
        std::size_t id = static_cast<std::size_t>(i) * core->grid.n_th + j;
        s.W[id] = acc;
        upper = lower;
      }
    }
  }

  // Measured norms.
  double h_c0 = 0;
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 12; ++j)
      for (int l = 0; l < 12; ++l) {
        C w = std::polar(H.support_radius * (j + 0.5) / 12, 2 * pi * l / 12);
        h_c0 = std::max(h_c0, std::abs(H(double(i) / 16, w)));
      }
  const Slice& s1 = core->slices.back();
  double s1_c0 = 0;
  for (double wv : s1.W) s1_c0 = std::max(s1_c0, std::abs(wv));
  auto S1 = [&](C z) { return core->sdata(s1, z).S; };
  auto G1 = [&](C z) { return core->sdata(s1, z).g; };
  double s1_c2 = s1_c0, hh = 1e-5;
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 8; ++j) {
      C z = std::polar((core->grid.R - 0.02) * (i + 0.5) / 12,
                       2 * pi * (j + 0.25) / 8);
      C g = G1(z);
      s1_c2 = std::max({s1_c2, std::abs(g), std::abs(S1(z))});
      C gx = (G1(z + hh) - G1(z - hh)) / (2 * hh);
      C gy = (G1(z + C(0, hh)) - G1(z - C(0, hh))) / (2 * hh);
      s1_c2 = std::max({s1_c2, std::abs(gx), std::abs(gy)});
    }

  if (s1_c2 > eps / 4 || h_c0 >= eps) {
    std::ostringstream os;
    os << "flatten_near_fixed_point: smallness requirements fail: |S_1|_C2 = "
       << s1_c2 << " (limit " << eps / 4 << "), |H|_C0 = " << h_c0
       << " (limit " << eps << ")";
    throw std::invalid_argument(os.str());
  }

  FlattenFamily fam;
  fam.r = r;
  fam.eps = eps;
  fam.h_c0 = h_c0;
  fam.s1_c0 = s1_c0;
  fam.s1_c2 = s1_c2;
  double support = std::min(0.97, std::max(H.support_radius, 2 * r / 3) + 0.03);
  fam.member = [core, support](double lam) {
    lift::TimePeriodicHamiltonian out;
    out.support_radius = support;
    out.value = [core, lam](double t, C u) { return core->value(lam, t, u); };
    out.grad_value = [core, lam](double t, C u) {
      double h = 3e-5;
      double vx = core->value(lam, t, u + h) - core->value(lam, t, u - h);
      double vy =
          core->value(lam, t, u + C(0, h)) - core->value(lam, t, u - C(0, h));
      return C(vx / (2 * h), vy / (2 * h));
    };
    return out;
  };
  return fam;
}

}  // namespace caplab::gen
