#include "caplab/reeb.hpp"

#include <algorithm>
#include <cmath>

namespace caplab::reeb {

using num::jmul;
using num::pi;

std::function<Vec4(const Vec4&)> reeb_field(const ContactAmplitude& amp) {
  dom::Field3 g = amp.g;
  return [g](const Vec4& z) {
    double gv = g.value(z);
    if (!(gv > 0)) throw std::runtime_error("not star-shaped at node: g <= 0");
    Vec4 w = g.grad(z) / gv;  // gradient of log g, tangent to S^3
    Vec4 iz = jmul(z), iw = jmul(w);
    return Vec4((2.0 * iz - iw + z.dot(iw) * z) / gv);
  };
}

namespace {
struct SphereProj {
  void operator()(Vec4& z) const { z /= z.norm(); }
};
}  // namespace

Vec4 reeb_flow(const ContactAmplitude& amp, double t, const Vec4& z,
               const num::IntegratorConfig& cfg) {
  auto R = reeb_field(amp);
  auto field = [&R](double, const Vec4& p) { return R(p); };
  return num::integrate_adaptive(field, 0.0, t, Vec4(z), cfg, SphereProj{},
                                 num::NullObs{});
}

double orbit_action(const ContactAmplitude& amp, double period, const Vec4& z,
                    const num::IntegratorConfig& cfg) {
  auto R = reeb_field(amp);
  dom::Field3 g = amp.g;
  using State5 = Eigen::Matrix<double, 5, 1>;
  auto field = [&](double, const State5& y) {
    Vec4 p = y.head<4>();
    p /= p.norm();
    Vec4 v = R(p);
    State5 dy;
    dy.head<4>() = v;
    dy[4] = g.value(p) * num::lambda0(p, v);  // alpha(zdot)
    return dy;
  };
  State5 y0;
  y0.head<4>() = z;
  y0[4] = 0;
  auto proj = [](State5& y) { y.head<4>() /= y.head<4>().norm(); };
  State5 yf = num::integrate_adaptive(field, 0.0, period, y0, cfg, proj,
                                      num::NullObs{});
  return yf[4];
}

std::optional<ClosedReebOrbit> certified_orbit(const ContactAmplitude& amp,
                                               const Vec4& seed,
                                               double period_guess,
                                               double tol) {
  num::IntegratorConfig coarse;
  coarse.rel_tol = 1e-11;
  coarse.abs_tol = 1e-13;
  num::FlowFn flow = [&amp, &coarse](double t, const Vec4& z) {
    return reeb_flow(amp, t, z, coarse);
  };
  auto res = num::find_closed_orbit(flow, seed, period_guess, tol);
  if (!res) return std::nullopt;
  // Certification: re-integrate at 10x tighter tolerance.
  num::IntegratorConfig fine = coarse;
  fine.rel_tol /= 10;
  fine.abs_tol /= 10;
  Vec4 back = reeb_flow(amp, res->period, res->point, fine);
  double resid = (back - res->point).norm();
  ClosedReebOrbit orbit;
  orbit.basepoint = res->point;
  orbit.period = res->period;
  orbit.residual = resid;
  orbit.certified = resid < tol;
  num::C2 zc = num::to_c2(res->point);
  orbit.fiber_flag = std::min(std::abs(zc.z1), std::abs(zc.z2)) < 1e-6;
  if (!orbit.certified) return std::nullopt;
  return orbit;
}

double contact_volume(const ContactAmplitude& amp, const num::S3Rule& rule) {
  dom::Field3 g = amp.g;
  return num::integrate_s3(
      [&g](const Vec4& z) {
        double v = g.value(z);
        return v * v;
      },
      rule);
}

std::pair<double, double> amplitude_extremes(const ContactAmplitude& amp,
                                             const num::S3Rule& rule) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  double chi_lo = 0, chi_hi = 0;
  for (int i = 0; i < rule.n_beta; ++i)
    for (int j = 0; j < rule.n_chi; ++j) {
      double v = amp.g.value(rule.pts[rule.index(i, j, 0)]);
      if (v < lo) {
        lo = v;
        chi_lo = rule.chi[j];
      }
      if (v > hi) {
        hi = v;
        chi_hi = rule.chi[j];
      }
    }
  // Polish along beta at the best chi (covers the poles, which the Gauss grid
  // does not contain); for invariant amplitudes this is the exact profile.
  auto polish = [&](double chi, bool maximize) {
    auto prof = [&](double b) {
      double v = amp.g.value(num::hopf_point(b, chi, 0.3));
      return maximize ? -v : v;
    };
    auto [x, fx] = num::minimize_scalar(prof, 0.0, pi / 2);
    double best = maximize ? -fx : fx;
    for (double b : {0.0, pi / 2}) {
      double v = amp.g.value(num::hopf_point(b, chi, 0.3));
      if (maximize ? v > best : v < best) best = v;
    }
    (void)x;
    return best;
  };
  lo = std::min(lo, polish(chi_lo, false));
  hi = std::max(hi, polish(chi_hi, true));
  return {lo, hi};
}

SystolicReport systole(const ContactAmplitude& amp, const SearchConfig& cfg,
                       const num::S3Rule& rule) {
  SystolicReport rep;
  rep.contact_volume = contact_volume(amp, rule);

  std::vector<ClosedReebOrbit> found;
  if (amp.invariant) {
    // Exact route: the minimal period is pi * min(g), attained on the critical
    // fiber through the minimizing base point.  Locate the minimizer on the
    // base grid (with polish along beta), seed there, and certify.
    double best = std::numeric_limits<double>::infinity();
    double bbeta = 0, bchi = 0;
    for (int i = 0; i < rule.n_beta; ++i)
      for (int j = 0; j < rule.n_chi; ++j) {
        double v = amp.g.value(rule.pts[rule.index(i, j, 0)]);
        if (v < best) {
          best = v;
          bbeta = rule.beta[i];
          bchi = rule.chi[j];
        }
      }
    auto prof = [&](double b) {
      return amp.g.value(num::hopf_point(b, bchi, 0.0));
    };
    auto [bx, bv] = num::minimize_scalar(prof, 0.0, pi / 2);
    if (bv < best) {
      best = bv;
      bbeta = bx;
    }
    for (double b : {0.0, pi / 2}) {
      double v = prof(b);
      if (v < best) {
        best = v;
        bbeta = b;
      }
    }
    Vec4 seed = num::hopf_point(bbeta, bchi, 0.0);
    double predicted = pi * best;
    auto orbit = certified_orbit(amp, seed, predicted, cfg.tol * 1e3);
    if (orbit && std::abs(orbit->period - predicted) < 1e-6 * (1 + predicted)) {
      found.push_back(*orbit);
      rep.systole = predicted;  // exact invariant value, cross-validated
      rep.status = SystolicReport::Status::ok;
    } else if (orbit) {
      found.push_back(*orbit);
      rep.systole = orbit->period;
      rep.status = SystolicReport::Status::ok;
    }
  } else {
    // Seed-grid search over Hopf tori.
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < cfg.seed_beta; ++i) {
      double beta = (i + 0.5) * (pi / 2) / cfg.seed_beta;
      for (int j = 0; j < cfg.seed_angles; ++j) {
        double chi = j * 2 * pi / cfg.seed_angles;
        Vec4 seed = num::hopf_point(beta, chi, 0.0);
        double g0 = amp.g.value(seed);
        for (double guess = pi * g0; guess < cfg.period_ceiling; guess *= 2) {
          auto orbit = certified_orbit(amp, seed, guess, cfg.tol * 1e3);
          if (orbit && orbit->period < cfg.period_ceiling) {
            found.push_back(*orbit);
            best = std::min(best, orbit->period);
            break;
          }
        }
      }
    }
    if (std::isfinite(best)) {
      rep.systole = best;
      rep.status = SystolicReport::Status::ok;
    }
  }
  rep.orbits = std::move(found);
  if (rep.status == SystolicReport::Status::ok && rep.contact_volume > 0)
    rep.ratio = rep.systole * rep.systole / rep.contact_volume;
  return rep;
}

SystolicReport systolic_ratio(const ContactAmplitude& amp,
                              const SearchConfig& cfg,
                              const num::S3Rule& rule) {
  return systole(amp, cfg, rule);
}

}  // namespace caplab::reeb
