#include "caplab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace caplab::spectral {

namespace {

constexpr double kPi = num::pi;

// Base coordinates (beta, chi) of a point on S^3 (away from the poles).
std::pair<double, double> base_coords(const Vec4& z) {
  const double r1 = std::hypot(z[0], z[1]);
  const double r2 = std::hypot(z[2], z[3]);
  const double beta = std::atan2(r2, r1);
  double chi = std::atan2(z[3], z[2]) - std::atan2(z[1], z[0]);
  chi = chi - 2 * kPi * std::floor(chi / (2 * kPi));
  return {beta, chi};
}

Vec4 base_point(double beta, double chi) {
  return num::hopf_point(beta, chi, 0.0);
}

// Ambient gradient of g at z (tangent to S^3 for the normalized extension).
Vec4 amp_grad(const dom::ContactAmplitude& amp, const Vec4& z) {
  return amp.g.grad(z);
}

}  // namespace

std::function<double(const Vec4&)> AveragedField::as_field() const {
  const std::vector<double> b = beta, c = chi, v = base_values;
  const int nb = n_beta, nc = n_chi;
  return [b, c, v, nb, nc](const Vec4& z) {
    auto [zb, zc] = base_coords(z);
    int ib = 0, ic = 0;
    double db = std::numeric_limits<double>::infinity();
    for (int i = 0; i < nb; ++i)
      if (std::abs(b[i] - zb) < db) db = std::abs(b[i] - zb), ib = i;
    double dc = std::numeric_limits<double>::infinity();
    for (int j = 0; j < nc; ++j) {
      double d = std::abs(c[j] - zc);
      d = std::min(d, 2 * kPi - d);
      if (d < dc) dc = d, ic = j;
    }
    if (db > 1e-9 || dc > 1e-9)
      throw std::invalid_argument(
          "averaged field lookup off the product grid");
    return v[ib * nc + ic];
  };
}

AveragedField fiber_average(const std::function<double(const Vec4&)>& field,
                            const num::S3Rule& rule) {
  AveragedField out;
  out.n_beta = rule.n_beta;
  out.n_chi = rule.n_chi;
  out.beta = rule.beta;
  out.chi = rule.chi;
  out.base_values.assign(
      static_cast<std::size_t>(rule.n_beta) * rule.n_chi, 0.0);
  for (int i = 0; i < rule.n_beta; ++i)
    for (int j = 0; j < rule.n_chi; ++j) {
      double acc = 0;
      for (int k = 0; k < rule.n_fiber; ++k)
        acc += field(rule.pts[rule.index(i, j, k)]);
      out.base_values[i * rule.n_chi + j] = acc / rule.n_fiber;
    }
  return out;
}

AveragedField fiber_average(const AveragedField& field,
                            const num::S3Rule& rule) {
  return fiber_average(field.as_field(), rule);
}

ShortOrbitReport short_orbits_from_average(const dom::ContactAmplitude& amp,
                                           const ShortOrbitConfig& cfg) {
  if (!amp.invariant)
    throw std::invalid_argument(
        "short-orbit detection requires an S^1-invariant amplitude");
  ShortOrbitReport rep;

  // Grid of |grad g|^2 over the base.
  const int nb = cfg.n_beta, nc = cfg.n_chi;
  std::vector<double> gg(static_cast<std::size_t>(nb) * nc);
  std::size_t small = 0;
  for (int i = 0; i < nb; ++i) {
    const double beta = (i + 0.5) * (kPi / 2) / nb;
    for (int j = 0; j < nc; ++j) {
      const double chi = 2 * kPi * j / nc;
      const double v = amp_grad(amp, base_point(beta, chi)).squaredNorm();
      gg[i * nc + j] = v;
      if (v < cfg.grad_tol * cfg.grad_tol) ++small;
    }
  }
  rep.degenerate_critical_set =
      small > cfg.degenerate_fraction * gg.size();

  std::vector<Vec4> criticals;
  auto push_unique = [&criticals](const Vec4& z) {
    for (const Vec4& c : criticals) {
      if ((c - z).norm() < 1e-3 || (c + z).norm() < 1e-3) return;
      // Same fiber: compare up to the fiber phase e^{2it} (diag action).
      const num::C2 a = num::to_c2(c), b = num::to_c2(z);
      const num::C cross =
          a.z1 * std::conj(b.z1) + a.z2 * std::conj(b.z2);
      if (std::abs(std::abs(cross) - 1.0) < 1e-6) return;
    }
    criticals.push_back(z);
  };

  if (rep.degenerate_critical_set) {
    // Critical set beyond isolated fibers: certify spread-out samples only.
    const int want = cfg.max_certificates;
    for (int q = 0; q < want; ++q) {
      const double beta = (q + 0.7) * (kPi / 2) / want;
      const double chi = 2 * kPi * ((q * 7) % want) / want;
      push_unique(base_point(beta, chi));
    }
  } else {
    // Poles are base points the (beta, chi) grid misses.
    for (const Vec4& pole :
         {Vec4(1, 0, 0, 0), Vec4(0, 0, 1, 0)})
      if (amp_grad(amp, pole).norm() < cfg.grad_tol) push_unique(pole);

    // Interior local minima of |grad g|^2, polished by Newton on the
    // base-frame components of grad g.
    for (int i = 0; i < nb; ++i)
      for (int j = 0; j < nc; ++j) {
        const double v = gg[i * nc + j];
        if (v > 2.5e-3) continue;
        bool is_min = true;
        for (int di = -1; di <= 1 && is_min; ++di)
          for (int dj = -1; dj <= 1; ++dj) {
            if (di == 0 && dj == 0) continue;
            const int ii = i + di;
            if (ii < 0 || ii >= nb) continue;
            const int jj = (j + dj + nc) % nc;
            if (gg[ii * nc + jj] < v) {
              is_min = false;
              break;
            }
          }
        if (!is_min) continue;
        double beta = (i + 0.5) * (kPi / 2) / nb;
        double chi = 2 * kPi * j / nc;
        auto F = [&amp](double b, double ch) -> num::Vec2 {
          const Vec4 z = base_point(b, ch);
          const Vec4 g = amp_grad(amp, z);
          const Vec4 eb(-std::sin(b), 0, std::cos(b) * std::cos(ch),
                        std::cos(b) * std::sin(ch));
          const Vec4 ec(0, 0, -std::sin(b) * std::sin(ch),
                        std::sin(b) * std::cos(ch));
          return num::Vec2(g.dot(eb), g.dot(ec));
        };
        bool ok = false;
        for (int it = 0; it < 40; ++it) {
          const num::Vec2 f0 = F(beta, chi);
          if (amp_grad(amp, base_point(beta, chi)).norm() < cfg.grad_tol) {
            ok = true;
            break;
          }
          const double h = 1e-6;
          Eigen::Matrix2d J;
          J.col(0) = (F(beta + h, chi) - F(beta - h, chi)) / (2 * h);
          J.col(1) = (F(beta, chi + h) - F(beta, chi - h)) / (2 * h);
          const num::Vec2 step = J.fullPivLu().solve(f0);
          if (!step.allFinite()) break;
          const double cap = 0.1;
          const double sn = step.norm();
          const double sc = sn > cap ? cap / sn : 1.0;
          beta -= sc * step[0];
          chi -= sc * step[1];
          if (beta < 1e-4 || beta > kPi / 2 - 1e-4) break;  // pole handled
        }
        if (ok) push_unique(base_point(beta, chi));
      }
  }

  for (const Vec4& z : criticals) {
    if (static_cast<int>(rep.orbits.size()) >= cfg.max_certificates) break;
    ShortOrbitCertificate cert;
    cert.basepoint = z;
    cert.base_value = amp.g.value(z);
    cert.predicted_period = kPi * cert.base_value;
    const auto orbit =
        reeb::certified_orbit(amp, z, cert.predicted_period, cfg.cert_tol);
    if (orbit) {
      cert.integrated_period = orbit->period;
      cert.closure_residual = orbit->residual;
      cert.certified =
          std::abs(cert.integrated_period - cert.predicted_period) <
          cfg.cert_tol * (1 + cert.predicted_period);
    }
    rep.orbits.push_back(cert);
  }
  return rep;
}

std::pair<double, double> spectral_c0_c1(const dom::ContactAmplitude& amp,
                                         const num::S3Rule& rule) {
  if (!amp.invariant)
    throw std::invalid_argument(
        "closed-form spectral invariants require an S^1-invariant amplitude");
  const auto [lo, hi] = reeb::amplitude_extremes(amp, rule);
  return {kPi * lo, kPi * hi};
}

std::pair<double, double> spectral_c0_c1(const dom::Ellipsoid& e) {
  if (e.a.size() != 2)
    throw std::invalid_argument("closed form covers two factors only");
  return {std::min(e.a[0], e.a[1]), std::max(e.a[0], e.a[1])};
}

double bm_distance(const dom::Ellipsoid& e) {
  const auto [c0, c1] = spectral_c0_c1(e);
  return std::log(c1 / c0);
}

std::vector<dom::ContactAmplitude> geodesic_path(
    const dom::ContactAmplitude& target, int steps) {
  if (steps < 2) throw std::invalid_argument("geodesic needs >= 2 samples");
  std::vector<dom::ContactAmplitude> out;
  const dom::Field3 g = target.g;
  for (int j = 0; j < steps; ++j) {
    const double t = static_cast<double>(j) / (steps - 1);
    dom::Field3 f;
    f.value = [g, t](const Vec4& z) { return std::pow(g.value(z), t); };
    if (g.has_gradient()) {
      f.gradient = [g, t](const Vec4& z) -> Vec4 {
        return t * std::pow(g.value(z), t - 1) * g.gradient(z);
      };
    }
    out.push_back({f, target.invariant});
  }
  return out;
}

double grid_oscillation(const std::function<double(const Vec4&)>& f,
                        const num::S3Rule& rule) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const Vec4& z : rule.pts) {
    const double v = f(z);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi - lo;
}

TelescopingReport telescoping_check(
    const std::function<double(const Vec4&)>& f,
    const std::vector<double>& partition, const num::S3Rule& rule) {
  if (partition.size() < 2 ||
      !std::is_sorted(partition.begin(), partition.end()))
    throw std::invalid_argument("partition must be sorted with >= 2 nodes");
  TelescopingReport rep;
  rep.total_osc = grid_oscillation(
      [&f, &partition](const Vec4& z) {
        return (partition.back() - partition.front()) * f(z);
      },
      rule);
  for (std::size_t j = 1; j < partition.size(); ++j) {
    const double dt = partition[j] - partition[j - 1];
    rep.segments.push_back(grid_oscillation(
        [&f, dt](const Vec4& z) { return dt * f(z); }, rule));
    rep.segment_sum += rep.segments.back();
  }
  return rep;
}

BMReport bm_distance_near_zoll(const dom::ContactAmplitude& amp,
                               const BMConfig& cfg) {
  BMReport rep;
  const num::S3Rule rule = num::s3_rule(cfg.n_beta, cfg.n_chi, 8);
  const auto [lo, hi] = reeb::amplitude_extremes(amp, rule);
  rep.osc_log_g = std::log(hi) - std::log(lo);
  rep.t_min = kPi * lo;
  rep.t_max = kPi * hi;
  rep.distance = std::log(rep.t_max / rep.t_min);
  rep.geodesic = geodesic_path(amp, cfg.geodesic_steps);
  if (!amp.invariant) return rep;  // periods not certifiable here

  // The extrema of an invariant base function are critical, so both extreme
  // fibers are short orbits with exactly the extreme periods; certify them by
  // integration.
  auto locate = [&](bool maximize) -> Vec4 {
    double best = maximize ? -1e300 : 1e300;
    Vec4 bz = Vec4(1, 0, 0, 0);
    for (int i = 0; i < cfg.n_beta; ++i)
      for (int j = 0; j < cfg.n_chi; ++j) {
        const Vec4 z = base_point((i + 0.5) * (kPi / 2) / cfg.n_beta,
                                  2 * kPi * j / cfg.n_chi);
        const double v = amp.g.value(z);
        if (maximize ? v > best : v < best) best = v, bz = z;
      }
    auto [bb, bc] = base_coords(bz);
    auto prof = [&](double b) {
      const double v = amp.g.value(base_point(b, bc));
      return maximize ? -v : v;
    };
    auto [pb, pv] = num::minimize_scalar(prof, 0.0, kPi / 2);
    double val = maximize ? -pv : pv;
    Vec4 out = base_point(pb, bc);
    for (const Vec4& pole : {Vec4(1, 0, 0, 0), Vec4(0, 0, 1, 0)}) {
      const double v = amp.g.value(pole);
      if (maximize ? v > val : v < val) val = v, out = pole;
    }
    return out;
  };
  const Vec4 zmin = locate(false), zmax = locate(true);
  const double cert_min = kPi * amp.g.value(zmin);
  const double cert_max = kPi * amp.g.value(zmax);
  const auto omin = reeb::certified_orbit(amp, zmin, cert_min, cfg.cert_tol);
  const auto omax = reeb::certified_orbit(amp, zmax, cert_max, cfg.cert_tol);
  if (omin && omax &&
      std::abs(omin->period - cert_min) < cfg.cert_tol * (1 + cert_min) &&
      std::abs(omax->period - cert_max) < cfg.cert_tol * (1 + cert_max))
    rep.status = Status::certified;
  return rep;
}

CorollaryReport systolic_corollary_check(const dom::ContactAmplitude& amp,
                                         double equality_tol) {
  CorollaryReport rep;
  const num::S3Rule rule = num::s3_rule(48, 48, 8);
  const reeb::SystolicReport sys =
      reeb::systolic_ratio(amp, reeb::SearchConfig{}, rule);
  rep.ratio = sys.ratio;
  rep.status = sys.status == reeb::SystolicReport::Status::ok
                   ? Status::certified
                   : Status::inconclusive;
  const auto [lo, hi] = reeb::amplitude_extremes(amp, rule);
  rep.osc_g = hi - lo;
  rep.near_zoll = rep.osc_g <= 0.2;
  rep.bound_ok = rep.ratio <= 1 + equality_tol;
  rep.equality = std::abs(rep.ratio - 1) <= equality_tol;
  rep.constant_g = rep.osc_g <= 1e-9;
  return rep;
}

}  // namespace caplab::spectral
