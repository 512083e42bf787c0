#include "caplab/anosov_katok.hpp"

#include "caplab/reeb.hpp"
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace caplab::ak {

using num::pi;
using Vec5 = Eigen::Matrix<double, 5, 1>;

Rational::Rational(long long num, long long den) : p(num), q(den) {
  if (q == 0) throw std::invalid_argument("rational with zero denominator");
  if (q < 0) {
    p = -p;
    q = -q;
  }
  long long g = std::gcd(p < 0 ? -p : p, q);
  if (g > 1) {
    p /= g;
    q /= g;
  }
}

std::pair<long long, long long> reduced_ratio(const Rational& a,
                                              const Rational& b) {
  if (a.p <= 0 || b.p <= 0)
    throw std::invalid_argument("ellipsoid rationals must be positive");
  long long P = a.p * b.q, Q = a.q * b.p;
  long long g = std::gcd(P, Q);
  return {P / g, Q / g};
}

// t is a period of the fiber z_i exactly when t is an integer multiple of the
// respective axis period, so the common period is the rational lcm.
Rational common_period(const Rational& a, const Rational& b) {
  if (a.p <= 0 || b.p <= 0)
    throw std::invalid_argument("ellipsoid rationals must be positive");
  long long num = std::lcm(a.p, b.p);
  long long den = std::gcd(a.q, b.q);
  return Rational(num, den);
}

Vec4 ellipsoid_exact_flow(const Rational& a, const Rational& b, double t,
                          const Vec4& z) {
  auto phase = [t](const Rational& r) {
    double u = t * static_cast<double>(r.q) / static_cast<double>(r.p);
    u -= std::floor(u);
    return 2 * pi * u;
  };
  double t1 = phase(a), t2 = phase(b);
  double c1 = std::cos(t1), s1 = std::sin(t1);
  double c2 = std::cos(t2), s2 = std::sin(t2);
  return Vec4(c1 * z[0] - s1 * z[1], s1 * z[0] + c1 * z[1],
              c2 * z[2] - s2 * z[3], s2 * z[2] + c2 * z[3]);
}

namespace {

Vec4 jmul(const Vec4& z) { return Vec4(-z[1], z[0], -z[3], z[2]); }

double wrap_angle(double x) { return std::remainder(x, 2 * pi); }

// Quasi-uniform S^3 points from the plastic-constant lattice in Hopf
// coordinates (equal-measure transform in beta).
Vec4 lattice_point(int k) {
  constexpr double a1 = 0.8191725133961644;   // 1/g, g^3 = g + 1
  constexpr double a2 = 0.6710436067037892;   // 1/g^2
  constexpr double a3 = 0.5497004779019701;   // 1/g^3
  auto frac = [](double x) { return x - std::floor(x); };
  double u1 = frac(0.5 + a1 * (k + 1));
  double u2 = frac(0.5 + a2 * (k + 1));
  double u3 = frac(0.5 + a3 * (k + 1));
  double beta = std::asin(std::sqrt(u1));
  return num::hopf_point(beta, 2 * pi * u2, pi * u3);
}

struct FlowContext {
  ContactHamiltonian K;
  dom::ContactAmplitude amp;
  std::function<Vec4(const Vec4&)> R;

  FlowContext(ContactHamiltonian k, const Rational& a, const Rational& b)
      : K(std::move(k)),
        amp(dom::ellipsoid_amplitude(a.value(), b.value())),
        R(reeb::reeb_field(amp)) {}

  // X = K R + Y with Y in ker(alpha) solving iota_Y d(alpha) = -dK there;
  // in a unitary frame (e1, e2 = i e1) of ker(alpha0), d(alpha)(e1, e2) = g.
  Vec4 field(const Vec4& zin, double* mu = nullptr) const {
    Vec4 z = zin.normalized();
    double kv = K.K.value(z);
    Vec4 gr = K.K.grad(z);
    Vec4 Rz = R(z);
    if (mu) *mu = gr.dot(Rz);
    if (kv == 0 && gr.isZero(0)) return Vec4::Zero();
    Vec4 iz = jmul(z);
    Vec4 u = Vec4::UnitX();
    Vec4 e1 = u - u.dot(z) * z - u.dot(iz) * iz;
    if (e1.squaredNorm() < 0.25) {
      u = Vec4::Unit(2);
      e1 = u - u.dot(z) * z - u.dot(iz) * iz;
    }
    e1.normalize();
    Vec4 e2 = jmul(e1);
    double g = amp.g.value(z);
    double y1 = -gr.dot(e2) / g;
    double y2 = gr.dot(e1) / g;
    return kv * Rz + y1 * e1 + y2 * e2;
  }
};

Vec4 flow_map(const FlowContext& ctx, double t, const Vec4& z,
              const num::IntegratorConfig& cfg) {
  auto field = [&ctx](double, const Vec4& y) { return ctx.field(y); };
  auto proj = [](Vec4& y) { y.normalize(); };
  return num::integrate_adaptive(field, 0.0, t, z, cfg, proj, num::NullObs{});
}

std::pair<Vec4, double> flow_map_log(const FlowContext& ctx, double t,
                                     const Vec4& z,
                                     const num::IntegratorConfig& cfg) {
  auto field = [&ctx](double, const Vec5& y) {
    Vec4 zz = y.head<4>();
    double mu = 0;
    Vec4 X = ctx.field(zz, &mu);
    Vec5 dy;
    dy << X[0], X[1], X[2], X[3], mu;
    return dy;
  };
  auto proj = [](Vec5& y) { y.head<4>().normalize(); };
  Vec5 y0;
  y0 << z[0], z[1], z[2], z[3], 0.0;
  Vec5 yf = num::integrate_adaptive(field, 0.0, t, y0, cfg, proj,
                                    num::NullObs{});
  return {Vec4(yf.head<4>()), yf[4]};
}

}  // namespace

ContactHamiltonian fiber_average_hamiltonian(const dom::Field3& K_raw,
                                             const Rational& a,
                                             const Rational& b, int n_nodes,
                                             double tube_tau) {
  double T = common_period(a, b).value();
  int n = n_nodes > 0
              ? n_nodes
              : std::clamp(static_cast<int>(32 * std::ceil(T)), 128, 8192);
  Rational ac = a, bc = b;
  double t2 = tube_tau;

  auto mask = [t2](double tau) {
    return num::cinf_step(tau / (2 * t2) - 1) *
           num::cinf_step((1 - tau) / (2 * t2) - 1);
  };
  auto mask_prime = [t2](double tau) {
    return num::cinf_step_prime(tau / (2 * t2) - 1) / (2 * t2) *
               num::cinf_step((1 - tau) / (2 * t2) - 1) -
           num::cinf_step(tau / (2 * t2) - 1) *
               num::cinf_step_prime((1 - tau) / (2 * t2) - 1) / (2 * t2);
  };

  dom::Field3 K;
  K.value = [K_raw, ac, bc, T, n, mask](const Vec4& z) {
    double n2 = z.squaredNorm();
    double tau = (z[0] * z[0] + z[1] * z[1]) / n2;
    double m = mask(tau);
    if (m == 0) return 0.0;
    double acc = 0;
    for (int k = 0; k < n; ++k)
      acc += K_raw.value(ellipsoid_exact_flow(ac, bc, T * k / n, z));
    return m * acc / n;
  };
  if (K_raw.has_gradient()) {
    K.gradient = [K_raw, ac, bc, T, n, mask, mask_prime](const Vec4& z) {
      double n2 = z.squaredNorm();
      double tau = (z[0] * z[0] + z[1] * z[1]) / n2;
      double m = mask(tau);
      double mp = mask_prime(tau);
      if (m == 0 && mp == 0) return Vec4(Vec4::Zero());
      double acc = 0;
      Vec4 gacc = Vec4::Zero();
      for (int k = 0; k < n; ++k) {
        double t = T * k / n;
        Vec4 w = ellipsoid_exact_flow(ac, bc, t, z);
        acc += K_raw.value(w);
        // grad of K_raw composed with the (unitary) flow: rotate back.
        Vec4 gw = K_raw.gradient(w);
        gacc += ellipsoid_exact_flow(ac, bc, -t, gw);
      }
      acc /= n;
      gacc /= n;
      Vec4 gtau =
          (2.0 / n2) * (Vec4(z[0], z[1], 0, 0) - tau * z);
      return Vec4(mp * acc * gtau + m * gacc);
    };
  }
  ContactHamiltonian out;
  out.K = std::move(K);
  out.invariant = true;
  return out;
}

Vec4 contact_field(const ContactHamiltonian& K, const dom::ContactAmplitude& amp,
                   const Vec4& z) {
  FlowContext ctx{K, Rational(1, 1), Rational(1, 1)};
  ctx.amp = amp;
  ctx.R = reeb::reeb_field(ctx.amp);
  return ctx.field(z);
}

Vec4 contact_flow(const ContactHamiltonian& K, const Rational& a,
                  const Rational& b, double t, const Vec4& z,
                  const num::IntegratorConfig& cfg) {
  FlowContext ctx{K, a, b};
  return flow_map(ctx, t, z, cfg);
}

std::pair<Vec4, double> contact_flow_log_factor(const ContactHamiltonian& K,
                                                const Rational& a,
                                                const Rational& b, double t,
                                                const Vec4& z,
                                                const num::IntegratorConfig& cfg) {
  FlowContext ctx{K, a, b};
  return flow_map_log(ctx, t, z, cfg);
}

double invariance_defect(const ContactHamiltonian& K, const Rational& a,
                         const Rational& b, int n_samples) {
  auto amp = dom::ellipsoid_amplitude(a.value(), b.value());
  auto R = reeb::reeb_field(amp);
  double worst = 0;
  for (int k = 0; k < n_samples; ++k) {
    Vec4 z = lattice_point(k);
    worst = std::max(worst, std::abs(K.K.grad(z).dot(R(z))));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Stage maps
// ---------------------------------------------------------------------------

ContactHamiltonian StageMap::hamiltonian() const {
  std::vector<Finger> fs = fingers;
  long long Pc = P, Qc = Q;

  auto window = [](const Finger& f, double tau, double& W, double& dW) {
    double lo = std::min(f.tau_source, f.tau_target);
    double hi = std::max(f.tau_source, f.tau_target);
    double r = f.ramp;
    if (tau <= lo - r || tau >= hi + r) {
      W = dW = 0;
      return false;
    }
    double su = num::cinf_step((tau - (lo - r)) / r);
    double sd = num::cinf_step(((hi + r) - tau) / r);
    W = su * sd;
    dW = num::cinf_step_prime((tau - (lo - r)) / r) / r * sd -
         su * num::cinf_step_prime(((hi + r) - tau) / r) / r;
    return true;
  };

  dom::Field3 K;
  K.value = [fs, Pc, Qc](const Vec4& z) {
    double n2 = z.squaredNorm();
    double tau = (z[0] * z[0] + z[1] * z[1]) / n2;
    double acc = 0;
    bool have_eta = false;
    double eta = 0;
    for (const auto& f : fs) {
      double lo = std::min(f.tau_source, f.tau_target);
      double hi = std::max(f.tau_source, f.tau_target);
      if (tau <= lo - f.ramp || tau >= hi + f.ramp) continue;
      if (!have_eta) {
        eta = Pc * std::atan2(z[1], z[0]) - Qc * std::atan2(z[3], z[2]);
        have_eta = true;
      }
      double x = wrap_angle(eta - f.eta_center) / f.eta_halfwidth;
      if (x <= -1 || x >= 1) continue;
      double su = num::cinf_step((tau - (lo - f.ramp)) / f.ramp);
      double sd = num::cinf_step(((hi + f.ramp) - tau) / f.ramp);
      acc += f.amplitude * su * sd * num::cinf_bump(x);
    }
    return acc;
  };
  K.gradient = [fs, Pc, Qc, window](const Vec4& z) {
    double n2 = z.squaredNorm();
    double tau = (z[0] * z[0] + z[1] * z[1]) / n2;
    Vec4 acc = Vec4::Zero();
    bool have = false;
    double eta = 0;
    Vec4 gtau = Vec4::Zero(), geta = Vec4::Zero();
    for (const auto& f : fs) {
      double W, dW;
      if (!window(f, tau, W, dW)) continue;
      if (!have) {
        eta = Pc * std::atan2(z[1], z[0]) - Qc * std::atan2(z[3], z[2]);
        double r1 = z[0] * z[0] + z[1] * z[1];
        double r2 = z[2] * z[2] + z[3] * z[3];
        gtau = (2.0 / n2) * (Vec4(z[0], z[1], 0, 0) - tau * z);
        geta = Vec4(-Pc * z[1] / r1, Pc * z[0] / r1, Qc * z[3] / r2,
                    -Qc * z[2] / r2);
        have = true;
      }
      double x = wrap_angle(eta - f.eta_center) / f.eta_halfwidth;
      if (x <= -1 || x >= 1) continue;
      double V = num::cinf_bump(x);
      double dV = num::cinf_bump_prime(x) / f.eta_halfwidth;
      acc += f.amplitude * (dW * V * gtau + W * dV * geta);
    }
    return acc;
  };

  ContactHamiltonian out;
  out.K = std::move(K);
  out.invariant = true;
  return out;
}

Vec4 stage_forward(const StageMap& m, const Vec4& z,
                   const num::IntegratorConfig& cfg) {
  if (m.trivial()) return z;
  FlowContext ctx{m.hamiltonian(), m.a, m.b};
  return flow_map(ctx, 1.0, z, cfg);
}

Vec4 stage_backward(const StageMap& m, const Vec4& z,
                    const num::IntegratorConfig& cfg) {
  if (m.trivial()) return z;
  FlowContext ctx{m.hamiltonian(), m.a, m.b};
  return flow_map(ctx, -1.0, z, cfg);
}

ConjugationState initial_state(const Rational& a0, const Rational& b0) {
  ConjugationState s;
  s.a = a0;
  s.b = b0;
  return s;
}

namespace {

// Launch point of a finger: on the marked fiber, eta on the slope of V.
Vec4 finger_launch(const Finger& f, long long P) {
  double eta0 = f.eta_center + f.slope_offset;
  double phi1 = eta0 / static_cast<double>(P);
  double r1 = std::sqrt(f.tau_source);
  double r2 = std::sqrt(1 - f.tau_source);
  return Vec4(r1 * std::cos(phi1), r1 * std::sin(phi1), r2, 0);
}

double landing_tau(const StageMap& m, const Finger& f,
                   const num::IntegratorConfig& cfg) {
  StageMap solo = m;
  solo.fingers = {f};
  Vec4 zf = stage_forward(solo, finger_launch(f, m.P), cfg);
  return (zf[0] * zf[0] + zf[1] * zf[1]) / zf.squaredNorm();
}

// Secant iteration on the finger strength until the marked fiber lands
// within tol of the target torus.
double tune_finger(StageMap& m, Finger& f, double tol,
                   const num::IntegratorConfig& cfg) {
  double dtau = f.tau_target - f.tau_source;
  double tau_mid = 0.5 * (f.tau_source + f.tau_target);
  double qbar =
      pi * (tau_mid / m.a.value() + (1 - tau_mid) / m.b.value());
  double slope = std::abs(num::cinf_bump_prime(0.6)) / f.eta_halfwidth;
  double rate =
      (2.0 * m.P * m.b.value() / pi) * qbar * qbar * slope;
  double c0 = std::abs(dtau) / rate;

  double c_prev = 0, err_prev = -dtau;
  double c = c0;
  for (int it = 0; it < 14; ++it) {
    f.amplitude = c;
    double err = landing_tau(m, f, cfg) - f.tau_target;
    if (std::abs(err) <= tol) return err;
    double denom = err - err_prev;
    double cn = (denom != 0) ? c - err * (c - c_prev) / denom : 1.5 * c;
    cn = std::clamp(cn, 0.05 * c0, 6.0 * c0);
    c_prev = c;
    err_prev = err;
    c = cn;
  }
  f.amplitude = c;
  double err = landing_tau(m, f, cfg) - f.tau_target;
  if (std::abs(err) > tol) {
    std::ostringstream os;
    os << "finger tuning stalled: landing error " << err << " exceeds " << tol
       << " at tau_source " << f.tau_source;
    throw std::runtime_error(os.str());
  }
  return err;
}

double chained_factor(const std::vector<StageMap>& maps, Vec4& w,
                      const num::IntegratorConfig& cfg) {
  double log_u = 0;
  for (const auto& m : maps) {
    if (m.trivial()) continue;
    FlowContext ctx{m.hamiltonian(), m.a, m.b};
    auto amp = ctx.amp;
    auto [w2, L] = flow_map_log(ctx, 1.0, w, cfg);
    log_u += L + std::log(amp.g.value(w)) - std::log(amp.g.value(w2));
    w = w2;
  }
  return log_u;
}

}  // namespace

double pullback_amplitude(const ConjugationState& s, const Vec4& z) {
  num::IntegratorConfig cfg;
  Vec4 w = z.normalized();
  double log_u = chained_factor(s.maps, w, cfg);
  auto amp = dom::ellipsoid_amplitude(s.a.value(), s.b.value());
  return amp.g.value(w) * std::exp(log_u);
}

ConjugationState advance_stage(const ConjugationState& s,
                               const StagePlan& plan) {
  num::IntegratorConfig cfg;
  StageMap m;
  m.a = s.a;
  m.b = s.b;
  std::tie(m.P, m.Q) = reduced_ratio(s.a, s.b);

  double worst_landing = 0;
  if (!plan.ring_taus.empty()) {
    int n = static_cast<int>(plan.ring_taus.size());
    double spacing = 2 * pi / n;
    double halfw = plan.window_fraction * spacing;
    for (int i = 0; i < n; ++i) {
      Finger f;
      f.tau_source = plan.ring_taus[i];
      f.tau_target = plan.tau_target;
      f.eta_center = spacing * (i + 0.5);
      f.eta_halfwidth = halfw;
      double dir = (f.tau_target > f.tau_source) ? 1.0 : -1.0;
      f.slope_offset = dir * 0.6 * halfw;
      double lo = std::min(f.tau_source, f.tau_target);
      double hi = std::max(f.tau_source, f.tau_target);
      f.ramp = std::min({0.05, lo - 1.5 * s.tube_tau,
                         (1 - 1.5 * s.tube_tau) - hi});
      if (f.ramp <= 0.004)
        throw std::invalid_argument(
            "finger support would touch the Gamma tube");
      double err = tune_finger(m, f, plan.landing_tol, cfg);
      worst_landing = std::max(worst_landing, std::abs(err));
      m.fingers.push_back(f);
    }
  }

  // Conformal deviation of the assembled stage flow, sampled at the launch
  // points, mid-transport points, and a lattice batch.
  double dev = 0;
  if (!m.trivial()) {
    FlowContext ctx{m.hamiltonian(), m.a, m.b};
    std::vector<Vec4> samples;
    for (const auto& f : m.fingers) {
      samples.push_back(finger_launch(f, m.P));
      Finger mid = f;
      mid.tau_source = 0.5 * (f.tau_source + f.tau_target);
      samples.push_back(finger_launch(mid, m.P));
    }
    for (int k = 0; k < 16; ++k) samples.push_back(lattice_point(k));
    for (const auto& z : samples) {
      auto [w, L] = flow_map_log(ctx, 1.0, z, cfg);
      (void)w;
      dev = std::max(dev, std::abs(std::expm1(L)));
    }
  }

  ConjugationState s2 = s;
  s2.stage = s.stage + 1;
  s2.maps.push_back(m);
  s2.a = plan.next_a;
  s2.b = plan.next_b;

  double budget =
      plan.budget >= 0 ? plan.budget : std::ldexp(1.0, -s.stage);
  double gap = 0;
  for (int k = 0; k < plan.budget_samples; ++k) {
    Vec4 z = lattice_point(k);
    gap = std::max(gap,
                   std::abs(pullback_amplitude(s2, z) - pullback_amplitude(s, z)));
  }
  for (const auto& f : m.fingers) {
    for (double frac : {0.0, 0.5}) {
      Finger probe = f;
      probe.tau_source = f.tau_source + frac * (f.tau_target - f.tau_source);
      Vec4 z = finger_launch(probe, m.P);
      gap = std::max(gap, std::abs(pullback_amplitude(s2, z) -
                                   pullback_amplitude(s, z)));
    }
  }
  if (gap > budget) {
    std::ostringstream os;
    os << "stage " << s.stage << " amplitude gap " << gap
       << " exceeds the budget " << budget;
    throw std::runtime_error(os.str());
  }

  s2.stage_gaps.push_back(gap);
  s2.conformal_devs.push_back(dev);
  s2.landing_errors.push_back(worst_landing);
  return s2;
}

Vec4 conjugated_flow(const ConjugationState& s, double t, const Vec4& z,
                     const num::IntegratorConfig& cfg) {
  Vec4 w = z;
  for (const auto& m : s.maps) w = stage_forward(m, w, cfg);
  w = ellipsoid_exact_flow(s.a, s.b, t, w);
  for (auto it = s.maps.rbegin(); it != s.maps.rend(); ++it)
    w = stage_backward(*it, w, cfg);
  return w;
}

DensityCertificate epsilon_density(const ConjugationState& s, const Vec4& z0,
                                   double t_max, double eps, int grid_size,
                                   double dt) {
  num::IntegratorConfig cfg;
  cfg.rel_tol = 1e-9;
  cfg.abs_tol = 1e-11;

  DensityCertificate cert;
  cert.eps = eps;
  cert.t_max = t_max;
  cert.centers.reserve(grid_size);
  for (int k = 0; k < grid_size; ++k) cert.centers.push_back(lattice_point(k));
  std::vector<double> d2(grid_size,
                         std::numeric_limits<double>::infinity());

  Vec4 w0 = z0;
  for (const auto& m : s.maps) w0 = stage_forward(m, w0, cfg);

  std::size_t n = static_cast<std::size_t>(std::floor(t_max / dt)) + 1;
  for (std::size_t k = 0; k < n; ++k) {
    Vec4 u = ellipsoid_exact_flow(s.a, s.b, k * dt, w0);
    for (auto it = s.maps.rbegin(); it != s.maps.rend(); ++it)
      u = stage_backward(*it, u, cfg);
    for (int i = 0; i < grid_size; ++i)
      d2[i] = std::min(d2[i], (cert.centers[i] - u).squaredNorm());
  }
  cert.n_samples = n;

  cert.min_dist.resize(grid_size);
  cert.covered.resize(grid_size);
  cert.worst_gap = 0;
  cert.passes = true;
  for (int i = 0; i < grid_size; ++i) {
    cert.min_dist[i] = std::sqrt(d2[i]);
    cert.covered[i] = cert.min_dist[i] <= eps ? 1 : 0;
    cert.worst_gap = std::max(cert.worst_gap, cert.min_dist[i]);
    if (!cert.covered[i]) cert.passes = false;
  }
  return cert;
}

OrbitCensus short_orbit_census(const ConjugationState& s) {
  OrbitCensus c;
  c.common_period = common_period(s.a, s.b).value();
  c.ceiling = std::max(0.0, c.common_period - 1);
  c.axis_periods[0] = s.a.value();
  c.axis_periods[1] = s.b.value();
  bool clear = true;
  for (const auto& m : s.maps)
    for (const auto& f : m.fingers) {
      double lo = std::min(f.tau_source, f.tau_target) - f.ramp;
      double hi = std::max(f.tau_source, f.tau_target) + f.ramp;
      if (lo < s.tube_tau || hi > 1 - s.tube_tau) clear = false;
    }
  c.no_short_orbits_off_tube = clear && c.common_period > c.ceiling;
  return c;
}

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

std::string to_checkpoint(const ConjugationState& s) {
  nlohmann::json j;
  j["stage"] = s.stage;
  j["a"] = {s.a.p, s.a.q};
  j["b"] = {s.b.p, s.b.q};
  j["tube_tau"] = s.tube_tau;
  j["stage_gaps"] = s.stage_gaps;
  j["conformal_devs"] = s.conformal_devs;
  j["landing_errors"] = s.landing_errors;
  j["maps"] = nlohmann::json::array();
  for (const auto& m : s.maps) {
    nlohmann::json jm;
    jm["a"] = {m.a.p, m.a.q};
    jm["b"] = {m.b.p, m.b.q};
    jm["P"] = m.P;
    jm["Q"] = m.Q;
    jm["fingers"] = nlohmann::json::array();
    for (const auto& f : m.fingers)
      jm["fingers"].push_back({{"tau_source", f.tau_source},
                               {"tau_target", f.tau_target},
                               {"eta_center", f.eta_center},
                               {"eta_halfwidth", f.eta_halfwidth},
                               {"slope_offset", f.slope_offset},
                               {"ramp", f.ramp},
                               {"amplitude", f.amplitude}});
    j["maps"].push_back(jm);
  }
  return j.dump(2);
}

ConjugationState state_from_checkpoint(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ConjugationState s;
  s.stage = j.at("stage").get<int>();
  auto rat = [](const nlohmann::json& v) {
    return Rational(v.at(0).get<long long>(), v.at(1).get<long long>());
  };
  s.a = rat(j.at("a"));
  s.b = rat(j.at("b"));
  s.tube_tau = j.at("tube_tau").get<double>();
  s.stage_gaps = j.at("stage_gaps").get<std::vector<double>>();
  s.conformal_devs = j.at("conformal_devs").get<std::vector<double>>();
  s.landing_errors = j.at("landing_errors").get<std::vector<double>>();
  for (const auto& jm : j.at("maps")) {
    StageMap m;
    m.a = rat(jm.at("a"));
    m.b = rat(jm.at("b"));
    m.P = jm.at("P").get<long long>();
    m.Q = jm.at("Q").get<long long>();
    for (const auto& jf : jm.at("fingers")) {
      Finger f;
      f.tau_source = jf.at("tau_source").get<double>();
      f.tau_target = jf.at("tau_target").get<double>();
      f.eta_center = jf.at("eta_center").get<double>();
      f.eta_halfwidth = jf.at("eta_halfwidth").get<double>();
      f.slope_offset = jf.at("slope_offset").get<double>();
      f.ramp = jf.at("ramp").get<double>();
      f.amplitude = jf.at("amplitude").get<double>();
      m.fingers.push_back(f);
    }
    s.maps.push_back(std::move(m));
  }
  return s;
}

void save_checkpoint(const ConjugationState& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << to_checkpoint(s);
}

ConjugationState load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read checkpoint: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return state_from_checkpoint(ss.str());
}

// ---------------------------------------------------------------------------
// The pinned three-stage experiment
// ---------------------------------------------------------------------------

SchemeReport default_three_stage_run(const SchemeOptions& opts) {
  const std::vector<double> ring_betas = {0.174, 0.36, 0.54, 0.72,
                                          0.90,  1.08, 1.26, 1.397};

  auto stage_file = [&opts](int j) {
    return opts.checkpoint_dir + "/conjugation_stage_" + std::to_string(j) +
           ".json";
  };

  ConjugationState state = initial_state(Rational(3, 1), Rational(3, 1));
  int start = 0;
  if (!opts.checkpoint_dir.empty()) {
    for (int j = 3; j >= 1; --j) {
      std::ifstream probe(stage_file(j));
      if (probe) {
        state = load_checkpoint(stage_file(j));
        start = j;
        break;
      }
    }
  }

  for (int j = start; j < 3; ++j) {
    StagePlan plan;
    if (j == 0) {
      plan.next_a = Rational(63, 20);
      plan.next_b = Rational(3, 1);
    } else if (j == 1) {
      plan.next_a = Rational(123, 40);
      plan.next_b = Rational(3, 1);
      for (double beta : ring_betas)
        plan.ring_taus.push_back(std::cos(beta) * std::cos(beta));
    } else {
      plan.next_a = Rational(6003, 2000);
      plan.next_b = Rational(3, 1);
    }
    state = advance_stage(state, plan);
    if (!opts.checkpoint_dir.empty()) save_checkpoint(state, stage_file(j + 1));
  }

  SchemeReport rep;
  rep.state = state;

  // Orbit seed: the target-torus fiber through eta = 0, which lies in the gap
  // between the finger windows, pulled back through the stage maps.
  Vec4 w0(std::sqrt(0.5), 0, std::sqrt(0.5), 0);
  Vec4 z0 = w0;
  {
    num::IntegratorConfig cfg;
    for (auto it = state.maps.rbegin(); it != state.maps.rend(); ++it)
      z0 = stage_backward(*it, z0, cfg);
  }
  rep.orbit_seed = z0;
  rep.density = epsilon_density(state, z0, opts.t_max, opts.eps,
                                opts.grid_size, opts.dt);
  rep.census = short_orbit_census(state);
  return rep;
}

}  // namespace caplab::ak
