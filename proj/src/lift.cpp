#include "caplab/lift.hpp"

#include <algorithm>
#include <cmath>

namespace caplab::lift {

using num::pi;

double TimePeriodicHamiltonian::time_derivative(double t, C w) const {
  if (dt_value) return dt_value(wrap(t), w);
  double h = num::fd_step();
  return ((*this)(t + h, w) - (*this)(t - h, w)) / (2 * h);
}

C TimePeriodicHamiltonian::gradient(double t, C w) const {
  if (grad_value) return grad_value(wrap(t), w);
  double tw = wrap(t);
  return num::fd_gradC([&](C u) { return value(tw, u); }, w);
}

TimePeriodicHamiltonian zero_hamiltonian() {
  TimePeriodicHamiltonian H;
  H.value = [](double, C) { return 0.0; };
  H.support_radius = 0.1;
  H.dt_value = [](double, C) { return 0.0; };
  H.grad_value = [](double, C) { return C(0, 0); };
  return H;
}

TimePeriodicHamiltonian radial_hamiltonian(std::function<double(double)> f,
                                           std::function<double(double)> fp,
                                           double rho_supp) {
  TimePeriodicHamiltonian H;
  H.value = [f](double, C w) { return f(std::norm(w)); };
  H.support_radius = std::sqrt(rho_supp);
  H.dt_value = [](double, C) { return 0.0; };
  H.grad_value = [fp](double, C w) { return C(2.0 * fp(std::norm(w))) * w; };
  return H;
}

TimePeriodicHamiltonian reparametrize_in_time(
    const TimePeriodicHamiltonian& H, std::function<double(double)> eta,
    std::function<double(double)> eta_prime) {
  TimePeriodicHamiltonian out;
  out.support_radius = H.support_radius;
  out.value = [H, eta, eta_prime](double t, C w) {
    return eta_prime(t) * H(eta(t), w);
  };
  out.grad_value = [H, eta, eta_prime](double t, C w) {
    return C(eta_prime(t)) * H.gradient(eta(t), w);
  };
  return out;
}

bool admissible(const TimePeriodicHamiltonian& H, int n_t, int n_r,
                int n_theta) {
  for (int i = 0; i < n_t; ++i) {
    double t = double(i) / n_t;
    for (int j = 0; j < n_r; ++j) {
      double r = (j + 0.5) / n_r;
      for (int l = 0; l < n_theta; ++l) {
        C w = std::polar(r, 2 * pi * l / n_theta);
        if (H(t, w) <= -pi * (1.0 - std::norm(w))) return false;
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Phi
// ---------------------------------------------------------------------------

C2 phi_map(double s, double t, C w) {
  double q = 1.0 + s / pi - std::norm(w);
  if (!(q > 0)) throw std::domain_error("phi_map: point outside Omega");
  C e = std::polar(1.0, 2 * pi * t);
  return {e * std::sqrt(q), e * w};
}

C2 phi_map(const LiftTriple& p) { return phi_map(p.s, p.t, p.w); }

LiftTriple phi_inverse(const C2& z) {
  if (std::abs(z.z1) == 0)
    throw std::domain_error("phi_inverse: z1 = 0 is outside the chart");
  LiftTriple p;
  double theta = std::arg(z.z1);
  if (theta < 0) theta += 2 * pi;
  p.t = theta / (2 * pi);
  C e = std::polar(1.0, -2 * pi * p.t);
  p.w = e * z.z2;
  p.s = pi * (std::norm(z.z1) + std::norm(z.z2) - 1.0);
  return p;
}

C2 phi_differential(const LiftTriple& p, double sdot, double tdot, C wdot) {
  double q = 1.0 + p.s / pi - std::norm(p.w);
  if (!(q > 0)) throw std::domain_error("phi_differential: outside Omega");
  double zeta = std::sqrt(q);
  C e = std::polar(1.0, 2 * pi * p.t);
  double dzeta = (sdot / pi - 2.0 * (std::conj(p.w) * wdot).real()) / (2 * zeta);
  C rot = C(0, 2 * pi) * tdot * e;
  return {e * dzeta + rot * zeta, e * wdot + rot * p.w};
}

// ---------------------------------------------------------------------------
// Disk flow
// ---------------------------------------------------------------------------

DiskFlowResult disk_flow(const TimePeriodicHamiltonian& H, double t, C w,
                         const num::IntegratorConfig& cfg) {
  auto field = [&H](double tau, const Vec4& y) {
    C u(y[0], y[1]);
    C udot = C(0, -1) * H.gradient(tau, u);
    Vec4 dy;
    dy[0] = udot.real();
    dy[1] = udot.imag();
    dy[2] = num::lambda0_hat(u, udot);
    dy[3] = H(tau, u);
    return dy;
  };
  // The guard runs on accepted states only: trial RK stages may probe far
  // outside the disk before the error control rejects the step.
  auto guard = [](double, const Vec4& y) {
    if (y[0] * y[0] + y[1] * y[1] >= 1.0)
      throw num::IntegrationError("disk trajectory reached the boundary");
  };
  Vec4 y0(w.real(), w.imag(), 0, 0);
  Vec4 yf = num::integrate_adaptive(field, 0.0, t, y0, cfg,
                                    num::IdentityProj{}, guard);
  return {C(yf[0], yf[1]), yf[2], yf[3]};
}

C disk_flow_between(const TimePeriodicHamiltonian& H, double t0, double t1,
                    C w, const num::IntegratorConfig& cfg) {
  auto field = [&H](double tau, const num::Vec2& y) {
    C u(y[0], y[1]);
    C udot = C(0, -1) * H.gradient(tau, u);
    return num::Vec2(udot.real(), udot.imag());
  };
  num::Vec2 yf = num::integrate_adaptive(
      field, t0, t1, num::Vec2(w.real(), w.imag()), cfg);
  return C(yf[0], yf[1]);
}

double calabi(const TimePeriodicHamiltonian& H, int n_t, int n_r, int n_theta) {
  auto rule = num::tdisk_rule(n_t, n_r, n_theta);
  return num::integrate_tdisk([&H](double t, C w) { return H(t, w); }, rule);
}

LiftTriple lifted_characteristic_flow(const TimePeriodicHamiltonian& H,
                                      double tau, const LiftTriple& p,
                                      const num::IntegratorConfig& cfg) {
  C w1 = disk_flow_between(H, p.t, p.t + tau, p.w, cfg);
  return {p.s + H(p.t + tau, w1) - H(p.t, p.w), p.t + tau, w1};
}

// ---------------------------------------------------------------------------
// D(H)
// ---------------------------------------------------------------------------

LiftedDomain::LiftedDomain(TimePeriodicHamiltonian H) : H_(std::move(H)) {
  double sup = 0;
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j)
      for (int l = 0; l < 16; ++l) {
        C w = std::polar((j + 0.5) / 16, 2 * pi * l / 16);
        sup = std::max(sup, std::abs(H_(double(i) / 16, w)));
      }
  if (sup >= 2.0)
    throw std::invalid_argument(
        "LiftedDomain: |H| >= 2 exceeds the radial root bracket");
  if (!admissible(H_))
    throw std::invalid_argument("LiftedDomain: inadmissible Hamiltonian");
}

double LiftedDomain::amplitude(const Vec4& zhat) const {
  Vec4 u = zhat.normalized();
  num::C2 zc = num::to_c2(u);
  if (std::abs(zc.z1) < 1e-14) return 1.0;  // D(H) is the ball near z1 = 0
  double theta = std::arg(zc.z1);
  if (theta < 0) theta += 2 * pi;
  double t = theta / (2 * pi);
  C dir = std::polar(1.0, -2 * pi * t) * zc.z2;
  auto h = [&](double r) { return pi * (r * r - 1.0) - H_(t, r * dir); };
  return num::find_root(h, 0.3, 1.8, 1e-12);
}

dom::StarShapedDomain LiftedDomain::as_domain() const {
  dom::Field3 f;
  LiftedDomain self = *this;  // validated copy; amplitude() needs no recheck
  f.value = [self](const Vec4& p) { return self.amplitude(p); };
  dom::StarShapedDomain out;
  out.n = 2;
  out.f = std::move(f);
  return out;
}

VolumeReport lifted_volume(const TimePeriodicHamiltonian& H, int n_beta,
                           int n_chi, int n_fiber) {
  VolumeReport rep;
  rep.formula_value = pi * pi / 2.0 + calabi(H);
  LiftedDomain d(H);
  auto rule = num::s3_rule(n_beta, n_chi, n_fiber);
  rep.quadrature_value = dom::volume(d.as_domain(), rule);
  return rep;
}

// ---------------------------------------------------------------------------
// Characteristics from periodic points
// ---------------------------------------------------------------------------

CharacteristicCertificate characteristic_from_periodic_point(
    const TimePeriodicHamiltonian& H, C w, int k, double tol,
    const num::IntegratorConfig& cfg) {
  if (k < 1) throw std::invalid_argument("k must be positive");
  DiskFlowResult full = disk_flow(H, double(k), w, cfg);
  double resid = std::abs(full.w - w);
  if (resid >= tol)
    throw std::invalid_argument(
        "characteristic_from_periodic_point: point is not k-periodic");
  for (int m = 1; m < k; ++m) {
    if (k % m != 0) continue;
    if (std::abs(disk_flow_between(H, 0, m, w, cfg) - w) < tol)
      throw std::invalid_argument(
          "characteristic_from_periodic_point: k is not the minimal period");
  }

  CharacteristicCertificate cert;
  cert.periodic_point = w;
  cert.k = k;
  cert.closure_residual = resid;
  cert.action = k * pi + full.action_lambda + full.action_h;

  // Independent check: trapezoid integral of lambda0 along the closed lift
  // through Phi (spectrally accurate for the smooth closed curve).
  const int N = 512 * k;
  const double dtau = double(k) / N;
  C wj = w;
  double acc = 0;
  for (int j = 0; j < N; ++j) {
    double tau = j * dtau;
    LiftTriple p{H(tau, wj), tau, wj};
    double sdot = H.time_derivative(tau, wj);
    C wdot = C(0, -1) * H.gradient(tau, wj);
    C2 z = phi_map(p);
    C2 dz = phi_differential(p, sdot, 1.0, wdot);
    acc += 0.5 * std::imag(std::conj(z.z1) * dz.z1 + std::conj(z.z2) * dz.z2);
    wj = disk_flow_between(H, tau, tau + dtau, wj, cfg);
  }
  cert.action_integral = acc * dtau;
  cert.boundary_point = num::to_vec(phi_map(H(0, w), 0.0, w));
  return cert;
}

// ---------------------------------------------------------------------------
// Interpolation
// ---------------------------------------------------------------------------

InterpolationSymplectomorphism::InterpolationSymplectomorphism(
    std::function<TimePeriodicHamiltonian(double)> family, int n_lambda_check,
    double map_tol)
    : family_(std::move(family)) {
  const TimePeriodicHamiltonian& H0 = member(0.0);
  std::vector<C> grid;
  for (int j = 1; j <= 3; ++j)
    for (int l = 0; l < 6; ++l)
      grid.push_back(std::polar(H0.support_radius * j / 3.5,
                                2 * pi * (l + 0.3) / 6));
  std::vector<C> ref;
  ref.reserve(grid.size());
  for (C w : grid) ref.push_back(disk_flow_between(H0, 0, 1, w, cfg_));
  for (int i = 1; i < n_lambda_check; ++i) {
    double lam = double(i) / (n_lambda_check - 1);
    const TimePeriodicHamiltonian& Hl = member(lam);
    for (std::size_t m = 0; m < grid.size(); ++m) {
      C img = disk_flow_between(Hl, 0, 1, grid[m], cfg_);
      if (std::abs(img - ref[m]) >= map_tol)
        throw std::invalid_argument(
            "interpolation family members do not share the time-1 map");
    }
  }
}

const TimePeriodicHamiltonian& InterpolationSymplectomorphism::member(
    double lambda) const {
  for (auto& kv : cache_)
    if (kv.first == lambda) return kv.second;
  cache_.emplace_back(lambda, family_(lambda));
  return cache_.back().second;
}

C InterpolationSymplectomorphism::psi(double lambda, double t, C w) const {
  C u = disk_flow_between(member(0.0), t, 0, w, cfg_);
  return disk_flow_between(member(lambda), 0, t, u, cfg_);
}

C InterpolationSymplectomorphism::psi_inverse(double lambda, double t,
                                              C w) const {
  C u = disk_flow_between(member(lambda), t, 0, w, cfg_);
  return disk_flow_between(member(0.0), 0, t, u, cfg_);
}

double InterpolationSymplectomorphism::g_correction(double lambda, double t,
                                                    C w) const {
  return member(lambda)(t, w) - member(0.0)(t, psi_inverse(lambda, t, w));
}

LiftTriple InterpolationSymplectomorphism::lifted(double lambda,
                                                  const LiftTriple& p) const {
  C u = psi(lambda, p.t, p.w);
  return {p.s + g_correction(lambda, p.t, u), p.t, u};
}

double InterpolationSymplectomorphism::graph_mapping_defect(double lambda,
                                                            int n_t,
                                                            int n_w) const {
  const TimePeriodicHamiltonian& H0 = member(0.0);
  const TimePeriodicHamiltonian& Hl = member(lambda);
  double defect = 0;
  for (int i = 0; i < n_t; ++i) {
    double t = double(i) / n_t;
    for (int j = 0; j < n_w; ++j)
      for (int l = 0; l < n_w; ++l) {
        C w = std::polar(H0.support_radius * (j + 0.5) / n_w,
                         2 * pi * l / n_w);
        LiftTriple p{H0(t, w), t, w};
        LiftTriple q = lifted(lambda, p);
        defect = std::max(defect, std::abs(q.s - Hl(q.t, q.w)));
      }
  }
  return defect;
}

double InterpolationSymplectomorphism::flux_derivative(double lambda, C w,
                                                       int n_t,
                                                       double dlambda) const {
  double lo = std::max(0.0, lambda - dlambda);
  double hi = std::min(1.0, lambda + dlambda);
  double acc = 0;
  for (int j = 0; j < n_t; ++j) {
    double t = (j + 0.5) / n_t;
    C c = psi(lambda, t, w);
    acc += (g_correction(hi, t, c) - g_correction(lo, t, c)) / (hi - lo);
  }
  return acc / n_t;
}

}  // namespace caplab::lift
