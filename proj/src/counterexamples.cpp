#include "caplab/counterexamples.hpp"

#include "caplab/domains.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace caplab::cex {

namespace {

constexpr double kPi = num::pi;

// Unit-disk mass of the standard bump: int_{|x|<1} cinf_bump(|x|) dx.
double bump_disk_mass() {
  static const double mass = [] {
    const num::Rule1D r = num::gauss_legendre(64, 0.0, 1.0);
    double acc = 0;
    for (std::size_t i = 0; i < r.x.size(); ++i)
      acc += r.w[i] * num::cinf_bump(r.x[i]) * r.x[i];
    return 2.0 * kPi * acc;
  }();
  return mass;
}

}  // namespace

Profile::Profile(double rho_supp) : rho_supp_(rho_supp) {
  if (!(rho_supp > 0.3 && rho_supp < 1.0))
    throw std::invalid_argument("profile support must lie in (0.3, 1)");
  const int n = 2048;
  dx_ = rho_supp_ / n;
  tail_.assign(n + 1, 0.0);
  const num::Rule1D seg = num::gauss_legendre(8, 0.0, 1.0);
  for (int i = n - 1; i >= 0; --i) {
    double part = 0;
    for (std::size_t q = 0; q < seg.x.size(); ++q)
      part += seg.w[q] * (-fprime((i + seg.x[q]) * dx_));
    tail_[i] = tail_[i + 1] + part * dx_;
  }
  const num::Rule1D whole = num::gauss_legendre(64, 0.0, rho_supp_);
  for (std::size_t q = 0; q < whole.x.size(); ++q)
    integral_ += whole.w[q] * f(whole.x[q]);
}

double Profile::fprime(double rho) const {
  if (rho >= rho_supp_) return 0.0;
  return -(kPi / 2) * num::cinf_plateau(rho, 0.25, rho_supp_);
}

double Profile::fsecond(double rho) const {
  if (rho <= 0.25 || rho >= rho_supp_) return 0.0;
  const double den = rho_supp_ - 0.25;
  return (kPi / 2) * num::cinf_step_prime((rho_supp_ - rho) / den) / den;
}

double Profile::f(double rho) const {
  if (rho >= rho_supp_) return 0.0;
  if (rho < 0) rho = 0;
  const int i = std::min<int>(static_cast<int>(rho / dx_),
                              static_cast<int>(tail_.size()) - 2);
  // f(rho) = tail_[i] - int_{x_i}^{rho} (-f')
  static const num::Rule1D seg = num::gauss_legendre(4, 0.0, 1.0);
  const double x0 = i * dx_, len = rho - x0;
  double part = 0;
  for (std::size_t q = 0; q < seg.x.size(); ++q)
    part += seg.w[q] * (-fprime(x0 + seg.x[q] * len));
  return tail_[i] - part * len;
}

lift::TimePeriodicHamiltonian rescale(const lift::TimePeriodicHamiltonian& H,
                                      double lambda) {
  if (!(lambda > 0 && lambda <= 1))
    throw std::invalid_argument("rescale requires lambda in (0, 1]");
  lift::TimePeriodicHamiltonian out;
  const double l2 = lambda * lambda;
  out.support_radius = std::min(0.97, lambda * H.support_radius);
  out.value = [H, lambda, l2](double t, C w) {
    return l2 * H(t, w / lambda);
  };
  out.dt_value = [H, lambda, l2](double t, C w) {
    return l2 * H.time_derivative(t, w / lambda);
  };
  out.grad_value = [H, lambda](double t, C w) {
    return lambda * H.gradient(t, w / lambda);
  };
  return out;
}

std::vector<FixedPointInfo> fixed_point_census(
    const lift::TimePeriodicHamiltonian& H, double radius, int n_grid,
    double tol) {
  std::vector<FixedPointInfo> out;
  const double h = 2.0 * radius / (n_grid - 1);
  for (int i = 0; i < n_grid; ++i)
    for (int j = 0; j < n_grid; ++j) {
      const C w(-radius + i * h, -radius + j * h);
      if (std::abs(w) > radius) continue;
      const lift::DiskFlowResult r = lift::disk_flow(H, 1.0, w);
      const double resid = std::abs(r.w - w);
      if (resid < tol)
        out.push_back({w, r.action_lambda + r.action_h, resid});
    }
  return out;
}

Counterexample build_counterexample_hamiltonian(
    const CounterexampleConfig& cfg) {
  Counterexample ce;
  ce.cfg = cfg;
  ce.profile = std::make_shared<Profile>(cfg.rho_supp);
  const std::shared_ptr<const Profile> prof = ce.profile;
  const C u0(cfg.bump_center, 0.0);
  const double ru = cfg.bump_radius;
  if (std::abs(u0) + ru >= 0.5 - 1e-12)
    throw std::invalid_argument("bump must stay inside the half ball");
  if ((std::abs(u0) + ru) * (std::abs(u0) + ru) >= 0.25)
    throw std::invalid_argument("bump must sit inside the pi-rotation zone");

  // -int G = pi int f + margin, so Cal(H) = -margin.
  ce.calabi_f = kPi * prof->integral();
  ce.bump_strength =
      (ce.calabi_f + cfg.calabi_margin) / (ru * ru * bump_disk_mass());
  ce.calabi_g = -(ce.calabi_f + cfg.calabi_margin);
  ce.calabi_h = ce.calabi_f + ce.calabi_g;
  const double cg = ce.bump_strength;

  // Displacement: phi_F^1 = -id on the rotation zone sends U to -U.
  ce.displacement_margin = 2.0 * std::abs(u0) - 2.0 * ru;
  if (ce.displacement_margin <= 0) {
    std::ostringstream msg;
    msg << "the bump is not displaced by the half twist: overlap margin "
        << ce.displacement_margin;
    throw std::invalid_argument(msg.str());
  }

  lift::TimePeriodicHamiltonian H;
  H.support_radius = std::sqrt(cfg.rho_supp);
  auto bump_value = [cg, u0, ru](C u) {
    const double s = std::abs(u - u0) / ru;
    return s < 1.0 ? -cg * num::cinf_bump(s) : 0.0;
  };
  auto bump_grad = [cg, u0, ru](C u) -> C {
    const C d = u - u0;
    const double n = std::abs(d);
    const double s = n / ru;
    if (s >= 1.0 || n < 1e-300) return C(0, 0);
    return -cg * num::cinf_bump_prime(s) / (n * ru) * d;
  };
  // a(t): ramp on [0,1/2]; b(t): ramp on [1/2,1].
  auto a_of = [](double t) {
    return t <= 0 ? 0.0 : (t >= 0.5 ? 1.0 : num::cinf_step(2 * t));
  };
  auto ap_of = [](double t) {
    return (t <= 0 || t >= 0.5) ? 0.0 : 2 * num::cinf_step_prime(2 * t);
  };
  auto bp_of = [](double t) {
    return (t <= 0.5 || t >= 1) ? 0.0
                                : 2 * num::cinf_step_prime(2 * t - 1);
  };
  H.value = [prof, bump_value, a_of, ap_of, bp_of](double t, C w) {
    const double rho = std::norm(w);
    double v = 0;
    const double ap = ap_of(t);
    if (ap != 0) v += ap * prof->f(rho);
    const double bp = bp_of(t);
    if (bp != 0) {
      // (phi_F^a)^{-1} w = e^{+2 i a f'(rho)} w
      const C u = std::polar(1.0, 2 * a_of(t) * prof->fprime(rho)) * w;
      v += bp * bump_value(u);
    }
    return v;
  };
  H.grad_value = [prof, bump_grad, a_of, ap_of, bp_of](double t, C w) -> C {
    const double rho = std::norm(w);
    C g(0, 0);
    const double ap = ap_of(t);
    if (ap != 0) g += ap * prof->fprime(rho) * 2.0 * w;
    const double bp = bp_of(t);
    if (bp != 0) {
      const double a = a_of(t);
      const C rot = std::polar(1.0, 2 * a * prof->fprime(rho));
      const C gt = std::conj(rot) * bump_grad(rot * w);
      g += bp * (gt + 4.0 * a * prof->fsecond(rho) *
                          std::imag(std::conj(w) * gt) * w);
    }
    return g;
  };
  H.dt_value = [prof, bump_value, bump_grad, a_of, ap_of,
                bp_of](double t, C w) {
    const double rho = std::norm(w);
    const double dt = 1e-6;
    auto ramp2 = [&](double s) {
      double v = 0;
      const double ap = ap_of(s);
      if (ap != 0) v += ap * prof->f(rho);
      const double bp = bp_of(s);
      if (bp != 0)
        v += bp * bump_value(std::polar(1.0, 2 * a_of(s) * prof->fprime(rho)) *
                             w);
      return v;
    };
    return (ramp2(t + dt) - ramp2(t - dt)) / (2 * dt);
  };
  ce.H = H;

  // Growth constant c = sup |lambda0_hat(X_H)| + sup |H| on a grid.
  double sup_h = 0, sup_lam = 0;
  const int nt = 48, nr = 32, nth = 48;
  for (int it = 0; it < nt; ++it) {
    const double t = (it + 0.5) / nt;
    for (int ir = 1; ir <= nr; ++ir)
      for (int jth = 0; jth < nth; ++jth) {
        const C w = std::polar(H.support_radius * ir / nr,
                               2 * kPi * jth / nth);
        sup_h = std::max(sup_h, std::abs(H(t, w)));
        const C grad = H.gradient(t, w);
        // lambda0_hat(w, -i grad) = -Re(conj(w) grad) / 2
        sup_lam =
            std::max(sup_lam, 0.5 * std::abs(std::real(std::conj(w) * grad)));
      }
  }
  ce.higher_period_c = sup_h + sup_lam;

  // Census: the only fixed points of phi_H^1 are those of phi_F^1, with
  // non-negative action.
  ce.census = fixed_point_census(H, H.support_radius + 0.08, cfg.census_n,
                                 cfg.census_tol);
  if (ce.census.empty())
    throw std::runtime_error("census found no fixed points at all");
  ce.min_fixed_action = std::numeric_limits<double>::infinity();
  for (const FixedPointInfo& fp : ce.census) {
    const C fimg = std::polar(1.0, -2 * prof->fprime(std::norm(fp.w))) * fp.w;
    if (std::abs(fimg - fp.w) > 10 * cfg.census_tol) {
      std::ostringstream msg;
      msg << "census found a fixed point of the full map that the half twist "
             "moves: w = ("
          << fp.w.real() << ", " << fp.w.imag() << ")";
      throw std::runtime_error(msg.str());
    }
    ce.min_fixed_action = std::min(ce.min_fixed_action, fp.action);
  }
  if (ce.min_fixed_action < -1e-9) {
    std::ostringstream msg;
    msg << "negative fixed-point action " << ce.min_fixed_action;
    throw std::runtime_error(msg.str());
  }
  if (!(ce.calabi_h < 0))
    throw std::runtime_error("Calabi invariant failed to come out negative");
  return ce;
}

double measured_action_rate(const Counterexample& ce, int k_max, int n_grid) {
  double worst = 0;
  const double radius = ce.H.support_radius;
  for (int i = 0; i < n_grid; ++i)
    for (int j = 0; j < n_grid; ++j) {
      const C w(-radius + 2.0 * radius * i / (n_grid - 1),
                -radius + 2.0 * radius * j / (n_grid - 1));
      if (std::abs(w) > radius) continue;
      C cur = w;
      double action = 0;
      for (int k = 1; k <= k_max; ++k) {
        const lift::DiskFlowResult r = lift::disk_flow(ce.H, 1.0, cur);
        action += r.action_lambda + r.action_h;
        cur = r.w;
        if (k >= 2) worst = std::max(worst, std::abs(action) / k);
      }
    }
  return worst;
}

std::vector<LambdaReport> assemble_counterexample(const Counterexample& ce,
                                                  std::vector<double> lambdas,
                                                  bool with_quadrature) {
  if (lambdas.empty()) lambdas = ce.cfg.lambdas;
  std::vector<LambdaReport> out;
  for (double lambda : lambdas) {
    if (!(lambda > 0) || lambda * lambda * ce.higher_period_c > kPi / 2) {
      std::ostringstream msg;
      msg << "lambda = " << lambda
          << " is outside the validated range: lambda^2 must not exceed "
          << kPi / (2 * ce.higher_period_c);
      throw std::invalid_argument(msg.str());
    }
    LambdaReport rep;
    rep.lambda = lambda;
    const double l2 = lambda * lambda, l4 = l2 * l2;
    rep.min_action_k1 = kPi + l2 * ce.min_fixed_action;
    rep.min_action_k_ge2 = 2 * kPi - 2 * l2 * ce.higher_period_c;
    rep.systole = std::min(kPi + l2 * std::min(0.0, ce.min_fixed_action),
                           rep.min_action_k_ge2);
    rep.volume = kPi * kPi / 2 + l4 * ce.calabi_h;
    rep.ball_capacity_bound = std::sqrt(2.0 * rep.volume);
    rep.strict = rep.ball_capacity_bound < rep.systole;

    const lift::TimePeriodicHamiltonian Hl = rescale(ce.H, lambda);
    lift::LiftedDomain dom(Hl);
    double amp_c0 = 0;
    for (int i = 0; i <= 12; ++i)
      for (int j = 0; j < 16; ++j) {
        const num::Vec4 z = num::hopf_point((kPi / 2) * i / 12.0,
                                            2 * kPi * (j + 0.3) / 16, 0.17);
        amp_c0 = std::max(amp_c0, std::abs(dom.amplitude(z) - 1));
      }
    rep.amp_c0 = amp_c0;
    if (with_quadrature) {
      const lift::VolumeReport vr = lift::lifted_volume(Hl, 32, 32, 12);
      rep.volume_quadrature = vr.quadrature_value;
    }
    out.push_back(rep);
  }
  return out;
}

ContactModelReport contact_counterexample(const Counterexample& ce,
                                          double lambda) {
  ContactModelReport rep;
  rep.lambda = lambda;
  rep.baseline_ratio = 1.0 / kPi;
  if (lambda == 0) {
    rep.systole = 1;
    rep.volume = kPi;
    rep.volume_quadrature = kPi;
    rep.ratio = rep.baseline_ratio;
    rep.improves = false;
    return rep;
  }
  if (!(lambda > 0) || lambda * lambda * ce.higher_period_c > 0.5) {
    std::ostringstream msg;
    msg << "lambda = " << lambda
        << " is outside the validated contact range: lambda^2 must not "
           "exceed "
        << 0.5 / ce.higher_period_c;
    throw std::invalid_argument(msg.str());
  }
  const double l2 = lambda * lambda, l4 = l2 * l2;
  // Orbit actions are k + lambda^2 A_{phi^k}; k = 1 gives 1 + l2 * min >= 1,
  // k >= 2 gives at least 2 - 2 l2 c >= 1.
  rep.systole = std::min(1.0 + l2 * std::min(0.0, ce.min_fixed_action),
                         2.0 - 2.0 * l2 * ce.higher_period_c);
  rep.volume = kPi + 2.0 * l4 * ce.calabi_h;

  // Quadrature of alpha ^ d alpha = (1 + H - w.grad H / 2) dt ^ omega-hat.
  // The H-dependent part scales by lambda^4, so measure it on the unrescaled
  // Hamiltonian, in two pieces matching the two phases: the radial phase on
  // [0,1/2] x disk, and the bump phase on [1/2,1], supported on the displaced
  // disk -U (a bump-centered rule resolves it; a global one cannot).
  auto density = [&ce](double t, C w) {
    return ce.H(t, w) -
           0.5 * std::real(std::conj(w) * ce.H.gradient(t, w));
  };
  double acc = 0;
  {
    const num::Rule1D tA = num::gauss_legendre(16, 0.0, 0.5);
    const num::DiskRule dA = num::disk_rule(48, 8, ce.H.support_radius);
    for (std::size_t i = 0; i < tA.x.size(); ++i)
      for (std::size_t j = 0; j < dA.w.size(); ++j)
        acc += tA.w[i] * dA.w[j] * density(tA.x[i], dA.pts[j]);
  }
  {
    const C center(-ce.cfg.bump_center, 0.0);
    const double ru = ce.cfg.bump_radius;
    const num::Rule1D tB = num::gauss_legendre(16, 0.5, 1.0);
    const num::DiskRule dB = num::disk_rule(40, 64);
    for (std::size_t i = 0; i < tB.x.size(); ++i)
      for (std::size_t j = 0; j < dB.w.size(); ++j)
        acc += tB.w[i] * dB.w[j] * ru * ru *
               density(tB.x[i], center + ru * dB.pts[j]);
  }
  rep.volume_quadrature = kPi + l4 * acc;
  rep.ratio = rep.systole * rep.systole / rep.volume;
  rep.improves = rep.ratio > rep.baseline_ratio;
  return rep;
}

}  // namespace caplab::cex
