#pragma once
// The cylindrical coordinates Phi on the ball minus the z1 = 0 plane, domains
// D(H) over graphs of admissible time-periodic Hamiltonians, the Calabi
// invariant, lifted volume, the periodic-point <-> closed-characteristic
// correspondence with action certificates, and interpolation flow data for
// families sharing a time-1 map.

#include "caplab/domains.hpp"
#include "caplab/numerics.hpp"

#include <functional>
#include <stdexcept>
#include <vector>

namespace caplab::lift {

using num::C;
using num::C2;
using num::Vec4;

// Hamiltonian on T x C (T = R/Z), compactly supported in the open unit disk.
// Callables receive t already reduced mod 1; analytic derivative accessors are
// optional (central finite differences otherwise).
struct TimePeriodicHamiltonian {
  std::function<double(double, C)> value;
  double support_radius = 0.9;                 // H = 0 for |w| >= this
  std::function<double(double, C)> dt_value;   // optional: d/dt H
  std::function<C(double, C)> grad_value;      // optional: (d_x H, d_y H)

  double operator()(double t, C w) const { return value(wrap(t), w); }
  double time_derivative(double t, C w) const;
  C gradient(double t, C w) const;  // as d_x H + i d_y H

  static double wrap(double t) { return t - std::floor(t); }
};

// Zero Hamiltonian (identity flow).
TimePeriodicHamiltonian zero_hamiltonian();

// Radial Hamiltonian (time-independent) H(w) = f(|w|^2) with f' supplied for
// the exact rotation flow used in tests; f(rho) = 0 for rho >= rho_supp.
TimePeriodicHamiltonian radial_hamiltonian(std::function<double(double)> f,
                                           std::function<double(double)> fp,
                                           double rho_supp);

// eta'(t) H(eta(t), w) for a smooth monotone surjection eta of [0,1]: same
// time-1 map as H, trajectories reparametrized.
TimePeriodicHamiltonian reparametrize_in_time(
    const TimePeriodicHamiltonian& H, std::function<double(double)> eta,
    std::function<double(double)> eta_prime);

// Admissibility: H > -pi (1 - |w|^2) on a (n_t x disk) sample grid.  This is
// the condition for the graph of H to stay inside the image of Phi.
bool admissible(const TimePeriodicHamiltonian& H, int n_t = 24, int n_r = 24,
                int n_theta = 24);

// ---------------------------------------------------------------------------
// The map Phi
// ---------------------------------------------------------------------------

struct LiftTriple {
  double s = 0;
  double t = 0;
  C w = 0;
};

// Phi(s,t,w) = e^{2 pi i t} ( sqrt(1 + s/pi - |w|^2), w ); requires
// s > pi (|w|^2 - 1).
C2 phi_map(double s, double t, C w);
C2 phi_map(const LiftTriple& p);

// Inverse on { z1 != 0 }: t = arg(z1)/2pi, w = e^{-2 pi i t} z2,
// s = pi (|z|^2 - 1).
LiftTriple phi_inverse(const C2& z);

// Differential of Phi applied to (sdot, tdot, wdot), for action integrands.
C2 phi_differential(const LiftTriple& p, double sdot, double tdot, C wdot);

// ---------------------------------------------------------------------------
// Disk flow and actions
// ---------------------------------------------------------------------------

struct DiskFlowResult {
  C w = 0;                  // endpoint
  double action_lambda = 0; // integral of lambda0_hat along the path
  double action_h = 0;      // integral of H(t, path(t)) dt
};

// Flow of wdot = -i grad H from time 0 to time t, with action accumulators.
DiskFlowResult disk_flow(const TimePeriodicHamiltonian& H, double t, C w,
                         const num::IntegratorConfig& cfg = {});

// Endpoint-only flow between arbitrary times (t1 < t0 integrates backwards).
C disk_flow_between(const TimePeriodicHamiltonian& H, double t0, double t1,
                    C w, const num::IntegratorConfig& cfg = {});

// Calabi invariant: integral of H over T x disk against dt ^ omega_hat.
// The default node counts keep this reference value well below the error of
// the volume quadratures it is compared against.
double calabi(const TimePeriodicHamiltonian& H, int n_t = 96, int n_r = 96,
              int n_theta = 96);

// Characteristic flow upstairs in (s,t,w) coordinates: the time-tau flow of
// the autonomous-in-s lift of H starting at p, evaluated in closed form
//   (s, t0, w) -> ( s + H(t0+tau, w(t0+tau)) - H(t0, w), t0 + tau, w(t0+tau) ).
LiftTriple lifted_characteristic_flow(const TimePeriodicHamiltonian& H,
                                      double tau, const LiftTriple& p,
                                      const num::IntegratorConfig& cfg = {});

// ---------------------------------------------------------------------------
// The domain D(H)
// ---------------------------------------------------------------------------

class LiftedDomain {
 public:
  explicit LiftedDomain(TimePeriodicHamiltonian H);

  // Radial distance to the boundary along the ray through zhat (unit vector):
  // the root r of pi (r^2 - 1) = H(t(r zhat), w(r zhat)).
  double amplitude(const Vec4& zhat) const;

  // Star-shaped view (radial function field on S^3).
  dom::StarShapedDomain as_domain() const;

  const TimePeriodicHamiltonian& hamiltonian() const { return H_; }

 private:
  TimePeriodicHamiltonian H_;
};

struct VolumeReport {
  double formula_value = 0;     // pi^2/2 + Cal(H)  (n = 2)
  double quadrature_value = 0;  // volume of D(H) as a star-shaped domain
};

VolumeReport lifted_volume(const TimePeriodicHamiltonian& H,
                           int n_beta = 40, int n_chi = 40, int n_fiber = 20);

// ---------------------------------------------------------------------------
// Periodic points and characteristics
// ---------------------------------------------------------------------------

struct CharacteristicCertificate {
  C periodic_point = 0;
  int k = 1;
  double closure_residual = 0;   // |phi^k(w) - w|
  double action = 0;             // k pi + A_{phi^k}(w)
  double action_integral = 0;    // independent line integral of lambda0
  Vec4 boundary_point;           // Phi(H(0,w), 0, w), on the boundary of D(H)
};

// Lifts the k-periodic point w to the closed characteristic on the graph part
// of the boundary and certifies the action two ways.  Throws if w is not
// k-periodic within tol or k is not minimal (some proper divisor closes).
CharacteristicCertificate characteristic_from_periodic_point(
    const TimePeriodicHamiltonian& H, C w, int k, double tol = 1e-9,
    const num::IntegratorConfig& cfg = {});

// ---------------------------------------------------------------------------
// Interpolation data for families with a common time-1 map
// ---------------------------------------------------------------------------

class InterpolationSymplectomorphism {
 public:
  // family(lambda) for lambda in [0,1]; family(0) is the reference.  Verifies
  // that all time-1 maps agree with the reference on a test grid.
  InterpolationSymplectomorphism(
      std::function<TimePeriodicHamiltonian(double)> family,
      int n_lambda_check = 5, double map_tol = 1e-6);

  // psi_lambda^t = phi^t_{H^lambda} o (phi^t_{H^0})^{-1}.
  C psi(double lambda, double t, C w) const;
  C psi_inverse(double lambda, double t, C w) const;

  // G^lambda(t,w) = H^lambda(t,w) - H^0(t, (psi_lambda^t)^{-1} w).
  double g_correction(double lambda, double t, C w) const;

  // psi-tilde_lambda (s,t,w) = ( s + G^lambda(t, psi(w)), t, psi(w) ).
  LiftTriple lifted(double lambda, const LiftTriple& p) const;

  // Max over a grid on the graph of H^0 of the s-distance between the image
  // of Gamma(H^0) under lifted() and Gamma(H^lambda).
  double graph_mapping_defect(double lambda, int n_t = 8, int n_w = 8) const;

  // Integral over one period of the lambda-derivative of G^lambda along the
  // closed psi-trajectory of w (central differences in lambda).
  double flux_derivative(double lambda, C w, int n_t = 64,
                         double dlambda = 1e-4) const;

  const TimePeriodicHamiltonian& member(double lambda) const;

 private:
  std::function<TimePeriodicHamiltonian(double)> family_;
  mutable std::vector<std::pair<double, TimePeriodicHamiltonian>> cache_;
  num::IntegratorConfig cfg_;
};

}  // namespace caplab::lift
