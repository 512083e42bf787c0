#pragma once
// The two-phase Hamiltonian H = F # G whose time-1 map has only non-negative
// fixed-point actions but negative Calabi invariant, its rescalings H^lambda,
// the induced domains close to the ball with systole pi exceeding the volume
// capacity bound, and the contact-form model with systolic ratio above the
// round baseline.

#include "caplab/lift.hpp"
#include "caplab/numerics.hpp"

#include <memory>
#include <vector>

namespace caplab::cex {

using num::C;

struct CounterexampleConfig {
  double rho_supp = 0.6;      // profile support in rho = |w|^2
  double bump_center = 0.25;  // displaced disk U: center (on the x-axis)
  double bump_radius = 0.1;   // and radius
  double calabi_margin = 0.05;
  std::vector<double> lambdas = {0.010, 0.018, 0.026};
  int census_n = 48;          // fixed-point census grid
  double census_tol = 1e-7;
};

// Rotation profile: f' = -pi/2 on [0, 1/4], monotone C-infinity ramp to 0
// before rho_supp; f >= 0, f(rho) = 0 for rho >= rho_supp.
class Profile {
 public:
  explicit Profile(double rho_supp);
  double f(double rho) const;
  double fprime(double rho) const;
  double fsecond(double rho) const;
  double rho_supp() const { return rho_supp_; }
  double integral() const { return integral_; }  // int_0^1 f drho

 private:
  double rho_supp_;
  double integral_ = 0;
  double dx_ = 0;
  std::vector<double> tail_;  // tail_[i] = f(x_i) on the uniform table
};

struct FixedPointInfo {
  C w;
  double action = 0;    // A_{phi^1}(w), disk-flow accumulators
  double residual = 0;  // |phi^1(w) - w|
};

struct Counterexample {
  CounterexampleConfig cfg;
  std::shared_ptr<const Profile> profile;
  double bump_strength = 0;  // c_G in G = -c_G * bump
  lift::TimePeriodicHamiltonian H;
  double calabi_f = 0;       // pi * int f
  double calabi_g = 0;       // int G omega-hat  (= -calabi_f - margin)
  double calabi_h = 0;       // sum, < 0
  double higher_period_c = 0;  // sup |lambda0_hat(X_H)| + sup |H|
  std::vector<FixedPointInfo> census;
  double min_fixed_action = 0;
  double displacement_margin = 0;  // dist(phi_F^1(U), U)
};

// Build H(t,w) = a'(t) F(w) + b'(t) G((phi_F^{a(t)})^{-1} w) with F = f(|w|^2)
// run on [0,1/2] and the bump G on [1/2,1]; verifies the displacement of U,
// the fixed-point census (all actions >= 0), and Cal(H) < 0.
Counterexample build_counterexample_hamiltonian(
    const CounterexampleConfig& cfg = {});

// H^lambda(t,w) = lambda^2 H(t, w/lambda); flow conjugation
// phi^t_{H^lambda}(w) = lambda phi^t_H(w/lambda).
lift::TimePeriodicHamiltonian rescale(const lift::TimePeriodicHamiltonian& H,
                                      double lambda);

// Grid census of the fixed points of phi^1_H inside |w| <= radius.
std::vector<FixedPointInfo> fixed_point_census(
    const lift::TimePeriodicHamiltonian& H, double radius, int n_grid,
    double tol);

// Max over a grid of |A_{phi^k}(w)| / k for k = 2..k_max (the measured
// higher-period action growth rate; must stay below higher_period_c).
double measured_action_rate(const Counterexample& ce, int k_max = 8,
                            int n_grid = 24);

struct LambdaReport {
  double lambda = 0;
  double systole = 0;              // pi, certified by the census
  double volume = 0;               // pi^2/2 + lambda^4 Cal(H)
  double volume_quadrature = 0;    // star-shaped quadrature cross-check
  double ball_capacity_bound = 0;  // sqrt(2 volume), exceeds c-underline
  bool strict = false;             // bound < systole
  double min_action_k1 = 0;        // pi + lambda^2 min census action
  double min_action_k_ge2 = 0;     // k pi - k lambda^2 c lower bound, k>=2
  double amp_c0 = 0;               // sup |amplitude - 1| of A_lambda
};

// Per-lambda certification; lambda must satisfy lambda^2 c <= pi/2.
std::vector<LambdaReport> assemble_counterexample(
    const Counterexample& ce, std::vector<double> lambdas = {},
    bool with_quadrature = true);

struct ContactModelReport {
  double lambda = 0;
  double systole = 1;            // certified by the same census
  double volume = 0;             // pi + 2 lambda^4 Cal(H)
  double volume_quadrature = 0;  // alpha ^ d alpha via the by-parts identity
  double ratio = 0;              // systole^2 / volume
  double baseline_ratio = 0;     // 1/pi (the Zoll model)
  bool improves = false;         // ratio > baseline
};

// The contact model (1 + H^lambda) dt + lambda0_hat on T x disk; lambda = 0
// returns the Zoll baseline.  Requires lambda^2 c <= 1/2.
ContactModelReport contact_counterexample(const Counterexample& ce,
                                          double lambda);

}  // namespace caplab::cex
