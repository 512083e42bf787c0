#pragma once
// Conjugation-scheme laboratory on S^3: invariant contact Hamiltonians for
// rational ellipsoid forms, their contact flows, staged conjugations that
// transport marked fibers into a fixed torus, and epsilon-density
// certificates for the conjugated Reeb orbits.

#include "caplab/domains.hpp"
#include "caplab/numerics.hpp"

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace caplab::ak {

using num::Vec4;

// Exact rational p/q, kept reduced with q > 0.
struct Rational {
  long long p = 0;
  long long q = 1;
  Rational() = default;
  Rational(long long num, long long den);
  double value() const {
    return static_cast<double>(p) / static_cast<double>(q);
  }
  bool operator==(const Rational& o) const { return p == o.p && q == o.q; }
};

// Reduced ratio a/b = P/Q.
std::pair<long long, long long> reduced_ratio(const Rational& a,
                                              const Rational& b);

// Minimal T > 0 with T/a and T/b both integral: the common period of the
// E(a, b) Reeb flow, at which every orbit off the axis circles closes.
Rational common_period(const Rational& a, const Rational& b);

// Closed-form ellipsoid Reeb flow (z1, z2) -> (e^{2pi i t/a} z1, e^{2pi i t/b} z2).
Vec4 ellipsoid_exact_flow(const Rational& a, const Rational& b, double t,
                          const Vec4& z);

// Contact Hamiltonian on S^3 for the form eps_{a,b} = g_{a,b} alpha0.
struct ContactHamiltonian {
  dom::Field3 K;
  bool invariant = false;  // constant along the E(a, b) Reeb flow
};

// Average of K_raw over one full common period of the E(a, b) Reeb flow
// (uniform nodes, n_nodes = 0 picks ~32 per unit of time), cut off on a tube
// around the axis circles Gamma: the result vanishes where |z1|^2 < 2*tube_tau
// or |z2|^2 < 2*tube_tau.
ContactHamiltonian fiber_average_hamiltonian(const dom::Field3& K_raw,
                                             const Rational& a,
                                             const Rational& b, int n_nodes = 0,
                                             double tube_tau = 0.005);

// Contact vector field X of K for alpha = eps_{a,b}:
//   iota_X alpha = K,   iota_X d(alpha) = (dK(R)) alpha - dK.
Vec4 contact_field(const ContactHamiltonian& K, const dom::ContactAmplitude& amp,
                   const Vec4& z);

// Time-t map of X (adaptive integration, renormalized to S^3).
Vec4 contact_flow(const ContactHamiltonian& K, const Rational& a,
                  const Rational& b, double t, const Vec4& z,
                  const num::IntegratorConfig& cfg = {});

// Time-t map together with the log-conformal factor of the pullback,
// psi_t^* eps = e^L eps: L is the integral of dK(R) along the trajectory,
// identically zero for invariant K up to integration error.
std::pair<Vec4, double> contact_flow_log_factor(
    const ContactHamiltonian& K, const Rational& a, const Rational& b, double t,
    const Vec4& z, const num::IntegratorConfig& cfg = {});

// Max |dK(R)| over a deterministic quasi-uniform sample set.
double invariance_defect(const ContactHamiltonian& K, const Rational& a,
                         const Rational& b, int n_samples = 64);

// One finger: an invariant Hamiltonian c W(tau) V(eta), tau = |z1|^2 and
// eta = P arg z1 - Q arg z2 (a/b = P/Q reduced), whose time-1 contact flow
// carries the marked fiber at tau_source onto the target torus.  W is a
// C-infinity plateau covering [tau_source, tau_target], V a C-infinity bump
// in a window of half-width eta_halfwidth around eta_center; the launch point
// sits on the slope of V at eta_center + slope_offset, where the level lines
// of K run straight across the plateau.
struct Finger {
  double tau_source = 0;
  double tau_target = 0.5;
  double eta_center = 0;
  double eta_halfwidth = 0.3;
  double slope_offset = 0;
  double ramp = 0.04;      // plateau ramp width in tau
  double amplitude = 0;    // tuned strength c
};

// One stage of the scheme: fingers with pairwise disjoint eta windows, all
// invariant for the stage's ellipsoid E(a, b).
struct StageMap {
  Rational a{3, 1}, b{3, 1};
  long long P = 1, Q = 1;  // reduced ratio a/b
  std::vector<Finger> fingers;
  ContactHamiltonian hamiltonian() const;  // sum of the finger Hamiltonians
  bool trivial() const { return fingers.empty(); }
};

// Time +-1 contact flow of the stage Hamiltonian (identity off the supports).
Vec4 stage_forward(const StageMap& m, const Vec4& z,
                   const num::IntegratorConfig& cfg = {});
Vec4 stage_backward(const StageMap& m, const Vec4& z,
                    const num::IntegratorConfig& cfg = {});

struct ConjugationState {
  int stage = 0;
  Rational a{3, 1}, b{3, 1};
  std::vector<StageMap> maps;           // applied first-to-last
  double tube_tau = 0.005;              // tau clearance kept around Gamma
  std::vector<double> stage_gaps;       // sampled C0 amplitude gap per stage
  std::vector<double> conformal_devs;   // worst |e^L - 1| per stage
  std::vector<double> landing_errors;   // worst |tau_land - tau_target| per stage
};

ConjugationState initial_state(const Rational& a0, const Rational& b0);

struct StagePlan {
  Rational next_a, next_b;
  std::vector<double> ring_taus;      // fibers to transport; empty -> identity
  double tau_target = 0.5;
  double window_fraction = 0.42;      // eta half-width / window spacing
  double landing_tol = 0.005;
  double budget = -1;                 // < 0 -> default 2^{-stage}
  int budget_samples = 96;
};

// One step of the scheme for the current (a, b): build the stage map, tune
// each finger amplitude until the marked fiber lands within landing_tol of
// the target torus, measure the conformal deviation of the flow and the
// sampled C0 gap between the pulled-back amplitudes before and after the
// stage (including the rational update), then append the map and switch to
// the next rationals.  Throws with the measured gap when the budget fails.
ConjugationState advance_stage(const ConjugationState& s, const StagePlan& plan);

// Reeb flow of the conjugated form: stage maps forward, exact E(a, b) flow
// for time t, stage maps back.
Vec4 conjugated_flow(const ConjugationState& s, double t, const Vec4& z,
                     const num::IntegratorConfig& cfg = {});

// Amplitude h of the pulled-back form (composition of all stage maps applied
// to eps_{a,b}), via the chained conformal factors along the stage flows.
double pullback_amplitude(const ConjugationState& s, const Vec4& z);

struct DensityCertificate {
  double eps = 0;
  double t_max = 0;
  std::size_t n_samples = 0;
  std::vector<Vec4> centers;
  std::vector<double> min_dist;  // per center, to the sampled orbit
  std::vector<char> covered;
  double worst_gap = 0;          // max over centers of min_dist
  bool passes = false;
};

// Sample the conjugated Reeb orbit through z0 on [0, t_max] (exact ellipsoid
// flow in the conjugating frame, stage maps pulled back per sample) and check
// that the ball of radius eps around each of grid_size quasi-uniform centers
// meets the sample set.
DensityCertificate epsilon_density(const ConjugationState& s, const Vec4& z0,
                                   double t_max, double eps,
                                   int grid_size = 500, double dt = 0.19);

// Closed-form short-orbit census for the conjugated flow: conjugation
// preserves periods and orbits, every E(a, b) orbit off the axis circles
// closes exactly at the common period T, and the stage maps fix the tube
// around Gamma, so off that tube no closed orbit has period <= T - 1; the
// two axis orbits keep periods a and b.
struct OrbitCensus {
  double common_period = 0;
  double ceiling = 0;          // common_period - 1
  double axis_periods[2] = {0, 0};
  bool no_short_orbits_off_tube = false;
};
OrbitCensus short_orbit_census(const ConjugationState& s);

// Checkpoints: full stage history (exact rationals, finger parameters,
// measured diagnostics) as JSON, for deterministic resume.
std::string to_checkpoint(const ConjugationState& s);
ConjugationState state_from_checkpoint(const std::string& text);
void save_checkpoint(const ConjugationState& s, const std::string& path);
ConjugationState load_checkpoint(const std::string& path);

struct SchemeOptions {
  double eps = 0.2;
  int grid_size = 500;
  double t_max = 6003;         // full common period of the final rationals
  double dt = 0.19;
  std::string checkpoint_dir;  // empty -> no checkpoint files
};

struct SchemeReport {
  ConjugationState state;
  DensityCertificate density;
  OrbitCensus census;
  Vec4 orbit_seed;
};

// The pinned three-stage experiment: rationals (3,3) -> (63/20, 3) ->
// (123/40, 3) -> (6003/2000, 3), eight fibers transported onto the torus
// |z1|^2 = 1/2 in the middle stage, then the density certificate for the
// conjugated orbit through the free part of the target torus.
SchemeReport default_three_stage_run(const SchemeOptions& opts = {});

}  // namespace caplab::ak
