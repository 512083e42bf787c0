#pragma once
// Reeb dynamics for contact forms alpha = g * alpha0 on S^3: the Reeb vector
// field obtained from the 2-homogeneous defining Hamiltonian of the boundary
// of A_f (f = sqrt g) pulled back radially, closed-orbit search with
// certification, systole, contact volume and systolic ratio.

#include "caplab/domains.hpp"
#include "caplab/numerics.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace caplab::reeb {

using dom::ContactAmplitude;
using num::Vec4;

// Reeb field of g * alpha0 on S^3:
//   R(z) = (1/g) * (2 i z - i w + <z, i w> z),  w = grad of log g (tangential).
std::function<Vec4(const Vec4&)> reeb_field(const ContactAmplitude& amp);

// Reeb flow map (adaptive integration with per-step renormalization to S^3).
Vec4 reeb_flow(const ContactAmplitude& amp, double t, const Vec4& z,
               const num::IntegratorConfig& cfg = {});

// Action integral of alpha along the Reeb trajectory  (equals elapsed time
// when the flow is exact; used as a reparametrization consistency check).
double orbit_action(const ContactAmplitude& amp, double period, const Vec4& z,
                    const num::IntegratorConfig& cfg = {});

struct ClosedReebOrbit {
  Vec4 basepoint;
  double period = 0;       // = action, since alpha(R) = 1
  double residual = 0;
  bool fiber_flag = false;  // orbit is an alpha0-Reeb (Hopf) fiber
  bool certified = false;   // closure reproduced at 10x tighter tolerance
};

struct SearchConfig {
  double period_ceiling = 4 * num::pi;
  double tol = 1e-9;
  int seed_beta = 5;   // seed grid over Hopf tori
  int seed_angles = 4;
  num::IntegratorConfig integ;
};

struct SystolicReport {
  enum class Status { ok, inconclusive };
  Status status = Status::inconclusive;
  double systole = 0;
  double contact_volume = 0;
  double ratio = 0;  // systole^2 / contact_volume (n = 2)
  std::vector<ClosedReebOrbit> orbits;
};

// Certified closed orbit near a seed (refinement + re-integration at tol/10).
std::optional<ClosedReebOrbit> certified_orbit(const ContactAmplitude& amp,
                                               const Vec4& seed,
                                               double period_guess, double tol);

// Minimal certified closed-orbit period below the search ceiling.  For
// invariant amplitudes the exact route pi * min(g) is used to place the seed
// and cross-validate; for general amplitudes a seed-grid search is run and
// "inconclusive" is reported when nothing certifies below the ceiling.
SystolicReport systole(const ContactAmplitude& amp, const SearchConfig& cfg,
                       const num::S3Rule& rule);

// Integral of g^2 over (S^3, alpha0 ^ d alpha0).
double contact_volume(const ContactAmplitude& amp, const num::S3Rule& rule);

SystolicReport systolic_ratio(const ContactAmplitude& amp,
                              const SearchConfig& cfg, const num::S3Rule& rule);

// Extremes of g over S^3 (grid scan + 1-d polish along beta for invariant
// amplitudes; includes the poles).
std::pair<double, double> amplitude_extremes(const ContactAmplitude& amp,
                                             const num::S3Rule& rule);

}  // namespace caplab::reeb
