#pragma once
// S^1-fiber averaging on the Hopf product grid, short closed Reeb orbits from
// critical fibers of invariant amplitudes, the closed-form spectral invariants
// c0/c1, Banach-Mazur distance and conformal geodesics near the round form,
// and the systolic-ratio corollary check.

#include "caplab/domains.hpp"
#include "caplab/numerics.hpp"
#include "caplab/reeb.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace caplab::spectral {

using num::Vec4;

// A function on the Hopf base: the result of fiber averaging.  Averaging is
// the exact mean over the s-grid of the product rule, so it is idempotent on
// the nodes.
struct AveragedField {
  int n_beta = 0, n_chi = 0;
  std::vector<double> beta, chi;    // base grids
  std::vector<double> base_values;  // [i * n_chi + j]
  double fiber_period = num::pi;
  double at(int i, int j) const { return base_values[i * n_chi + j]; }
  // Lookup by point: recovers (beta, chi) from z and returns the stored base
  // value; exact on the product-grid nodes (throws off-grid).
  std::function<double(const Vec4&)> as_field() const;
};

AveragedField fiber_average(const std::function<double(const Vec4&)>& field,
                            const num::S3Rule& rule);
AveragedField fiber_average(const AveragedField& field,
                            const num::S3Rule& rule);

struct ShortOrbitCertificate {
  Vec4 basepoint;
  double base_value = 0;        // g at the critical fiber
  double predicted_period = 0;  // pi * g
  double integrated_period = 0;
  double closure_residual = 0;
  bool certified = false;
};

struct ShortOrbitConfig {
  int n_beta = 48;
  int n_chi = 48;
  double grad_tol = 1e-7;   // |grad g| threshold for a critical fiber
  double cert_tol = 1e-6;   // period / closure certification tolerance
  int max_certificates = 12;
  double degenerate_fraction = 0.3;  // grid fraction flagging a critical set
};

struct ShortOrbitReport {
  std::vector<ShortOrbitCertificate> orbits;
  bool degenerate_critical_set = false;  // beyond isolated points: sampled
};

// Critical points of the base function of an S^1-invariant amplitude; each
// critical fiber is a closed Reeb orbit of period pi * g, certified by
// integration.
ShortOrbitReport short_orbits_from_average(const dom::ContactAmplitude& amp,
                                           const ShortOrbitConfig& cfg = {});

// c0 = pi * min g, c1 = pi * max g (invariant amplitudes only).
std::pair<double, double> spectral_c0_c1(const dom::ContactAmplitude& amp,
                                         const num::S3Rule& rule);
// Closed-form path for ellipsoids: (min(a,b), max(a,b)).
std::pair<double, double> spectral_c0_c1(const dom::Ellipsoid& e);

enum class Status { certified, inconclusive };

struct BMReport {
  Status status = Status::inconclusive;
  double t_min = 0, t_max = 0;  // short-orbit periods
  double distance = 0;          // log(t_max / t_min)
  double osc_log_g = 0;         // grid oscillation bound (distance <= this)
  std::vector<dom::ContactAmplitude> geodesic;  // e^{t log g}, t in [0,1]
};

struct BMConfig {
  int geodesic_steps = 5;
  double cert_tol = 1e-6;
  double near_zoll_osc = 0.2;  // validated regime, reported not enforced
  int n_beta = 48;
  int n_chi = 48;
};

// Distance to the round form: log(T_max/T_min) from certified short-orbit
// periods.  Exact path for invariant amplitudes (extrema sit on critical
// fibers); non-invariant amplitudes come back inconclusive.
BMReport bm_distance_near_zoll(const dom::ContactAmplitude& amp,
                               const BMConfig& cfg = {});
// Closed form for ellipsoids: log(max(a,b)/min(a,b)).
double bm_distance(const dom::Ellipsoid& e);

// Conformal geodesic samples gamma(t_j) = e^{t_j f} g0 with f = log(target),
// g0 = 1, t_j = j/(steps-1).
std::vector<dom::ContactAmplitude> geodesic_path(
    const dom::ContactAmplitude& target, int steps);

double grid_oscillation(const std::function<double(const Vec4&)>& f,
                        const num::S3Rule& rule);

struct TelescopingReport {
  std::vector<double> segments;  // osc((t_j - t_{j-1}) f) per segment
  double segment_sum = 0;
  double total_osc = 0;  // osc(f); equals segment_sum for any partition
};

TelescopingReport telescoping_check(const std::function<double(const Vec4&)>& f,
                                    const std::vector<double>& partition,
                                    const num::S3Rule& rule);

struct CorollaryReport {
  Status status = Status::inconclusive;
  double ratio = 0;      // sys^2 / volume
  double osc_g = 0;      // max g - min g
  bool near_zoll = false;
  bool bound_ok = false;    // ratio <= 1 within tolerance
  bool equality = false;    // |ratio - 1| below tolerance
  bool constant_g = false;  // rigidity: equality only for constant g
};

CorollaryReport systolic_corollary_check(const dom::ContactAmplitude& amp,
                                         double equality_tol = 1e-9);

}  // namespace caplab::spectral
