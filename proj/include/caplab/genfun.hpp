#pragma once
// Midpoint generating functions for near-identity compactly supported
// symplectomorphisms of C:
//   i (z - phi(z)) = grad S ( (z + phi(z)) / 2 ),
// the Hamilton-Jacobi consistency check for families S_t, and the flattening
// construction that deforms a Hamiltonian to one quadratically small at a
// zero-action fixed point while keeping its time-1 map.
//
// Convention: in this module Hamiltonians K generate zdot = + i grad K; the
// disk-flow convention elsewhere is zdot = - i grad H, so the same isotopy is
// described by K = -H.

#include "caplab/lift.hpp"
#include "caplab/numerics.hpp"

#include <functional>
#include <memory>

namespace caplab::gen {

using num::C;

using MapFn = std::function<C(C)>;

struct GeneratingFunction {
  std::function<double(C)> value;
  std::function<C(C)> gradient;  // d_x S + i d_y S; FD fallback when empty
  double support_radius = 0.9;
  double c2_norm = 0;  // measured sup of |S|, |grad S|, |D^2 S| on a grid

  double operator()(C z) const { return value(z); }
  C grad(C z) const;
};

// Sampled C^2 norm (sup of value, gradient and second differences).
double measure_c2(const std::function<double(C)>& S, double radius,
                  int n_r = 16, int n_theta = 12);

// Reconstruct S from the map: gradient by inverting the midpoint map
// z -> (z + phi(z))/2 (fixed-point/Newton per evaluation), value by a line
// integral from a basepoint outside the support (where S = 0).  Throws when
// the midpoint inversion fails (map not near-identity).
GeneratingFunction generating_function_of(const MapFn& map,
                                          double support_radius,
                                          C basepoint = C(0, 0));

// Solve the defining identity for phi(z) by Newton iteration per point.
MapFn map_of_generating_function(const GeneratingFunction& S);

// Sup over a grid of | i(z - phi(z)) - grad S((z + phi(z))/2) |.
double genfun_residual(const MapFn& map, const GeneratingFunction& S,
                       double radius, int n_r = 12, int n_theta = 12);

// Flow of zdot = + i grad K from t0 to t1 (this module's sign convention).
C isotopy_flow(const std::function<double(double, C)>& K, double t0, double t1,
               C z, const num::IntegratorConfig& cfg = {});

// Sup over a grid of | d/dt S_t(z) - K(t, z + (i/2) grad S_t(z)) |; d/dt by
// central differences over the family.
double hj_residual(const std::function<GeneratingFunction(double)>& family,
                   const std::function<double(double, C)>& K, double radius,
                   int n_t = 8, int n_r = 8, int n_theta = 8,
                   double dt = 1e-4);

// ---------------------------------------------------------------------------
// Flattening near a zero-action fixed point
// ---------------------------------------------------------------------------

struct FlattenConfig {
  int n_r = 32;        // radial nodes of the internal interpolants
  int n_theta = 17;    // angular nodes (odd)
  int n_t = 13;        // Chebyshev-Lobatto time nodes
  double t_margin = 0.04;   // H must vanish for t within this of 0 and 1
  double fixed_point_tol = 1e-9;
};

struct FlattenFamily {
  // member(lambda), lambda in [0,1]: the deformed Hamiltonians, disk-flow
  // convention, all sharing the time-1 map of member(0) = the input.
  std::function<lift::TimePeriodicHamiltonian(double)> member;
  double r = 0;       // deformation localized inside this radius
  double eps = 0;     // smallness budget
  double h_c0 = 0;    // measured sup |H|
  double s1_c0 = 0;   // measured sup |S_1|
  double s1_c2 = 0;   // measured C^2 norm of S_1
};

// Deform H (which must vanish for t near 0 and 1, fix 0 with zero action, and
// be C^2-small) through H^lambda with: H^0 = H; H^lambda = H outside radius r;
// common time-1 map; |H^lambda| < eps; |H^1(t,z)| <= eps |z|^2.  Throws with
// the measured norms when the smallness requirements fail; Hamiltonians not
// vanishing near t = 0, 1 are rejected (reduce them first with
// lift::reparametrize_in_time).
FlattenFamily flatten_near_fixed_point(const lift::TimePeriodicHamiltonian& H,
                                       double r, double eps,
                                       const FlattenConfig& cfg = {});

}  // namespace caplab::gen
