#pragma once
// Domain representations: ellipsoids and polydiscs with exact volume formulas,
// star-shaped domains A_f given by an amplitude f on S^3, and contact
// amplitudes g (alpha = g * alpha0, g = f^2).

#include "caplab/numerics.hpp"

#include <functional>
#include <string>
#include <vector>

namespace caplab::dom {

using num::C;
using num::Vec4;

struct Ellipsoid {
  std::vector<double> a;  // capacity parameters, all > 0
};

struct Polydisk {
  double a = 1, b = 1;
};

// Scalar field on S^3.  The optional gradient is the ambient gradient of the
// 0-homogeneous extension (automatically tangent to the sphere).
struct Field3 {
  std::function<double(const Vec4&)> value;
  std::function<Vec4(const Vec4&)> gradient;  // may be empty
  bool has_gradient() const { return static_cast<bool>(gradient); }
  // Tangential gradient: analytic if available, else central differences of
  // the 0-homogeneous extension.
  Vec4 grad(const Vec4& z) const;
};

struct ContactAmplitude {
  Field3 g;                // conformal factor, alpha = g * alpha0, g > 0
  bool invariant = false;  // constant along alpha0-Reeb (Hopf) fibers
};

struct StarShapedDomain {
  int n = 2;   // complex dimension; quadrature volume supports n = 2 only
  Field3 f;    // amplitude: A_f = { r z : 0 <= r < f(z), z in S^{2n-1} }
};

double volume(const Ellipsoid& e);
double volume(const Polydisk& p);
// (1/n!) * Integral of f^{2n} over (S^3, alpha0 ^ d(alpha0)); n = 2 only.
double volume(const StarShapedDomain& d, const num::S3Rule& rule);

// g(z) = (pi |z1|^2 / a + pi |z2|^2 / b)^{-1}, with analytic gradient.
ContactAmplitude ellipsoid_amplitude(double a, double b);

// Amplitude view of the domain whose boundary carries g * alpha0 (f = sqrt g).
StarShapedDomain domain_from_amplitude(const ContactAmplitude& amp);

// r . A_f: amplitude scaled by r (volume scales by r^{2n}).
StarShapedDomain scaled(const StarShapedDomain& d, double r);

// Constant amplitude (round sphere for c = 1).
ContactAmplitude constant_amplitude(double c);

// Max over base points of (max - min over the fiber) of g on the rule's grid.
double fiber_oscillation(const Field3& g, const num::S3Rule& rule);

// Structured one-line text records (kind + parameters / sample table info).
std::string describe(const Ellipsoid& e);
std::string describe(const Polydisk& p);
std::string describe(const StarShapedDomain& d);

}  // namespace caplab::dom
