#include "caplab/domains.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace caplab::dom {

using num::pi;

Vec4 Field3::grad(const Vec4& z) const {
  if (has_gradient()) return gradient(z);
  auto ext = [this](const Vec4& p) { return value(Vec4(p / p.norm())); };
  return num::fd_grad4(ext, z);
}

double volume(const Ellipsoid& e) {
  double prod = 1, fact = 1;
  for (std::size_t i = 0; i < e.a.size(); ++i) {
    if (e.a[i] <= 0) throw std::invalid_argument("ellipsoid parameter <= 0");
    prod *= e.a[i];
    fact *= static_cast<double>(i + 1);
  }
  return prod / fact;
}

double volume(const Polydisk& p) {
  if (p.a <= 0 || p.b <= 0) throw std::invalid_argument("polydisk parameter <= 0");
  return p.a * p.b;
}

double volume(const StarShapedDomain& d, const num::S3Rule& rule) {
  if (d.n != 2)
    throw std::invalid_argument(
        "quadrature volume implemented for complex dimension 2 only");
  double I = num::integrate_s3(
      [&](const Vec4& z) {
        double f = d.f.value(z);
        return f * f * f * f;
      },
      rule);
  return 0.5 * I;
}

ContactAmplitude ellipsoid_amplitude(double a, double b) {
  if (a <= 0 || b <= 0) throw std::invalid_argument("ellipsoid parameter <= 0");
  ContactAmplitude amp;
  double ca = pi / a, cb = pi / b;
  amp.g.value = [ca, cb](const Vec4& z) {
    double n2 = z.squaredNorm();
    double q = ca * (z[0] * z[0] + z[1] * z[1]) + cb * (z[2] * z[2] + z[3] * z[3]);
    return n2 / q;
  };
  // Gradient of the 0-homogeneous extension |z|^2 / Q(z) (tangent on |z|=1).
  amp.g.gradient = [ca, cb](const Vec4& z) {
    double n2 = z.squaredNorm();
    double q = ca * (z[0] * z[0] + z[1] * z[1]) + cb * (z[2] * z[2] + z[3] * z[3]);
    Vec4 gq(2 * ca * z[0], 2 * ca * z[1], 2 * cb * z[2], 2 * cb * z[3]);
    return Vec4((2.0 / q) * z - (n2 / (q * q)) * gq);
  };
  amp.invariant = true;
  return amp;
}

StarShapedDomain domain_from_amplitude(const ContactAmplitude& amp) {
  StarShapedDomain d;
  d.n = 2;
  auto g = amp.g;
  d.f.value = [g](const Vec4& z) { return std::sqrt(g.value(z)); };
  if (g.has_gradient())
    d.f.gradient = [g](const Vec4& z) {
      return Vec4(g.gradient(z) / (2 * std::sqrt(g.value(z))));
    };
  return d;
}

StarShapedDomain scaled(const StarShapedDomain& d, double r) {
  if (r <= 0) throw std::invalid_argument("scale factor <= 0");
  StarShapedDomain s;
  s.n = d.n;
  auto f = d.f;
  s.f.value = [f, r](const Vec4& z) { return r * f.value(z); };
  if (f.has_gradient())
    s.f.gradient = [f, r](const Vec4& z) { return Vec4(r * f.gradient(z)); };
  return s;
}

ContactAmplitude constant_amplitude(double c) {
  if (c <= 0) throw std::invalid_argument("amplitude must be positive");
  ContactAmplitude amp;
  amp.g.value = [c](const Vec4&) { return c; };
  amp.g.gradient = [](const Vec4&) { return Vec4::Zero().eval(); };
  amp.invariant = true;
  return amp;
}

double fiber_oscillation(const Field3& g, const num::S3Rule& rule) {
  double worst = 0;
  for (int i = 0; i < rule.n_beta; ++i)
    for (int j = 0; j < rule.n_chi; ++j) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (int k = 0; k < rule.n_fiber; ++k) {
        double v = g.value(rule.pts[rule.index(i, j, k)]);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      worst = std::max(worst, hi - lo);
    }
  return worst;
}

std::string describe(const Ellipsoid& e) {
  std::ostringstream os;
  os << "ellipsoid";
  for (double ai : e.a) os << ' ' << ai;
  return os.str();
}

std::string describe(const Polydisk& p) {
  std::ostringstream os;
  os << "polydisk " << p.a << ' ' << p.b;
  return os.str();
}

std::string describe(const StarShapedDomain& d) {
  std::ostringstream os;
  os << "star-shaped n=" << d.n << " (amplitude sample table)";
  return os.str();
}

}  // namespace caplab::dom
